use std::fmt::Write as _;

use serde::Serialize;

use super::{per_period_sup, AnalysisError, ConvergenceReport, DEFAULT_CONVERGENCE_TOL};
use crate::engine::{integrate, StepControl, Trajectory};
use crate::model::{validation_window, HistorySpec, ModelParams, VALIDATION_SAMPLES};
use crate::output::fmt_f64;

/// Relative size below which differences of two runs are rounding noise.
const NOISE_FLOOR_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionOptions {
    pub tol: f64,
}

impl Default for AttractionOptions {
    fn default() -> Self {
        AttractionOptions {
            tol: DEFAULT_CONVERGENCE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub report: ConvergenceReport,
}

pub const CONVERGENCE_CSV_HEADER: &str = "i,j,sup_diff_last_period,decay_rate_estimate,converged";

impl PairReport {
    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{}",
            self.i,
            self.j,
            fmt_f64(self.report.sup_diff_last_period),
            self.report
                .decay_rate_estimate
                .map(fmt_f64)
                .unwrap_or_default(),
            self.report.converged
        );
        s
    }
}

/// The two initial functions used by sweeps: constant `0.5 k_low` and
/// constant `2 K_high`, bracketing the carrying capacity.
pub fn standard_histories(params: &ModelParams) -> [HistorySpec; 2] {
    let (start, length) = validation_window(params);
    let (k_lo, k_hi) = params.k.grid_extrema(start, length, VALIDATION_SAMPLES);
    [
        HistorySpec::constant(0.5 * k_lo),
        HistorySpec::constant(2.0 * k_hi),
    ]
}

/// Integrates every history for `horizon_periods` common periods and
/// compares each pair over the final period.
pub fn verify_attraction(
    params: &ModelParams,
    histories: &[HistorySpec],
    control: &StepControl,
    horizon_periods: usize,
    opts: AttractionOptions,
) -> Result<Vec<PairReport>, AnalysisError> {
    if histories.len() < 2 {
        return Err(AnalysisError::InvalidInput(
            "at least two histories are required".into(),
        ));
    }
    if horizon_periods == 0 {
        return Err(AnalysisError::InvalidInput(
            "horizon must be at least one period".into(),
        ));
    }
    let period = params.common_period()?;
    let t_end = horizon_periods as f64 * period;
    let runs: Vec<Trajectory> = histories
        .iter()
        .enumerate()
        .map(|(index, h)| {
            integrate(params, h, t_end, control)
                .map_err(|source| AnalysisError::Run { index, source })
        })
        .collect::<Result<_, _>>()?;

    let mut out = Vec::new();
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            out.push(PairReport {
                i,
                j,
                report: compare(&runs[i], &runs[j], period, opts.tol)?,
            });
        }
    }
    Ok(out)
}

fn compare(
    u: &Trajectory,
    v: &Trajectory,
    period: f64,
    tol: f64,
) -> Result<ConvergenceReport, AnalysisError> {
    let per = per_period_sup(u, period, |t, x| Ok(x - v.eval(t)?))?;
    let scale = u
        .values()
        .iter()
        .chain(v.values())
        .fold(1.0_f64, |m, &x| m.max(x.abs()));
    Ok(ConvergenceReport::from_per_period(
        per,
        period,
        NOISE_FLOOR_REL * scale,
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_histories_give_zero() {
        let p = ModelParams::constant(2.0, 1.0, 2.0, 1.0, 0.5);
        let h = HistorySpec::constant(0.7);
        let r = verify_attraction(
            &p,
            &[h.clone(), h],
            &StepControl::default(),
            10,
            AttractionOptions::default(),
        )
        .unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].report.sup_diff_last_period, 0.0);
        assert!(r[0].report.converged);
        assert_eq!(r[0].report.decay_rate_estimate, None);
    }

    #[test]
    fn needs_two_histories() {
        let p = ModelParams::constant(2.0, 1.0, 2.0, 1.0, 0.5);
        let err = verify_attraction(
            &p,
            &[HistorySpec::constant(1.0)],
            &StepControl::default(),
            10,
            Default::default(),
        );
        assert!(matches!(err, Err(AnalysisError::InvalidInput(_))));
    }

    #[test]
    fn failing_run_is_named() {
        let p = ModelParams::constant(1.0, 30.0, 2.0, 1.0, 0.5);
        let hs = [HistorySpec::constant(1.0), HistorySpec::constant(2.0)];
        let err = verify_attraction(&p, &hs, &StepControl::default(), 40, Default::default())
            .unwrap_err();
        assert!(matches!(err, AnalysisError::Run { index: 0, .. }));
        assert!(err.is_overflow());
    }

    #[test]
    fn standard_pair_brackets_capacity() {
        let mut p = ModelParams::constant(2.0, 1.0, 2.0, 1.0, 0.5);
        p.k = crate::model::CoefficientSpec::sinusoid(2.0, 0.5, 1.0, 0.0);
        let [lo, hi] = standard_histories(&p);
        assert!((lo.n0 - 0.75).abs() < 1e-9);
        assert!((hi.n0 - 5.0).abs() < 1e-9);
    }
}
