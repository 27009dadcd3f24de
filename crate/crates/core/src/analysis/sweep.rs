use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{standard_histories, verify_attraction, AnalysisError, AttractionOptions};
use crate::conditions::{
    check_equilibrium_attraction, check_global_attraction, check_local_stability,
    DELAY_INTEGRAL_NAME, LINEARIZED_NAME, RATE_INTEGRAL_NAME,
};
use crate::engine::StepControl;
use crate::model::{CoefficientSpec, DelaySpec, ModelParams, ProportionalParams};
use crate::output::{csv_field, fmt_f64};
use crate::report::{ConditionReport, Verdict};

/// Parameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Gamma,
    /// Replaces the delay by a constant lag.
    Lag,
    /// Amplitude of `a(t)` for general models and of `r(t)` for
    /// proportional ones; the coefficient must be constant or sinusoidal.
    Amplitude,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma",
            SweepParam::Lag => "lag",
            SweepParam::Amplitude => "amplitude",
        }
    }
}

/// `count` evenly spaced values on `[min, max]`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.max
                    } else {
                        self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }

    fn check(&self) -> Result<(), AnalysisError> {
        let name = self.param.name();
        if self.count == 0 {
            return Err(AnalysisError::InvalidInput(format!(
                "{name} axis needs at least one point"
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(AnalysisError::InvalidInput(format!(
                "{name} axis range [{}, {}] is not a finite interval",
                self.min, self.max
            )));
        }
        let ok = match self.param {
            SweepParam::Gamma => self.min > 0.0,
            SweepParam::Lag | SweepParam::Amplitude => self.min >= 0.0,
        };
        if !ok {
            return Err(AnalysisError::InvalidInput(format!(
                "{name} axis minimum {} is out of range",
                self.min
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepBase {
    Model(ModelParams),
    Proportional(ProportionalParams),
}

impl SweepBase {
    fn with(&self, param: SweepParam, value: f64) -> Result<SweepBase, AnalysisError> {
        let mut out = self.clone();
        match (&mut out, param) {
            (SweepBase::Model(p), SweepParam::Gamma) => p.gamma = value,
            (SweepBase::Proportional(p), SweepParam::Gamma) => p.gamma = value,
            (SweepBase::Model(p), SweepParam::Lag) => p.delay = DelaySpec::constant(value),
            (SweepBase::Proportional(p), SweepParam::Lag) => p.delay = DelaySpec::constant(value),
            (SweepBase::Model(p), SweepParam::Amplitude) => p.a = with_amplitude(&p.a, value)?,
            (SweepBase::Proportional(p), SweepParam::Amplitude) => {
                p.r = with_amplitude(&p.r, value)?
            }
        }
        Ok(out)
    }

    fn model(&self) -> ModelParams {
        match self {
            SweepBase::Model(p) => p.clone(),
            SweepBase::Proportional(p) => p.to_model(),
        }
    }
}

/// A constant coefficient becomes a unit-period sinusoid around its value.
fn with_amplitude(
    spec: &CoefficientSpec,
    amplitude: f64,
) -> Result<CoefficientSpec, AnalysisError> {
    match spec {
        CoefficientSpec::Constant { value } => {
            Ok(CoefficientSpec::sinusoid(*value, amplitude, 1.0, 0.0))
        }
        CoefficientSpec::Sinusoid {
            mean,
            period,
            phase,
            ..
        } => Ok(CoefficientSpec::sinusoid(*mean, amplitude, *period, *phase)),
        _ => Err(AnalysisError::InvalidInput(
            "amplitude axis needs a constant or sinusoid coefficient".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub control: StepControl,
    pub horizon_periods: usize,
    pub tol: f64,
    /// Worker threads; cells run concurrently, each cell sequentially.
    pub jobs: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            control: StepControl::default(),
            horizon_periods: super::DEFAULT_HORIZON_PERIODS,
            tol: super::DEFAULT_CONVERGENCE_TOL,
            jobs: 1,
        }
    }
}

/// Outcome of the attraction run of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Empirical {
    Converged,
    NotConverged,
    Overflow,
    Error,
}

impl Empirical {
    pub fn as_str(self) -> &'static str {
        match self {
            Empirical::Converged => "converged",
            Empirical::NotConverged => "not_converged",
            Empirical::Overflow => "overflow",
            Empirical::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub i: usize,
    pub j: usize,
    pub x1: f64,
    pub x2: f64,
    pub delay_integral_quantity: f64,
    pub delay_integral_verdict: Verdict,
    pub global_verdict: Verdict,
    pub rate_integral: Option<(f64, Verdict)>,
    pub linearized: Option<(f64, Verdict)>,
    pub empirical: Empirical,
    /// Sup-difference of the standard pair over the final period; NaN when
    /// the run did not complete.
    pub sup_diff: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axes: [SweepAxis; 2],
    /// Row-major: `i` indexes the first axis, `j` the second.
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn header(&self) -> String {
        format!(
            "i,j,{},{},delay_integral_quantity,delay_integral_verdict,global_verdict,rate_integral_quantity,rate_integral_verdict,\
             linearized_quantity,linearized_verdict,empirical,sup_diff,error",
            self.axes[0].param.name(),
            self.axes[1].param.name()
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for r in &self.rows {
            let opt = |o: Option<(f64, Verdict)>| match o {
                Some((q, v)) => (fmt_f64(q), v.as_str()),
                None => (String::new(), ""),
            };
            let (q_rate, v_rate) = opt(r.rate_integral);
            let (q_lin, v_lin) = opt(r.linearized);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.i,
                r.j,
                fmt_f64(r.x1),
                fmt_f64(r.x2),
                fmt_f64(r.delay_integral_quantity),
                r.delay_integral_verdict,
                r.global_verdict,
                q_rate,
                v_rate,
                q_lin,
                v_lin,
                r.empirical.as_str(),
                fmt_f64(r.sup_diff),
                r.error.as_deref().map(csv_quote).unwrap_or_default()
            );
        }
        out
    }
}

/// CSV field on a single line.
fn csv_quote(s: &str) -> String {
    csv_field(&s.split_whitespace().collect::<Vec<_>>().join(" "))
}

fn entry_pair(report: &ConditionReport, name: &str) -> (f64, Verdict) {
    report
        .entry(name)
        .map(|e| (e.quantity, e.verdict))
        .unwrap_or((f64::NAN, Verdict::Fails))
}

/// Evaluates the conditions and the empirical attraction test on every
/// grid point. Cell failures are recorded in the row; the sweep itself
/// fails only on an invalid grid.
pub fn sweep(
    base: &SweepBase,
    axes: [SweepAxis; 2],
    opts: &SweepOptions,
) -> Result<SweepTable, AnalysisError> {
    axes[0].check()?;
    axes[1].check()?;
    if axes[0].param == axes[1].param {
        return Err(AnalysisError::InvalidInput(
            "sweep axes must vary different parameters".into(),
        ));
    }
    if opts.jobs == 0 {
        return Err(AnalysisError::InvalidInput(
            "jobs must be at least 1".into(),
        ));
    }
    // Reject incompatible axes before any work is scheduled.
    for axis in &axes {
        base.with(axis.param, axis.min)?;
    }
    let (v1, v2) = (axes[0].values(), axes[1].values());
    let cells: Vec<(usize, usize)> = (0..v1.len())
        .flat_map(|i| (0..v2.len()).map(move |j| (i, j)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| AnalysisError::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, j)| run_cell(base, &axes, i, j, v1[i], v2[j], opts))
            .collect::<Vec<_>>()
    });
    Ok(SweepTable { axes, rows })
}

fn run_cell(
    base: &SweepBase,
    axes: &[SweepAxis; 2],
    i: usize,
    j: usize,
    x1: f64,
    x2: f64,
    opts: &SweepOptions,
) -> SweepRow {
    let mut row = SweepRow {
        i,
        j,
        x1,
        x2,
        delay_integral_quantity: f64::NAN,
        delay_integral_verdict: Verdict::Fails,
        global_verdict: Verdict::Fails,
        rate_integral: None,
        linearized: None,
        empirical: Empirical::Error,
        sup_diff: f64::NAN,
        error: None,
    };
    let cell = match base
        .with(axes[0].param, x1)
        .and_then(|b| b.with(axes[1].param, x2))
    {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let model = cell.model();
    let t1 = check_global_attraction(&model);
    (row.delay_integral_quantity, row.delay_integral_verdict) =
        entry_pair(&t1, DELAY_INTEGRAL_NAME);
    row.global_verdict = t1.overall;
    if let SweepBase::Proportional(pp) = &cell {
        row.rate_integral = Some(entry_pair(
            &check_equilibrium_attraction(pp),
            RATE_INTEGRAL_NAME,
        ));
        row.linearized = Some(entry_pair(&check_local_stability(pp), LINEARIZED_NAME));
    }

    let histories = standard_histories(&model);
    let attraction = AttractionOptions { tol: opts.tol };
    match verify_attraction(
        &model,
        &histories,
        &opts.control,
        opts.horizon_periods,
        attraction,
    ) {
        Ok(pairs) => {
            let rep = &pairs[0].report;
            row.sup_diff = rep.sup_diff_last_period;
            row.empirical = if rep.converged {
                Empirical::Converged
            } else {
                Empirical::NotConverged
            };
        }
        Err(e) => {
            row.empirical = if e.is_overflow() {
                Empirical::Overflow
            } else {
                Empirical::Error
            };
            row.error = Some(e.to_string());
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axes() -> [SweepAxis; 2] {
        [
            SweepAxis {
                param: SweepParam::Gamma,
                min: 0.5,
                max: 1.0,
                count: 2,
            },
            SweepAxis {
                param: SweepParam::Lag,
                min: 0.1,
                max: 0.3,
                count: 3,
            },
        ]
    }

    #[test]
    fn axis_values_hit_both_ends() {
        let v = axes()[1].values();
        assert_eq!(v.len(), 3);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[2], 0.3);
    }

    #[test]
    fn rows_in_grid_order() {
        let base = SweepBase::Model(ModelParams::constant(2.0, 1.0, 2.0, 1.0, 0.5));
        let opts = SweepOptions {
            horizon_periods: 60,
            jobs: 3,
            ..Default::default()
        };
        let table = sweep(&base, axes(), &opts).unwrap();
        let idx: Vec<_> = table.rows.iter().map(|r| (r.i, r.j)).collect();
        assert_eq!(idx, vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]);
        for r in &table.rows {
            assert!((r.delay_integral_quantity - 2.0 * r.x1 * r.x2).abs() < 1e-12);
            assert_eq!(r.empirical, Empirical::Converged);
        }
        let csv = table.to_csv();
        assert!(csv.starts_with("i,j,gamma,lag,delay_integral_quantity"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn amplitude_needs_simple_coefficient() {
        let mut p = ModelParams::constant(2.0, 1.0, 2.0, 1.0, 0.5);
        p.a = CoefficientSpec::Fourier {
            period: 1.0,
            mean: 2.0,
            cos: vec![0.1],
            sin: vec![],
        };
        let mut ax = axes();
        ax[1].param = SweepParam::Amplitude;
        assert!(matches!(
            sweep(&SweepBase::Model(p), ax, &SweepOptions::default()),
            Err(AnalysisError::InvalidInput(_))
        ));
    }

    #[test]
    fn cell_errors_do_not_abort() {
        let base = SweepBase::Model(ModelParams::constant(1.0, 30.0, 2.0, 1.0, 0.5));
        let opts = SweepOptions {
            horizon_periods: 40,
            ..Default::default()
        };
        let table = sweep(&base, axes(), &opts).unwrap();
        assert_eq!(table.rows.len(), 6);
        for r in &table.rows {
            assert_eq!(r.empirical, Empirical::Overflow);
            assert!(r.sup_diff.is_nan());
            assert!(r.error.is_some());
        }
        assert_eq!(table.to_csv().lines().count(), 7);
    }

    #[test]
    fn quoting_flattens_lines() {
        assert_eq!(csv_quote("a, \"b\"\nc"), "\"a, \"\"b\"\" c\"");
        assert_eq!(csv_quote("plain\ntext"), "plain text");
    }
}
