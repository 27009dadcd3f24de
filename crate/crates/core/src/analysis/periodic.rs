use super::AnalysisError;
use crate::conditions::check_global_attraction;
use crate::engine::{integrate, StepControl, Trajectory};
use crate::model::{
    uniform_grid, validation_window, CoefficientSpec, HistorySpec, ModelParams, VALIDATION_SAMPLES,
};
use crate::output::two_column_csv;
use crate::report::Verdict;

/// Dense samples per period used for orbit extrema.
const EXTREMA_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicOptions {
    pub transient_periods: usize,
    pub tol: f64,
    /// Run even when the global-attraction conditions do not hold; the
    /// failed report is attached to the orbit as a warning.
    pub warn_and_proceed: bool,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        PeriodicOptions {
            transient_periods: 100,
            tol: 1e-6,
            warn_and_proceed: false,
        }
    }
}

/// One period `[start, start + period]` of a long run, with the distance
/// between that period and the one before it.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    /// The full run; the orbit is its final period.
    pub trajectory: Trajectory,
    pub start: f64,
    pub period: f64,
    /// `sup |N(t) - N(t - T)|` over mesh points of the final period.
    pub residual: f64,
    /// Length of the discarded transient in time units.
    pub transient_used: f64,
    pub converged: bool,
    pub warning: Option<String>,
}

impl PeriodicOrbit {
    pub fn end(&self) -> f64 {
        self.start + self.period
    }

    /// Orbit value at any time, extended periodically from the final period.
    pub fn eval(&self, t: f64) -> Result<f64, AnalysisError> {
        let phase = (t - self.start).rem_euclid(self.period);
        Ok(self.trajectory.eval(self.start + phase)?)
    }

    /// Mesh points of the final period.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.trajectory.window(self.start, self.end())
    }

    /// `(min, max)` of the orbit over `10^4` evenly spaced samples.
    pub fn extrema(&self) -> Result<(f64, f64), AnalysisError> {
        let samples = self
            .trajectory
            .sample(self.start, self.end(), EXTREMA_SAMPLES)?;
        Ok(samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| {
                (lo.min(v), hi.max(v))
            }))
    }

    /// Two-column `t,N` CSV of the final period.
    pub fn to_csv(&self) -> String {
        two_column_csv(("t", "N"), self.points())
    }
}

/// Constant initial function at the geometric mean of the carrying capacity
/// over one validation window.
pub fn initial_guess(params: &ModelParams) -> HistorySpec {
    if let CoefficientSpec::Constant { value } = params.k {
        return HistorySpec::constant(value);
    }
    let (start, length) = validation_window(params);
    let log_sum: f64 = uniform_grid(start, length, VALIDATION_SAMPLES)
        .map(|t| params.k.eval(t).ln())
        .sum();
    HistorySpec::constant((log_sum / VALIDATION_SAMPLES as f64).exp())
}

pub fn find_periodic_solution(
    params: &ModelParams,
    control: &StepControl,
    opts: PeriodicOptions,
) -> Result<PeriodicOrbit, AnalysisError> {
    find_periodic_solution_from(params, &initial_guess(params), control, opts)
}

/// Integrates from `guess` for `transient_periods + 1` common periods and
/// returns the final period. A residual above `opts.tol` is reported
/// through `converged`, not as an error.
pub fn find_periodic_solution_from(
    params: &ModelParams,
    guess: &HistorySpec,
    control: &StepControl,
    opts: PeriodicOptions,
) -> Result<PeriodicOrbit, AnalysisError> {
    if opts.transient_periods == 0 {
        return Err(AnalysisError::InvalidInput(
            "transient_periods must be at least 1".into(),
        ));
    }
    let conditions = check_global_attraction(params);
    let warning = if conditions.overall == Verdict::Holds {
        None
    } else if opts.warn_and_proceed {
        Some(conditions.to_text())
    } else {
        return Err(AnalysisError::Precondition(conditions.to_text()));
    };

    let period = params.common_period()?;
    let transient = opts.transient_periods as f64 * period;
    let t_end = transient + period;
    let trajectory = integrate(params, guess, t_end, control)?;
    let start = trajectory.end_time() - period;

    let mut residual: f64 = 0.0;
    for (t, v) in trajectory.window(start, t_end) {
        residual = residual.max((v - trajectory.eval(t - period)?).abs());
    }
    Ok(PeriodicOrbit {
        trajectory,
        start,
        period,
        residual,
        transient_used: transient,
        converged: residual < opts.tol,
        warning,
    })
}
