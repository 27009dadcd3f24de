use super::{per_period_sup, AnalysisError, ConvergenceReport};
use crate::conditions::check_local_stability;
use crate::engine::{integrate, integrate_linear, LinearHistory, StepControl};
use crate::model::{equilibrium, HistorySpec, ProportionalParams, VALIDATION_SAMPLES};
use crate::report::Verdict;

/// Relative perturbation of the equilibrium for the nonlinear run.
pub const PERTURBATION: f64 = 0.01;
/// Floor below which linear-run sups are treated as underflow.
const LINEAR_FLOOR: f64 = 1e-250;
/// Relative floor below which nonlinear deviations are rounding noise.
const NONLINEAR_FLOOR_REL: f64 = 1e-12;
/// Fit windows span at least this many maximal lags, enough to contain
/// half an oscillation of the linearized equation.
const WINDOW_LAGS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalStabilityOptions {
    pub tol: f64,
    /// Run even when the local-stability condition does not hold; the
    /// failed report is attached as a warning.
    pub warn_and_proceed: bool,
}

impl Default for LocalStabilityOptions {
    fn default() -> Self {
        LocalStabilityOptions {
            tol: super::DEFAULT_CONVERGENCE_TOL,
            warn_and_proceed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalStabilityReport {
    /// Decay of the linearized equation; distances are `|x|`.
    pub linear: ConvergenceReport,
    /// `|x(horizon)|`.
    pub linear_final: f64,
    /// Decay of `|N - N*|` from `N*(1 + 0.01)`.
    pub nonlinear: ConvergenceReport,
    /// `|N(horizon) - N*| / N*`.
    pub nonlinear_final_relative: f64,
    pub equilibrium: f64,
    pub warning: Option<String>,
}

/// Length of the windows over which per-window sups are taken: the
/// smallest multiple of the common period spanning [`WINDOW_LAGS`] lags.
fn fit_window(pp: &ProportionalParams, period: f64) -> f64 {
    let (_, max_lag) = pp.delay.lag_extrema(VALIDATION_SAMPLES);
    let k = (WINDOW_LAGS * max_lag / period).ceil().max(1.0);
    k * period
}

/// Integrates the linearized equation from the constant history `x0` and
/// the full model from `N*(1 + 0.01)` over `[0, horizon]`.
pub fn verify_local_stability(
    pp: &ProportionalParams,
    x0: f64,
    control: &StepControl,
    horizon: f64,
    opts: LocalStabilityOptions,
) -> Result<LocalStabilityReport, AnalysisError> {
    let conditions = check_local_stability(pp);
    let warning = if conditions.overall == Verdict::Holds {
        None
    } else if opts.warn_and_proceed {
        Some(conditions.to_text())
    } else {
        return Err(AnalysisError::Precondition(conditions.to_text()));
    };
    if !x0.is_finite() {
        return Err(AnalysisError::InvalidInput(format!(
            "perturbation must be finite, got {x0}"
        )));
    }
    let n_star = equilibrium(pp)?;
    let period = pp.common_period()?;
    let window = fit_window(pp, period);

    let r = pp.r.scaled(pp.linear_coefficient());
    let lin = integrate_linear(
        &r,
        &pp.delay,
        &LinearHistory::constant(x0),
        horizon,
        control,
    )?;
    let lin_per = per_period_sup(&lin, window, |_, x| Ok(x))?;
    let linear_final = lin.eval(lin.end_time())?.abs();
    let linear = ConvergenceReport::from_per_period(lin_per, window, LINEAR_FLOOR, opts.tol);

    let model = pp.to_model();
    let start = n_star * (1.0 + PERTURBATION);
    let non = integrate(&model, &HistorySpec::constant(start), horizon, control)?;
    let non_per = per_period_sup(&non, window, |_, n| Ok(n - n_star))?;
    let nonlinear_final_relative = (non.eval(non.end_time())? - n_star).abs() / n_star;
    let nonlinear =
        ConvergenceReport::from_per_period(non_per, window, NONLINEAR_FLOOR_REL * n_star, opts.tol);

    Ok(LocalStabilityReport {
        linear,
        linear_final,
        nonlinear,
        nonlinear_final_relative,
        equilibrium: n_star,
        warning,
    })
}
