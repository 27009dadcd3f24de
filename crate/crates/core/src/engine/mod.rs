//! Method-of-steps integration of scalar delay equations with dense output.
//!
//! The nonlinear fishery model is advanced in log coordinates `x = ln N`,
//! which keeps every numerical solution positive. The linear comparison
//! equation `x'(t) = -r(t) x(θ(t))` is advanced in raw coordinates.
//!
//! Steps are classical four-stage Runge-Kutta with a nominal fixed size,
//! shortened so the mesh lands on the propagated discontinuities
//! `ξ_0 = 0`, `θ(ξ_{k+1}) = ξ_k`. Delayed values come from the initial
//! function for `θ(t) < 0` and otherwise from cubic Hermite interpolants
//! built from endpoint values and right-hand-side slopes. When `θ(t)`
//! falls inside the step being taken, the step is solved by fixed-point
//! iteration on its own interpolant and halved if that fails to settle.

mod control;
mod stepper;
mod trajectory;

pub use control::{StepControl, MAX_DEFAULT_STEP, MIN_DEFAULT_STEP};
pub use trajectory::{dense_eval, Scale, Trajectory};

use thiserror::Error;

use crate::model::{
    self, CoefficientSpec, DelaySpec, HistorySpec, ModelError, ModelParams, VALIDATION_SAMPLES,
};
use crate::report::Verdict;
use stepper::{method_of_steps, DelaySystem};

/// Log-coordinate guard: `exp(±700)` is near the edge of `f64`.
pub const LOG_STATE_BOUND: f64 = 700.0;
const LINEAR_STATE_BOUND: f64 = 1e300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("blow-up/extinction beyond representable range at t = {time}")]
    Overflow { time: f64 },
    #[error("t = {t} is beyond the trajectory end {end}")]
    OutOfRange { t: f64, end: f64 },
    #[error("vanishing-lag iteration did not converge near t = {time}")]
    VanishingLagDiverged { time: f64 },
    #[error("invalid step control: {0}")]
    InvalidControl(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Initial data of the linear comparison equation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearHistory {
    pub phi: CoefficientSpec,
    pub x0: f64,
}

impl LinearHistory {
    pub fn constant(x0: f64) -> Self {
        LinearHistory {
            phi: CoefficientSpec::constant(x0),
            x0,
        }
    }
}

struct LogModel<'a> {
    params: &'a ModelParams,
    history: &'a CoefficientSpec,
}

impl DelaySystem for LogModel<'_> {
    fn scale(&self) -> Scale {
        Scale::Log
    }
    fn delay(&self) -> &DelaySpec {
        &self.params.delay
    }
    fn history(&self) -> &CoefficientSpec {
        self.history
    }
    #[inline]
    fn derivative(&self, t: f64, state: f64, delayed: f64) -> Result<f64, EngineError> {
        Ok(model::rhs_log(t, state, delayed, self.params)?)
    }
    fn state_bound(&self) -> f64 {
        LOG_STATE_BOUND
    }
}

struct LinearModel<'a> {
    r: &'a CoefficientSpec,
    delay: &'a DelaySpec,
    history: &'a CoefficientSpec,
}

impl DelaySystem for LinearModel<'_> {
    fn scale(&self) -> Scale {
        Scale::Linear
    }
    fn delay(&self) -> &DelaySpec {
        self.delay
    }
    fn history(&self) -> &CoefficientSpec {
        self.history
    }
    #[inline]
    fn derivative(&self, t: f64, _state: f64, delayed: f64) -> Result<f64, EngineError> {
        Ok(-self.r.eval(t) * delayed)
    }
    fn state_bound(&self) -> f64 {
        LINEAR_STATE_BOUND
    }
}

fn check_horizon(t_end: f64) -> Result<(), EngineError> {
    if t_end.is_finite() && t_end > 0.0 {
        Ok(())
    } else {
        Err(EngineError::InvalidInput(format!(
            "t_end must be > 0, got {t_end}"
        )))
    }
}

/// Nominal step for a model: explicit, or derived from the shortest lag and
/// the common period.
pub fn nominal_step(params: &ModelParams, control: &StepControl) -> Result<f64, EngineError> {
    let (lag_min, _) = params.delay.lag_extrema(VALIDATION_SAMPLES);
    Ok(control.resolve_step(lag_min.max(0.0), params.common_period()?))
}

/// Integrates the fishery model on `[0, t_end]` from the given initial data.
pub fn integrate(
    params: &ModelParams,
    history: &HistorySpec,
    t_end: f64,
    control: &StepControl,
) -> Result<Trajectory, EngineError> {
    check_horizon(t_end)?;
    control.check()?;
    let report = model::validate(params, history);
    if report.overall != Verdict::Holds {
        return Err(EngineError::InvalidInput(report.to_text()));
    }
    let step = nominal_step(params, control)?;
    let sys = LogModel {
        params,
        history: &history.phi,
    };
    method_of_steps(&sys, history.n0.ln(), t_end, step, control)
}

/// Integrates `x'(t) = -r(t) x(θ(t))` on `[0, t_end]`.
pub fn integrate_linear(
    r: &CoefficientSpec,
    delay: &DelaySpec,
    history: &LinearHistory,
    t_end: f64,
    control: &StepControl,
) -> Result<Trajectory, EngineError> {
    check_horizon(t_end)?;
    control.check()?;
    r.check()?;
    delay.check()?;
    history.phi.check()?;
    let (lag_min, _) = delay.lag_extrema(VALIDATION_SAMPLES);
    if lag_min < 0.0 {
        return Err(EngineError::InvalidInput(format!(
            "lag must be >= 0, found {lag_min}"
        )));
    }
    let period = model::common_period(r.period().into_iter().chain(delay.period()))?.unwrap_or(1.0);
    let step = control.resolve_step(lag_min, period);
    let sys = LinearModel {
        r,
        delay,
        history: &history.phi,
    };
    method_of_steps(&sys, history.x0, t_end, step, control)
}
