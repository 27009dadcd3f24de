//! The delayed fishery model: coefficient functions, right-hand sides,
//! the proportional-coefficient equilibrium and hypothesis validation.

mod coefficient;
mod delay;
mod params;
mod validate;

pub use coefficient::{common_period, uniform_grid, CoefficientSpec};
pub use delay::DelaySpec;
pub use params::{HistorySpec, ModelParams, ProportionalParams};
pub use validate::{validate, validate_with, validation_window, VALIDATION_SAMPLES};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no positive equilibrium: a = {a} must exceed b = {b}")]
    NoPositiveEquilibrium { a: f64, b: f64 },
    #[error("periods {0} and {1} are not commensurate")]
    IncommensuratePeriods(f64, f64),
    #[error("invalid coefficient spec: {0}")]
    InvalidSpec(String),
}

/// Hill-type fecundity `a / (1 + (N / K)^γ)`.
pub fn hill_fecundity(a: f64, n_delayed: f64, k: f64, gamma: f64) -> Result<f64, ModelError> {
    if !(k > 0.0) {
        return Err(ModelError::Domain(format!(
            "carrying capacity must be > 0, got {k}"
        )));
    }
    if !(gamma > 0.0) {
        return Err(ModelError::Domain(format!(
            "gamma must be > 0, got {gamma}"
        )));
    }
    if n_delayed < 0.0 {
        return Err(ModelError::Domain(format!(
            "delayed biomass must be >= 0, got {n_delayed}"
        )));
    }
    Ok(hill_unchecked(a, n_delayed, k, gamma))
}

#[inline]
fn hill_unchecked(a: f64, n_delayed: f64, k: f64, gamma: f64) -> f64 {
    a / (1.0 + (n_delayed / k).powf(gamma))
}

/// Per-capita growth rate `a(t) / (1 + (N(θ(t)) / K(t))^γ) - b(t)`; this is
/// the right-hand side in log coordinates `x = ln N`.
pub fn rhs_log(t: f64, _x: f64, n_delayed: f64, params: &ModelParams) -> Result<f64, ModelError> {
    let fec = hill_fecundity(params.a.eval(t), n_delayed, params.k.eval(t), params.gamma)?;
    Ok(fec - params.b.eval(t))
}

/// `N'(t)` for the delayed model.
pub fn rhs(t: f64, n: f64, n_delayed: f64, params: &ModelParams) -> Result<f64, ModelError> {
    if !(n > 0.0) {
        return Err(ModelError::Domain(format!("biomass must be > 0, got {n}")));
    }
    Ok(rhs_log(t, n.ln(), n_delayed, params)? * n)
}

/// Positive equilibrium `N* = (a/b - 1)^(1/γ) K` of the proportional model.
pub fn equilibrium(params: &ProportionalParams) -> Result<f64, ModelError> {
    if !(params.a > params.b) || !(params.b > 0.0) {
        return Err(ModelError::NoPositiveEquilibrium {
            a: params.a,
            b: params.b,
        });
    }
    Ok((params.a / params.b - 1.0).powf(1.0 / params.gamma) * params.k)
}

/// Right-hand side of the equation linearized about `N*`:
/// `x'(t) = -(γ (a - b) b / a) r(t) x(θ(t))`.
pub fn linearized_rhs(
    t: f64,
    x_delayed: f64,
    params: &ProportionalParams,
) -> Result<f64, ModelError> {
    if !(params.a > params.b) {
        return Err(ModelError::NoPositiveEquilibrium {
            a: params.a,
            b: params.b,
        });
    }
    Ok(-params.linear_coefficient() * params.r.eval(t) * x_delayed)
}
