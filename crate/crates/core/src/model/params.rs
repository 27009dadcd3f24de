use serde::{Deserialize, Serialize};

use super::coefficient::common_period;
use super::{CoefficientSpec, DelaySpec, ModelError};

/// Data of the delayed fishery model
/// `N'(t) = [a(t) / (1 + (N(θ(t)) / K(t))^γ) - b(t)] N(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub gamma: f64,
    pub a: CoefficientSpec,
    pub b: CoefficientSpec,
    #[serde(rename = "K")]
    pub k: CoefficientSpec,
    pub delay: DelaySpec,
    /// Explicit common period; derived from the components when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

impl ModelParams {
    /// Model with constant `a`, `b`, `K` and a constant lag.
    pub fn constant(a: f64, b: f64, k: f64, gamma: f64, lag: f64) -> Self {
        ModelParams {
            gamma,
            a: CoefficientSpec::constant(a),
            b: CoefficientSpec::constant(b),
            k: CoefficientSpec::constant(k),
            delay: DelaySpec::constant(lag),
            period: None,
        }
    }

    fn component_periods(&self) -> impl Iterator<Item = f64> + '_ {
        [&self.a, &self.b, &self.k]
            .into_iter()
            .filter_map(CoefficientSpec::period)
            .chain(self.delay.period())
    }

    pub fn is_autonomous(&self) -> bool {
        self.component_periods().next().is_none()
    }

    /// The shared period `T` of all coefficients. Constant models use the
    /// explicit period if given, else one time unit.
    pub fn common_period(&self) -> Result<f64, ModelError> {
        let derived = common_period(self.component_periods())?;
        match (self.period, derived) {
            (Some(p), _) if !(p.is_finite() && p > 0.0) => Err(ModelError::InvalidSpec(format!(
                "period must be positive and finite, got {p}"
            ))),
            (Some(p), Some(d)) => {
                let ratio = p / d;
                if (ratio - ratio.round()).abs() <= 1e-9 * ratio && ratio.round() >= 1.0 {
                    Ok(p)
                } else {
                    Err(ModelError::IncommensuratePeriods(p, d))
                }
            }
            (Some(p), None) => Ok(p),
            (None, Some(d)) => Ok(d),
            (None, None) => Ok(1.0),
        }
    }

    pub fn check_structure(&self) -> Result<(), ModelError> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(ModelError::Domain(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        self.a.check()?;
        self.b.check()?;
        self.k.check()?;
        self.delay.check()?;
        self.common_period().map(|_| ())
    }
}

/// Initial data: `N(t) = φ(t)` for `t < 0` and `N(0) = N_0`.
///
/// `phi` is kept in raw biomass units so that `φ = 0` is representable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistorySpec {
    pub phi: CoefficientSpec,
    pub n0: f64,
}

impl HistorySpec {
    pub fn constant(value: f64) -> Self {
        HistorySpec {
            phi: CoefficientSpec::constant(value),
            n0: value,
        }
    }
}

/// Model with coefficients proportional to a common time scale `r(t)`:
/// `N'(t) = [a r(t) / (1 + (N(θ(t)) / K)^γ) - b r(t)] N(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProportionalParams {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub r: CoefficientSpec,
    pub delay: DelaySpec,
}

impl ProportionalParams {
    pub fn constant_rate(a: f64, b: f64, k: f64, gamma: f64, lag: f64) -> Self {
        ProportionalParams {
            a,
            b,
            gamma,
            k,
            r: CoefficientSpec::constant(1.0),
            delay: DelaySpec::constant(lag),
        }
    }

    /// The equivalent general model with `a(t) = a r(t)`, `b(t) = b r(t)`.
    pub fn to_model(&self) -> ModelParams {
        ModelParams {
            gamma: self.gamma,
            a: self.r.scaled(self.a),
            b: self.r.scaled(self.b),
            k: CoefficientSpec::constant(self.k),
            delay: self.delay.clone(),
            period: None,
        }
    }

    /// Coefficient `γ (a - b) b / a` of the linearized equation.
    pub fn linear_coefficient(&self) -> f64 {
        self.gamma * (self.a - self.b) * self.b / self.a
    }

    pub fn common_period(&self) -> Result<f64, ModelError> {
        Ok(common_period(self.r.period().into_iter().chain(self.delay.period()))?.unwrap_or(1.0))
    }
}
