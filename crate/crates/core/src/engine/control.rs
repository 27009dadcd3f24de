use serde::{Deserialize, Serialize};

use super::EngineError;

/// Step-size and iteration settings for the method of steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepControl {
    /// Nominal step; derived from the lag and period when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default = "default_tol")]
    pub vanishing_lag_tol: f64,
    #[serde(default = "default_max_iter")]
    pub vanishing_lag_max_iter: usize,
    #[serde(default = "default_depth")]
    pub breakpoint_depth: usize,
}

fn default_tol() -> f64 {
    1e-12
}
fn default_max_iter() -> usize {
    8
}
fn default_depth() -> usize {
    3
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            step: None,
            vanishing_lag_tol: default_tol(),
            vanishing_lag_max_iter: default_max_iter(),
            breakpoint_depth: default_depth(),
        }
    }
}

pub const MIN_DEFAULT_STEP: f64 = 1e-4;
pub const MAX_DEFAULT_STEP: f64 = 0.05;

impl StepControl {
    pub fn with_step(step: f64) -> Self {
        StepControl {
            step: Some(step),
            ..StepControl::default()
        }
    }

    pub fn check(&self) -> Result<(), EngineError> {
        if let Some(h) = self.step {
            if !(h.is_finite() && h > 0.0) {
                return Err(EngineError::InvalidControl(format!(
                    "step must be > 0, got {h}"
                )));
            }
        }
        if !(self.vanishing_lag_tol > 0.0) {
            return Err(EngineError::InvalidControl(format!(
                "vanishing_lag_tol must be > 0, got {}",
                self.vanishing_lag_tol
            )));
        }
        if self.vanishing_lag_max_iter < 1 {
            return Err(EngineError::InvalidControl(
                "vanishing_lag_max_iter must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// The explicit step, or `min(lag_min, period) / 40` clamped to
    /// `[1e-4, 0.05]`.
    pub fn resolve_step(&self, lag_min: f64, period: f64) -> f64 {
        self.step.unwrap_or_else(|| {
            (lag_min.min(period) / 40.0).clamp(MIN_DEFAULT_STEP, MAX_DEFAULT_STEP)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_step_rule() {
        let c = StepControl::default();
        assert_eq!(c.resolve_step(0.5, 1.0), 0.0125);
        assert_eq!(c.resolve_step(0.0, 1.0), MIN_DEFAULT_STEP);
        assert_eq!(c.resolve_step(10.0, 10.0), MAX_DEFAULT_STEP);
        assert_eq!(StepControl::with_step(0.3).resolve_step(0.5, 1.0), 0.3);
    }

    #[test]
    fn rejects_bad_controls() {
        assert!(StepControl::with_step(0.0).check().is_err());
        assert!(StepControl {
            vanishing_lag_max_iter: 0,
            ..Default::default()
        }
        .check()
        .is_err());
        assert!(StepControl {
            vanishing_lag_tol: -1.0,
            ..Default::default()
        }
        .check()
        .is_err());
    }
}
