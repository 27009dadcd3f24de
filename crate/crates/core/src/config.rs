//! Experiment configuration files.
//!
//! A configuration is a TOML document with these top-level tables:
//!
//! * `[model]` or `[proportional]` (exactly one): the model data.
//! * `[history]`: initial function and `N(0)`; defaults to the constant
//!   geometric-mean guess of `K`.
//! * `[run]`: horizons, tolerances, output options and `[run.control]`
//!   step settings.
//! * `[sweep]`: the two axes of a parameter sweep.
//! * `[[histories]]`: initial data compared by `converge`; defaults to the
//!   standard pair bracketing the carrying capacity.
//!
//! Unknown keys are rejected everywhere. [`ExperimentConfig::resolve`]
//! fills every default so that the resolved document reproduces a run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    initial_guess, standard_histories, SweepAxis, SweepBase, DEFAULT_CONVERGENCE_TOL,
    DEFAULT_HORIZON_PERIODS,
};
use crate::engine::StepControl;
use crate::model::{validate, CoefficientSpec, HistorySpec, ModelParams, ProportionalParams};
use crate::report::Verdict;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{path}: {message}")]
    Semantic { path: String, message: String },
}

fn semantic(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Semantic {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// End time of `simulate` and of local-stability runs; defaults to
    /// `horizon_periods` common periods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_horizon")]
    pub horizon_periods: usize,
    #[serde(default = "default_transient")]
    pub transient_periods: usize,
    /// Sup-norm tolerance for attraction and local-stability runs.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Residual tolerance of periodic-orbit searches.
    #[serde(default = "default_periodic_tolerance")]
    pub periodic_tolerance: f64,
    /// Initial value of the linearized run of `converge` on proportional
    /// models.
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
    /// Also write a copy of the trajectory downsampled to 1000 rows.
    #[serde(default)]
    pub plot: bool,
    #[serde(default)]
    pub control: StepControl,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON_PERIODS
}
fn default_transient() -> usize {
    100
}
fn default_tolerance() -> f64 {
    DEFAULT_CONVERGENCE_TOL
}
fn default_periodic_tolerance() -> f64 {
    1e-6
}
fn default_perturbation() -> f64 {
    0.1
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            t_end: None,
            horizon_periods: default_horizon(),
            transient_periods: default_transient(),
            tolerance: default_tolerance(),
            periodic_tolerance: default_periodic_tolerance(),
            perturbation: default_perturbation(),
            plot: false,
            control: StepControl::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis1: SweepAxis,
    pub axis2: SweepAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proportional: Option<ProportionalParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<HistorySpec>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub histories: Vec<HistorySpec>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().trim().to_string(),
    })?;
    cfg.check()?;
    Ok(cfg)
}

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

impl ExperimentConfig {
    /// The general model; proportional models are expanded.
    pub fn model_params(&self) -> ModelParams {
        match (&self.model, &self.proportional) {
            (Some(m), _) => m.clone(),
            (None, Some(p)) => p.to_model(),
            (None, None) => unreachable!("checked configuration has a model"),
        }
    }

    pub fn sweep_base(&self) -> SweepBase {
        match &self.proportional {
            Some(p) => SweepBase::Proportional(p.clone()),
            None => SweepBase::Model(self.model_params()),
        }
    }

    /// Semantic checks; errors name the offending field.
    pub fn check(&self) -> Result<(), ConfigError> {
        match (&self.model, &self.proportional) {
            (Some(_), Some(_)) => {
                return Err(semantic(
                    "model",
                    "give either [model] or [proportional], not both",
                ))
            }
            (None, None) => {
                return Err(semantic(
                    "model",
                    "missing [model] or [proportional] section",
                ))
            }
            (Some(m), None) => check_model(m)?,
            (None, Some(p)) => check_proportional(p)?,
        }
        if let Some(h) = &self.history {
            check_history(h, "history")?;
        }
        for (i, h) in self.histories.iter().enumerate() {
            check_history(h, &format!("histories[{i}]"))?;
        }
        check_run(&self.run)?;
        if let Some(s) = &self.sweep {
            for (name, axis) in [("sweep.axis1", &s.axis1), ("sweep.axis2", &s.axis2)] {
                if axis.count == 0 {
                    return Err(semantic(format!("{name}.count"), "must be at least 1"));
                }
                if !(axis.min.is_finite() && axis.max.is_finite() && axis.min <= axis.max) {
                    return Err(semantic(name, "min and max must be finite with min <= max"));
                }
            }
            if s.axis1.param == s.axis2.param {
                return Err(semantic(
                    "sweep.axis2.param",
                    "must differ from sweep.axis1.param",
                ));
            }
        }
        let history = self
            .history
            .clone()
            .unwrap_or_else(|| initial_guess(&self.model_params()));
        let report = validate(&self.model_params(), &history);
        if report.overall != Verdict::Holds {
            let failed: Vec<_> = report
                .entries
                .iter()
                .filter(|e| e.verdict != Verdict::Holds)
                .map(|e| format!("{} ({})", e.name, e.verdict))
                .collect();
            return Err(semantic(
                "model",
                format!("hypotheses not satisfied: {}", failed.join("; ")),
            ));
        }
        Ok(())
    }

    /// Copy with every default made explicit. Idempotent.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let model = self.model_params();
        let period = match &self.proportional {
            Some(p) => p.common_period(),
            None => model.common_period(),
        }
        .map_err(|e| semantic("model.period", e.to_string()))?;
        let mut out = self.clone();
        out.history.get_or_insert_with(|| initial_guess(&model));
        out.run
            .t_end
            .get_or_insert(self.run.horizon_periods as f64 * period);
        if out.histories.is_empty() {
            out.histories = standard_histories(&model).to_vec();
        }
        Ok(out)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration types serialize to TOML")
    }
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(semantic(path, format!("must be > 0, got {v}")))
    }
}

fn check_spec(path: &str, spec: &CoefficientSpec) -> Result<(), ConfigError> {
    spec.check().map_err(|e| semantic(path, e.to_string()))
}

fn check_model(m: &ModelParams) -> Result<(), ConfigError> {
    positive("model.gamma", m.gamma)?;
    check_spec("model.a", &m.a)?;
    check_spec("model.b", &m.b)?;
    check_spec("model.K", &m.k)?;
    m.delay
        .check()
        .map_err(|e| semantic("model.delay", e.to_string()))?;
    if let Some(p) = m.period {
        positive("model.period", p)?;
    }
    m.common_period()
        .map_err(|e| semantic("model.period", e.to_string()))?;
    Ok(())
}

fn check_proportional(p: &ProportionalParams) -> Result<(), ConfigError> {
    positive("proportional.gamma", p.gamma)?;
    positive("proportional.a", p.a)?;
    positive("proportional.b", p.b)?;
    positive("proportional.K", p.k)?;
    check_spec("proportional.r", &p.r)?;
    p.delay
        .check()
        .map_err(|e| semantic("proportional.delay", e.to_string()))?;
    p.common_period()
        .map_err(|e| semantic("proportional.r", e.to_string()))?;
    Ok(())
}

fn check_history(h: &HistorySpec, path: &str) -> Result<(), ConfigError> {
    check_spec(&format!("{path}.phi"), &h.phi)?;
    positive(&format!("{path}.n0"), h.n0)
}

fn check_run(r: &RunConfig) -> Result<(), ConfigError> {
    if let Some(t) = r.t_end {
        positive("run.t_end", t)?;
    }
    if r.horizon_periods == 0 {
        return Err(semantic("run.horizon_periods", "must be at least 1"));
    }
    if r.transient_periods == 0 {
        return Err(semantic("run.transient_periods", "must be at least 1"));
    }
    positive("run.tolerance", r.tolerance)?;
    positive("run.periodic_tolerance", r.periodic_tolerance)?;
    if !r.perturbation.is_finite() {
        return Err(semantic("run.perturbation", "must be finite"));
    }
    r.control
        .check()
        .map_err(|e| semantic("run.control", e.to_string()))
}
