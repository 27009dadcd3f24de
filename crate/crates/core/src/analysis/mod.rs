//! Numerical verification of the attraction and stability statements:
//! periodic orbits, convergence of solution pairs, decay of the linearized
//! equation, persistence bounds and parameter sweeps.

mod attraction;
mod local;
mod periodic;
mod persistence;
mod sweep;

pub use attraction::{
    standard_histories, verify_attraction, AttractionOptions, PairReport, CONVERGENCE_CSV_HEADER,
};
pub use local::{verify_local_stability, LocalStabilityOptions, LocalStabilityReport};
pub use periodic::{
    find_periodic_solution, find_periodic_solution_from, initial_guess, PeriodicOptions,
    PeriodicOrbit,
};
pub use persistence::{persistence_bounds, PERSISTENCE_SAMPLES};
pub use sweep::{
    sweep, Empirical, SweepAxis, SweepBase, SweepOptions, SweepParam, SweepRow, SweepTable,
};

use serde::Serialize;
use thiserror::Error;

use crate::engine::{EngineError, Trajectory};
use crate::model::ModelError;

/// Default sup-norm tolerance for declaring two solutions converged.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-4;
/// Default horizon, in periods, of attraction runs.
pub const DEFAULT_HORIZON_PERIODS: usize = 60;
/// Number of trailing periods used by the decay-rate fit.
pub const DECAY_FIT_PERIODS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("run {index} failed: {source}")]
    Run { index: usize, source: EngineError },
    #[error("sufficient conditions not satisfied:\n{0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl AnalysisError {
    /// True when the underlying failure is the log-coordinate overflow guard.
    pub fn is_overflow(&self) -> bool {
        matches!(
            self,
            AnalysisError::Engine(EngineError::Overflow { .. })
                | AnalysisError::Run {
                    source: EngineError::Overflow { .. },
                    ..
                }
        )
    }
}

/// Distance between two solutions (or a solution and its target) at the
/// end of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub sup_diff_last_period: f64,
    /// Exponential decay rate in 1/time; `None` when fewer than
    /// [`DECAY_FIT_PERIODS`] periods stay above the noise floor.
    pub decay_rate_estimate: Option<f64>,
    pub converged: bool,
    /// Sup-difference over each full period of the run.
    pub per_period: Vec<f64>,
}

impl ConvergenceReport {
    pub(crate) fn from_per_period(per_period: Vec<f64>, period: f64, floor: f64, tol: f64) -> Self {
        let last = per_period.last().copied().unwrap_or(f64::NAN);
        ConvergenceReport {
            sup_diff_last_period: last,
            decay_rate_estimate: fit_decay_rate(&per_period, period, floor),
            converged: last < tol,
            per_period,
        }
    }
}

/// Least-squares slope of `ln d_k` over the last [`DECAY_FIT_PERIODS`]
/// periods before the sequence first drops to `floor`, as a rate per unit
/// time (positive for decay).
pub fn fit_decay_rate(per_period: &[f64], period: f64, floor: f64) -> Option<f64> {
    let above = per_period
        .iter()
        .take_while(|&&d| d.is_finite() && d > floor)
        .count();
    if above < DECAY_FIT_PERIODS {
        return None;
    }
    let tail = &per_period[above - DECAY_FIT_PERIODS..above];
    let n = tail.len() as f64;
    let xs = (0..tail.len()).map(|k| k as f64);
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = tail.iter().map(|d| d.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, d) in xs.zip(tail) {
        sxy += (x - mean_x) * (d.ln() - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    Some(-(sxy / sxx) / period)
}

/// Per-period sup of `|f(t)|` over the mesh of `traj` for the `periods`
/// full periods that end at `traj.end_time()`.
pub(crate) fn per_period_sup<F>(
    traj: &Trajectory,
    period: f64,
    mut f: F,
) -> Result<Vec<f64>, EngineError>
where
    F: FnMut(f64, f64) -> Result<f64, EngineError>,
{
    let end = traj.end_time();
    let periods = ((end / period) + 1e-9).floor() as usize;
    let origin = end - periods as f64 * period;
    let mut out = vec![0.0_f64; periods];
    for (t, v) in traj.points() {
        if t < origin {
            continue;
        }
        let pos = (t - origin) / period;
        let k = pos.floor() as usize;
        let d = f(t, v)?.abs();
        // mesh points on a period boundary count for both neighbours
        if k < periods {
            out[k] = out[k].max(d);
        }
        if k > 0 && (pos - k as f64) < 1e-9 {
            out[k - 1] = out[k - 1].max(d);
        }
    }
    Ok(out)
}
