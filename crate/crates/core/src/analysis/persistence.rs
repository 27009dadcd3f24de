use super::AnalysisError;
use crate::engine::Trajectory;

/// Dense samples taken over the retained part of a run.
pub const PERSISTENCE_SAMPLES: usize = 10_000;

/// `(min, max)` of the solution over `[discard, end]`, from
/// [`PERSISTENCE_SAMPLES`] evenly spaced dense-output samples.
pub fn persistence_bounds(traj: &Trajectory, discard: f64) -> Result<(f64, f64), AnalysisError> {
    let end = traj.end_time();
    if !(discard >= traj.start_time() && discard < end) {
        return Err(AnalysisError::InvalidInput(format!(
            "discard time {discard} must lie in [{}, {end})",
            traj.start_time()
        )));
    }
    let samples = traj.sample(discard, end, PERSISTENCE_SAMPLES)?;
    Ok(samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| {
            (lo.min(v), hi.max(v))
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{integrate, StepControl};
    use crate::model::{HistorySpec, ModelParams};

    #[test]
    fn equilibrium_bounds_collapse() {
        let p = ModelParams::constant(2.0, 1.0, 2.0, 1.0, 0.5);
        let traj = integrate(
            &p,
            &HistorySpec::constant(2.0),
            20.0,
            &StepControl::default(),
        )
        .unwrap();
        let (lo, hi) = persistence_bounds(&traj, 5.0).unwrap();
        assert!((lo - 2.0).abs() < 1e-9 && (hi - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_contain_initial_value() {
        let p = ModelParams::constant(2.0, 1.0, 2.0, 3.0, 1.0);
        let traj = integrate(
            &p,
            &HistorySpec::constant(0.3),
            20.0,
            &StepControl::default(),
        )
        .unwrap();
        let (lo, hi) = persistence_bounds(&traj, 0.0).unwrap();
        assert!(lo > 0.0 && lo <= 0.3 && hi >= 0.3);
    }

    #[test]
    fn discard_beyond_end_rejected() {
        let p = ModelParams::constant(2.0, 1.0, 2.0, 1.0, 0.5);
        let traj = integrate(
            &p,
            &HistorySpec::constant(2.0),
            5.0,
            &StepControl::default(),
        )
        .unwrap();
        assert!(persistence_bounds(&traj, 5.0).is_err());
        assert!(persistence_bounds(&traj, -1.0).is_err());
    }
}
