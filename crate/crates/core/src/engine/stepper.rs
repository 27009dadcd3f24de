//! Classical Runge-Kutta method of steps with breakpoint alignment and a
//! fixed-point treatment of lags shorter than the current step.

use std::cell::Cell;

use super::trajectory::{Hermite, Scale, Trajectory};
use super::{EngineError, StepControl};
use crate::model::{CoefficientSpec, DelaySpec};

/// A scalar delay equation `state' = f(t, state, value(θ(t)))`.
pub(crate) trait DelaySystem {
    fn scale(&self) -> Scale;
    fn delay(&self) -> &DelaySpec;
    fn history(&self) -> &CoefficientSpec;
    fn derivative(&self, t: f64, state: f64, delayed: f64) -> Result<f64, EngineError>;
    /// Largest admissible |state|.
    fn state_bound(&self) -> f64;
}

/// Which smooth piece of the solution a step reads its delayed values from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    History,
    Solution,
}

enum StepOutcome {
    Accepted(Hermite),
    NotConverged,
}

const MAX_HALVINGS: u32 = 40;

pub(crate) fn method_of_steps<S: DelaySystem>(
    sys: &S,
    x0: f64,
    t_end: f64,
    step: f64,
    control: &StepControl,
) -> Result<Trajectory, EngineError> {
    let mut traj = Trajectory::start(sys.scale(), sys.history().clone(), 0.0, x0);
    if !(x0.abs() <= sys.state_bound()) {
        return Err(EngineError::Overflow { time: 0.0 });
    }
    let breakpoints = sys
        .delay()
        .breakpoints(control.breakpoint_depth, t_end, step);
    let eps = 1e-9 * step;

    let mut anchor = 0.0_f64;
    let mut count = 0u64;
    let mut next_bp = 1usize;
    let mut t = 0.0_f64;

    while t < t_end {
        if next_bp < breakpoints.len() && breakpoints[next_bp] - t <= eps {
            anchor = t;
            count = 0;
            next_bp += 1;
            continue;
        }
        let mut target = anchor + (count + 1) as f64 * step;
        let mut hits_bp = false;
        if next_bp < breakpoints.len() && breakpoints[next_bp] <= target + eps {
            target = breakpoints[next_bp];
            hits_bp = true;
        }
        if target >= t_end - eps {
            target = t_end;
        }
        advance(sys, &mut traj, t, target, control)?;
        t = target;
        if hits_bp {
            anchor = t;
            count = 0;
            next_bp += 1;
        } else {
            count += 1;
        }
    }
    Ok(traj)
}

/// Integrates from `t0` (the current end of `traj`) to `t1`, halving the
/// substep whenever the fixed-point iteration does not settle.
fn advance<S: DelaySystem>(
    sys: &S,
    traj: &mut Trajectory,
    t0: f64,
    t1: f64,
    control: &StepControl,
) -> Result<(), EngineError> {
    let mut t = t0;
    let mut sub = t1 - t0;
    let mut halvings = 0;
    while t < t1 {
        let end = if t + sub >= t1 - 1e-12 * sub {
            t1
        } else {
            t + sub
        };
        match try_step(sys, traj, t, end, control)? {
            StepOutcome::Accepted(seg) => {
                traj.push(&seg);
                t = end;
            }
            StepOutcome::NotConverged => {
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(EngineError::VanishingLagDiverged { time: t });
                }
                sub *= 0.5;
            }
        }
    }
    Ok(())
}

fn try_step<S: DelaySystem>(
    sys: &S,
    traj: &Trajectory,
    t0: f64,
    t1: f64,
    control: &StepControl,
) -> Result<StepOutcome, EngineError> {
    let h = t1 - t0;
    let delay = sys.delay();
    let scale = sys.scale();
    let x0 = *traj.states.last().unwrap();
    let t_mid = t0 + 0.5 * h;
    let source = if delay.theta(t_mid) < 0.0 {
        Source::History
    } else {
        Source::Solution
    };

    // Provisional interpolant of the current step, used for delayed
    // arguments that fall inside (t0, t1].
    let slope_guess = traj.last_slope().unwrap_or(0.0);
    let mut current = Hermite {
        t0,
        t1,
        x0,
        x1: x0 + h * slope_guess,
        d0: slope_guess,
        d1: slope_guess,
    };

    let reads_inside = Cell::new(false);
    let lookup = |tau: f64, current: &Hermite| -> f64 {
        match source {
            Source::History => sys.history().eval(tau.min(0.0)),
            Source::Solution => {
                let tau = tau.max(0.0);
                if tau <= t0 {
                    scale.to_value(traj.state_at(tau))
                } else {
                    reads_inside.set(true);
                    scale.to_value(current.eval(tau.min(t1)))
                }
            }
        }
    };

    let theta0 = delay.theta(t0);
    let theta_mid = delay.theta(t_mid);
    let theta1 = delay.theta(t1);

    let k1 = sys.derivative(t0, x0, lookup(theta0, &current))?;
    current.d0 = k1;

    let max_iter = control.vanishing_lag_max_iter;
    for _ in 0..max_iter {
        let mid_val = lookup(theta_mid, &current);
        let k2 = sys.derivative(t_mid, x0 + 0.5 * h * k1, mid_val)?;
        let k3 = sys.derivative(t_mid, x0 + 0.5 * h * k2, mid_val)?;
        let k4 = sys.derivative(t1, x0 + h * k3, lookup(theta1, &current))?;
        let x1 = x0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !(x1.abs() <= sys.state_bound()) {
            return Err(EngineError::Overflow { time: t1 });
        }
        let previous = current.x1;
        current.x1 = x1;
        current.d1 = sys.derivative(t1, x1, lookup(theta1, &current))?;

        if !reads_inside.get() {
            return Ok(StepOutcome::Accepted(current));
        }
        if (x1 - previous).abs() < control.vanishing_lag_tol * x1.abs().max(1.0) {
            return Ok(StepOutcome::Accepted(current));
        }
    }
    Ok(StepOutcome::NotConverged)
}
