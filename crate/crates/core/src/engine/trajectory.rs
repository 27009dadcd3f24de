use crate::model::CoefficientSpec;

use super::EngineError;

/// Coordinates in which the state is advanced and interpolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// State is `ln N`; values are `N = exp(state)`.
    Log,
    /// State and value coincide.
    Linear,
}

impl Scale {
    #[inline]
    pub fn to_value(self, state: f64) -> f64 {
        match self {
            Scale::Log => state.exp(),
            Scale::Linear => state,
        }
    }
}

/// Cubic Hermite interpolant on `[t0, t1]` in state coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Hermite {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub d0: f64,
    pub d1: f64,
}

impl Hermite {
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let u = 1.0 - s;
        let h00 = (1.0 + 2.0 * s) * u * u;
        let h10 = s * u * u;
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = -s * s * u;
        h00 * self.x0 + h10 * h * self.d0 + h01 * self.x1 + h11 * h * self.d1
    }
}

/// Numerical solution on `[0, end]` with per-step dense output and the
/// initial function for `t < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub(crate) scale: Scale,
    pub(crate) history: CoefficientSpec,
    pub(crate) mesh: Vec<f64>,
    pub(crate) states: Vec<f64>,
    pub(crate) values: Vec<f64>,
    /// Left and right endpoint slopes of each segment, in state coordinates.
    pub(crate) slopes: Vec<(f64, f64)>,
}

impl Trajectory {
    pub(crate) fn start(scale: Scale, history: CoefficientSpec, t0: f64, x0: f64) -> Self {
        Trajectory {
            scale,
            history,
            mesh: vec![t0],
            states: vec![x0],
            values: vec![scale.to_value(x0)],
            slopes: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, seg: &Hermite) {
        debug_assert_eq!(seg.t0, *self.mesh.last().unwrap());
        self.mesh.push(seg.t1);
        self.states.push(seg.x1);
        self.values.push(self.scale.to_value(seg.x1));
        self.slopes.push((seg.d0, seg.d1));
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn history(&self) -> &CoefficientSpec {
        &self.history
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    /// Mesh values in physical units (biomass or perturbation).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mesh values in integration coordinates.
    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn start_time(&self) -> f64 {
        self.mesh[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.mesh.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    /// `(t, value)` pairs on the mesh.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.mesh.iter().copied().zip(self.values.iter().copied())
    }

    pub(crate) fn last_slope(&self) -> Option<f64> {
        self.slopes.last().map(|s| s.1)
    }

    pub(crate) fn segment(&self, i: usize) -> Hermite {
        Hermite {
            t0: self.mesh[i],
            t1: self.mesh[i + 1],
            x0: self.states[i],
            x1: self.states[i + 1],
            d0: self.slopes[i].0,
            d1: self.slopes[i].1,
        }
    }

    /// State at `t` in `[start, end]`; exact at mesh points.
    pub(crate) fn state_at(&self, t: f64) -> f64 {
        if self.slopes.is_empty() {
            return self.states[0];
        }
        let idx = self.mesh.partition_point(|&m| m <= t);
        let seg = idx.saturating_sub(1).min(self.slopes.len() - 1);
        if t == self.mesh[seg] {
            return self.states[seg];
        }
        self.segment(seg).eval(t)
    }

    /// Solution value at `t`: the initial function before the start, cubic
    /// Hermite interpolation inside.
    pub fn eval(&self, t: f64) -> Result<f64, EngineError> {
        let start = self.start_time();
        let end = self.end_time();
        if t < start {
            return Ok(self.history.eval(t));
        }
        if t > end + 1e-12 * end.abs().max(1.0) || t.is_nan() {
            return Err(EngineError::OutOfRange { t, end });
        }
        let t = t.min(end);
        let idx = self.mesh.partition_point(|&m| m <= t);
        if idx > 0 && self.mesh[idx - 1] == t {
            return Ok(self.values[idx - 1]);
        }
        Ok(self.scale.to_value(self.state_at(t)))
    }

    /// `count` evenly spaced samples on `[t0, t1]`, both ends included.
    pub fn sample(&self, t0: f64, t1: f64, count: usize) -> Result<Vec<(f64, f64)>, EngineError> {
        let n = count.max(2);
        (0..n)
            .map(|i| {
                let t = if i == n - 1 {
                    t1
                } else {
                    t0 + (t1 - t0) * i as f64 / (n - 1) as f64
                };
                self.eval(t).map(|v| (t, v))
            })
            .collect()
    }

    /// Mesh points inside `[t0, t1]`.
    pub fn window(&self, t0: f64, t1: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points().filter(move |&(t, _)| t >= t0 && t <= t1)
    }
}

/// Value of `traj` at `t`; `t` before the start is served by the initial
/// function.
pub fn dense_eval(traj: &Trajectory, t: f64) -> Result<f64, EngineError> {
    traj.eval(t)
}
