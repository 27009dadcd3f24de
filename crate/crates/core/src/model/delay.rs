use serde::{Deserialize, Serialize};

use super::{CoefficientSpec, ModelError};

/// The deviating argument `θ(t) = t - τ(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelaySpec {
    Constant { lag: f64 },
    Varying { lag: CoefficientSpec },
}

impl DelaySpec {
    pub fn constant(lag: f64) -> Self {
        DelaySpec::Constant { lag }
    }

    #[inline]
    pub fn lag(&self, t: f64) -> f64 {
        match self {
            DelaySpec::Constant { lag } => *lag,
            DelaySpec::Varying { lag } => lag.eval(t),
        }
    }

    /// θ(t)
    #[inline]
    pub fn theta(&self, t: f64) -> f64 {
        t - self.lag(t)
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            DelaySpec::Constant { .. } => None,
            DelaySpec::Varying { lag } => lag.period(),
        }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        match self {
            DelaySpec::Constant { lag } if !lag.is_finite() => Err(ModelError::InvalidSpec(
                format!("lag must be finite, got {lag}"),
            )),
            DelaySpec::Constant { .. } => Ok(()),
            DelaySpec::Varying { lag } => lag.check(),
        }
    }

    /// Grid min and max of the lag over one of its periods (or exact for a
    /// constant lag).
    pub fn lag_extrema(&self, samples: usize) -> (f64, f64) {
        match self {
            DelaySpec::Constant { lag } => (*lag, *lag),
            DelaySpec::Varying { lag } => {
                lag.grid_extrema(0.0, lag.period().unwrap_or(1.0), samples)
            }
        }
    }

    /// Propagated derivative discontinuities `ξ_0 = 0`, `ξ_{k+1}` the
    /// smallest `t > ξ_k` with `θ(t) = ξ_k`, up to `depth` points after
    /// `ξ_0` and not beyond `t_end`. `scan_step` bounds the search stride.
    pub fn breakpoints(&self, depth: usize, t_end: f64, scan_step: f64) -> Vec<f64> {
        let mut points = vec![0.0];
        let mut current = 0.0_f64;
        for _ in 0..depth {
            let next = match self {
                DelaySpec::Constant { lag } => {
                    if *lag <= 0.0 {
                        None
                    } else {
                        Some(current + lag)
                    }
                }
                DelaySpec::Varying { .. } => self.next_crossing(current, t_end, scan_step),
            };
            match next {
                Some(xi) if xi > current && xi <= t_end => {
                    points.push(xi);
                    current = xi;
                }
                _ => break,
            }
        }
        points
    }

    fn next_crossing(&self, from: f64, t_end: f64, scan_step: f64) -> Option<f64> {
        let g = |t: f64| self.theta(t) - from;
        if g(from) >= 0.0 {
            // zero lag at `from`: the discontinuity does not move forward
            return None;
        }
        let stride = scan_step.max(1e-6);
        let mut lo = from;
        loop {
            let hi = (lo + stride).min(t_end);
            if g(hi) >= 0.0 {
                let (mut a, mut b) = (lo, hi);
                while b - a > 1e-12 {
                    let m = 0.5 * (a + b);
                    if g(m) >= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                return Some(b);
            }
            if hi >= t_end {
                return None;
            }
            lo = hi;
        }
    }
}
