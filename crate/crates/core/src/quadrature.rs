//! Composite Simpson quadrature and suprema of lagged integrals.

use crate::model::{uniform_grid, CoefficientSpec, DelaySpec};

/// Composite Simpson rule on `panels` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let n = (panels.max(2) + 1) & !1;
    let width = hi - lo;
    if width == 0.0 {
        return 0.0;
    }
    let h = width / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(lo + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even) / 3.0
}

/// Grid density and panel count used for `sup_t ∫_{θ(t)}^t f(s) ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub sup_grid: usize,
    pub panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            sup_grid: 2048,
            panels: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaggedIntegral {
    /// Largest integral over the grid, from the doubled panel count.
    pub sup: f64,
    /// Grid time attaining `sup`.
    pub argmax: f64,
    /// Richardson estimate `|S_2n - S_n| / 15` at the maximizer.
    pub error_estimate: f64,
}

/// `sup_{t in [0, period)} ∫_{t - τ(t)}^t f(s) ds`.
pub fn lagged_integral_sup(f: &CoefficientSpec, delay: &DelaySpec, period: f64) -> f64 {
    lagged_integral_sup_with(|s| f.eval(s), delay, period, QuadratureConfig::default()).sup
}

pub fn lagged_integral_sup_with<F: Fn(f64) -> f64>(
    f: F,
    delay: &DelaySpec,
    period: f64,
    cfg: QuadratureConfig,
) -> LaggedIntegral {
    let mut best = LaggedIntegral {
        sup: f64::NEG_INFINITY,
        argmax: 0.0,
        error_estimate: 0.0,
    };
    for t in uniform_grid(0.0, period, cfg.sup_grid) {
        let lag = delay.lag(t);
        let coarse = simpson(&f, t - lag, t, cfg.panels);
        let fine = simpson(&f, t - lag, t, 2 * cfg.panels);
        if fine > best.sup {
            best = LaggedIntegral {
                sup: fine,
                argmax: t,
                error_estimate: (fine - coarse).abs() / 15.0,
            };
        }
    }
    best
}
