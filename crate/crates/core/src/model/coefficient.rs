//! Periodic scalar coefficient functions of time.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// A scalar function of time that is either constant or periodic.
///
/// Used for the fecundity rate `a(t)`, mortality `b(t)`, carrying capacity
/// `K(t)`, the time scale `r(t)`, varying lags and initial histories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    /// `mean + amplitude * sin(2π t / period + phase)`
    Sinusoid {
        mean: f64,
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `mean + Σ_k cos[k-1] cos(2π k t / T) + sin[k-1] sin(2π k t / T)`
    Fourier {
        period: f64,
        #[serde(default)]
        mean: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// Linear interpolation through `(t, value)` samples on `[0, period)`,
    /// wrapped periodically.
    PiecewiseLinear {
        period: f64,
        points: Vec<(f64, f64)>,
    },
}

impl CoefficientSpec {
    pub fn constant(value: f64) -> Self {
        CoefficientSpec::Constant { value }
    }

    pub fn sinusoid(mean: f64, amplitude: f64, period: f64, phase: f64) -> Self {
        CoefficientSpec::Sinusoid {
            mean,
            amplitude,
            period,
            phase,
        }
    }

    /// Structural checks: positive finite periods, finite parameters and a
    /// well-formed sample table.
    pub fn check(&self) -> Result<(), ModelError> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidSpec(format!(
                    "{name} must be finite, got {v}"
                )))
            }
        };
        if let Some(p) = self.period() {
            if !(p.is_finite() && p > 0.0) {
                return Err(ModelError::InvalidSpec(format!(
                    "period must be positive and finite, got {p}"
                )));
            }
        }
        match self {
            CoefficientSpec::Constant { value } => finite("value", *value),
            CoefficientSpec::Sinusoid {
                mean,
                amplitude,
                phase,
                ..
            } => {
                finite("mean", *mean)?;
                finite("amplitude", *amplitude)?;
                finite("phase", *phase)
            }
            CoefficientSpec::Fourier { mean, cos, sin, .. } => {
                finite("mean", *mean)?;
                cos.iter()
                    .chain(sin)
                    .try_for_each(|c| finite("coefficient", *c))
            }
            CoefficientSpec::PiecewiseLinear { period, points } => {
                if points.is_empty() {
                    return Err(ModelError::InvalidSpec(
                        "piecewise_linear needs at least one point".into(),
                    ));
                }
                for (t, v) in points {
                    finite("sample time", *t)?;
                    finite("sample value", *v)?;
                    if *t < 0.0 || *t >= *period {
                        return Err(ModelError::InvalidSpec(format!(
                            "sample time {t} outside [0, {period})"
                        )));
                    }
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(ModelError::InvalidSpec(
                        "sample times must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Period of the function; `None` for constants.
    pub fn period(&self) -> Option<f64> {
        match self {
            CoefficientSpec::Constant { .. } => None,
            CoefficientSpec::Sinusoid { period, .. }
            | CoefficientSpec::Fourier { period, .. }
            | CoefficientSpec::PiecewiseLinear { period, .. } => Some(*period),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientSpec::Constant { .. })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CoefficientSpec::Constant { value } => *value,
            CoefficientSpec::Sinusoid {
                mean,
                amplitude,
                period,
                phase,
            } => {
                let phase_t = t.rem_euclid(*period) / period;
                mean + amplitude * (TAU * phase_t + phase).sin()
            }
            CoefficientSpec::Fourier {
                period,
                mean,
                cos,
                sin,
            } => {
                let w = TAU * t.rem_euclid(*period) / period;
                let mut acc = *mean;
                for (k, c) in cos.iter().enumerate() {
                    acc += c * (w * (k + 1) as f64).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    acc += s * (w * (k + 1) as f64).sin();
                }
                acc
            }
            CoefficientSpec::PiecewiseLinear { period, points } => {
                piecewise_eval(points, *period, t.rem_euclid(*period))
            }
        }
    }

    /// The same function multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            CoefficientSpec::Constant { value } => CoefficientSpec::Constant {
                value: value * factor,
            },
            CoefficientSpec::Sinusoid {
                mean,
                amplitude,
                period,
                phase,
            } => CoefficientSpec::Sinusoid {
                mean: mean * factor,
                amplitude: amplitude * factor,
                period: *period,
                phase: *phase,
            },
            CoefficientSpec::Fourier {
                period,
                mean,
                cos,
                sin,
            } => CoefficientSpec::Fourier {
                period: *period,
                mean: mean * factor,
                cos: cos.iter().map(|c| c * factor).collect(),
                sin: sin.iter().map(|s| s * factor).collect(),
            },
            CoefficientSpec::PiecewiseLinear { period, points } => {
                CoefficientSpec::PiecewiseLinear {
                    period: *period,
                    points: points.iter().map(|&(t, v)| (t, v * factor)).collect(),
                }
            }
        }
    }

    /// Grid minimum and maximum over `[start, start + length)` on `samples`
    /// uniform points.
    pub fn grid_extrema(&self, start: f64, length: f64, samples: usize) -> (f64, f64) {
        if let CoefficientSpec::Constant { value } = self {
            return (*value, *value);
        }
        uniform_grid(start, length, samples)
            .map(|t| self.eval(t))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }
}

fn piecewise_eval(points: &[(f64, f64)], period: f64, t: f64) -> f64 {
    if points.len() == 1 {
        return points[0].1;
    }
    let idx = points.partition_point(|&(pt, _)| pt <= t);
    let (left, right) = if idx == 0 {
        let (lt, lv) = points[points.len() - 1];
        ((lt - period, lv), points[0])
    } else if idx == points.len() {
        let (rt, rv) = points[0];
        (points[idx - 1], (rt + period, rv))
    } else {
        (points[idx - 1], points[idx])
    };
    let w = (t - left.0) / (right.0 - left.0);
    left.1 + w * (right.1 - left.1)
}

/// `samples` uniformly spaced points starting at `start`, excluding
/// `start + length`.
pub fn uniform_grid(start: f64, length: f64, samples: usize) -> impl Iterator<Item = f64> {
    let n = samples.max(1);
    let h = length / n as f64;
    (0..n).map(move |i| start + i as f64 * h)
}

/// Smallest common period of a set of periods, when they are commensurate
/// rational multiples of each other within `1e-9` relative.
pub fn common_period<I: IntoIterator<Item = f64>>(periods: I) -> Result<Option<f64>, ModelError> {
    let mut acc: Option<f64> = None;
    for p in periods {
        acc = Some(match acc {
            None => p,
            Some(t) => {
                // t / p = num / den in lowest terms, so lcm = den * t = num * p
                let (_, den) =
                    rational_ratio(t / p).ok_or(ModelError::IncommensuratePeriods(t, p))?;
                den as f64 * t
            }
        });
    }
    Ok(acc)
}

/// Rational approximation `num / den` of `x` with relative error <= 1e-9
/// and denominator <= 1000, by continued fractions.
fn rational_ratio(x: f64) -> Option<(u64, u64)> {
    const MAX_DEN: f64 = 1e3;
    let (mut h0, mut h1) = (0.0_f64, 1.0_f64);
    let (mut k0, mut k1) = (1.0_f64, 0.0_f64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > MAX_DEN {
            return None;
        }
        if ((h2 / k2) - x).abs() <= 1e-9 * x.abs() {
            return Some((h2 as u64, k2 as u64));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}
