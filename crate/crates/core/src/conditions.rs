//! Numerical evaluation of the sufficient conditions for persistence,
//! existence of a periodic solution, the 3/2 stability criterion, global
//! attraction and local stability.
//!
//! Infima and suprema over time are grid extrema over one common period;
//! `limsup` of a lagged integral is its supremum over one period because
//! every input is periodic or constant.

use crate::model::{uniform_grid, CoefficientSpec, DelaySpec, ModelParams, ProportionalParams};
use crate::quadrature::{lagged_integral_sup_with, LaggedIntegral, QuadratureConfig};
use crate::report::{ConditionEntry, ConditionReport, Relation, Verdict, DEFAULT_TOLERANCE};

pub use crate::quadrature::lagged_integral_sup;

/// Threshold of the 3/2 criterion for `x' + r(t) x(h(t)) = 0`.
pub const THREE_HALVES: f64 = 1.5;
/// Threshold of the global-attraction integral condition.
pub const ATTRACTION_BOUND: f64 = 6.0;

pub const DELAY_INTEGRAL_NAME: &str = "gamma * sup int_theta^t a < 6";
pub const RATE_INTEGRAL_NAME: &str = "gamma * a * sup int_theta^t r < 6";
pub const LINEARIZED_NAME: &str = "gamma (a-b) b / a * sup int_theta^t r < 3/2";
pub const THREE_HALVES_NAME: &str = "sup int_h^t r < 3/2";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionsConfig {
    pub quadrature: QuadratureConfig,
    /// Samples per period for coefficient infima and suprema.
    pub coefficient_grid: usize,
    pub tolerance: f64,
}

impl Default for ConditionsConfig {
    fn default() -> Self {
        ConditionsConfig {
            quadrature: QuadratureConfig::default(),
            coefficient_grid: crate::model::VALIDATION_SAMPLES,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl ConditionsConfig {
    fn entry(&self, name: impl Into<String>, q: f64, rel: Relation, thr: f64) -> ConditionEntry {
        ConditionEntry::new(name, q, rel, thr, self.tolerance)
    }

    fn lagged<F: Fn(f64) -> f64>(&self, f: F, delay: &DelaySpec, period: f64) -> LaggedIntegral {
        lagged_integral_sup_with(f, delay, period, self.quadrature)
    }

    fn extrema<F: Fn(f64) -> f64>(&self, f: F, period: f64) -> (f64, f64) {
        uniform_grid(0.0, period, self.coefficient_grid)
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }
}

fn period_or_report(params: &ModelParams, report: &mut ConditionReport, tol: f64) -> Option<f64> {
    match params.common_period() {
        Ok(p) => Some(p),
        Err(e) => {
            report.push(ConditionEntry::new(
                "common period T > 0",
                f64::NAN,
                Relation::Gt,
                0.0,
                tol,
            ));
            report.note(e.to_string());
            None
        }
    }
}

pub fn check_persistence(params: &ModelParams) -> ConditionReport {
    check_persistence_with(params, &ConditionsConfig::default())
}

/// Persistence: `a(t) > b(t)` and finite suprema of `∫_{θ(t)}^t (a - b)`
/// and `∫_{θ(t)}^t b`.
pub fn check_persistence_with(params: &ModelParams, cfg: &ConditionsConfig) -> ConditionReport {
    let mut report = ConditionReport::new("persistence");
    let Some(period) = period_or_report(params, &mut report, cfg.tolerance) else {
        return report.conclude_all();
    };
    let excess = |t: f64| params.a.eval(t) - params.b.eval(t);
    let (min_excess, _) = cfg.extrema(excess, period);
    report.push(cfg.entry("a(t) > b(t)", min_excess, Relation::Gt, 0.0));
    let ia = cfg.lagged(excess, &params.delay, period);
    report.push(
        cfg.entry(
            "sup int_theta^t (a-b) < inf",
            ia.sup,
            Relation::Lt,
            f64::INFINITY,
        )
        .with_error(ia.error_estimate),
    );
    let ib = cfg.lagged(|t| params.b.eval(t), &params.delay, period);
    report.push(
        cfg.entry(
            "sup int_theta^t b < inf",
            ib.sup,
            Relation::Lt,
            f64::INFINITY,
        )
        .with_error(ib.error_estimate),
    );
    if min_excess.abs() <= cfg.tolerance {
        report
            .note("a(t) = b(t) at some grid time: the strict premise a(t) > b(t) is not certified");
    }
    report.conclude_all()
}

pub fn check_periodic_existence(params: &ModelParams) -> ConditionReport {
    check_periodic_existence_with(params, &ConditionsConfig::default())
}

/// Existence of a periodic solution: `inf C > 1` or `sup C < 1`
/// with `C(t) = (a(t)/b(t) - 1) K(t)^γ`.
pub fn check_periodic_existence_with(
    params: &ModelParams,
    cfg: &ConditionsConfig,
) -> ConditionReport {
    let mut report = ConditionReport::new("periodic solution existence");
    let Some(period) = period_or_report(params, &mut report, cfg.tolerance) else {
        return report.conclude_all();
    };
    let (min_excess, _) = cfg.extrema(|t| params.a.eval(t) - params.b.eval(t), period);
    let premise = report.push(cfg.entry("a(t) >= b(t)", min_excess, Relation::Ge, 0.0));
    let c =
        |t: f64| (params.a.eval(t) / params.b.eval(t) - 1.0) * params.k.eval(t).powf(params.gamma);
    let (c_lo, c_hi) = cfg.extrema(c, period);
    let b1 = report.push(cfg.entry("inf (a/b-1) K^gamma > 1", c_lo, Relation::Gt, 1.0));
    let b2 = report.push(cfg.entry("sup (a/b-1) K^gamma < 1", c_hi, Relation::Lt, 1.0));
    report.overall = Verdict::all([premise, Verdict::any([b1, b2])]);
    report
}

pub fn check_three_halves(r: &CoefficientSpec, delay: &DelaySpec) -> ConditionReport {
    check_three_halves_with(r, delay, &ConditionsConfig::default())
}

/// `r(t) >= r0 > 0` and `sup ∫_{h(t)}^t r(s) ds < 3/2`.
pub fn check_three_halves_with(
    r: &CoefficientSpec,
    delay: &DelaySpec,
    cfg: &ConditionsConfig,
) -> ConditionReport {
    let mut report = ConditionReport::new("3/2 criterion");
    let period = match crate::model::common_period(r.period().into_iter().chain(delay.period())) {
        Ok(p) => p.unwrap_or(1.0),
        Err(e) => {
            report.push(cfg.entry("common period T > 0", f64::NAN, Relation::Gt, 0.0));
            report.note(e.to_string());
            return report.conclude_all();
        }
    };
    let (r_lo, _) = cfg.extrema(|t| r.eval(t), period);
    report.push(cfg.entry("r(t) >= r0 > 0", r_lo, Relation::Gt, 0.0));
    let ir = cfg.lagged(|t| r.eval(t), delay, period);
    report.push(
        cfg.entry(THREE_HALVES_NAME, ir.sup, Relation::Lt, THREE_HALVES)
            .with_error(ir.error_estimate),
    );
    report.conclude_all()
}

pub fn check_global_attraction(params: &ModelParams) -> ConditionReport {
    check_global_attraction_with(params, &ConditionsConfig::default())
}

/// Global attraction of the periodic solution: persistence hypotheses,
/// periodic existence, `a(t) >= a0 > 0` and `γ sup ∫_{θ(t)}^t a < 6`.
pub fn check_global_attraction_with(
    params: &ModelParams,
    cfg: &ConditionsConfig,
) -> ConditionReport {
    let mut report = ConditionReport::new("global attraction");
    let persistence = check_persistence_with(params, cfg);
    let existence = check_periodic_existence_with(params, cfg);
    let (v1, v2) = (persistence.overall, existence.overall);
    report.absorb(persistence);
    report.absorb(existence);
    let Some(period) = period_or_report(params, &mut report, cfg.tolerance) else {
        return report.conclude_all();
    };
    let (a_lo, _) = cfg.extrema(|t| params.a.eval(t), period);
    let a0 = report.push(cfg.entry("a(t) >= a0 > 0", a_lo, Relation::Gt, 0.0));
    let ia = cfg.lagged(|t| params.a.eval(t), &params.delay, period);
    let delay_integral = report.push(
        cfg.entry(
            DELAY_INTEGRAL_NAME,
            params.gamma * ia.sup,
            Relation::Lt,
            ATTRACTION_BOUND,
        )
        .with_error(params.gamma * ia.error_estimate),
    );
    report.overall = Verdict::all([v1, v2, a0, delay_integral]);
    report
}

pub fn check_equilibrium_attraction(params: &ProportionalParams) -> ConditionReport {
    check_equilibrium_attraction_with(params, &ConditionsConfig::default())
}

/// Global attraction of the equilibrium of the proportional model.
pub fn check_equilibrium_attraction_with(
    params: &ProportionalParams,
    cfg: &ConditionsConfig,
) -> ConditionReport {
    let mut report = ConditionReport::new("equilibrium global attraction");
    report.push(cfg.entry("a > b", params.a, Relation::Gt, params.b));
    let Some(period) = proportional_period(params, &mut report, cfg) else {
        return report.conclude_all();
    };
    let (r_lo, _) = cfg.extrema(|t| params.r.eval(t), period);
    report.push(cfg.entry("r(t) >= r0 > 0", r_lo, Relation::Gt, 0.0));
    let c = (params.a / params.b - 1.0) * params.k.powf(params.gamma);
    report.push(cfg.entry("(a/b-1) K^gamma != 1", c, Relation::Ne, 1.0));
    let ir = cfg.lagged(|t| params.r.eval(t), &params.delay, period);
    let scale = params.gamma * params.a;
    report.push(
        cfg.entry(
            RATE_INTEGRAL_NAME,
            scale * ir.sup,
            Relation::Lt,
            ATTRACTION_BOUND,
        )
        .with_error(scale * ir.error_estimate),
    );
    report.conclude_all()
}

pub fn check_local_stability(params: &ProportionalParams) -> ConditionReport {
    check_local_stability_with(params, &ConditionsConfig::default())
}

/// Local asymptotic stability of the equilibrium via the linearized
/// equation and the 3/2 criterion.
pub fn check_local_stability_with(
    params: &ProportionalParams,
    cfg: &ConditionsConfig,
) -> ConditionReport {
    let mut report = ConditionReport::new("equilibrium local stability");
    report.push(cfg.entry("a > b", params.a, Relation::Gt, params.b));
    let Some(period) = proportional_period(params, &mut report, cfg) else {
        return report.conclude_all();
    };
    let (r_lo, _) = cfg.extrema(|t| params.r.eval(t), period);
    report.push(cfg.entry("r(t) >= r0 > 0", r_lo, Relation::Gt, 0.0));
    let ir = cfg.lagged(|t| params.r.eval(t), &params.delay, period);
    let coef = params.linear_coefficient();
    report.push(
        cfg.entry(LINEARIZED_NAME, coef * ir.sup, Relation::Lt, THREE_HALVES)
            .with_error(coef.abs() * ir.error_estimate),
    );
    report.conclude_all()
}

fn proportional_period(
    params: &ProportionalParams,
    report: &mut ConditionReport,
    cfg: &ConditionsConfig,
) -> Option<f64> {
    match params.common_period() {
        Ok(p) => Some(p),
        Err(e) => {
            report.push(cfg.entry("common period T > 0", f64::NAN, Relation::Gt, 0.0));
            report.note(e.to_string());
            None
        }
    }
}
