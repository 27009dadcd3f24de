use super::{HistorySpec, ModelParams};
use crate::report::{ConditionEntry, ConditionReport, Relation, DEFAULT_TOLERANCE};

/// Default number of grid samples over one validation window.
pub const VALIDATION_SAMPLES: usize = 4096;

/// `(start, length)` of the window sampled by validation: one common period,
/// or `max_lag + 1` for autonomous models.
pub fn validation_window(params: &ModelParams) -> (f64, f64) {
    if params.is_autonomous() && params.period.is_none() {
        let (_, max_lag) = params.delay.lag_extrema(VALIDATION_SAMPLES);
        (0.0, max_lag.max(0.0) + 1.0)
    } else {
        (0.0, params.common_period().unwrap_or(1.0))
    }
}

pub fn validate(params: &ModelParams, history: &HistorySpec) -> ConditionReport {
    validate_with(params, history, VALIDATION_SAMPLES)
}

/// Checks the standing hypotheses on the coefficients, the delay and the
/// initial data on a uniform grid. Never fails; findings go into the report.
pub fn validate_with(
    params: &ModelParams,
    history: &HistorySpec,
    samples: usize,
) -> ConditionReport {
    let tol = DEFAULT_TOLERANCE;
    let mut report = ConditionReport::new("model hypotheses");

    report.push(ConditionEntry::new(
        "gamma > 0",
        params.gamma,
        Relation::Gt,
        0.0,
        tol,
    ));

    for (name, spec) in [("a", &params.a), ("b", &params.b), ("K", &params.k)] {
        if let Err(e) = spec.check() {
            report.push(ConditionEntry::new(
                format!("{name}(t) well-formed"),
                f64::NAN,
                Relation::Ge,
                0.0,
                tol,
            ));
            report.note(format!("{name}: {e}"));
        }
    }
    if let Err(e) = history.phi.check() {
        report.push(ConditionEntry::new(
            "phi(t) well-formed",
            f64::NAN,
            Relation::Ge,
            0.0,
            tol,
        ));
        report.note(format!("phi: {e}"));
    }
    if let Err(e) = params.delay.check() {
        report.push(ConditionEntry::new(
            "lag well-formed",
            f64::NAN,
            Relation::Ge,
            0.0,
            tol,
        ));
        report.note(format!("delay: {e}"));
    }

    let period = params.common_period();
    match &period {
        Ok(p) => {
            report.push(ConditionEntry::new(
                "common period T > 0",
                *p,
                Relation::Gt,
                0.0,
                tol,
            ));
        }
        Err(e) => {
            report.push(ConditionEntry::new(
                "common period T > 0",
                f64::NAN,
                Relation::Gt,
                0.0,
                tol,
            ));
            report.note(e.to_string());
        }
    }

    let (start, length) = validation_window(params);
    let (a_lo, _) = params.a.grid_extrema(start, length, samples);
    let (b_lo, _) = params.b.grid_extrema(start, length, samples);
    let (k_lo, k_hi) = params.k.grid_extrema(start, length, samples);
    report.push(ConditionEntry::new(
        "a(t) >= 0",
        a_lo,
        Relation::Ge,
        0.0,
        tol,
    ));
    report.push(ConditionEntry::new(
        "b(t) >= b > 0",
        b_lo,
        Relation::Gt,
        0.0,
        tol,
    ));
    report.push(ConditionEntry::new(
        "K(t) >= k > 0",
        k_lo,
        Relation::Gt,
        0.0,
        tol,
    ));
    // The upper bound of K(t) shares its symbol with the function itself.
    report.push(ConditionEntry::new(
        "K(t) <= K_high < inf",
        k_hi,
        Relation::Lt,
        f64::INFINITY,
        tol,
    ));

    let (lag_lo, lag_hi) = params.delay.lag_extrema(samples);
    report.push(ConditionEntry::new(
        "theta(t) <= t",
        lag_lo,
        Relation::Ge,
        0.0,
        tol,
    ));
    report.push(ConditionEntry::new(
        "sup lag < inf",
        lag_hi,
        Relation::Lt,
        f64::INFINITY,
        tol,
    ));

    let reach = if lag_hi > 0.0 { lag_hi } else { 1.0 };
    let (phi_lo, phi_hi) = history.phi.grid_extrema(-reach, reach, samples);
    report.push(ConditionEntry::new(
        "phi(t) >= 0",
        phi_lo,
        Relation::Ge,
        0.0,
        tol,
    ));
    report.push(ConditionEntry::new(
        "sup phi < inf",
        phi_hi,
        Relation::Lt,
        f64::INFINITY,
        tol,
    ));
    report.push(ConditionEntry::new(
        "N0 > 0",
        history.n0,
        Relation::Gt,
        0.0,
        tol,
    ));

    report.conclude_all()
}
