//! Named-condition reports with three-valued verdicts.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::output::{csv_field, fmt_f64};

/// Margins at or below this size make a strict inequality inconclusive.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    /// Conjunction: fails if any fails, else inconclusive if any is.
    pub fn all<I: IntoIterator<Item = Verdict>>(verdicts: I) -> Verdict {
        let mut out = Verdict::Holds;
        for v in verdicts {
            match v {
                Verdict::Fails => return Verdict::Fails,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Holds => {}
            }
        }
        out
    }

    /// Disjunction: holds if any holds, else inconclusive if any is.
    pub fn any<I: IntoIterator<Item = Verdict>>(verdicts: I) -> Verdict {
        let mut out = Verdict::Fails;
        for v in verdicts {
            match v {
                Verdict::Holds => return Verdict::Holds,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Fails => {}
            }
        }
        out
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the computed quantity must compare with the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
    Ne,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt | Relation::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Ne => "!=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub name: String,
    pub quantity: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub verdict: Verdict,
    /// Signed distance to the threshold, positive on the satisfied side.
    pub margin: f64,
    /// Quadrature error estimate of `quantity`, when it is an integral.
    pub error_estimate: Option<f64>,
}

impl ConditionEntry {
    pub fn new(
        name: impl Into<String>,
        quantity: f64,
        relation: Relation,
        threshold: f64,
        tol: f64,
    ) -> Self {
        let (verdict, margin) = judge(quantity, relation, threshold, tol);
        ConditionEntry {
            name: name.into(),
            quantity,
            threshold,
            relation,
            verdict,
            margin,
            error_estimate: None,
        }
    }

    pub fn with_error(mut self, err: f64) -> Self {
        self.error_estimate = Some(err);
        self
    }

    pub fn strict(&self) -> bool {
        self.relation.is_strict()
    }
}

fn judge(q: f64, rel: Relation, thr: f64, tol: f64) -> (Verdict, f64) {
    if q.is_nan() || q.is_infinite() || thr.is_nan() {
        return (Verdict::Fails, f64::NAN);
    }
    let margin = match rel {
        Relation::Lt | Relation::Le => thr - q,
        Relation::Gt | Relation::Ge => q - thr,
        Relation::Ne => (q - thr).abs(),
    };
    let verdict = match rel {
        Relation::Ne if margin <= tol => Verdict::Fails,
        Relation::Ne => Verdict::Holds,
        Relation::Lt | Relation::Gt if margin.abs() <= tol => Verdict::Inconclusive,
        Relation::Lt | Relation::Gt if margin > 0.0 => Verdict::Holds,
        Relation::Le | Relation::Ge if margin >= -tol => Verdict::Holds,
        _ => Verdict::Fails,
    };
    (verdict, margin)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub title: String,
    pub entries: Vec<ConditionEntry>,
    pub overall: Verdict,
    pub notes: Vec<String>,
}

pub const REPORT_CSV_HEADER: &str =
    "name,quantity,threshold,strict,verdict,margin,relation,error_estimate";

impl ConditionReport {
    pub fn new(title: impl Into<String>) -> Self {
        ConditionReport {
            title: title.into(),
            entries: Vec::new(),
            overall: Verdict::Holds,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: ConditionEntry) -> Verdict {
        let v = entry.verdict;
        self.entries.push(entry);
        v
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Sets `overall` to the conjunction of all entries.
    pub fn conclude_all(mut self) -> Self {
        self.overall = Verdict::all(self.entries.iter().map(|e| e.verdict));
        self
    }

    /// Appends another report's entries and notes; the caller decides the
    /// overall verdict.
    pub fn absorb(&mut self, other: ConditionReport) {
        self.entries.extend(other.entries);
        self.notes.extend(other.notes);
    }

    /// Flat CSV rows (no header).
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(&e.name),
                fmt_f64(e.quantity),
                fmt_f64(e.threshold),
                e.strict(),
                e.verdict,
                fmt_f64(e.margin),
                e.relation.symbol(),
                e.error_estimate.map(fmt_f64).unwrap_or_default(),
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{REPORT_CSV_HEADER}\n{}", self.csv_rows())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.title, self.overall);
        for e in &self.entries {
            let _ = write!(
                out,
                "  [{:<12}] {}: {} {} {} (margin {})",
                e.verdict.as_str(),
                e.name,
                fmt_short(e.quantity),
                e.relation.symbol(),
                fmt_short(e.threshold),
                fmt_short(e.margin),
            );
            if let Some(err) = e.error_estimate {
                let _ = write!(out, ", quadrature error ~{err:.1e}");
            }
            out.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

fn fmt_short(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.10}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        fmt_f64(v)
    }
}
