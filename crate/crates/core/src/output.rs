//! Locale-independent number formatting and small CSV helpers.

use std::fmt::Write as _;

/// 17 significant digits in scientific notation; `inf`, `-inf`, `NaN`
/// for non-finite values. Byte-stable across platforms.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// A text field quoted when it contains a separator, quote or line break.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Two-column `t,N` CSV.
pub fn two_column_csv(header: (&str, &str), rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (t, v) in rows {
        let _ = writeln!(out, "{},{}", fmt_f64(t), fmt_f64(v));
    }
    out
}

/// Indices of at most `max_points` rows spread evenly over `len` rows,
/// always keeping the first and last.
pub fn downsample_indices(len: usize, max_points: usize) -> Vec<usize> {
    if len <= max_points || max_points < 2 {
        return (0..len).collect();
    }
    let mut idx: Vec<usize> = (0..max_points)
        .map(|i| ((i as f64) * (len - 1) as f64 / (max_points - 1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx
}
