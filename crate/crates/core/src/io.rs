//! Locale-independent number formatting shared by the CSV writers.

/// Shortest round-trip representation; switches to exponent form for very
/// small or very large magnitudes so columns stay readable.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
