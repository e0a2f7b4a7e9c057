//! Canonical number text: at most 9 significant digits, no trailing zeros.

/// Rounds to 9 significant digits.
pub fn canonical(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

/// Renders `v` with at most 9 significant digits, e.g. `0.5`, `230`, `1e-7`.
pub fn format_number(v: f64) -> String {
    let v = canonical(v);
    if v == 0.0 {
        return "0".to_owned();
    }
    let a = v.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
