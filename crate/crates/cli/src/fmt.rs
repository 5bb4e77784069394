//! Deterministic number formatting for stdout and CSV output.

/// Renders 12 significant digits: fixed notation for moderate magnitudes,
/// scientific outside `[1e-4, 1e12)`. Zero prints as `0.000000000000` so the
/// identity case reads unambiguously.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0.000000000000".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let e = v.abs().log10().floor() as i32;
    if (-4..12).contains(&e) {
        let prec = (11 - e).max(0) as usize;
        format!("{v:.prec$}")
    } else {
        format!("{v:.11e}")
    }
}

/// Wall-clock seconds for the timing columns; these are excluded from the
/// determinism contract, so short fixed precision is enough.
pub fn secs(v: f64) -> String {
    format!("{v:.6}")
}
