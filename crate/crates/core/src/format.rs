//! Fixed-precision float formatting shared by the JSON and CSV writers.

/// Scientific notation with `digits` significant digits, e.g. `1.50000000000e-3`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    format!("{:.*e}", digits - 1, x)
}

/// 17 significant digits: enough for any `f64` to survive a text round trip.
pub fn fmt_f64_17(x: f64) -> String {
    fmt_sig(x, 17)
}

/// 12 significant digits, the precision of every CSV value.
pub fn fmt_f64_12(x: f64) -> String {
    fmt_sig(x, 12)
}
