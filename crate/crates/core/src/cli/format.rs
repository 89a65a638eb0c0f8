//! Numeric serialization shared by every command.

/// Significant digits in every printed number.
pub const SIG_DIGITS: usize = 12;

/// Formats `v` with 12 significant digits: fixed-point for `1e-4 ≤ |v| < 1e6`,
/// lowercase scientific otherwise, and `0` for zero.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string().to_lowercase();
    }
    // The exponent is taken after rounding so 9.9999999999995 lands in the next decade.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
    format!("{v:.decimals$}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}
