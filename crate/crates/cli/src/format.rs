//! Number and time formatting shared by every output.

/// `x` rounded to six significant digits, fixed notation for moderate
/// magnitudes and scientific otherwise. Identical inputs always give
/// identical text.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (_, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..15).contains(&exp) {
        let rounded: f64 = sci.parse().expect("round trip");
        let prec = (5 - exp).max(0) as usize;
        format!("{rounded:.prec$}")
    } else {
        sci
    }
}

/// `sig6` parsed back, for JSON numbers.
pub fn round6(x: f64) -> f64 {
    if x.is_finite() {
        sig6(x).parse().expect("formatted number")
    } else {
        x
    }
}

/// Whole seconds as `m:ss`, with a sign for negative values.
pub fn mm_ss(seconds: f64) -> String {
    let total = seconds.round() as i64;
    let sign = if total < 0 { "-" } else { "" };
    let total = total.abs();
    format!("{sign}{}:{:02}", total / 60, total % 60)
}
