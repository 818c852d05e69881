//! Deterministic number formatting shared by every CSV writer.

/// Significant digits written for every floating-point value.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, trailing zeros
/// removed. Plain decimal notation is used for magnitudes in `[1e-5, 1e12)`,
/// scientific notation otherwise. Negative zero prints as `0`.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Round to the requested precision first so the exponent accounts for carries.
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

/// Joins formatted values with `,`.
pub fn csv_row<I: IntoIterator<Item = f64>>(values: I) -> String {
    values.into_iter().map(format_value).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_value(-1.0), "-1");
        assert_eq!(format_value(2.5), "2.5");
        assert_eq!(format_value(0.381966011250105), "0.38196601125");
        assert_eq!(format_value(1234567.891234567), "1234567.89123");
    }

    #[test]
    fn zero_and_negative_zero() {
        assert_eq!(format_value(0.0), "0");
        assert_eq!(format_value(-0.0), "0");
        assert_eq!(format_value(-1e-20), "-1e-20");
    }

    #[test]
    fn carries_into_next_decade() {
        assert_eq!(format_value(9.9999999999999), "10");
        assert_eq!(format_value(1.5e13), "1.5e13");
        assert_eq!(format_value(2.0e-7), "2e-7");
    }
}
