//! Human-oriented number formatting.

/// `x` rounded to `digits` significant digits, fixed-point when that stays short.
pub fn sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = digits as i64 - 1 - magnitude;
    if (0..=12).contains(&decimals) {
        format!("{x:.*}", decimals as usize)
    } else if decimals < 0 && magnitude < 15 {
        format!("{x:.0}")
    } else {
        format!("{x:.*e}", digits - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(sig_digits((-7.0f64 / 8.0).exp(), 6), "0.416862");
        assert_eq!(sig_digits(0.5, 6), "0.500000");
        assert_eq!(sig_digits(0.0, 6), "0");
        assert_eq!(sig_digits(1.234567e-20, 6), "1.23457e-20");
        assert_eq!(sig_digits(0.00012345678, 6), "0.000123457");
    }
}
