//! Canonical float formatting shared by every text output.

/// Format `x` with `digits` significant digits in the style of C's `%g`:
/// plain decimal for moderate exponents, scientific otherwise, trailing
/// zeros removed. Negative zero prints as `0`.
pub fn format_sig(x: f64, digits: usize) -> String {
    debug_assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

/// Nine significant digits, the precision used in all CSV outputs.
pub fn sig9(x: f64) -> String {
    format_sig(x, 9)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round to `decimals` places, ties to even, and format with exactly that
/// many decimals.
pub fn round_half_even(x: f64, decimals: u32) -> String {
    let scale = 10f64.powi(decimals as i32);
    let scaled = x * scale;
    let floor = scaled.floor();
    let diff = scaled - floor;
    let rounded = if (diff - 0.5).abs() < 1e-9 {
        if floor.rem_euclid(2.0) == 0.0 {
            floor
        } else {
            floor + 1.0
        }
    } else {
        scaled.round()
    };
    format!("{:.*}", decimals as usize, rounded / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sig9_examples() {
        assert_eq!(sig9(0.2), "0.2");
        assert_eq!(sig9(0.6000000000000001), "0.6");
        assert_eq!(sig9(-0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(123456789.0), "123456789");
        assert_eq!(sig9(1234567890.0), "1.23456789e9");
        assert_eq!(sig9(1.5e-7), "1.5e-7");
        assert_eq!(sig9(-0.000123), "-0.000123");
        assert_eq!(sig9(9.9999999996), "10");
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even(0.8849, 2), "0.88");
        assert_eq!(round_half_even(0.0451, 2), "0.05");
        assert_eq!(round_half_even(0.125, 2), "0.12");
        assert_eq!(round_half_even(0.375, 2), "0.38");
        assert_eq!(round_half_even(0.7397, 2), "0.74");
        assert_eq!(round_half_even(0.5, 2), "0.50");
        assert_eq!(round_half_even(0.0, 2), "0.00");
    }

    proptest! {
        #[test]
        fn sig9_is_a_fixed_point(x in -1e12f64..1e12) {
            let once = sig9(x);
            let parsed: f64 = once.parse().unwrap();
            prop_assert_eq!(sig9(parsed), once);
        }
    }
}
