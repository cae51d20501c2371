//! Locale-free number formatting with 15 significant digits, in the style of C's `%.15g`.

const DIGITS: i32 = 15;

pub fn g15(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // the exponent after rounding to DIGITS significant digits
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to what [`g15`] prints.
pub fn round15(x: f64) -> f64 {
    if x.is_finite() {
        g15(x).parse().expect("g15 output parses")
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333333"),
            (2.0 / 3.0, "0.666666666666667"),
            (123456789012345.0, "123456789012345"),
            (1234567890123456.0, "1.23456789012346e+15"),
            (1e-5, "1e-05"),
            (0.0001, "0.0001"),
            (-1.5e-300, "-1.5e-300"),
            (999_999_999_999_999.9, "1e+15"),
            (0.086428, "0.086428"),
            (f64::NAN, "nan"),
        ];
        for (x, s) in cases {
            assert_eq!(g15(x), s, "{x:e}");
        }
    }

    #[test]
    fn rounding_is_idempotent() {
        let x = 1.0 / 7.0;
        assert_eq!(g15(x), "0.142857142857143");
        assert_eq!(round15(x), "0.142857142857143".parse::<f64>().unwrap());
        assert_eq!(round15(round15(x)), round15(x));
    }
}
