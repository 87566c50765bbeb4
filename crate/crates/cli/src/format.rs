/// Shortest of fixed or scientific notation with `digits` significant digits, trailing
/// zeros removed, matching C's `%.{digits}g`.
pub fn general(x: f64, digits: usize) -> String {
    assert!(digits >= 1, "need at least one significant digit");
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
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
    // Rounding first fixes the decimal exponent, e.g. 9.99…e-1 → 1.00…e0.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::general;

    #[test]
    fn matches_printf() {
        assert_eq!(general(0.0, 15), "0");
        assert_eq!(general(1.0, 15), "1");
        assert_eq!(general(0.585786437626905, 15), "0.585786437626905");
        assert_eq!(general(2.0 - 2f64.sqrt(), 15), "0.585786437626905");
        assert_eq!(general(std::f64::consts::FRAC_PI_2, 15), "1.5707963267949");
        assert_eq!(general(1.5e-7, 15), "1.5e-07");
        assert_eq!(general(0.0001, 15), "0.0001");
        assert_eq!(general(123456789012345678.0, 15), "1.23456789012346e+17");
        assert_eq!(general(-0.25, 3), "-0.25");
        assert_eq!(general(0.99999999, 3), "1");
    }
}
