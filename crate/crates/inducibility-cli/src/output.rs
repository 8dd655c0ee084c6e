//! Rendering helpers: rationals as `num/den` plus a 12-significant-digit
//! decimal, floats in shortest round-trip form.

use num::{BigRational, ToPrimitive, Zero};

/// `num/den` in lowest terms.
pub fn ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal with 12 significant digits; positional for moderate exponents,
/// scientific otherwise. Display only, never compared.
pub fn decimal12(r: &BigRational) -> String {
    if r.is_zero() {
        return "0".to_owned();
    }
    sig12(r.to_f64().unwrap_or(f64::NAN))
}

pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_owned();
    }
    let formatted = format!("{:.11e}", v);
    let (mantissa, exp) = formatted.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..12).contains(&exp) {
        return formatted;
    }
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = digits.chars().filter(|c| *c != '.').collect();
    let rendered = if exp >= 0 {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{rendered}")
}

/// `num/den = decimal` for text output.
pub fn ratio_with_decimal(r: &BigRational) -> String {
    format!("{} = {}", ratio(r), decimal12(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(decimal12(&rat(45, 217)), "0.207373271889");
        assert_eq!(decimal12(&rat(1, 1)), "1.00000000000");
        assert_eq!(decimal12(&rat(15, 1)), "15.0000000000");
        assert_eq!(decimal12(&rat(-1, 4)), "-0.250000000000");
        assert_eq!(decimal12(&rat(0, 1)), "0");
        assert_eq!(decimal12(&rat(1, 10_000)), "0.000100000000000");
        assert_eq!(decimal12(&rat(1, 100_000)), "1.00000000000e-5");
    }

    #[test]
    fn extreme_exponents_stay_scientific() {
        assert_eq!(sig12(1.0e-7), "1.00000000000e-7");
        assert!(sig12(3.5e14).contains('e'));
    }
}
