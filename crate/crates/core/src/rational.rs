//! Exact rational scalars.
//!
//! Every matrix entry in this crate is a [`Rational`]: an arbitrary precision
//! fraction kept in canonical form (positive denominator, coprime parts), so
//! structural equality is numerical equality.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use num_rational::BigRational as Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}` (expected `a` or `a/b` with integer a, b)")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses `a` or `a/b`. Decimal points and exponents are rejected so that no
/// value ever passes through floating point.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(text.to_string());
    match text.split_once('/') {
        None => Ok(Rational::from_integer(
            parse_int(text).ok_or_else(malformed)?,
        )),
        Some((num, den)) => {
            let num = parse_int(num).ok_or_else(malformed)?;
            // the denominator carries no sign of its own
            if den.starts_with(['-', '+']) {
                return Err(malformed());
            }
            let den = parse_int(den).ok_or_else(malformed)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(text.to_string()));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Canonical text form: `a` for integers, `a/b` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn sign(value: i8) -> Rational {
    int(value as i64)
}

pub fn is_canonical(value: &Rational) -> bool {
    use num_integer::Integer;
    value.denom().is_positive() && value.numer().gcd(value.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-1/2").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational(" 4/8 ").unwrap(), frac(1, 2));
        assert_eq!(parse_rational("+7").unwrap(), int(7));
    }

    #[test]
    fn rejects_floats_and_garbage() {
        for bad in ["0.5", "1e3", "1/2.0", "a/b", "1/", "/2", "1/-2", "--1"] {
            assert!(
                matches!(parse_rational(bad), Err(ParseRationalError::Malformed(_))),
                "{bad}"
            );
        }
        assert_eq!(parse_rational(""), Err(ParseRationalError::Empty));
        assert!(matches!(
            parse_rational("3/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
    }

    #[test]
    fn canonical_form() {
        let v = parse_rational("-6/4").unwrap();
        assert!(is_canonical(&v));
        assert_eq!(format_rational(&v), "-3/2");
        assert_eq!(format_rational(&frac(4, 2)), "2");
        assert_eq!(format_rational(&int(0)), "0");
    }
}
