//! Parsing and formatting of exact rationals as `"p/q"` strings.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Rational, Result};

/// Builds a rational from an integer pair. Panics on zero denominator; meant
/// for literals in construction code and tests.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"p/q"` or a bare integer `"p"`. Whitespace around the string is
/// ignored; the denominator must be nonzero.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = numer
        .parse()
        .map_err(|_| Error::Structure(format!("invalid rational numerator in {s:?}")))?;
    let d: BigInt = match denom {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Structure(format!("invalid rational denominator in {s:?}")))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Structure(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Canonical string form: `"p"` when the value is an integer, `"p/q"` in
/// lowest terms otherwise. Stable under parse/format round trips.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Exact conversion of a finite `f64` into a rational.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Checks membership in the closed unit interval.
pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "0", "1", "-3/7", "22/7", "-1"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_normalizes_to_lowest_terms() {
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
        assert_eq!(parse_rational("3/-6").unwrap(), ratio(-1, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }
}
