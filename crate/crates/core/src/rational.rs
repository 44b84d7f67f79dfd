//! Exact rational scalars and their external "p/q" string form.

use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed};

/// The only scalar type used in probability arithmetic. Arbitrary-precision
/// numerator and denominator, always stored reduced.
pub type Rational = BigRational;

/// Builds a rational from machine integers. Intended for literals in tests
/// and fixtures.
///
/// Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// Parses the external form: "p/q" or a plain integer, optionally signed,
/// with no whitespace. Returns `None` on any syntax problem, including a
/// zero denominator; callers attach location context to the error they
/// build from it.
pub fn parse_rational(text: &str) -> Option<Rational> {
    Rational::from_str(text).ok()
}

/// Renders the canonical external form: reduced, "p/q" when the denominator
/// is not 1, plain integer otherwise. Inverse of [`parse_rational`] on its
/// image.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// True when `value` lies in the closed interval [0, 1].
pub fn is_probability(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}
