//! Exact arithmetic in a quadratic extension of the rationals.
//!
//! A [`Surd`] is a number `rational + coefficient * sqrt(radicand)` with a
//! canonical radicand: square factors are pulled out, a zero coefficient
//! forces radicand 1, and a radicand of 1 folds into the rational part.
//! Canonical form makes structural equality semantic equality.
//!
//! Sums and products of surds over a single radical stay in the same
//! extension, which is all the sequential-measurement generator needs; it
//! validates that its inputs share one radical before any arithmetic, so
//! the operators here treat mixed radicals as a programming error and
//! panic.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest canonical radicand. After small-square extraction a cofactor
/// at most this large can have no remaining square factor, so the
/// representation is guaranteed canonical.
const MAX_RADICAND: u64 = 1_000_000;

/// Trial-division bound for extracting square factors.
const TRIAL_BOUND: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    rational: Rational,
    coefficient: Rational,
    radicand: u64,
}

/// Pulls every detectable square factor out of `d`, returning the
/// extracted integer factor and the canonical leftover radicand.
fn canonicalize_radicand(d: &BigUint) -> Result<(BigInt, u64)> {
    let mut rest = d.clone();
    let mut factor = BigUint::one();
    for i in 2..=TRIAL_BOUND {
        let square = BigUint::from(i) * BigUint::from(i);
        if square > rest {
            break;
        }
        while (&rest % &square).is_zero() {
            rest /= &square;
            factor *= BigUint::from(i);
        }
    }
    if rest > BigUint::from(MAX_RADICAND) {
        let root = num_integer::Roots::sqrt(&rest);
        if &root * &root == rest {
            factor *= root;
            rest = BigUint::one();
        } else {
            return Err(Error::invalid(format!(
                "radicand {d} cannot be reduced to the supported range"
            )));
        }
    }
    let rest = rest.to_u64().expect("canonical radicand fits in u64");
    Ok((BigInt::from(factor), rest))
}

impl Surd {
    /// Builds `rational + coefficient * sqrt(radicand)` in canonical form.
    /// Fails only when the radicand cannot be canonicalized exactly.
    pub fn new(rational: Rational, coefficient: Rational, radicand: u64) -> Result<Surd> {
        if radicand == 0 {
            return Ok(Surd::from_rational(rational));
        }
        let (factor, rest) = canonicalize_radicand(&BigUint::from(radicand))?;
        let coefficient = coefficient * Rational::from_integer(factor);
        Ok(Surd::assemble(rational, coefficient, rest))
    }

    fn assemble(rational: Rational, coefficient: Rational, radicand: u64) -> Surd {
        debug_assert!(radicand >= 1);
        if coefficient.is_zero() {
            return Surd {
                rational,
                coefficient: Rational::zero(),
                radicand: 1,
            };
        }
        if radicand == 1 {
            return Surd {
                rational: rational + coefficient,
                coefficient: Rational::zero(),
                radicand: 1,
            };
        }
        Surd {
            rational,
            coefficient,
            radicand,
        }
    }

    pub fn from_rational(rational: Rational) -> Surd {
        Surd {
            rational,
            coefficient: Rational::zero(),
            radicand: 1,
        }
    }

    pub fn zero() -> Surd {
        Surd::from_rational(Rational::zero())
    }

    pub fn one() -> Surd {
        Surd::from_rational(Rational::one())
    }

    /// Exact square root of a nonnegative rational, as a surd:
    /// `sqrt(p/q) = sqrt(p*q) / q`.
    pub fn sqrt_rational(r: &Rational) -> Result<Surd> {
        if r.is_negative() {
            return Err(Error::invalid("cannot take a real square root of a negative"));
        }
        if r.is_zero() {
            return Ok(Surd::zero());
        }
        let inner = (r.numer() * r.denom())
            .to_biguint()
            .expect("product of same-sign parts is nonnegative");
        let (factor, rest) = canonicalize_radicand(&inner)?;
        let coefficient = Rational::new(factor, r.denom().clone());
        Ok(Surd::assemble(Rational::zero(), coefficient, rest))
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn coefficient(&self) -> &Rational {
        &self.coefficient
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.coefficient.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.coefficient.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.rational.clone())
        } else {
            None
        }
    }

    /// True when the two values live in the same quadratic extension, so
    /// that sums and products stay representable.
    pub fn compatible(&self, other: &Surd) -> bool {
        self.is_rational() || other.is_rational() || self.radicand == other.radicand
    }

    fn shared_radicand(&self, other: &Surd) -> u64 {
        assert!(
            self.compatible(other),
            "cannot combine distinct radicals exactly: sqrt({}) and sqrt({})",
            self.radicand,
            other.radicand
        );
        if self.is_rational() {
            other.radicand
        } else {
            self.radicand
        }
    }
}

impl From<Rational> for Surd {
    fn from(r: Rational) -> Surd {
        Surd::from_rational(r)
    }
}

impl Add for &Surd {
    type Output = Surd;

    fn add(self, other: &Surd) -> Surd {
        let radicand = self.shared_radicand(other);
        Surd::assemble(
            &self.rational + &other.rational,
            &self.coefficient + &other.coefficient,
            radicand,
        )
    }
}

impl Sub for &Surd {
    type Output = Surd;

    fn sub(self, other: &Surd) -> Surd {
        self + &(-other)
    }
}

impl Neg for &Surd {
    type Output = Surd;

    fn neg(self) -> Surd {
        Surd::assemble(-self.rational.clone(), -self.coefficient.clone(), self.radicand)
    }
}

impl Mul for &Surd {
    type Output = Surd;

    fn mul(self, other: &Surd) -> Surd {
        let radicand = self.shared_radicand(other);
        let d = Rational::from_integer(BigInt::from(radicand));
        let rational =
            &self.rational * &other.rational + &(&self.coefficient * &other.coefficient) * &d;
        let coefficient =
            &self.rational * &other.coefficient + &self.coefficient * &other.rational;
        Surd::assemble(rational, coefficient, radicand)
    }
}
