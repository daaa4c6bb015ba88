//! Exact numbers of the form `a + b·√k` with rational `a`, `b` and a fixed
//! square-free radicand `k`.
//!
//! Published Kochen-Specker sets in three dimensions use components such as
//! `√2`; all orthogonality and ray-equality tests must be exact, so every
//! component is stored as an element of the quadratic field ℚ(√k). With
//! `k = 1` the field degenerates to ℚ and the surd part is always zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("radicand {0} is not a positive square-free integer")]
    BadRadicand(u64),
    #[error("surd part given but the field is the rationals (radicand 1)")]
    SurdInRationalField,
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("ring mismatch: sqrt {0} vs sqrt {1}")]
    RingMismatch(u64, u64),
}

/// A positive square-free integer `k` selecting the field ℚ(√k).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radicand(u64);

impl Radicand {
    pub const RATIONAL: Radicand = Radicand(1);

    pub fn new(k: u64) -> Result<Self, ScalarError> {
        if k == 0 || !is_square_free(k) {
            return Err(ScalarError::BadRadicand(k));
        }
        Ok(Radicand(k))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_rational(self) -> bool {
        self.0 == 1
    }
}

impl Default for Radicand {
    fn default() -> Self {
        Radicand::RATIONAL
    }
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_square_free(k: u64) -> bool {
    let mut p = 2u64;
    while p.saturating_mul(p) <= k {
        if k.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// `rational + surd·√radicand`, compared and zero-tested exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    rational: BigRational,
    surd: BigRational,
    radicand: Radicand,
}

impl ExactScalar {
    pub fn new(
        rational: BigRational,
        surd: BigRational,
        radicand: Radicand,
    ) -> Result<Self, ScalarError> {
        if radicand.is_rational() && !surd.is_zero() {
            return Err(ScalarError::SurdInRationalField);
        }
        Ok(ExactScalar {
            rational,
            surd,
            radicand,
        })
    }

    pub fn zero(radicand: Radicand) -> Self {
        ExactScalar {
            rational: BigRational::zero(),
            surd: BigRational::zero(),
            radicand,
        }
    }

    pub fn one(radicand: Radicand) -> Self {
        Self::from_integer(1, radicand)
    }

    pub fn from_integer(n: i64, radicand: Radicand) -> Self {
        ExactScalar {
            rational: BigRational::from_integer(BigInt::from(n)),
            surd: BigRational::zero(),
            radicand,
        }
    }

    /// `a + b·√k` with integer parts. Panics if `b ≠ 0` in ℚ.
    pub fn from_parts(a: i64, b: i64, radicand: Radicand) -> Self {
        Self::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
            radicand,
        )
        .expect("surd part in the rational field")
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    pub fn radicand(&self) -> Radicand {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    /// Parses a component token: `p`, `p/q`, or `p/q:r/s` (= p/q + (r/s)·√k).
    pub fn parse(token: &str, radicand: Radicand) -> Result<Self, ScalarError> {
        let (a, b) = match token.split_once(':') {
            Some((a, b)) => (parse_rational(a)?, parse_rational(b)?),
            None => (parse_rational(token)?, BigRational::zero()),
        };
        Self::new(a, b, radicand)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ScalarError> {
        self.same_ring(rhs)?;
        Ok(ExactScalar {
            rational: &self.rational + &rhs.rational,
            surd: &self.surd + &rhs.surd,
            radicand: self.radicand,
        })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ScalarError> {
        self.same_ring(rhs)?;
        let k = BigRational::from_integer(BigInt::from(self.radicand.0));
        Ok(ExactScalar {
            rational: &self.rational * &rhs.rational + &self.surd * &rhs.surd * k,
            surd: &self.rational * &rhs.surd + &self.surd * &rhs.rational,
            radicand: self.radicand,
        })
    }

    fn same_ring(&self, rhs: &Self) -> Result<(), ScalarError> {
        if self.radicand != rhs.radicand {
            return Err(ScalarError::RingMismatch(self.radicand.0, rhs.radicand.0));
        }
        Ok(())
    }

    /// Nearest `f64`; only for display and floating-point cross-checks.
    pub fn to_f64(&self) -> f64 {
        let a = ratio_to_f64(&self.rational);
        let b = ratio_to_f64(&self.surd);
        a + b * (self.radicand.0 as f64).sqrt()
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Strict `[-]digits[/digits]` grammar; rejects signs on the denominator,
/// underscores, whitespace and anything else `BigInt::from_str` might accept.
fn parse_rational(text: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::BadNumber(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let numer = BigInt::from_str(num).map_err(|_| bad())?;
    let denom = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let d = BigInt::from_str(d).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ScalarError::ZeroDenominator(text.to_string()));
            }
            d
        }
    };
    Ok(BigRational::new(numer, denom))
}

impl fmt::Display for ExactScalar {
    /// Canonical component token, the inverse of [`ExactScalar::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{}:{}", self.rational, self.surd)
        }
    }
}

// Operator impls panic on a ring mismatch; use the `checked_*` forms when the
// operands come from different sets.
impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        self.checked_add(rhs).expect("ring mismatch")
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        self.checked_mul(rhs).expect("ring mismatch")
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            rational: -&self.rational,
            surd: -&self.surd,
            radicand: self.radicand,
        }
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}
