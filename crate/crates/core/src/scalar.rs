//! Exact scalars over the rationals and over prime fields.
//!
//! Every kernel entry, gauge value and cocycle value is a [`Scalar`]. Values
//! are kept in canonical form (reduced fractions with a positive denominator,
//! or residues in `[0, p)`), so structural equality is field equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible prime modulus (exclusive). Products of two residues fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} outside [2, 2^31)")]
    ModulusOutOfRange(u64),
    #[error("cannot parse {input:?} as a scalar of {field}")]
    Parse { input: String, field: FieldSpec },
    #[error("unknown field {0:?} (expected `rational` or `prime:P`)")]
    UnknownField(String),
}

/// The field a kernel lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Rational,
    Prime { p: u32 },
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if !(2..MAX_MODULUS).contains(&p) {
            return Err(FieldError::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldSpec::Prime { p: p as u32 })
    }

    /// Re-checks the modulus of a value that may have come from deserialization.
    pub fn validate(self) -> Result<Self, FieldError> {
        match self {
            FieldSpec::Rational => Ok(self),
            FieldSpec::Prime { p } => FieldSpec::prime(p as u64),
        }
    }

    pub fn modulus(self) -> Option<u32> {
        match self {
            FieldSpec::Rational => None,
            FieldSpec::Prime { p } => Some(p),
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::Prime { p } => Scalar::Prime {
                value: v.rem_euclid(p as i64) as u32,
                modulus: p,
            },
        }
    }

    /// Builds `num/den` in this field. `den` must be nonzero in the field.
    pub fn from_ratio(self, num: i64, den: i64) -> Result<Scalar, FieldError> {
        self.from_i64(num).checked_div(&self.from_i64(den))
    }

    /// Parses the scalar text syntax: `a/b` or `a` for rationals, a decimal
    /// integer (reduced mod p) for prime fields.
    pub fn parse_scalar(self, s: &str) -> Result<Scalar, FieldError> {
        let err = || FieldError::Parse {
            input: s.to_string(),
            field: self,
        };
        let t = s.trim();
        match self {
            FieldSpec::Rational => {
                let (num, den) = match t.split_once('/') {
                    Some((a, b)) => (parse_int(a).ok_or_else(err)?, parse_int(b).ok_or_else(err)?),
                    None => (parse_int(t).ok_or_else(err)?, BigInt::one()),
                };
                if den.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Scalar::Rational(BigRational::new(num, den)))
            }
            FieldSpec::Prime { p } => {
                let v = parse_int(t).ok_or_else(err)?;
                let m = BigInt::from(p);
                let r = ((v % &m) + &m) % &m;
                let value = u32::try_from(r).map_err(|_| err())?;
                Ok(Scalar::Prime { value, modulus: p })
            }
        }
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.strip_prefix('+').unwrap_or(s).parse().ok()
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "rational"),
            FieldSpec::Prime { p } => write!(f, "prime:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("rational") || s == "Q" {
            return Ok(FieldSpec::Rational);
        }
        let p = s
            .strip_prefix("prime:")
            .or_else(|| s.strip_prefix("GF"))
            .and_then(|rest| rest.trim_matches(['(', ')']).parse::<u64>().ok())
            .ok_or_else(|| FieldError::UnknownField(s.to_string()))?;
        FieldSpec::prime(p)
    }
}

/// An exact field element in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Prime { value: u32, modulus: u32 },
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime.
pub(crate) fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    mod_pow(a, p - 2, p)
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rational,
            Scalar::Prime { modulus, .. } => FieldSpec::Prime { p: *modulus },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<(), FieldError> {
        let (a, b) = (self.field(), other.field());
        if a == b {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(a, b))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime { value: a, modulus }, Scalar::Prime { value: b, .. }) => Scalar::Prime {
                value: ((*a as u64 + *b as u64) % *modulus as u64) as u32,
                modulus: *modulus,
            },
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime { value: a, modulus }, Scalar::Prime { value: b, .. }) => Scalar::Prime {
                value: (*a as u64 * *b as u64 % *modulus as u64) as u32,
                modulus: *modulus,
            },
            _ => unreachable!(),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: mod_inv(*value as u64, *modulus as u64) as u32,
                modulus: *modulus,
            },
        })
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Prime { .. } => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Prime { value, .. } => write!(f, "{value}"),
        }
    }
}

// Operator forms panic on a field mismatch. Kernels guarantee a single field
// for all of their entries, so inside the crate the checked forms are only
// needed at input boundaries.

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).expect("scalar field mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.checked_sub(rhs).expect("scalar field mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).expect("scalar field mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Product of an iterator of scalars; `one` for the empty product.
pub fn product<'a>(field: FieldSpec, items: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
    items.into_iter().fold(field.one(), |acc, s| &acc * s)
}
