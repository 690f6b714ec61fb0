//! Exact determinants.
//!
//! Over the rationals each row is first scaled to integers, then reduced with
//! Bareiss' fraction-free elimination so every intermediate value is an
//! integer. Over a prime field plain Gaussian elimination with a nonzero pivot
//! search is exact and cheap.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{mod_inv, FieldError, FieldSpec, Scalar};

/// Determinant of an `n × n` row-major table. The empty table has determinant 1.
pub fn determinant(field: FieldSpec, n: usize, entries: &[Scalar]) -> Result<Scalar, FieldError> {
    assert_eq!(entries.len(), n * n, "determinant expects an n×n table");
    if let Some(bad) = entries.iter().find(|s| s.field() != field) {
        return Err(FieldError::FieldMismatch(field, bad.field()));
    }
    Ok(match field {
        FieldSpec::Rational => {
            let rows: Vec<&BigRational> = entries
                .iter()
                .map(|s| s.as_rational().expect("checked field"))
                .collect();
            Scalar::Rational(rational_det(n, &rows))
        }
        FieldSpec::Prime { p } => {
            let vals: Vec<u64> = entries
                .iter()
                .map(|s| match s {
                    Scalar::Prime { value, .. } => *value as u64,
                    Scalar::Rational(_) => unreachable!(),
                })
                .collect();
            Scalar::Prime {
                value: prime_det(n, vals, p as u64) as u32,
                modulus: p,
            }
        }
    })
}

/// Determinant of a square table given as rows.
pub fn determinant_rows(field: FieldSpec, rows: &[Vec<Scalar>]) -> Result<Scalar, FieldError> {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "determinant expects a square table");
    let flat: Vec<Scalar> = rows.iter().flatten().cloned().collect();
    determinant(field, n, &flat)
}

fn rational_det(n: usize, entries: &[&BigRational]) -> BigRational {
    let mut scale = BigInt::one();
    let mut a: Vec<BigInt> = Vec::with_capacity(n * n);
    for row in entries.chunks(n.max(1)).take(n) {
        let lcm = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        a.extend(row.iter().map(|r| r.numer() * (&lcm / r.denom())));
        scale *= lcm;
    }
    BigRational::new(bareiss(n, a), scale)
}

/// Fraction-free elimination on an integer matrix. Every division is exact.
pub(crate) fn bareiss(n: usize, mut a: Vec<BigInt>) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(pivot) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    let d = a[n * n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

pub(crate) fn prime_det(n: usize, mut a: Vec<u64>, p: u64) -> u64 {
    let mut det = 1u64;
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&i| a[i * n + k] != 0) else {
            return 0;
        };
        if pivot != k {
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            det = (p - det) % p;
        }
        let pv = a[k * n + k];
        det = det * pv % p;
        let inv = mod_inv(pv, p);
        for i in k + 1..n {
            let factor = a[i * n + k] * inv % p;
            if factor == 0 {
                continue;
            }
            for j in k..n {
                let sub = factor * a[k * n + j] % p;
                a[i * n + j] = (a[i * n + j] + p - sub) % p;
            }
        }
    }
    det
}
