//! Cocycle functions: two-index tables with unit products around every cycle.
//!
//! Unit products on 1-, 2- and 3-cycles already force unit products on cycles
//! of every length, so [`verify_cocycle`] checks exactly those three families.
//! A verified cocycle factors as `c(x, y) = g(x)·g(y)⁻¹`, and
//! [`extract_gauge`] recovers such a `g`.

use serde::Serialize;

use crate::kernel::{Cycle, Gauge, KernelError};
use crate::scalar::{product, FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleFn {
    field: FieldSpec,
    n: usize,
    table: Vec<Scalar>,
}

impl CocycleFn {
    pub fn from_table(field: FieldSpec, n: usize, table: Vec<Scalar>) -> Result<Self, KernelError> {
        if table.len() != n * n {
            return Err(KernelError::LengthMismatch { expected: n * n, found: table.len() });
        }
        if let Some(bad) = table.iter().find(|s| s.field() != field) {
            return Err(crate::scalar::FieldError::FieldMismatch(field, bad.field()).into());
        }
        Ok(CocycleFn { field, n, table })
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        CocycleFn {
            field,
            n,
            table: vec![field.one(); n * n],
        }
    }

    /// The coboundary `c(x, y) = g(x)/g(y)` of a gauge.
    pub fn from_gauge(g: &Gauge) -> Self {
        let n = g.len();
        let field = g.values().first().map(Scalar::field).unwrap_or(FieldSpec::Rational);
        let inv = g.inverse();
        let table = (0..n * n).map(|k| g.get(k / n) * inv.get(k % n)).collect();
        CocycleFn { field, n, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, x: usize, y: usize) -> &Scalar {
        &self.table[x * self.n + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: Scalar) {
        self.table[x * self.n + y] = v;
    }

    /// `c[p]`, the product around a cycle.
    pub fn cycle_product(&self, p: &Cycle) -> Scalar {
        product(self.field, p.edges().map(|(a, b)| self.get(a, b)))
    }
}

/// The first family member whose product is not 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CocycleViolation {
    Diagonal { x: usize },
    TwoCycle { x: usize, y: usize },
    ThreeCycle { x: usize, y: usize, z: usize },
}

impl CocycleViolation {
    pub fn points(&self) -> Vec<usize> {
        match *self {
            CocycleViolation::Diagonal { x } => vec![x],
            CocycleViolation::TwoCycle { x, y } => vec![x, y],
            CocycleViolation::ThreeCycle { x, y, z } => vec![x, y, z],
        }
    }
}

/// Checks `c(x,x) = 1`, `c(x,y)c(y,x) = 1` and `c(x,y)c(y,z)c(z,x) = 1`, in that order.
pub fn verify_cocycle(c: &CocycleFn) -> Result<(), CocycleViolation> {
    let n = c.n();
    for x in 0..n {
        if !c.get(x, x).is_one() {
            return Err(CocycleViolation::Diagonal { x });
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if !(c.get(x, y) * c.get(y, x)).is_one() {
                return Err(CocycleViolation::TwoCycle { x, y });
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                for (a, b, d) in [(x, y, z), (x, z, y)] {
                    if !(&(c.get(a, b) * c.get(b, d)) * c.get(d, a)).is_one() {
                        return Err(CocycleViolation::ThreeCycle { x: a, y: b, z: d });
                    }
                }
            }
        }
    }
    Ok(())
}

/// `g(x) = c(x, base)`, so `g(base) = 1` and `c(x, y) = g(x)·g(y)⁻¹` for a verified cocycle.
pub fn extract_gauge(c: &CocycleFn, base: usize) -> Result<Gauge, KernelError> {
    if base >= c.n() {
        return Err(KernelError::IndexOutOfRange { index: base, n: c.n() });
    }
    Gauge::new((0..c.n()).map(|x| c.get(x, base).clone()).collect())
}
