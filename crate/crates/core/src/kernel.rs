//! Finite kernels, cycles, gauges and the canonical transforms.

use std::collections::HashSet;

use thiserror::Error;

use crate::cocycle::CocycleFn;
use crate::det;
use crate::scalar::{product, FieldError, FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("kernel needs at least one point")]
    Empty,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("expected a {expected}×{expected} table, found a row of length {found}")]
    Shape { expected: usize, found: usize },
    #[error("index {index} out of range for ground set of size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("subset must be strictly increasing")]
    UnsortedSubset,
    #[error("cycle must be a nonempty sequence of distinct points")]
    InvalidCycle,
    #[error("expected a {expected}-cycle, got a {found}-cycle")]
    CycleLength { expected: usize, found: usize },
    #[error("gauge value at {0} is zero")]
    GaugeZero(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("kernels are defined on different label sets")]
    LabelMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A closed walk through pairwise-distinct points, stored with its smallest
/// vertex first. The closing edge back to the first vertex is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle(Vec<usize>);

impl Cycle {
    pub fn new(vertices: Vec<usize>) -> Result<Self, KernelError> {
        let distinct: HashSet<_> = vertices.iter().collect();
        if vertices.is_empty() || distinct.len() != vertices.len() {
            return Err(KernelError::InvalidCycle);
        }
        let start = vertices
            .iter()
            .enumerate()
            .min_by_key(|(_, v)| **v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut v = vertices;
        v.rotate_left(start);
        Ok(Cycle(v))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same cycle traversed in the opposite direction.
    pub fn reversed(&self) -> Cycle {
        let mut v = self.0.clone();
        v[1..].reverse();
        Cycle(v)
    }

    /// Directed edges `(from, to)`, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.0.len();
        (0..k).map(move |i| (self.0[i], self.0[(i + 1) % k]))
    }

    pub fn contains_edge(&self, edge: (usize, usize)) -> bool {
        self.edges().any(|e| e == edge)
    }
}

/// All directed 3-cycles on `n` points up to rotation, in lexicographic order
/// of their normalized vertex sequences. There are `2·C(n,3)` of them.
pub fn enumerate_3cycles(n: usize) -> Vec<Cycle> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push(Cycle(vec![a, b, c]));
                out.push(Cycle(vec![a, c, b]));
            }
        }
    }
    out.sort();
    out
}

/// A nowhere-zero function on the ground set realizing a conjugation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gauge(Vec<Scalar>);

impl Gauge {
    pub fn new(values: Vec<Scalar>) -> Result<Self, KernelError> {
        if let Some(i) = values.iter().position(Scalar::is_zero) {
            return Err(KernelError::GaugeZero(i));
        }
        if let Some(first) = values.first() {
            let f = first.field();
            if let Some(bad) = values.iter().find(|v| v.field() != f) {
                return Err(FieldError::FieldMismatch(f, bad.field()).into());
            }
        }
        Ok(Gauge(values))
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        Gauge(vec![field.one(); n])
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Gauge {
        Gauge(self.0.iter().map(|v| v.inv().expect("gauge is nowhere zero")).collect())
    }

    /// Divides every value by `g(base)`, so the result is 1 at `base`.
    pub fn normalized_at(&self, base: usize) -> Gauge {
        let b = self.0[base].inv().expect("gauge is nowhere zero");
        Gauge(self.0.iter().map(|v| v * &b).collect())
    }
}

/// A function on `labels × labels` with values in an exact field, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    field: FieldSpec,
    labels: Vec<String>,
    entries: Vec<Scalar>,
}

impl Kernel {
    pub fn new(field: FieldSpec, labels: Vec<String>, rows: Vec<Vec<Scalar>>) -> Result<Self, KernelError> {
        let n = labels.len();
        if n == 0 {
            return Err(KernelError::Empty);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(KernelError::DuplicateLabel(l.clone()));
            }
        }
        if rows.len() != n {
            return Err(KernelError::Shape { expected: n, found: rows.len() });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(KernelError::Shape { expected: n, found: row.len() });
            }
            for s in row {
                if s.field() != field {
                    return Err(FieldError::FieldMismatch(field, s.field()).into());
                }
                entries.push(s);
            }
        }
        Ok(Kernel { field, labels, entries })
    }

    /// Builds a kernel on labels `0..n` from an entry function.
    pub fn from_fn(field: FieldSpec, n: usize, f: impl FnMut(usize, usize) -> Scalar) -> Result<Self, KernelError> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels_from_fn(field, labels, f)
    }

    pub fn with_labels_from_fn(
        field: FieldSpec,
        labels: Vec<String>,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Result<Self, KernelError> {
        let n = labels.len();
        let rows = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(field, labels, rows)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `K(labels[i], labels[j])`. Panics when out of range.
    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n() + j]
    }

    pub fn is_zero_at(&self, i: usize, j: usize) -> bool {
        self.entry(i, j).is_zero()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        self.entries.chunks(self.n())
    }

    fn check_index(&self, i: usize) -> Result<(), KernelError> {
        if i < self.n() {
            Ok(())
        } else {
            Err(KernelError::IndexOutOfRange { index: i, n: self.n() })
        }
    }

    /// Errors unless `other` lives on the same labels (in the same order) and field.
    pub fn same_ground_set(&self, other: &Kernel) -> Result<(), KernelError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(self.field, other.field).into());
        }
        if self.labels != other.labels {
            return Err(KernelError::LabelMismatch);
        }
        Ok(())
    }

    /// Determinant of the sub-table indexed by a strictly increasing subset.
    pub fn principal_minor(&self, subset: &[usize]) -> Result<Scalar, KernelError> {
        for (i, &s) in subset.iter().enumerate() {
            self.check_index(s)?;
            if i > 0 && subset[i - 1] >= s {
                return Err(KernelError::UnsortedSubset);
            }
        }
        Ok(self.minor_unchecked(subset))
    }

    pub(crate) fn minor_unchecked(&self, subset: &[usize]) -> Scalar {
        let m = subset.len();
        let sub: Vec<Scalar> = subset
            .iter()
            .flat_map(|&i| subset.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.entry(i, j).clone())
            .collect();
        det::determinant(self.field, m, &sub).expect("kernel entries share one field")
    }

    /// `K[p]`: the product of entries along the cycle, closing edge included.
    pub fn cycle_product(&self, p: &Cycle) -> Result<Scalar, KernelError> {
        for &v in p.vertices() {
            self.check_index(v)?;
        }
        Ok(product(self.field, p.edges().map(|(a, b)| self.entry(a, b))))
    }

    /// `K'[p]`: the product of entries along the reversed edges of the cycle.
    pub fn reversed_cycle_product(&self, p: &Cycle) -> Result<Scalar, KernelError> {
        for &v in p.vertices() {
            self.check_index(v)?;
        }
        Ok(product(self.field, p.edges().map(|(a, b)| self.entry(b, a))))
    }

    pub fn transpose(&self) -> Kernel {
        let n = self.n();
        let entries = (0..n * n).map(|k| self.entry(k % n, k / n).clone()).collect();
        Kernel {
            field: self.field,
            labels: self.labels.clone(),
            entries,
        }
    }

    /// `(i, j) ↦ g(i)·K(i, j)·g(j)⁻¹`.
    pub fn conjugate(&self, g: &Gauge) -> Result<Kernel, KernelError> {
        let n = self.n();
        if g.len() != n {
            return Err(KernelError::LengthMismatch { expected: n, found: g.len() });
        }
        if let Some(v) = g.values().first() {
            if v.field() != self.field {
                return Err(FieldError::FieldMismatch(self.field, v.field()).into());
            }
        }
        let inv = g.inverse();
        let entries = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                &(g.get(i) * self.entry(i, j)) * inv.get(j)
            })
            .collect();
        Ok(Kernel {
            field: self.field,
            labels: self.labels.clone(),
            entries,
        })
    }

    /// Entrywise product with a two-index table, `(i, j) ↦ c(i, j)·K(i, j)`.
    pub fn apply_cocycle(&self, c: &CocycleFn) -> Result<Kernel, KernelError> {
        let n = self.n();
        if c.n() != n {
            return Err(KernelError::LengthMismatch { expected: n, found: c.n() });
        }
        if c.field() != self.field {
            return Err(FieldError::FieldMismatch(self.field, c.field()).into());
        }
        let entries = (0..n * n).map(|k| c.get(k / n, k % n) * &self.entries[k]).collect();
        Ok(Kernel {
            field: self.field,
            labels: self.labels.clone(),
            entries,
        })
    }

    /// Relabels points: the result has point `i` equal to this kernel's `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Kernel, KernelError> {
        let n = self.n();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(KernelError::LengthMismatch { expected: n, found: perm.len() });
        }
        let labels = perm.iter().map(|&i| self.labels[i].clone()).collect();
        let entries = (0..n * n).map(|k| self.entry(perm[k / n], perm[k % n]).clone()).collect();
        Ok(Kernel {
            field: self.field,
            labels,
            entries,
        })
    }

    /// Returns a copy with one entry replaced.
    pub fn with_entry(&self, i: usize, j: usize, value: Scalar) -> Result<Kernel, KernelError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if value.field() != self.field {
            return Err(FieldError::FieldMismatch(self.field, value.field()).into());
        }
        let mut out = self.clone();
        let n = self.n();
        out.entries[i * n + j] = value;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn int_kernel(rows: &[&[i64]]) -> Kernel {
        let f = q();
        Kernel::from_fn(f, rows.len(), |i, j| f.from_i64(rows[i][j])).unwrap()
    }

    fn all_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
        (0..=n).flat_map(move |r| (0..n).combinations(r))
    }

    #[test]
    fn construction_errors() {
        let f = q();
        assert_eq!(Kernel::new(f, vec![], vec![]), Err(KernelError::Empty));
        assert_eq!(
            Kernel::new(f, vec!["a".into(), "a".into()], vec![vec![f.one(); 2]; 2]),
            Err(KernelError::DuplicateLabel("a".into()))
        );
        assert!(matches!(
            Kernel::new(f, vec!["a".into(), "b".into()], vec![vec![f.one(); 2], vec![f.one()]]),
            Err(KernelError::Shape { .. })
        ));
        let f5 = FieldSpec::prime(5).unwrap();
        assert!(matches!(
            Kernel::new(f, vec!["a".into()], vec![vec![f5.one()]]),
            Err(KernelError::Field(FieldError::FieldMismatch(..)))
        ));
    }

    #[test]
    fn minors_small_orders() {
        let k = int_kernel(&[&[2, 3, 0], &[5, 7, 1], &[-1, 4, 6]]);
        assert_eq!(k.principal_minor(&[]).unwrap(), q().one());
        assert_eq!(k.principal_minor(&[1]).unwrap(), q().from_i64(7));
        assert_eq!(k.principal_minor(&[0, 2]).unwrap(), q().from_i64(2 * 6));
        assert_eq!(k.principal_minor(&[0, 1]).unwrap(), q().from_i64(14 - 15));
        assert_eq!(k.principal_minor(&[1, 0]), Err(KernelError::UnsortedSubset));
        assert_eq!(k.principal_minor(&[0, 0]), Err(KernelError::UnsortedSubset));
        assert_eq!(k.principal_minor(&[3]), Err(KernelError::IndexOutOfRange { index: 3, n: 3 }));
    }

    #[test]
    fn cycle_normalization_and_reversal() {
        let c = Cycle::new(vec![2, 0, 1]).unwrap();
        assert_eq!(c.vertices(), &[0, 1, 2]);
        assert_eq!(c.reversed().vertices(), &[0, 2, 1]);
        assert_eq!(Cycle::new(vec![1, 1]), Err(KernelError::InvalidCycle));
        assert_eq!(Cycle::new(vec![]), Err(KernelError::InvalidCycle));
        assert_eq!(c.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn cycle_products() {
        let ones = Kernel::from_fn(q(), 4, |_, _| q().one()).unwrap();
        for p in enumerate_3cycles(4) {
            assert!(ones.cycle_product(&p).unwrap().is_one());
        }
        let k = int_kernel(&[&[1, 2, 3, 4], &[5, 6, 7, 8], &[9, 10, 11, 12], &[13, 14, 15, 16]]);
        // q[1] = (1,2,3,4,1) in 1-based labels
        let q1 = Cycle::new(vec![0, 1, 2, 3]).unwrap();
        let expected = &(&(k.entry(0, 1) * k.entry(1, 2)) * k.entry(2, 3)) * k.entry(3, 0);
        assert_eq!(k.cycle_product(&q1).unwrap(), expected);
        // p(1) = (1,2,3,1): reversed product K(2,1)K(3,2)K(1,3)
        let p1 = Cycle::new(vec![0, 1, 2]).unwrap();
        assert_eq!(k.reversed_cycle_product(&p1).unwrap(), q().from_i64(5 * 10 * 3));
        assert_eq!(k.cycle_product(&p1).unwrap(), q().from_i64(2 * 7 * 9));
        // a 1-cycle is the diagonal entry
        assert_eq!(k.cycle_product(&Cycle::new(vec![2]).unwrap()).unwrap(), q().from_i64(11));
        assert!(k.cycle_product(&Cycle::new(vec![4]).unwrap()).is_err());
    }

    #[test]
    fn three_cycle_counts() {
        let three = enumerate_3cycles(3);
        assert_eq!(three, vec![Cycle(vec![0, 1, 2]), Cycle(vec![0, 2, 1])]);
        assert_eq!(enumerate_3cycles(4).len(), 8);
        assert_eq!(enumerate_3cycles(6).len(), 40);
        assert!(enumerate_3cycles(2).is_empty());
        let six = enumerate_3cycles(6);
        assert!(six.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn transforms_on_simple_kernels() {
        let diag = int_kernel(&[&[1, 0], &[0, 3]]);
        assert_eq!(diag.transpose(), diag);
        let k = int_kernel(&[&[1, 2], &[3, 4]]);
        assert_eq!(k.conjugate(&Gauge::identity(q(), 2)).unwrap(), k);
        assert_eq!(Gauge::new(vec![q().one(), q().zero()]), Err(KernelError::GaugeZero(1)));
        assert!(matches!(
            k.conjugate(&Gauge::identity(q(), 3)),
            Err(KernelError::LengthMismatch { .. })
        ));
        assert_eq!(k.apply_cocycle(&CocycleFn::identity(q(), 2)).unwrap(), k);
    }

    fn arb_kernel(max_n: usize) -> impl Strategy<Value = Kernel> {
        let field = prop::sample::select(vec![FieldSpec::Rational, FieldSpec::Prime { p: 11 }]);
        (field, 1..=max_n).prop_flat_map(|(f, n)| {
            prop::collection::vec(-9i64..=9, n * n)
                .prop_map(move |v| Kernel::from_fn(f, n, |i, j| f.from_i64(v[i * n + j])).unwrap())
        })
    }

    fn arb_gauge(k: &Kernel, seed: &[i64]) -> Gauge {
        let f = k.field();
        Gauge::new(
            (0..k.n())
                .map(|i| {
                    let v = seed[i % seed.len()] + i as i64;
                    let v = if f.from_i64(v).is_zero() { 1 } else { v };
                    f.from_ratio(v, 1 + (i as i64 % 3)).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn reversed_product_is_transpose_product(k in arb_kernel(6), raw in prop::collection::vec(0usize..6, 1..6)) {
            let verts: Vec<usize> = raw.into_iter().filter(|&v| v < k.n()).unique().collect();
            prop_assume!(!verts.is_empty());
            let p = Cycle::new(verts).unwrap();
            prop_assert_eq!(k.reversed_cycle_product(&p).unwrap(), k.transpose().cycle_product(&p).unwrap());
            prop_assert_eq!(k.reversed_cycle_product(&p).unwrap(), k.cycle_product(&p.reversed()).unwrap());
        }

        #[test]
        fn transpose_is_involution(k in arb_kernel(6)) {
            prop_assert_eq!(k.transpose().transpose(), k);
        }

        #[test]
        fn minors_invariant_under_canonical_transforms(k in arb_kernel(6), seed in prop::collection::vec(1i64..20, 1..6)) {
            let g = arb_gauge(&k, &seed);
            let conj = k.conjugate(&g).unwrap();
            let tr = k.transpose();
            prop_assert_eq!(conj.conjugate(&g.inverse()).unwrap(), k.clone());
            for s in all_subsets(k.n()) {
                let m = k.principal_minor(&s).unwrap();
                prop_assert_eq!(&conj.principal_minor(&s).unwrap(), &m);
                prop_assert_eq!(&tr.principal_minor(&s).unwrap(), &m);
            }
            for i in 0..k.n() {
                prop_assert_eq!(conj.entry(i, i), k.entry(i, i));
            }
        }

        #[test]
        fn gauge_cocycle_matches_conjugation(k in arb_kernel(6), seed in prop::collection::vec(1i64..20, 1..6)) {
            let g = arb_gauge(&k, &seed);
            let c = CocycleFn::from_gauge(&g);
            prop_assert_eq!(k.apply_cocycle(&c).unwrap(), k.conjugate(&g).unwrap());
        }

        #[test]
        fn permutation_relabels(k in arb_kernel(5), shift in 0usize..5) {
            let n = k.n();
            let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
            let pk = k.permute(&perm).unwrap();
            for i in 0..n {
                prop_assert_eq!(pk.label(i), k.label(perm[i]));
                for j in 0..n {
                    prop_assert_eq!(pk.entry(i, j), k.entry(perm[i], perm[j]));
                }
            }
        }
    }
}
