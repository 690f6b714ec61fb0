//! Sorting 3-cycles into Case 1 and Case 2 and choosing one global Case.
//!
//! For a directed 3-cycle `p`, Case 1 means `K[p] = Q[p]` and `K'[p] = Q'[p]`;
//! Case 2 means `K[p] = Q'[p]` and `K'[p] = Q[p]`. Determinantally equivalent
//! kernels put every 3-cycle in at least one of them.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{Cycle, Kernel, KernelError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseLabel {
    Case1Only,
    Case2Only,
    Both,
    Neither,
}

impl CaseLabel {
    pub fn admits_case1(self) -> bool {
        matches!(self, CaseLabel::Case1Only | CaseLabel::Both)
    }

    pub fn admits_case2(self) -> bool {
        matches!(self, CaseLabel::Case2Only | CaseLabel::Both)
    }

    pub fn admits(self, case: GlobalCase) -> bool {
        match case {
            GlobalCase::Case1 => self.admits_case1(),
            GlobalCase::Case2 => self.admits_case2(),
        }
    }
}

/// Case 1 relates `Q` to a conjugate of `K`, Case 2 to a conjugate of `Kᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GlobalCase {
    Case1,
    Case2,
}

impl GlobalCase {
    pub fn transposed(self) -> bool {
        self == GlobalCase::Case2
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GlobalCase::Case1 => "case1",
            GlobalCase::Case2 => "case2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    ZeroEdge,
    NonzeroEdge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleProducts {
    pub k: Scalar,
    pub k_rev: Scalar,
    pub q: Scalar,
    pub q_rev: Scalar,
}

impl CycleProducts {
    pub fn of(k: &Kernel, q: &Kernel, p: &Cycle) -> Result<Self, KernelError> {
        Ok(CycleProducts {
            k: k.cycle_product(p)?,
            k_rev: k.reversed_cycle_product(p)?,
            q: q.cycle_product(p)?,
            q_rev: q.reversed_cycle_product(p)?,
        })
    }

    pub fn label(&self) -> CaseLabel {
        let case1 = self.k == self.q && self.k_rev == self.q_rev;
        let case2 = self.k == self.q_rev && self.k_rev == self.q;
        match (case1, case2) {
            (true, true) => CaseLabel::Both,
            (true, false) => CaseLabel::Case1Only,
            (false, true) => CaseLabel::Case2Only,
            (false, false) => CaseLabel::Neither,
        }
    }

    fn reversed(&self) -> Self {
        CycleProducts {
            k: self.k_rev.clone(),
            k_rev: self.k.clone(),
            q: self.q_rev.clone(),
            q_rev: self.q.clone(),
        }
    }
}

fn require_three(p: &Cycle) -> Result<(), KernelError> {
    if p.len() != 3 {
        return Err(KernelError::CycleLength { expected: 3, found: p.len() });
    }
    Ok(())
}

pub fn classify_3cycle(k: &Kernel, q: &Kernel, p: &Cycle) -> Result<CaseLabel, KernelError> {
    k.same_ground_set(q)?;
    require_three(p)?;
    Ok(CycleProducts::of(k, q, p)?.label())
}

/// Types an edge of `p` under the given framework: the forward entry
/// `K(x, y)` decides in Case 1, the reversed entry `K(y, x)` in Case 2.
pub fn zero_edge_type(k: &Kernel, q: &Kernel, p: &Cycle, edge: (usize, usize), framework: GlobalCase) -> Result<EdgeKind, KernelError> {
    k.same_ground_set(q)?;
    if !p.contains_edge(edge) {
        return Err(KernelError::InvalidCycle);
    }
    let (x, y) = edge;
    let zero = match framework {
        GlobalCase::Case1 => k.is_zero_at(x, y),
        GlobalCase::Case2 => k.is_zero_at(y, x),
    };
    Ok(if zero { EdgeKind::ZeroEdge } else { EdgeKind::NonzeroEdge })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleClass {
    pub cycle: Cycle,
    pub label: CaseLabel,
    pub products: CycleProducts,
    /// Edges `(x, y)` of the cycle with `K(x, y) = 0`.
    pub forward_zero: Vec<(usize, usize)>,
    /// Edges `(x, y)` of the cycle with `K(y, x) = 0`.
    pub reverse_zero: Vec<(usize, usize)>,
}

impl CycleClass {
    fn build(k: &Kernel, q: &Kernel, p: Cycle) -> Self {
        let products = CycleProducts::of(k, q, &p).expect("cycle vertices in range");
        let forward_zero = p.edges().filter(|&(x, y)| k.is_zero_at(x, y)).collect();
        let reverse_zero = p.edges().filter(|&(x, y)| k.is_zero_at(y, x)).collect();
        CycleClass {
            label: products.label(),
            products,
            forward_zero,
            reverse_zero,
            cycle: p,
        }
    }

    pub fn zero_edges(&self, framework: GlobalCase) -> &[(usize, usize)] {
        match framework {
            GlobalCase::Case1 => &self.forward_zero,
            GlobalCase::Case2 => &self.reverse_zero,
        }
    }

    /// The same triple traversed the other way. Labels are unchanged.
    pub fn reversed(&self) -> Self {
        let flip = |v: &[(usize, usize)]| v.iter().map(|&(x, y)| (y, x)).collect();
        CycleClass {
            cycle: self.cycle.reversed(),
            label: self.label,
            products: self.products.reversed(),
            forward_zero: flip(&self.reverse_zero),
            reverse_zero: flip(&self.forward_zero),
        }
    }
}

/// One entry per unordered triple `a < b < c`, stored as the cycle `(a, b, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseTable {
    n: usize,
    entries: Vec<CycleClass>,
}

impl CaseTable {
    pub fn build(k: &Kernel, q: &Kernel) -> Result<Self, KernelError> {
        k.same_ground_set(q)?;
        let n = k.n();
        let triples: Vec<Vec<usize>> = (0..n).combinations(3).collect();
        let entries = triples
            .into_par_iter()
            .map(|t| CycleClass::build(k, q, Cycle::new(t).expect("distinct triple")))
            .collect();
        Ok(CaseTable { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[CycleClass] {
        &self.entries
    }

    /// Both orientations of every triple, in the order of `enumerate_3cycles`.
    pub fn iter_all(&self) -> Vec<CycleClass> {
        let mut all: Vec<CycleClass> = self
            .entries
            .iter()
            .flat_map(|e| [e.clone(), e.reversed()])
            .collect();
        all.sort_by(|a, b| a.cycle.cmp(&b.cycle));
        all
    }

    fn index_of_triple(&self, mut t: [usize; 3]) -> Option<usize> {
        t.sort_unstable();
        if t[2] >= self.n || t[0] == t[1] || t[1] == t[2] {
            return None;
        }
        self.entries
            .binary_search_by(|e| e.cycle.vertices().cmp(&t[..]))
            .ok()
    }

    pub fn get(&self, p: &Cycle) -> Option<CycleClass> {
        if p.len() != 3 {
            return None;
        }
        let v = p.vertices();
        let e = &self.entries[self.index_of_triple([v[0], v[1], v[2]])?];
        Some(if e.cycle == *p { e.clone() } else { e.reversed() })
    }

    pub fn label(&self, a: usize, b: usize, c: usize) -> Option<CaseLabel> {
        self.index_of_triple([a, b, c]).map(|i| self.entries[i].label)
    }

    pub fn first_neither(&self) -> Option<&Cycle> {
        self.entries.iter().find(|e| e.label == CaseLabel::Neither).map(|e| &e.cycle)
    }

    pub fn has_single_case_cycle(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.label, CaseLabel::Case1Only | CaseLabel::Case2Only))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("cycle {0:?} is in neither Case; the kernels are not determinantally equivalent")]
    Neither(Cycle),
    #[error("cycle {case1_witness:?} is only in Case 1 but {case2_witness:?} is only in Case 2")]
    MixedCases { case1_witness: Cycle, case2_witness: Cycle },
}

/// Case 1 when every cycle admits it, otherwise Case 2 when every cycle admits that.
pub fn global_case(table: &CaseTable) -> Result<GlobalCase, CaseError> {
    if let Some(p) = table.first_neither() {
        return Err(CaseError::Neither(p.clone()));
    }
    let first = |label| table.entries.iter().find(|e| e.label == label).map(|e| e.cycle.clone());
    match (first(CaseLabel::Case1Only), first(CaseLabel::Case2Only)) {
        (Some(case1_witness), Some(case2_witness)) => Err(CaseError::MixedCases { case1_witness, case2_witness }),
        (_, Some(_)) => Ok(GlobalCase::Case2),
        _ => Ok(GlobalCase::Case1),
    }
}

/// 4-subsets whose triples do not share a common Case.
pub fn four_point_audit(k: &Kernel, q: &Kernel) -> Result<Vec<[usize; 4]>, KernelError> {
    let table = CaseTable::build(k, q)?;
    Ok(four_point_audit_table(&table))
}

pub fn four_point_audit_table(table: &CaseTable) -> Vec<[usize; 4]> {
    (0..table.n)
        .combinations(4)
        .filter_map(|m| {
            let labels: Vec<CaseLabel> = m
                .iter()
                .combinations(3)
                .map(|t| table.label(*t[0], *t[1], *t[2]).expect("triple in range"))
                .collect();
            let common = labels.iter().all(|l| l.admits_case1()) || labels.iter().all(|l| l.admits_case2());
            (!common).then(|| [m[0], m[1], m[2], m[3]])
        })
        .collect()
}

/// Triples `{a, b, c}` carrying two symmetric pairs with `K` zero both ways.
/// Empty for any kernel with property 𝒟 on at least four points.
pub fn double_zero_pair_triples(k: &Kernel) -> Vec<[usize; 3]> {
    let both_zero = |x, y| k.is_zero_at(x, y) && k.is_zero_at(y, x);
    (0..k.n())
        .combinations(3)
        .filter(|t| {
            let (a, b, c) = (t[0], t[1], t[2]);
            [both_zero(a, b), both_zero(b, c), both_zero(a, c)].iter().filter(|&&z| z).count() >= 2
        })
        .map(|t| [t[0], t[1], t[2]])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::check_equivalence;
    use crate::kernel::{enumerate_3cycles, Gauge};
    use crate::scalar::FieldSpec;
    use proptest::prelude::*;

    fn int_kernel(f: FieldSpec, n: usize, cell: impl Fn(usize, usize) -> i64) -> Kernel {
        Kernel::from_fn(f, n, |i, j| f.from_i64(cell(i, j))).unwrap()
    }

    fn generic(n: usize) -> Kernel {
        int_kernel(FieldSpec::Rational, n, |i, j| ((i * 7 + j * j * 3 + i * j) % 11) as i64 + 1)
    }

    fn cyc(v: &[usize]) -> Cycle {
        Cycle::new(v.to_vec()).unwrap()
    }

    #[test]
    fn basic_labels() {
        let k = generic(4);
        let p = cyc(&[0, 1, 2]);
        assert_ne!(k.cycle_product(&p).unwrap(), k.reversed_cycle_product(&p).unwrap());
        assert_eq!(classify_3cycle(&k, &k, &p).unwrap(), CaseLabel::Case1Only);
        assert_eq!(classify_3cycle(&k, &k.transpose(), &p).unwrap(), CaseLabel::Case2Only);
        let s = int_kernel(FieldSpec::Rational, 4, |i, j| (i + j + 1) as i64);
        assert_eq!(classify_3cycle(&s, &s, &p).unwrap(), CaseLabel::Both);
        assert!(classify_3cycle(&k, &k, &cyc(&[0, 1, 2, 3])).is_err());
    }

    #[test]
    fn edge_typing() {
        let f = FieldSpec::Rational;
        let k = int_kernel(f, 3, |i, j| if (i, j) == (0, 1) { 0 } else { 2 });
        let p = cyc(&[0, 1, 2]);
        assert_eq!(zero_edge_type(&k, &k, &p, (0, 1), GlobalCase::Case1).unwrap(), EdgeKind::ZeroEdge);
        assert_eq!(zero_edge_type(&k, &k, &p, (0, 1), GlobalCase::Case2).unwrap(), EdgeKind::NonzeroEdge);
        let r = p.reversed();
        assert_eq!(zero_edge_type(&k, &k, &r, (1, 0), GlobalCase::Case2).unwrap(), EdgeKind::ZeroEdge);
        assert!(zero_edge_type(&k, &k, &p, (1, 0), GlobalCase::Case1).is_err());
        let g = generic(3);
        for (x, y) in p.edges() {
            assert_eq!(zero_edge_type(&g, &g, &p, (x, y), GlobalCase::Case1).unwrap(), EdgeKind::NonzeroEdge);
        }
    }

    #[test]
    fn table_covers_both_orientations() {
        let k = generic(5);
        let q = k.transpose();
        let t = CaseTable::build(&k, &q).unwrap();
        assert_eq!(t.entries().len(), 10);
        let all = t.iter_all();
        let cycles: Vec<Cycle> = all.iter().map(|c| c.cycle.clone()).collect();
        assert_eq!(cycles, enumerate_3cycles(5));
        for c in &all {
            assert_eq!(c.label, classify_3cycle(&k, &q, &c.cycle).unwrap());
            assert_eq!(c.products, CycleProducts::of(&k, &q, &c.cycle).unwrap());
            assert_eq!(t.get(&c.cycle).as_ref(), Some(c));
        }
        assert_eq!(global_case(&t), Ok(GlobalCase::Case2));
    }

    #[test]
    fn global_case_decisions() {
        let s = int_kernel(FieldSpec::Rational, 5, |i, j| (i * j + 1) as i64);
        assert_eq!(global_case(&CaseTable::build(&s, &s).unwrap()), Ok(GlobalCase::Case1));
        let k = generic(5);
        let g = Gauge::new((1..=5).map(|v| FieldSpec::Rational.from_i64(v)).collect()).unwrap();
        let q = k.conjugate(&g).unwrap();
        assert_eq!(global_case(&CaseTable::build(&k, &q).unwrap()), Ok(GlobalCase::Case1));
        let qt = k.transpose().conjugate(&g).unwrap();
        assert_eq!(global_case(&CaseTable::build(&k, &qt).unwrap()), Ok(GlobalCase::Case2));
        assert!(four_point_audit(&k, &q).unwrap().is_empty());
        assert!(four_point_audit(&k, &k).unwrap().is_empty());
    }

    #[test]
    fn mixed_cases_detected() {
        // swapping K(0,2) and K(2,0) moves the triples through the pair {0,2} into Case 2
        let rows = [[2, 2, 2, 3], [2, 1, 3, 1], [3, 3, 2, 3], [3, 2, 3, 2]];
        let k = int_kernel(FieldSpec::Rational, 4, |i, j| rows[i][j]);
        let q = k
            .with_entry(0, 2, k.entry(2, 0).clone())
            .unwrap()
            .with_entry(2, 0, k.entry(0, 2).clone())
            .unwrap();
        let t = CaseTable::build(&k, &q).unwrap();
        assert_eq!(t.label(0, 1, 2), Some(CaseLabel::Case2Only));
        assert_eq!(t.label(0, 1, 3), Some(CaseLabel::Case1Only));
        match global_case(&t) {
            Err(CaseError::MixedCases { case1_witness, case2_witness }) => {
                assert!(t.get(&case1_witness).unwrap().label == CaseLabel::Case1Only);
                assert!(t.get(&case2_witness).unwrap().label == CaseLabel::Case2Only);
            }
            other => panic!("expected mixed cases, got {other:?}"),
        }
        let bad = four_point_audit(&k, &q).unwrap();
        assert_eq!(bad, vec![[0, 1, 2, 3]]);
        for m in bad {
            let labels: Vec<CaseLabel> = m
                .iter()
                .combinations(3)
                .map(|v| classify_3cycle(&k, &q, &cyc(&[*v[0], *v[1], *v[2]])).unwrap())
                .collect();
            assert!(!labels.iter().all(|l| l.admits_case1()) && !labels.iter().all(|l| l.admits_case2()));
        }
    }

    #[test]
    fn neither_reported() {
        let k = generic(4);
        let q = k.with_entry(0, 1, FieldSpec::Rational.from_i64(100)).unwrap();
        let t = CaseTable::build(&k, &q).unwrap();
        assert!(matches!(global_case(&t), Err(CaseError::Neither(_))));
    }

    #[test]
    fn double_zero_pairs() {
        let f = FieldSpec::Rational;
        let k = int_kernel(f, 4, |i, j| if (i + j == 1) || (i + j == 3 && i.min(j) == 1) { 0 } else { 1 });
        // zero pairs {0,1} and {1,2} share the triple {0,1,2}
        assert_eq!(double_zero_pair_triples(&k), vec![[0, 1, 2]]);
        assert!(double_zero_pair_triples(&generic(5)).is_empty());
    }

    fn arb_equivalent_pair() -> impl Strategy<Value = (Kernel, Kernel)> {
        let field = prop::sample::select(vec![FieldSpec::Rational, FieldSpec::Prime { p: 3 }, FieldSpec::Prime { p: 7 }]);
        (field, 3usize..=5).prop_flat_map(|(f, n)| {
            (
                prop::collection::vec(-2i64..=2, n * n),
                prop::collection::vec(1i64..=2, n),
                any::<bool>(),
                0..n * n,
                -2i64..=2,
            )
                .prop_map(move |(v, g, tr, cell, val)| {
                    let k = int_kernel(f, n, |i, j| v[i * n + j]);
                    let gauge = Gauge::new(g.iter().map(|&x| f.from_i64(x)).collect()).unwrap();
                    let base = if tr { k.transpose() } else { k.clone() };
                    // an arbitrary edit so some pairs are not conjugates yet may still be equivalent
                    let q = base.conjugate(&gauge).unwrap().with_entry(cell / n, cell % n, f.from_i64(val)).unwrap();
                    (k, q)
                })
        })
    }

    proptest! {
        #[test]
        fn equivalent_pairs_have_no_neither_cycle((k, q) in arb_equivalent_pair()) {
            if check_equivalence(&k, &q, None).unwrap().is_equivalent() {
                let t = CaseTable::build(&k, &q).unwrap();
                prop_assert!(t.first_neither().is_none());
            }
        }

        #[test]
        fn labels_stable_under_common_conjugation((k, q) in arb_equivalent_pair(), g in prop::collection::vec(1i64..=2, 5)) {
            let f = k.field();
            let n = k.n();
            let gauge = Gauge::new((0..n).map(|i| f.from_i64(g[i])).collect()).unwrap();
            let (kc, qc) = (k.conjugate(&gauge).unwrap(), q.conjugate(&gauge).unwrap());
            for p in enumerate_3cycles(n) {
                let l = classify_3cycle(&k, &q, &p).unwrap();
                prop_assert_eq!(l, classify_3cycle(&kc, &qc, &p).unwrap());
                prop_assert_eq!(l, classify_3cycle(&k, &q, &p.reversed()).unwrap());
            }
        }
    }
}
