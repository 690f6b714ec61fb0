//! Determinantal equivalence: do two kernels share every principal minor?

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::kernel::{enumerate_3cycles, Cycle, Kernel, KernelError};
use crate::scalar::Scalar;

/// A necessary condition from orders 1 and 2 that fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrecheckFailure {
    /// `K(x,x) ≠ Q(x,x)`
    Diagonal { x: usize },
    /// `K(x,y)K(y,x) ≠ Q(x,y)Q(y,x)`
    PairProduct { x: usize, y: usize },
}

impl PrecheckFailure {
    pub fn points(&self) -> Vec<usize> {
        match *self {
            PrecheckFailure::Diagonal { x } => vec![x],
            PrecheckFailure::PairProduct { x, y } => vec![x, y],
        }
    }
}

/// Lists every point and pair violating the order-1 and order-2 consequences.
pub fn quick_consequences(k: &Kernel, q: &Kernel) -> Result<Vec<PrecheckFailure>, KernelError> {
    k.same_ground_set(q)?;
    let n = k.n();
    let mut out: Vec<_> = (0..n)
        .filter(|&x| k.entry(x, x) != q.entry(x, x))
        .map(|x| PrecheckFailure::Diagonal { x })
        .collect();
    for x in 0..n {
        for y in x + 1..n {
            if k.entry(x, y) * k.entry(y, x) != q.entry(x, y) * q.entry(y, x) {
                out.push(PrecheckFailure::PairProduct { x, y });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorWitness {
    pub subset: Vec<usize>,
    pub minor_k: Scalar,
    pub minor_q: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    /// Largest subset size compared. Smaller than `n` means the verdict is capped.
    pub checked_order_max: usize,
    pub n: usize,
    pub witness: Option<MinorWitness>,
    pub precheck_failures: Vec<PrecheckFailure>,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.verdict == Verdict::Equivalent
    }

    pub fn is_capped(&self) -> bool {
        self.checked_order_max < self.n
    }
}

/// Compares principal minors over subsets in order of cardinality, then
/// lexicographically, stopping at the first mismatch. `max_order` defaults to
/// `n`, the only setting that decides equivalence outright.
pub fn check_equivalence(k: &Kernel, q: &Kernel, max_order: Option<usize>) -> Result<EquivalenceReport, KernelError> {
    let precheck_failures = quick_consequences(k, q)?;
    let n = k.n();
    let cap = max_order.unwrap_or(n).min(n);
    let mut witness = None;
    for r in 1..=cap {
        let subsets: Vec<Vec<usize>> = (0..n).combinations(r).collect();
        // position_first keeps the lexicographically smallest failure
        let hit = subsets
            .par_iter()
            .map(|s| (k.minor_unchecked(s), q.minor_unchecked(s)))
            .position_first(|(a, b)| a != b);
        if let Some(i) = hit {
            let subset = subsets[i].clone();
            witness = Some(MinorWitness {
                minor_k: k.minor_unchecked(&subset),
                minor_q: q.minor_unchecked(&subset),
                subset,
            });
            break;
        }
    }
    Ok(EquivalenceReport {
        verdict: if witness.is_some() { Verdict::NotEquivalent } else { Verdict::Equivalent },
        checked_order_max: cap,
        n,
        witness,
        precheck_failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceViolation {
    pub cycle: Cycle,
    /// `K[p] + K'[p]`
    pub k_side: Scalar,
    /// `Q[p] + Q'[p]`
    pub q_side: Scalar,
}

/// Checks `K[p] + K'[p] = Q[p] + Q'[p]` on every directed 3-cycle.
pub fn trace_identity_audit(k: &Kernel, q: &Kernel) -> Result<Vec<TraceViolation>, KernelError> {
    k.same_ground_set(q)?;
    let mut out = Vec::new();
    for p in enumerate_3cycles(k.n()) {
        let k_side = &k.cycle_product(&p)? + &k.reversed_cycle_product(&p)?;
        let q_side = &q.cycle_product(&p)? + &q.reversed_cycle_product(&p)?;
        if k_side != q_side {
            out.push(TraceViolation { cycle: p, k_side, q_side });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Gauge;
    use crate::scalar::FieldSpec;
    use proptest::prelude::*;

    fn kernel(f: FieldSpec, n: usize, vals: &[i64]) -> Kernel {
        Kernel::from_fn(f, n, |i, j| f.from_i64(vals[(i * n + j) % vals.len()])).unwrap()
    }

    /// Exhaustive sweep over all 2ⁿ subsets.
    fn brute_equivalent(k: &Kernel, q: &Kernel) -> bool {
        let n = k.n();
        (0u32..1 << n).all(|mask| {
            let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            k.principal_minor(&s).unwrap() == q.principal_minor(&s).unwrap()
        })
    }

    #[test]
    fn self_and_transpose_are_equivalent() {
        let f = FieldSpec::Rational;
        let k = kernel(f, 4, &[3, -1, 4, 1, -5, 9, 2, -6, 5, 3, -5, 8, 9, 7, 9, 3]);
        let r = check_equivalence(&k, &k, None).unwrap();
        assert!(r.is_equivalent() && r.witness.is_none() && !r.is_capped());
        assert!(check_equivalence(&k, &k.transpose(), None).unwrap().is_equivalent());
        assert!(quick_consequences(&k, &k).unwrap().is_empty());
        assert!(trace_identity_audit(&k, &k).unwrap().is_empty());
    }

    #[test]
    fn diagonal_bump_is_reported() {
        let f = FieldSpec::Rational;
        let k = kernel(f, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 10]);
        let q = k.with_entry(1, 1, f.from_i64(6)).unwrap();
        assert_eq!(quick_consequences(&k, &q).unwrap(), vec![PrecheckFailure::Diagonal { x: 1 }]);
        let r = check_equivalence(&k, &q, None).unwrap();
        assert_eq!(r.verdict, Verdict::NotEquivalent);
        let w = r.witness.unwrap();
        assert_eq!(w.subset, vec![1]);
        assert_eq!((w.minor_k, w.minor_q), (f.from_i64(5), f.from_i64(6)));
    }

    #[test]
    fn conjugates_pass_prechecks() {
        let f = FieldSpec::prime(11).unwrap();
        let k = kernel(f, 4, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 2, 3, 4, 5, 6, 7]);
        let g = Gauge::new([2, 3, 5, 7].iter().map(|&v| f.from_i64(v)).collect()).unwrap();
        let q = k.conjugate(&g).unwrap();
        assert!(quick_consequences(&k, &q).unwrap().is_empty());
    }

    #[test]
    fn trace_audit_catches_order_three_break() {
        let f = FieldSpec::Rational;
        let k = kernel(f, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 10]);
        // scale (0,1) by 2 and (1,0) by 1/2: orders 1 and 2 agree, order 3 does not
        let q = k
            .with_entry(0, 1, f.from_i64(4))
            .unwrap()
            .with_entry(1, 0, f.from_i64(2))
            .unwrap();
        assert!(quick_consequences(&k, &q).unwrap().is_empty());
        let r = check_equivalence(&k, &q, None).unwrap();
        assert_eq!(r.witness.as_ref().unwrap().subset, vec![0, 1, 2]);
        let viol = trace_identity_audit(&k, &q).unwrap();
        assert!(!viol.is_empty());
        assert_eq!(viol[0].cycle.vertices(), &[0, 1, 2]);
        let capped = check_equivalence(&k, &q, Some(2)).unwrap();
        assert!(capped.is_equivalent() && capped.is_capped());
        assert_eq!(capped.checked_order_max, 2);
    }

    #[test]
    fn mismatched_labels_error() {
        let f = FieldSpec::Rational;
        let k = kernel(f, 2, &[1]);
        let q = Kernel::new(f, vec!["x".into(), "y".into()], vec![vec![f.one(); 2]; 2]).unwrap();
        assert_eq!(check_equivalence(&k, &q, None), Err(KernelError::LabelMismatch));
        let f7 = FieldSpec::prime(7).unwrap();
        assert!(check_equivalence(&k, &kernel(f7, 2, &[1]), None).is_err());
    }

    fn arb_pair() -> impl Strategy<Value = (Kernel, Kernel)> {
        let field = prop::sample::select(vec![FieldSpec::Rational, FieldSpec::Prime { p: 5 }]);
        (field, 1usize..=6, any::<bool>(), any::<bool>()).prop_flat_map(|(f, n, tr, perturb)| {
            (
                prop::collection::vec(-4i64..=4, n * n),
                prop::collection::vec(1i64..=4, n),
                0..n * n,
                1i64..4,
            )
                .prop_map(move |(v, g, cell, bump)| {
                    let k = Kernel::from_fn(f, n, |i, j| f.from_i64(v[i * n + j])).unwrap();
                    let gauge = Gauge::new(g.iter().map(|&x| f.from_i64(x)).collect()).unwrap();
                    let base = if tr { k.transpose() } else { k.clone() };
                    let mut q = base.conjugate(&gauge).unwrap();
                    if perturb {
                        let (i, j) = (cell / n, cell % n);
                        let v = q.entry(i, j) + &f.from_i64(bump);
                        q = q.with_entry(i, j, v).unwrap();
                    }
                    (k, q)
                })
        })
    }

    proptest! {
        #[test]
        fn verdict_matches_full_sweep((k, q) in arb_pair()) {
            let r = check_equivalence(&k, &q, None).unwrap();
            prop_assert_eq!(r.is_equivalent(), brute_equivalent(&k, &q));
            if let Some(w) = &r.witness {
                prop_assert_ne!(&w.minor_k, &w.minor_q);
                // minimality: nothing smaller in (cardinality, lex) order fails
                for s in (0..k.n()).combinations(w.subset.len()).take_while(|s| s < &w.subset) {
                    prop_assert_eq!(k.principal_minor(&s).unwrap(), q.principal_minor(&s).unwrap());
                }
            }
            if !quick_consequences(&k, &q).unwrap().is_empty() {
                prop_assert!(r.witness.as_ref().unwrap().subset.len() <= 2);
            }
            if r.is_equivalent() {
                prop_assert!(trace_identity_audit(&k, &q).unwrap().is_empty());
            }
        }
    }
}
