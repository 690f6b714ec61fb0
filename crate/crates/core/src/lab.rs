//! Ground-truth instances, negative instances, a brute-force oracle and a
//! counterexample search outside property 𝒟.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::classd::{check_class_d, ClassDWitness};
use crate::det::prime_det;
use crate::equiv::check_equivalence;
use crate::kernel::{Gauge, Kernel, KernelError};
use crate::scalar::{FieldSpec, Scalar};

/// Integer range for rational entries and gauge numerators.
pub const RATIONAL_RANGE: i64 = 9;
/// Enumeration guard for the prime-field oracle.
pub const ORACLE_LIMIT: u64 = 10_000_000;
const NODE_CAP_PER_POINT: usize = 4_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("no kernel with property 𝒟 found in {attempts} attempts")]
    GenerationBudgetExceeded { attempts: usize },
    #[error("{0}")]
    InvalidSpec(String),
    #[error("no single-entry edit changed a minor of order at most 3 in {tries} tries")]
    PerturbationFailed { tries: usize },
    #[error("gauge enumeration needs {count} candidates, above the limit of {ORACLE_LIMIT}")]
    OracleTooLarge { count: u64 },
    #[error("operation needs a prime field, got {0}")]
    UnsupportedField(FieldSpec),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub field: FieldSpec,
    pub n: usize,
    pub transpose: bool,
    /// Number of zero pairs imposed on `K`, each symmetric or single, with at
    /// most one off-diagonal zero per row and per column overall.
    pub zero_edges: usize,
    pub seed: u64,
    /// Restarts of the randomized search, each with a bounded node budget.
    pub max_attempts: usize,
}

impl InstanceSpec {
    pub fn new(field: FieldSpec, n: usize, seed: u64) -> Self {
        InstanceSpec {
            field,
            n,
            transpose: false,
            zero_edges: 0,
            seed,
            max_attempts: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub gauge: Gauge,
    pub transposed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub k: Kernel,
    pub q: Kernel,
    pub truth: GroundTruth,
    pub seed: u64,
}

/// Off-diagonal zero positions: each pair uses two fresh points and is either
/// symmetric or a single zero in a random direction.
fn draw_zero_cells(rng: &mut ChaCha8Rng, n: usize, pairs: usize) -> Vec<(usize, usize)> {
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    let mut cells = Vec::new();
    for c in points.chunks_exact(2).take(pairs) {
        let (x, y) = if rng.random_bool(0.5) { (c[0], c[1]) } else { (c[1], c[0]) };
        cells.push((x, y));
        if rng.random_bool(0.5) {
            cells.push((y, x));
        }
    }
    cells
}

/// Arithmetic for the search: small integers over ℚ, residues over GF(p).
#[derive(Clone, Copy)]
struct Ring(Option<i64>);

impl Ring {
    fn nonzero_values(self) -> Vec<i64> {
        match self.0 {
            None => (-RATIONAL_RANGE..=RATIONAL_RANGE).filter(|&v| v != 0).collect(),
            Some(p) => (1..p).collect(),
        }
    }

    fn is_zero(self, v: i64) -> bool {
        match self.0 {
            None => v == 0,
            Some(p) => v.rem_euclid(p) == 0,
        }
    }
}

/// Randomized depth-first filling of off-diagonal cells, pruning any
/// assignment that completes a vanishing disjoint 2×2 minor.
struct Filler<'a> {
    n: usize,
    ring: Ring,
    vals: Vec<i64>,
    assigned: Vec<bool>,
    cells: Vec<(usize, usize)>,
    rng: &'a mut ChaCha8Rng,
    nodes: usize,
    cap: usize,
}

impl Filler<'_> {
    fn at(&self, i: usize, j: usize) -> Option<i64> {
        let k = i * self.n + j;
        self.assigned[k].then_some(self.vals[k])
    }

    fn completes_zero_minor(&self, i: usize, j: usize) -> bool {
        let n = self.n;
        let v = self.vals[i * n + j];
        for r in (0..n).filter(|&r| r != i && r != j) {
            for c in (0..n).filter(|&c| c != i && c != j && c != r) {
                if let (Some(a), Some(b), Some(d)) = (self.at(r, c), self.at(i, c), self.at(r, j)) {
                    if self.ring.is_zero(v * a - b * d) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// `None` when the node budget runs out.
    fn fill(&mut self, idx: usize) -> Option<bool> {
        let Some(&(i, j)) = self.cells.get(idx) else {
            return Some(true);
        };
        let mut candidates = self.ring.nonzero_values();
        candidates.shuffle(self.rng);
        let k = i * self.n + j;
        for v in candidates {
            self.nodes += 1;
            if self.nodes > self.cap {
                return None;
            }
            self.vals[k] = v;
            self.assigned[k] = true;
            if !self.completes_zero_minor(i, j) {
                match self.fill(idx + 1) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
        }
        self.assigned[k] = false;
        Some(false)
    }
}

fn ring_of(field: FieldSpec) -> Ring {
    Ring(field.modulus().map(i64::from))
}

/// Draws a kernel with property 𝒟 and the requested zero pairs.
fn draw_class_d_kernel(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Result<Kernel, LabError> {
    let n = spec.n;
    let ring = ring_of(spec.field);
    for _ in 0..spec.max_attempts.max(1) {
        let zeros = draw_zero_cells(rng, n, spec.zero_edges);
        let mut assigned = vec![false; n * n];
        for &(x, y) in &zeros {
            assigned[x * n + y] = true;
        }
        let cells: Vec<(usize, usize)> = (0..n * n)
            .map(|k| (k / n, k % n))
            .filter(|&(i, j)| i != j && !assigned[i * n + j])
            .collect();
        let mut filler = Filler {
            n,
            ring,
            vals: vec![0; n * n],
            assigned,
            cells,
            rng: &mut *rng,
            nodes: 0,
            cap: NODE_CAP_PER_POINT * n,
        };
        if filler.fill(0) != Some(true) {
            continue;
        }
        let mut vals = filler.vals;
        for i in 0..n {
            vals[i * n + i] = match ring.0 {
                None => rng.random_range(-RATIONAL_RANGE..=RATIONAL_RANGE),
                Some(p) => rng.random_range(0..p),
            };
        }
        let k = Kernel::from_fn(spec.field, n, |i, j| spec.field.from_i64(vals[i * n + j]))?;
        // independent confirmation of what the search pruned for
        if check_class_d(&k).holds {
            return Ok(k);
        }
    }
    Err(LabError::GenerationBudgetExceeded { attempts: spec.max_attempts })
}

fn draw_gauge(field: FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> Gauge {
    let values = (0..n)
        .map(|_| match field {
            FieldSpec::Rational => {
                let mut num = 0;
                while num == 0 {
                    num = rng.random_range(-RATIONAL_RANGE..=RATIONAL_RANGE);
                }
                field.from_ratio(num, rng.random_range(1..=RATIONAL_RANGE)).expect("nonzero denominator")
            }
            FieldSpec::Prime { p } => field.from_i64(rng.random_range(1..p as i64)),
        })
        .collect();
    Gauge::new(values).expect("nonzero values")
}

/// `K` with property 𝒟, a random gauge `g`, and `Q = g·K·g⁻¹` or `g·Kᵀ·g⁻¹`.
/// Deterministic in the spec.
pub fn gen_instance(spec: &InstanceSpec) -> Result<Instance, LabError> {
    let field = spec.field.validate().map_err(KernelError::from)?;
    if spec.n == 0 {
        return Err(LabError::InvalidSpec("need at least one point".into()));
    }
    if 2 * spec.zero_edges > spec.n {
        return Err(LabError::InvalidSpec(format!(
            "{} zero pairs need {} distinct points, only {} available",
            spec.zero_edges,
            2 * spec.zero_edges,
            spec.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = draw_class_d_kernel(spec, &mut rng)?;
    let gauge = draw_gauge(field, spec.n, &mut rng);
    let base = if spec.transpose { k.transpose() } else { k.clone() };
    let q = base.conjugate(&gauge)?;
    Ok(Instance {
        k,
        q,
        truth: GroundTruth { gauge, transposed: spec.transpose },
        seed: spec.seed,
    })
}

fn random_nonzero(field: FieldSpec, rng: &mut ChaCha8Rng) -> Scalar {
    match field {
        FieldSpec::Rational => {
            let mut v = 0;
            while v == 0 {
                v = rng.random_range(-RATIONAL_RANGE..=RATIONAL_RANGE);
            }
            field.from_i64(v)
        }
        FieldSpec::Prime { p } => field.from_i64(rng.random_range(1..p as i64)),
    }
}

/// Returns `q` with one entry shifted so that some principal minor of order
/// at most 3 changes.
pub fn perturb(k: &Kernel, q: &Kernel, seed: u64) -> Result<Kernel, LabError> {
    k.same_ground_set(q)?;
    let n = q.n();
    let field = q.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const TRIES: usize = 1_000;
    for _ in 0..TRIES {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        let v = q.entry(i, j) + &random_nonzero(field, &mut rng);
        let edited = q.with_entry(i, j, v)?;
        let mut subsets = vec![vec![i.min(j), i.max(j)]];
        subsets[0].dedup();
        for t in (0..n).filter(|&t| t != i && t != j) {
            let mut s = vec![i, j, t];
            s.sort_unstable();
            s.dedup();
            subsets.push(s);
        }
        if subsets.iter().any(|s| edited.principal_minor(s).ok() != q.principal_minor(s).ok()) {
            return Ok(edited);
        }
    }
    Err(LabError::PerturbationFailed { tries: TRIES })
}

fn conjugate_matches(target: &Kernel, q: &Kernel, g: &[Scalar], inv: &[Scalar]) -> bool {
    let n = target.n();
    (0..n).all(|x| (0..n).all(|y| &(&g[x] * target.entry(x, y)) * &inv[y] == *q.entry(x, y)))
}

/// Searches gauges with `g(0) = 1` exhaustively.
fn enumerate_gauges(target: &Kernel, q: &Kernel, p: u32) -> Option<Gauge> {
    let n = target.n();
    let field = target.field();
    let m = (p - 1) as usize;
    let mut digits = vec![0usize; n.saturating_sub(1)];
    loop {
        let g: Vec<Scalar> = std::iter::once(field.one())
            .chain(digits.iter().map(|&d| field.from_i64(d as i64 + 1)))
            .collect();
        let inv: Vec<Scalar> = g.iter().map(|v| v.inv().expect("nonzero")).collect();
        if conjugate_matches(target, q, &g, &inv) {
            return Some(Gauge::new(g).expect("nonzero"));
        }
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return None;
            }
            digits[pos] += 1;
            if digits[pos] < m {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Fixed-point sweep: any point adjacent to a solved one through a nonzero
/// entry of `target` is solved next; unreached points start new components.
fn sweep_gauge(target: &Kernel, q: &Kernel) -> Option<Gauge> {
    let n = target.n();
    let field = target.field();
    let mut g: Vec<Option<Scalar>> = vec![None; n];
    while let Some(root) = g.iter().position(Option::is_none) {
        g[root] = Some(field.one());
        let mut changed = true;
        while changed {
            changed = false;
            for x in 0..n {
                for y in 0..n {
                    let (Some(gx), None) = (g[x].clone(), &g[y]) else {
                        continue;
                    };
                    // Q(x,y) = g(x)·T(x,y)/g(y) and Q(y,x) = g(y)·T(y,x)/g(x)
                    let gy = if !target.is_zero_at(x, y) && !q.is_zero_at(x, y) {
                        gx.checked_mul(target.entry(x, y)).ok()?.checked_div(q.entry(x, y)).ok()?
                    } else if !target.is_zero_at(y, x) && !q.is_zero_at(y, x) {
                        gx.checked_mul(q.entry(y, x)).ok()?.checked_div(target.entry(y, x)).ok()?
                    } else {
                        continue;
                    };
                    g[y] = Some(gy);
                    changed = true;
                }
            }
        }
    }
    let g: Vec<Scalar> = g.into_iter().map(|v| v.expect("all solved")).collect();
    let inv: Vec<Scalar> = g.iter().map(|v| v.inv().expect("nonzero")).collect();
    conjugate_matches(target, q, &g, &inv).then(|| Gauge::new(g).expect("nonzero"))
}

/// A gauge with `Q = g·K·g⁻¹` (flag false) or `Q = g·Kᵀ·g⁻¹` (flag true).
pub fn brute_force_with_flag(k: &Kernel, q: &Kernel, transposed: bool) -> Result<Option<Gauge>, LabError> {
    k.same_ground_set(q)?;
    let target = if transposed { k.transpose() } else { k.clone() };
    Ok(match k.field() {
        FieldSpec::Prime { p } => {
            let n = k.n() as u64;
            let count = n.saturating_mul((p as u64 - 1).saturating_pow(n.saturating_sub(1) as u32));
            if count > ORACLE_LIMIT {
                return Err(LabError::OracleTooLarge { count });
            }
            enumerate_gauges(&target, q, p)
        }
        FieldSpec::Rational => sweep_gauge(&target, q),
    })
}

/// Decides diagonal similarity to `K` or `Kᵀ` without the Case machinery,
/// trying the untransposed form first.
pub fn brute_force_diagonal_similar(k: &Kernel, q: &Kernel) -> Result<Option<GroundTruth>, LabError> {
    for transposed in [false, true] {
        if let Some(gauge) = brute_force_with_flag(k, q, transposed)? {
            return Ok(Some(GroundTruth { gauge, transposed }));
        }
    }
    Ok(None)
}

/// A pair sharing every principal minor yet related by no conjugation or
/// transposition. At least one of the kernels lacks property 𝒟.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub k: Kernel,
    pub q: Kernel,
    pub k_violation: Option<ClassDWitness>,
    pub q_violation: Option<ClassDWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub samples: u64,
    /// Sampled pairs passing the full equivalence check.
    pub equivalent: u64,
    pub witnesses: Vec<Counterexample>,
    /// Non-recoverable equivalent pairs where both kernels have property 𝒟.
    /// Always empty if the recovery theorem holds.
    pub anomalies: Vec<(Kernel, Kernel)>,
}

const SHARD: u64 = 4_096;

fn raw_minors_agree(n: usize, a: &[u64], b: &[u64], p: u64) -> bool {
    // orders 1 and 2 agree by construction
    for mask in 1u32..1 << n {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if s.len() < 3 {
            continue;
        }
        let pick = |m: &[u64]| s.iter().flat_map(|&i| s.iter().map(move |&j| m[i * n + j])).collect::<Vec<u64>>();
        if prime_det(s.len(), pick(a), p) != prime_det(s.len(), pick(b), p) {
            return false;
        }
    }
    true
}

/// Random `K`, and `Q` with the same diagonal and the same pair products
/// `Q(x,y)Q(y,x) = K(x,y)K(y,x)`, so orders 1 and 2 always agree.
fn sample_pair(n: usize, p: u64, rng: &mut ChaCha8Rng) -> (Vec<u64>, Vec<u64>) {
    let a: Vec<u64> = (0..n * n).map(|_| rng.random_range(0..p)).collect();
    let mut b = a.clone();
    for x in 0..n {
        for y in x + 1..n {
            let prod = a[x * n + y] * a[y * n + x] % p;
            let (u, v) = if prod == 0 {
                let other = rng.random_range(0..p);
                if rng.random_bool(0.5) {
                    (0, other)
                } else {
                    (other, 0)
                }
            } else {
                let u = rng.random_range(1..p);
                (u, prod * crate::scalar::mod_inv(u, p) % p)
            };
            b[x * n + y] = u;
            b[y * n + x] = v;
        }
    }
    (a, b)
}

fn to_kernel(field: FieldSpec, n: usize, m: &[u64]) -> Kernel {
    Kernel::from_fn(field, n, |i, j| field.from_i64(m[i * n + j] as i64)).expect("square table")
}

fn canonical_key(k: &Kernel, q: &Kernel) -> String {
    let flat = |h: &Kernel| h.rows().flatten().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
    format!("{}|{}", flat(k), flat(q))
}

/// Samples `budget` pairs over a small prime field and keeps those that share
/// every principal minor but fail the brute-force oracle under both flags.
/// Sharded by seed, so the result does not depend on the thread count.
pub fn search_counterexample(field: FieldSpec, n: usize, budget: u64, seed: u64) -> Result<SearchReport, LabError> {
    let FieldSpec::Prime { p } = field.validate().map_err(KernelError::from)? else {
        return Err(LabError::UnsupportedField(field));
    };
    if n < 4 {
        return Err(LabError::InvalidSpec("counterexample search needs at least four points".into()));
    }
    let p = p as u64;
    let shards = budget.div_ceil(SHARD);
    let per_shard: Vec<(u64, Vec<(Kernel, Kernel)>)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ shard.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let count = SHARD.min(budget - shard * SHARD);
            let mut equivalent = 0;
            let mut hits = Vec::new();
            for _ in 0..count {
                let (a, b) = sample_pair(n, p, &mut rng);
                if !raw_minors_agree(n, &a, &b, p) {
                    continue;
                }
                equivalent += 1;
                let (k, q) = (to_kernel(field, n, &a), to_kernel(field, n, &b));
                if matches!(brute_force_diagonal_similar(&k, &q), Ok(None)) {
                    hits.push((k, q));
                }
            }
            (equivalent, hits)
        })
        .collect();

    let mut equivalent = 0;
    let mut found: BTreeMap<String, (Kernel, Kernel)> = BTreeMap::new();
    for (e, hits) in per_shard {
        equivalent += e;
        for (k, q) in hits {
            found.entry(canonical_key(&k, &q)).or_insert((k, q));
        }
    }
    let mut witnesses = Vec::new();
    let mut anomalies = Vec::new();
    for (k, q) in found.into_values() {
        // re-verify everything with the exact library routines before emitting
        let equivalent = check_equivalence(&k, &q, None)?.is_equivalent();
        let similar = brute_force_diagonal_similar(&k, &q)?.is_some();
        if !equivalent || similar {
            continue;
        }
        let (k_violation, q_violation) = (check_class_d(&k).witness, check_class_d(&q).witness);
        if k_violation.is_none() && q_violation.is_none() {
            anomalies.push((k, q));
        } else {
            witnesses.push(Counterexample { k, q, k_violation, q_violation });
        }
    }
    Ok(SearchReport {
        samples: budget,
        equivalent,
        witnesses,
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classd::{edge_patterns, off_diagonal_zero_counts, zero_pattern_validate};
    use crate::recovery::{recover, RecoverOptions};

    fn spec(field: FieldSpec, n: usize, transpose: bool, zeros: usize, seed: u64) -> InstanceSpec {
        InstanceSpec {
            transpose,
            zero_edges: zeros,
            ..InstanceSpec::new(field, n, seed)
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let s = spec(FieldSpec::prime(11).unwrap(), 6, true, 1, 42);
        assert_eq!(gen_instance(&s).unwrap(), gen_instance(&s).unwrap());
        let other = gen_instance(&InstanceSpec { seed: 43, ..s }).unwrap();
        assert_ne!(gen_instance(&s).unwrap().k, other.k);
    }

    #[test]
    fn instances_meet_hypotheses() {
        for (i, field) in [FieldSpec::Rational, FieldSpec::prime(7).unwrap(), FieldSpec::prime(101).unwrap()]
            .into_iter()
            .enumerate()
        {
            for n in 4..=8 {
                for zeros in 0..=2 {
                    let s = spec(field, n, (n + zeros) % 2 == 0, zeros, (i * 100 + n * 10 + zeros) as u64);
                    let inst = gen_instance(&s).unwrap();
                    assert!(check_class_d(&inst.k).holds && check_class_d(&inst.q).holds);
                    assert!(zero_pattern_validate(&inst.k).is_empty());
                    let (rows, _) = off_diagonal_zero_counts(&inst.k);
                    assert!(rows.iter().sum::<usize>() >= zeros);
                    assert!(edge_patterns(&inst.k, &inst.q).is_ok());
                    let target = if s.transpose { inst.k.transpose() } else { inst.k.clone() };
                    assert_eq!(target.conjugate(&inst.truth.gauge).unwrap(), inst.q);
                }
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let s = spec(FieldSpec::Rational, 4, false, 3, 0);
        assert!(matches!(gen_instance(&s), Err(LabError::InvalidSpec(_))));
        // with no zeros a GF(2) kernel is all ones off the diagonal, so every
        // disjoint minor vanishes
        let s = InstanceSpec { max_attempts: 3, ..spec(FieldSpec::prime(2).unwrap(), 4, false, 0, 0) };
        assert_eq!(gen_instance(&s), Err(LabError::GenerationBudgetExceeded { attempts: 3 }));
    }

    #[test]
    fn perturbation_is_detected() {
        for seed in 0..20 {
            let inst = gen_instance(&spec(FieldSpec::Rational, 5, seed % 2 == 0, 1, seed)).unwrap();
            let q2 = perturb(&inst.k, &inst.q, seed).unwrap();
            let diff: Vec<(usize, usize)> = (0..25)
                .map(|c| (c / 5, c % 5))
                .filter(|&(i, j)| q2.entry(i, j) != inst.q.entry(i, j))
                .collect();
            assert_eq!(diff.len(), 1);
            let r = check_equivalence(&inst.k, &q2, None).unwrap();
            assert!(r.witness.unwrap().subset.len() <= 3);
        }
    }

    #[test]
    fn oracle_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        let k = Kernel::from_fn(f3, 4, |i, j| f3.from_i64((i * 4 + j) as i64 % 3 + 1)).unwrap();
        let g = Gauge::new([1, 2, 2, 1].iter().map(|&v| f3.from_i64(v)).collect()).unwrap();
        let truth = brute_force_diagonal_similar(&k, &k.conjugate(&g).unwrap()).unwrap().unwrap();
        assert!(!truth.transposed);
        assert_eq!(truth.gauge, g);
        let same = brute_force_diagonal_similar(&k, &k).unwrap().unwrap();
        assert_eq!(same.gauge, Gauge::identity(f3, 4));
        let bumped = k.with_entry(0, 0, f3.from_i64(0)).unwrap();
        assert_eq!(brute_force_diagonal_similar(&k, &bumped).unwrap(), None);
        let big = FieldSpec::prime(101).unwrap();
        let kb = Kernel::from_fn(big, 6, |_, _| big.one()).unwrap();
        assert!(matches!(brute_force_diagonal_similar(&kb, &kb), Err(LabError::OracleTooLarge { .. })));
    }

    #[test]
    fn rational_oracle_matches_pipeline() {
        for seed in 0..10 {
            let inst = gen_instance(&spec(FieldSpec::Rational, 6, seed % 2 == 1, 2, seed)).unwrap();
            let oracle = brute_force_with_flag(&inst.k, &inst.q, inst.truth.transposed).unwrap().unwrap();
            let r = recover(&inst.k, &inst.q, RecoverOptions::default()).unwrap();
            assert_eq!(r.transposed, inst.truth.transposed);
            assert_eq!(r.gauge, oracle);
        }
    }

    #[test]
    fn search_contract() {
        let f3 = FieldSpec::prime(3).unwrap();
        let empty = search_counterexample(f3, 4, 0, 1).unwrap();
        assert!(empty.witnesses.is_empty() && empty.samples == 0);
        let a = search_counterexample(f3, 4, 20_000, 7).unwrap();
        assert_eq!(a, search_counterexample(f3, 4, 20_000, 7).unwrap());
        assert!(a.anomalies.is_empty());
        for w in &a.witnesses {
            assert!(check_equivalence(&w.k, &w.q, None).unwrap().is_equivalent());
            assert_eq!(brute_force_diagonal_similar(&w.k, &w.q).unwrap(), None);
            assert!(w.k_violation.is_some() || w.q_violation.is_some());
        }
        assert!(search_counterexample(FieldSpec::Rational, 4, 10, 0).is_err());
    }
}
