//! Recovering the conjugation, and possibly the transposition, that turns `K` into `Q`.
//!
//! With at least four points and property 𝒟 on both kernels, the Case table
//! fixes a global Case. The ratio table `S` (Case 1) or `S̃` (Case 2) is then a
//! cocycle, and `g(x) = S(x, base)` is the gauge. Below four points the
//! gauge is solved for directly by propagation along nonzero entries.

use serde::Serialize;
use thiserror::Error;

use crate::classd::{check_class_d, ClassDWitness};
use crate::classify::{global_case, CaseError, CaseTable, GlobalCase};
use crate::cocycle::{extract_gauge, verify_cocycle, CocycleFn, CocycleViolation};
use crate::equiv::{check_equivalence, MinorWitness};
use crate::kernel::{Cycle, Gauge, Kernel, KernelError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    K,
    Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecoveryError {
    #[error(transparent)]
    Input(#[from] KernelError),
    #[error("principal minors differ on {:?}", .0.subset)]
    NotEquivalent(MinorWitness),
    #[error("cycle {0:?} is in neither Case, so some order-3 minor differs")]
    NeitherCycle(Cycle),
    #[error("kernel {kernel:?} lacks property 𝒟 at rows ({}, {}), columns ({}, {})", .witness.x, .witness.w, .witness.y, .witness.z)]
    ClassDViolation { kernel: Side, witness: ClassDWitness },
    #[error("cycle {case1_witness:?} is only in Case 1 but {case2_witness:?} is only in Case 2")]
    MixedCases { case1_witness: Cycle, case2_witness: Cycle },
    #[error("no ratio branch applies at ({x}, {y})")]
    BranchUnavailable { x: usize, y: usize },
    #[error("ratio at ({x}, {y}) depends on the pivot: {z} gives {value_z}, {w} gives {value_w}")]
    Inconsistent {
        x: usize,
        y: usize,
        z: usize,
        w: usize,
        value_z: Scalar,
        value_w: Scalar,
    },
    #[error("ratio table is not a cocycle: {0:?}")]
    CocycleInvalid(CocycleViolation),
    #[error("recovered transform disagrees at ({x}, {y}): expected {expected}, found {found}")]
    VerificationFailed {
        x: usize,
        y: usize,
        expected: Scalar,
        found: Scalar,
    },
    #[error("no conjugation, with or without transposition, relates the kernels")]
    NotRecoverable,
}

impl RecoveryError {
    /// Negative verdicts (1), input problems (2) and internal failures (3).
    pub fn exit_code(&self) -> i32 {
        match self {
            RecoveryError::NotEquivalent(_)
            | RecoveryError::NeitherCycle(_)
            | RecoveryError::ClassDViolation { .. }
            | RecoveryError::NotRecoverable => 1,
            RecoveryError::Input(_) => 2,
            _ => 3,
        }
    }
}

impl From<CaseError> for RecoveryError {
    fn from(e: CaseError) -> Self {
        match e {
            CaseError::Neither(p) => RecoveryError::NeitherCycle(p),
            CaseError::MixedCases { case1_witness, case2_witness } => RecoveryError::MixedCases { case1_witness, case2_witness },
        }
    }
}

fn ratio(num: &Scalar, den: &Scalar, x: usize, y: usize) -> Result<Scalar, RecoveryError> {
    num.checked_div(den).map_err(|_| RecoveryError::BranchUnavailable { x, y })
}

fn smallest_other(n: usize, x: usize, y: usize) -> Option<usize> {
    (0..n).find(|&z| z != x && z != y)
}

/// The pivot expression through `z` for a pair with `K(x,y) = 0 = K(y,x)`.
fn pivot_value(k: &Kernel, q: &Kernel, x: usize, y: usize, z: usize, framework: GlobalCase) -> Result<Scalar, RecoveryError> {
    let num = q.entry(x, z) * q.entry(z, y);
    let den = match framework {
        GlobalCase::Case1 => k.entry(x, z) * k.entry(z, y),
        GlobalCase::Case2 => k.entry(z, x) * k.entry(y, z),
    };
    ratio(&num, &den, x, y)
}

fn ratio_entry(k: &Kernel, q: &Kernel, table: &CaseTable, x: usize, y: usize, framework: GlobalCase) -> Result<Scalar, RecoveryError> {
    if x == y {
        return Ok(k.field().one());
    }
    let unavailable = RecoveryError::BranchUnavailable { x, y };
    // in Case 2 the roles of K(x,y) and K(y,x) swap
    let (fwd, back) = match framework {
        GlobalCase::Case1 => ((x, y), (y, x)),
        GlobalCase::Case2 => ((y, x), (x, y)),
    };
    if !k.is_zero_at(fwd.0, fwd.1) {
        return ratio(q.entry(x, y), k.entry(fwd.0, fwd.1), x, y);
    }
    let z = smallest_other(k.n(), x, y).ok_or(unavailable.clone())?;
    let label = table.label(x, y, z).ok_or(unavailable.clone())?;
    if !k.is_zero_at(back.0, back.1) {
        // a zero-edge of a cycle in the chosen Case
        if !label.admits(framework) {
            return Err(unavailable);
        }
        return ratio(q.entry(y, x), k.entry(back.0, back.1), x, y)?
            .inv()
            .map_err(|_| unavailable);
    }
    pivot_value(k, q, x, y, z, framework)
}

/// The ratio table of the chosen Case: `Q(x,y) = S(x,y)·K(x,y)` in Case 1,
/// `Q(x,y) = S̃(x,y)·K(y,x)` in Case 2.
pub fn build_cocycle(k: &Kernel, q: &Kernel, table: &CaseTable, framework: GlobalCase) -> Result<CocycleFn, RecoveryError> {
    k.same_ground_set(q)?;
    let n = k.n();
    let mut entries = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            entries.push(ratio_entry(k, q, table, x, y, framework)?);
        }
    }
    Ok(CocycleFn::from_table(k.field(), n, entries)?)
}

pub fn build_cocycle_case1(k: &Kernel, q: &Kernel, table: &CaseTable) -> Result<CocycleFn, RecoveryError> {
    build_cocycle(k, q, table, GlobalCase::Case1)
}

pub fn build_cocycle_case2(k: &Kernel, q: &Kernel, table: &CaseTable) -> Result<CocycleFn, RecoveryError> {
    build_cocycle(k, q, table, GlobalCase::Case2)
}

/// For a pair with `K(x,y) = 0 = K(y,x)`, evaluates the pivot expression at
/// every admissible `z` and returns the common value.
pub fn consistency_audit(k: &Kernel, q: &Kernel, x: usize, y: usize, framework: GlobalCase) -> Result<Scalar, RecoveryError> {
    k.same_ground_set(q)?;
    let n = k.n();
    for i in [x, y] {
        if i >= n {
            return Err(KernelError::IndexOutOfRange { index: i, n }.into());
        }
    }
    let mut first: Option<(usize, Scalar)> = None;
    for z in (0..n).filter(|&z| z != x && z != y) {
        let Ok(v) = pivot_value(k, q, x, y, z, framework) else {
            continue;
        };
        match &first {
            None => first = Some((z, v)),
            Some((z0, v0)) if *v0 != v => {
                return Err(RecoveryError::Inconsistent {
                    x,
                    y,
                    z: *z0,
                    w: z,
                    value_z: v0.clone(),
                    value_w: v,
                })
            }
            Some(_) => {}
        }
    }
    first.map(|(_, v)| v).ok_or(RecoveryError::BranchUnavailable { x, y })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecoverOptions {
    /// Largest minor order compared. `None` compares all of them.
    pub max_order: Option<usize>,
    /// Evaluate every pivot for symmetric zero pairs, not only the smallest.
    pub audit_consistency: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cocycle,
    DirectSolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub entries_checked: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryResult {
    pub transposed: bool,
    pub gauge: Gauge,
    pub base: usize,
    pub base_label: String,
    pub global_case: GlobalCase,
    pub method: Method,
    pub verification: Verification,
    /// Symmetric zero pairs whose pivot independence was audited.
    pub audited_pairs: usize,
}

/// Checks `Q(x,y) = g(x)·T(x,y)·g(y)⁻¹` entrywise, with `T` equal to `K` or `Kᵀ`.
pub fn verify_transform(k: &Kernel, q: &Kernel, gauge: &Gauge, transposed: bool) -> Result<Verification, RecoveryError> {
    let target = if transposed { k.transpose() } else { k.clone() };
    let image = target.conjugate(gauge)?;
    let n = k.n();
    for x in 0..n {
        for y in 0..n {
            if image.entry(x, y) != q.entry(x, y) {
                return Err(RecoveryError::VerificationFailed {
                    x,
                    y,
                    expected: q.entry(x, y).clone(),
                    found: image.entry(x, y).clone(),
                });
            }
        }
    }
    Ok(Verification {
        entries_checked: n * n,
        passed: true,
    })
}

/// Solves `Q(x,y) = g(x)·T(x,y)·g(y)⁻¹` by fixing `g = 1` at the smallest
/// point of each component of the nonzero pattern of `T` and propagating.
/// Any solution agrees with this one up to a scalar per component, so a
/// `None` is definitive.
pub fn solve_gauge(target: &Kernel, q: &Kernel) -> Option<Gauge> {
    let n = target.n();
    let field = target.field();
    let mut g: Vec<Option<Scalar>> = vec![None; n];
    for root in 0..n {
        if g[root].is_some() {
            continue;
        }
        g[root] = Some(field.one());
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            let gx = g[x].clone().expect("visited");
            for y in 0..n {
                if g[y].is_some() || y == x {
                    continue;
                }
                // g(y) = g(x)·T(x,y)/Q(x,y), or g(x)·Q(y,x)/T(y,x)
                let gy = if !target.is_zero_at(x, y) {
                    gx.checked_mul(target.entry(x, y)).ok()?.checked_div(q.entry(x, y)).ok()?
                } else if !target.is_zero_at(y, x) {
                    gx.checked_mul(q.entry(y, x)).ok()?.checked_div(target.entry(y, x)).ok()?
                } else {
                    continue;
                };
                if gy.is_zero() {
                    return None;
                }
                g[y] = Some(gy);
                stack.push(y);
            }
        }
    }
    let gauge = Gauge::new(g.into_iter().map(|v| v.expect("all points reached")).collect()).ok()?;
    let image = target.conjugate(&gauge).ok()?;
    let agrees = (0..n).all(|x| (0..n).all(|y| image.entry(x, y) == q.entry(x, y)));
    agrees.then_some(gauge)
}

fn direct_solve(k: &Kernel, q: &Kernel) -> Result<RecoveryResult, RecoveryError> {
    for transposed in [false, true] {
        let target = if transposed { k.transpose() } else { k.clone() };
        if let Some(gauge) = solve_gauge(&target, q) {
            let verification = verify_transform(k, q, &gauge, transposed)?;
            return Ok(RecoveryResult {
                transposed,
                gauge,
                base: 0,
                base_label: k.label(0).to_string(),
                global_case: if transposed { GlobalCase::Case2 } else { GlobalCase::Case1 },
                method: Method::DirectSolve,
                verification,
                audited_pairs: 0,
            });
        }
    }
    Err(RecoveryError::NotRecoverable)
}

/// The full pipeline: equivalence, property 𝒟, Case table, global Case,
/// ratio cocycle, gauge extraction and entrywise verification.
pub fn recover(k: &Kernel, q: &Kernel, options: RecoverOptions) -> Result<RecoveryResult, RecoveryError> {
    let report = check_equivalence(k, q, options.max_order)?;
    if let Some(w) = report.witness {
        return Err(RecoveryError::NotEquivalent(w));
    }
    let n = k.n();
    if n <= 3 {
        return direct_solve(k, q);
    }
    for (side, h) in [(Side::K, k), (Side::Q, q)] {
        if let Some(witness) = check_class_d(h).witness {
            return Err(RecoveryError::ClassDViolation { kernel: side, witness });
        }
    }
    let table = CaseTable::build(k, q)?;
    let preferred = global_case(&table)?;
    if table.has_single_case_cycle() {
        return recover_in_case(k, q, &table, preferred, options);
    }
    // Every cycle is in both Cases. On four points with two symmetric zero
    // pairs this says nothing about transposition, so Case 2 is tried when
    // the Case 1 ratio table fails to be a cocycle.
    match recover_in_case(k, q, &table, GlobalCase::Case1, options) {
        Err(RecoveryError::CocycleInvalid(_) | RecoveryError::Inconsistent { .. } | RecoveryError::BranchUnavailable { .. }) => {
            recover_in_case(k, q, &table, GlobalCase::Case2, options)
        }
        other => other,
    }
}

fn recover_in_case(k: &Kernel, q: &Kernel, table: &CaseTable, case: GlobalCase, options: RecoverOptions) -> Result<RecoveryResult, RecoveryError> {
    let n = k.n();
    let mut audited_pairs = 0;
    if options.audit_consistency {
        for x in 0..n {
            for y in x + 1..n {
                if k.is_zero_at(x, y) && k.is_zero_at(y, x) {
                    consistency_audit(k, q, x, y, case)?;
                    consistency_audit(k, q, y, x, case)?;
                    audited_pairs += 1;
                }
            }
        }
    }
    let s = build_cocycle(k, q, table, case)?;
    verify_cocycle(&s).map_err(RecoveryError::CocycleInvalid)?;
    let base = 0;
    let gauge = extract_gauge(&s, base)?;
    let transposed = case.transposed();
    let verification = verify_transform(k, q, &gauge, transposed)?;
    Ok(RecoveryResult {
        transposed,
        gauge,
        base,
        base_label: k.label(base).to_string(),
        global_case: case,
        method: Method::Cocycle,
        verification,
        audited_pairs,
    })
}
