//! JSON documents for kernels, instances and reports. Points are always
//! written by label.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::classd::ClassDReport;
use crate::classify::{CaseTable, GlobalCase};
use crate::equiv::{EquivalenceReport, PrecheckFailure};
use crate::kernel::{Gauge, Kernel, KernelError};
use crate::lab::{GroundTruth, Instance, SearchReport};
use crate::recovery::{RecoveryError, RecoveryResult};
use crate::scalar::{FieldSpec, Scalar};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Content(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelDoc {
    pub field: FieldSpec,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl KernelDoc {
    pub fn from_kernel(k: &Kernel) -> Self {
        KernelDoc {
            field: k.field(),
            labels: k.labels().to_vec(),
            entries: k.rows().map(|r| r.iter().map(Scalar::to_string).collect()).collect(),
        }
    }

    pub fn to_kernel(&self) -> Result<Kernel, DocError> {
        let field = self.field.validate().map_err(KernelError::from)?;
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|s| field.parse_scalar(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(KernelError::from)?;
        Ok(Kernel::new(field, self.labels.clone(), rows)?)
    }
}

pub fn parse_kernel(text: &str) -> Result<Kernel, DocError> {
    serde_json::from_str::<KernelDoc>(text)?.to_kernel()
}

pub fn kernel_to_json(k: &Kernel) -> Value {
    serde_json::to_value(KernelDoc::from_kernel(k)).expect("plain data")
}

fn labels_of(k: &Kernel, points: &[usize]) -> Value {
    json!(points.iter().map(|&i| k.label(i)).collect::<Vec<_>>())
}

pub fn gauge_to_json(k: &Kernel, g: &Gauge) -> Value {
    let map: Map<String, Value> = g
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (k.label(i).to_string(), json!(v.to_string())))
        .collect();
    Value::Object(map)
}

pub fn gauge_from_json(k: &Kernel, v: &Value) -> Result<Gauge, DocError> {
    let obj = v.as_object().ok_or_else(|| DocError::Content("gauge must be an object keyed by label".into()))?;
    let values = k
        .labels()
        .iter()
        .map(|l| {
            let s = obj
                .get(l)
                .and_then(Value::as_str)
                .ok_or_else(|| DocError::Content(format!("gauge has no value for label {l:?}")))?;
            k.field().parse_scalar(s).map_err(|e| DocError::Kernel(e.into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Gauge::new(values)?)
}

fn precheck_json(k: &Kernel, p: &PrecheckFailure) -> Value {
    let kind = match p {
        PrecheckFailure::Diagonal { .. } => "diagonal",
        PrecheckFailure::PairProduct { .. } => "pair_product",
    };
    json!({ "kind": kind, "points": labels_of(k, &p.points()) })
}

pub fn equivalence_json(k: &Kernel, r: &EquivalenceReport) -> Value {
    json!({
        "verdict": r.verdict,
        "checked_order_max": r.checked_order_max,
        "n": r.n,
        "witness": r.witness.as_ref().map(|w| json!({
            "subset": labels_of(k, &w.subset),
            "minor_k": w.minor_k.to_string(),
            "minor_q": w.minor_q.to_string(),
        })),
        "prechecks": r.precheck_failures.iter().map(|p| precheck_json(k, p)).collect::<Vec<_>>(),
    })
}

pub fn class_d_json(h: &Kernel, r: &ClassDReport) -> Value {
    json!({
        "holds": r.holds,
        "vacuous": r.vacuous,
        "witness": r.witness.as_ref().map(|w| json!({
            "x": h.label(w.x),
            "y": h.label(w.y),
            "z": h.label(w.z),
            "w": h.label(w.w),
            "determinant": w.determinant.to_string(),
        })),
    })
}

/// Every directed 3-cycle with its label, products and zero-edges under `framework`.
pub fn classification_json(k: &Kernel, table: &CaseTable, framework: GlobalCase) -> Value {
    let cycles: Vec<Value> = table
        .iter_all()
        .iter()
        .map(|c| {
            json!({
                "cycle": labels_of(k, c.cycle.vertices()),
                "label": c.label,
                "products": {
                    "K": c.products.k.to_string(),
                    "Krev": c.products.k_rev.to_string(),
                    "Q": c.products.q.to_string(),
                    "Qrev": c.products.q_rev.to_string(),
                },
                "zero_edges": c.zero_edges(framework).iter().map(|&(x, y)| labels_of(k, &[x, y])).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!(cycles)
}

pub fn certificate_json(k: &Kernel, r: &RecoveryResult) -> Value {
    json!({
        "transposed": r.transposed,
        "base": r.base_label,
        "gauge": gauge_to_json(k, &r.gauge),
        "global_case": r.global_case.as_str(),
        "method": r.method,
        "verified": r.verification.passed,
    })
}

pub fn recovery_error_json(k: &Kernel, e: &RecoveryError) -> Value {
    let (kind, detail) = match e {
        RecoveryError::Input(_) => ("input", Value::Null),
        RecoveryError::NotEquivalent(w) => (
            "not_equivalent",
            json!({ "subset": labels_of(k, &w.subset), "minor_k": w.minor_k.to_string(), "minor_q": w.minor_q.to_string() }),
        ),
        RecoveryError::NeitherCycle(p) => ("not_equivalent", json!({ "cycle": labels_of(k, p.vertices()) })),
        RecoveryError::ClassDViolation { kernel, witness } => (
            "class_d_violation",
            json!({
                "kernel": kernel,
                "quadruple": labels_of(k, &witness.quadruple()),
                "determinant": witness.determinant.to_string(),
            }),
        ),
        RecoveryError::MixedCases { case1_witness, case2_witness } => (
            "mixed_cases",
            json!({ "case1_cycle": labels_of(k, case1_witness.vertices()), "case2_cycle": labels_of(k, case2_witness.vertices()) }),
        ),
        RecoveryError::BranchUnavailable { x, y } => ("branch_unavailable", json!({ "pair": labels_of(k, &[*x, *y]) })),
        RecoveryError::Inconsistent { x, y, z, w, value_z, value_w } => (
            "inconsistent",
            json!({
                "pair": labels_of(k, &[*x, *y]),
                "pivots": labels_of(k, &[*z, *w]),
                "values": [value_z.to_string(), value_w.to_string()],
            }),
        ),
        RecoveryError::CocycleInvalid(v) => ("cocycle_invalid", json!({ "points": labels_of(k, &v.points()) })),
        RecoveryError::VerificationFailed { x, y, expected, found } => (
            "verification_failed",
            json!({ "entry": labels_of(k, &[*x, *y]), "expected": expected.to_string(), "found": found.to_string() }),
        ),
        RecoveryError::NotRecoverable => ("not_recoverable", Value::Null),
    };
    json!({ "error": kind, "message": e.to_string(), "detail": detail })
}

pub fn instance_json(inst: &Instance) -> Value {
    json!({
        "k": kernel_to_json(&inst.k),
        "q": kernel_to_json(&inst.q),
        "truth": {
            "gauge": gauge_to_json(&inst.k, &inst.truth.gauge),
            "transposed": inst.truth.transposed,
        },
        "seed": inst.seed,
    })
}

pub fn parse_instance(text: &str) -> Result<Instance, DocError> {
    let v: Value = serde_json::from_str(text)?;
    let kernel_at = |key: &str| -> Result<Kernel, DocError> {
        let doc: KernelDoc = serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))?;
        doc.to_kernel()
    };
    let (k, q) = (kernel_at("k")?, kernel_at("q")?);
    let truth = v.get("truth").ok_or_else(|| DocError::Content("instance has no truth".into()))?;
    let gauge = gauge_from_json(&k, truth.get("gauge").unwrap_or(&Value::Null))?;
    let transposed = truth
        .get("transposed")
        .and_then(Value::as_bool)
        .ok_or_else(|| DocError::Content("truth.transposed must be a boolean".into()))?;
    Ok(Instance {
        k,
        q,
        truth: GroundTruth { gauge, transposed },
        seed: v.get("seed").and_then(Value::as_u64).unwrap_or(0),
    })
}

pub fn search_json(r: &SearchReport) -> Value {
    let violation = |h: &Kernel, w: &Option<crate::classd::ClassDWitness>| {
        w.as_ref().map(|w| json!({ "quadruple": labels_of(h, &w.quadruple()), "determinant": w.determinant.to_string() }))
    };
    json!({
        "samples": r.samples,
        "equivalent": r.equivalent,
        "witnesses": r.witnesses.iter().map(|c| json!({
            "k": kernel_to_json(&c.k),
            "q": kernel_to_json(&c.q),
            "k_class_d_violation": violation(&c.k, &c.k_violation),
            "q_class_d_violation": violation(&c.q, &c.q_violation),
        })).collect::<Vec<_>>(),
        "anomalies": r.anomalies.iter().map(|(k, q)| json!({ "k": kernel_to_json(k), "q": kernel_to_json(q) })).collect::<Vec<_>>(),
    })
}
