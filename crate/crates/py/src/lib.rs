//! Python bindings. Kernels are wrapped as a class; every report comes back as
//! the same JSON document the command-line tool writes, decoded into dicts.

use detequiv::classify::CaseError;
use detequiv::doc;
use detequiv::lab::{self, LabError};
use detequiv::{CaseTable, FieldSpec, Gauge, InstanceSpec, Kernel, KernelError, RecoverOptions, RecoveryError};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde_json::{json, Value};

create_exception!(detequiv, NotRecoverable, PyException, "Recovery stopped with a negative verdict or an internal check failure.");

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_field(field: &str) -> PyResult<FieldSpec> {
    field.parse().map_err(value_err)
}

/// A square kernel over the rationals or a prime field, indexed by labels.
#[pyclass(name = "Kernel", module = "detequiv", frozen)]
pub struct PyKernel {
    inner: Kernel,
}

impl PyKernel {
    fn wrap(inner: Kernel) -> Self {
        PyKernel { inner }
    }
}

#[pymethods]
impl PyKernel {
    /// Entries may be ints, strings such as "3/4", or `fractions.Fraction`.
    #[new]
    #[pyo3(signature = (entries, field = "rational", labels = None))]
    fn new(entries: Vec<Vec<Bound<'_, PyAny>>>, field: &str, labels: Option<Vec<String>>) -> PyResult<Self> {
        let field = parse_field(field)?;
        let n = entries.len();
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        let rows = entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let s = x.str()?.to_string();
                        field.parse_scalar(&s).map_err(value_err)
                    })
                    .collect::<PyResult<Vec<_>>>()
            })
            .collect::<PyResult<Vec<_>>>()?;
        Kernel::new(field, labels, rows).map(Self::wrap).map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        doc::parse_kernel(text).map(Self::wrap).map_err(value_err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&doc::kernel_to_json(&self.inner)).expect("plain data")
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn field(&self) -> String {
        self.inner.field().to_string()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn entry(&self, i: usize, j: usize) -> PyResult<String> {
        let n = self.inner.n();
        if i >= n || j >= n {
            return Err(value_err(KernelError::IndexOutOfRange { index: i.max(j), n }));
        }
        Ok(self.inner.entry(i, j).to_string())
    }

    /// Entries as strings, row by row.
    fn entries(&self) -> Vec<Vec<String>> {
        self.inner.rows().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    }

    fn principal_minor(&self, subset: Vec<usize>) -> PyResult<String> {
        self.inner.principal_minor(&subset).map(|m| m.to_string()).map_err(value_err)
    }

    fn transpose(&self) -> Self {
        Self::wrap(self.inner.transpose())
    }

    /// `g(x) K(x,y) / g(y)` for a nowhere-zero gauge given in label order.
    fn conjugate(&self, gauge: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let field = self.inner.field();
        let values = gauge
            .iter()
            .map(|x| field.parse_scalar(&x.str()?.to_string()).map_err(value_err))
            .collect::<PyResult<Vec<_>>>()?;
        let g = Gauge::new(values).map_err(value_err)?;
        self.inner.conjugate(&g).map(Self::wrap).map_err(value_err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Kernel(n={}, field={})", self.inner.n(), self.inner.field())
    }
}

#[pyfunction]
#[pyo3(signature = (k, q, max_order = None))]
fn check_equivalence<'py>(py: Python<'py>, k: &PyKernel, q: &PyKernel, max_order: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let r = detequiv::check_equivalence(&k.inner, &q.inner, max_order).map_err(value_err)?;
    to_py(py, &doc::equivalence_json(&k.inner, &r))
}

#[pyfunction]
fn check_class_d<'py>(py: Python<'py>, k: &PyKernel) -> PyResult<Bound<'py, PyAny>> {
    let r = detequiv::check_class_d(&k.inner);
    to_py(py, &doc::class_d_json(&k.inner, &r))
}

/// Labels every directed 3-cycle. `global_case` is None when no single case fits.
#[pyfunction]
fn classify<'py>(py: Python<'py>, k: &PyKernel, q: &PyKernel) -> PyResult<Bound<'py, PyAny>> {
    let table = CaseTable::build(&k.inner, &q.inner).map_err(value_err)?;
    let case = detequiv::global_case(&table);
    let framework = case.as_ref().copied().unwrap_or(detequiv::GlobalCase::Case1);
    let error = match &case {
        Ok(_) => Value::Null,
        Err(CaseError::Neither(_)) => json!("neither"),
        Err(CaseError::MixedCases { .. }) => json!("mixed_cases"),
    };
    to_py(
        py,
        &json!({
            "global_case": case.ok().map(|c| c.as_str()),
            "error": error,
            "cycles": doc::classification_json(&k.inner, &table, framework),
        }),
    )
}

/// Returns the certificate dict. Raises `NotRecoverable(message, report)` when
/// recovery stops, and `ValueError` for malformed input.
#[pyfunction]
#[pyo3(signature = (k, q, max_order = None, audit_consistency = false))]
fn recover<'py>(
    py: Python<'py>,
    k: &PyKernel,
    q: &PyKernel,
    max_order: Option<usize>,
    audit_consistency: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let options = RecoverOptions { max_order, audit_consistency };
    match py.detach(|| detequiv::recover(&k.inner, &q.inner, options)) {
        Ok(r) => to_py(py, &doc::certificate_json(&k.inner, &r)),
        Err(RecoveryError::Input(e)) => Err(value_err(e)),
        Err(e) => {
            let report = to_py(py, &doc::recovery_error_json(&k.inner, &e))?.unbind();
            Err(NotRecoverable::new_err((e.to_string(), report)))
        }
    }
}

/// Returns `(k, q, truth)` where `q` is a conjugate of `k` or of its transpose.
#[pyfunction]
#[pyo3(signature = (n, field = "rational", seed = 0, transpose = false, zeros = 0))]
fn gen_instance<'py>(
    py: Python<'py>,
    n: usize,
    field: &str,
    seed: u64,
    transpose: bool,
    zeros: usize,
) -> PyResult<(PyKernel, PyKernel, Bound<'py, PyAny>)> {
    let spec = InstanceSpec { transpose, zero_edges: zeros, ..InstanceSpec::new(parse_field(field)?, n, seed) };
    let inst = py.detach(|| detequiv::gen_instance(&spec)).map_err(value_err)?;
    let truth = to_py(py, &doc::instance_json(&inst)["truth"])?;
    Ok((PyKernel::wrap(inst.k), PyKernel::wrap(inst.q), truth))
}

#[pyfunction]
#[pyo3(signature = (k, q, seed = 0))]
fn perturb(k: &PyKernel, q: &PyKernel, seed: u64) -> PyResult<PyKernel> {
    lab::perturb(&k.inner, &q.inner, seed).map(PyKernel::wrap).map_err(value_err)
}

/// Exhaustive search over gauges (prime fields only). None when no gauge works.
#[pyfunction]
fn brute_force<'py>(py: Python<'py>, k: &PyKernel, q: &PyKernel) -> PyResult<Option<Bound<'py, PyAny>>> {
    let found = py.detach(|| lab::brute_force_diagonal_similar(&k.inner, &q.inner)).map_err(value_err)?;
    found
        .map(|t| to_py(py, &json!({ "transposed": t.transposed, "gauge": doc::gauge_to_json(&k.inner, &t.gauge) })))
        .transpose()
}

#[pyfunction]
#[pyo3(signature = (field = "prime:3", n = 4, budget = 10_000, seed = 0))]
fn search_counterexample<'py>(py: Python<'py>, field: &str, n: usize, budget: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let field = parse_field(field)?;
    let r = py
        .detach(|| lab::search_counterexample(field, n, budget, seed))
        .map_err(|e: LabError| value_err(e))?;
    to_py(py, &doc::search_json(&r))
}

#[pymodule]
#[pyo3(name = "detequiv")]
pub fn detequiv_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKernel>()?;
    m.add("NotRecoverable", m.py().get_type::<NotRecoverable>())?;
    m.add_function(wrap_pyfunction!(check_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(check_class_d, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(recover, m)?)?;
    m.add_function(wrap_pyfunction!(gen_instance, m)?)?;
    m.add_function(wrap_pyfunction!(perturb, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(search_counterexample, m)?)?;
    Ok(())
}
