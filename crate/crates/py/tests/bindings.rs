use pyo3::prelude::*;
use pyo3::wrap_pymodule;

const SCRIPT: &std::ffi::CStr = c"
import detequiv
from fractions import Fraction

k, q, truth = detequiv.gen_instance(5, field='rational', seed=7, transpose=True, zeros=2)
cert = detequiv.recover(k, q)
assert cert['verified'] and cert['transposed'] == truth['transposed']
g = [Fraction(cert['gauge'][l]) for l in k.labels]
for x in range(k.n):
    for y in range(k.n):
        assert g[x] * Fraction(k.entry(y, x)) / g[y] == Fraction(q.entry(x, y))

ones = detequiv.Kernel([[1] * 4] * 4)
assert detequiv.check_class_d(ones)['witness'] == {'x': '0', 'y': '1', 'z': '2', 'w': '3', 'determinant': '0'}

bad = detequiv.perturb(k, q, seed=3)
try:
    detequiv.recover(k, bad)
    raise SystemExit('perturbed pair recovered')
except detequiv.NotRecoverable as e:
    assert e.args[1]['error'] == 'not_equivalent'

try:
    detequiv.Kernel([[1, 2], [3, 4]], field='prime:9')
    raise SystemExit('composite modulus accepted')
except ValueError:
    pass
";

#[test]
fn module_works_from_embedded_python() {
    Python::initialize();
    Python::attach(|py| {
        let module = wrap_pymodule!(detequiv_py::detequiv_module)(py);
        py.import("sys").unwrap().getattr("modules").unwrap().set_item("detequiv", module).unwrap();
        if let Err(e) = py.run(SCRIPT, None, None) {
            e.display(py);
            panic!("embedded script failed");
        }
    });
}
