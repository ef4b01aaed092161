use std::ffi::CString;

use fmetric_py::fmetric_py;
use pyo3::prelude::*;

fn run(script: &str) {
    pyo3::append_to_inittab!(fmetric_py);
    Python::initialize();
    Python::attach(|py| {
        let code = CString::new(script).unwrap();
        if let Err(e) = py.run(&code, None, None) {
            e.display(py);
            panic!("script failed");
        }
    });
}

#[test]
fn bindings_from_python() {
    run(r#"
import math
import fmetric_py as fm

inst = fm.Instance(["a", "b", "c"], [[0, 1, 2.5], [1, 0, 1], [2.5, 1, 0]], "ln", math.log(3))
assert inst.verify()["status"] == "pass"
assert inst.min_chain_sum("a", "c") == (["a", "b", "c"], 2.0)
assert inst.metrize()["d"][0][2] == 2.0
assert inst.ball("b", 1.5) == ["a", "b", "c"]
assert inst.check_fip([["a", "b"], ["b", "c"], ["a", "c"]])["facts"]["failing_stage"] == 3
assert inst.report()["status"] == "pass"
assert fm.Instance.from_json(inst.to_json()).matrix() == inst.matrix()

try:
    inst.ball("zz", 1.0)
except ValueError as e:
    assert "zz" in str(e)
else:
    raise AssertionError

try:
    fm.eval_f("neg_reciprocal", 1e-320)
except ArithmeticError:
    pass
else:
    raise AssertionError

g = fm.generate(6, f="neg_inv_sqrt", seed=2)
assert g.check_d3()["status"] == "pass"
assert fm.generate(6, f="neg_inv_sqrt", seed=2, alpha=0.0).alpha == 0.0
"#);
}
