"""Smoke test for the fmetric_py extension.

Uses an installed fmetric_py if there is one (e.g. after `maturin develop`);
otherwise builds the crate with cargo and loads the shared library directly.
"""

import importlib
import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

THREE_POINT = """{
  "points": ["a", "b", "c"],
  "D": [[0, 1, 2.5], [1, 0, 1], [2.5, 1, 0]],
  "f": {"name": "ln"},
  "alpha": 1.0986122886681098
}"""


def load_module():
    try:
        return importlib.import_module("fmetric_py")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "fmetric-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libfmetric_py.so"
    if not lib.exists():
        lib = lib.with_suffix(".dylib")
    out = Path(tempfile.mkdtemp())
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy(lib, out / f"fmetric_py{suffix}")
    sys.path.insert(0, str(out))
    return importlib.import_module("fmetric_py")


def main():
    fm = load_module()

    inst = fm.Instance.from_json(THREE_POINT)
    assert len(inst) == 3 and inst.points == ["a", "b", "c"]
    assert inst.verify()["status"] == "pass"

    chain, total = inst.min_chain_sum("a", "c")
    assert chain == ["a", "b", "c"] and total == 2.0
    assert inst.brute_force_min_chain("a", "c") == (chain, total)

    m = inst.metrize(witness=True)
    assert m["d"][0][2] == 2.0
    assert inst.induced_matrix()[2][0] == 2.0

    assert inst.ball("a", 1.5) == ["a", "b"]
    assert inst.ball("a", 2.2, metric="d") == ["a", "b", "c"]
    assert inst.diameters(["a", "c"]) == (2.5, 2.0)
    assert inst.greedy_net(1.5)["centers"] == ["a", "c"]
    tb = inst.check_tb(2.2)
    assert tb["status"] == "pass"
    assert math.isclose(tb["sections"][1]["facts"]["delta"], 2.2 / 3, rel_tol=1e-12)

    fip = inst.check_fip([["a", "b"], ["b", "c"], ["a", "c"]])
    assert fip["status"] == "fail" and fip["facts"]["failing_stage"] == 3

    report, traces = inst.cantor(seed=0, steps=3)
    assert report["status"] == "pass"
    assert traces.splitlines()[0] == "level,size,diam_D,diam_d"

    assert inst.report()["status"] == "pass"

    strict = inst.with_control("ln", 0.0)
    d3 = strict.check_d3()
    assert d3["status"] == "fail"
    assert d3["witnesses"][0]["detail"]["pair"] == ["a", "c"]

    # a Python callable as f
    cubic = inst.with_control(lambda t: math.log(t) + t**3, 10.0)
    assert cubic.f_name == "<lambda>"
    assert cubic.check_d3()["status"] == "pass"

    tri = fm.check_metric(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert tri["witnesses"][0]["detail"]["triple"] == ["a", "b", "c"]

    assert fm.eval_f("ln", 1.0) == 0.0
    assert math.isclose(fm.delta_for("ln", -1.0), math.exp(-1.0), rel_tol=1e-15)
    for name in fm.BUILTINS:
        g = fm.generate(8, f=name, seed=4)
        assert g.check_d3()["status"] == "pass"
    assert fm.generate(5, seed=1).to_json() == fm.generate(5, seed=1).to_json()

    for bad in (lambda: fm.eval_f("ln", -1.0), lambda: fm.Instance.from_json("{}")):
        try:
            bad()
        except (ValueError, ArithmeticError):
            pass
        else:
            raise AssertionError("expected an error")

    print("fmetric_py smoke test: ok")


if __name__ == "__main__":
    main()
