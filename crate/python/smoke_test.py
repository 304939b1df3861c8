"""Smoke test for the diffalg_py extension module.

Build first:

    cargo build -p diffalg-py --release --features extension-module

The script imports an installed ``diffalg_py`` if there is one, otherwise it
loads the freshly built library from ``target/release``.
"""

import importlib.machinery
import importlib.util
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import diffalg_py

        return diffalg_py
    except ImportError:
        pass
    for name in ("libdiffalg_py.so", "libdiffalg_py.dylib", "diffalg_py.dll"):
        path = ROOT / "target" / "release" / name
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("diffalg_py", str(path))
            spec = importlib.util.spec_from_file_location("diffalg_py", path, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("diffalg_py not built; run cargo build -p diffalg-py --release --features extension-module")


def close(a, b, tol=1e-9):
    return all(abs(x - y) < tol for x, y in zip(a, b)) and len(a) == len(b)


def main():
    d = load()

    m2 = d.Algebra.named("matrix:2")
    assert m2.dim == 4
    e12, e21 = [0, 1, 0, 0], [0, 0, 1, 0]
    assert close(m2.mul(e12, e21), [1, 0, 0, 0])
    assert close(m2.involve([0, 1j, 0, 0]), [0, 0, -1j, 0])
    assert max(m2.check_axioms().values()) < 1e-12
    assert m2.center_dim() == 1

    cusp = d.Algebra.named("cusp:6")
    unit_char = [1] + [0] * (cusp.dim - 1)
    dual = cusp.duality(unit_char)
    assert dual["holds"] and dual["tangent_dim"] == 2, dual

    c = d.Algebra.named("func:1")
    # (1 + t)(1 - t) = 1 - t^2
    prod = dict((tuple(k), v[0]) for k, v in d.series_mul(c, 1, 3, [([0], [1]), ([1], [1])], [([0], [1]), ([1], [-1])]))
    assert abs(prod[(0,)] - 1) < 1e-12 and abs(prod[(2,)] + 1) < 1e-12

    # f = x^3 at 1/2: Taylor coefficients 1/8, 3/4, 3/2, 1
    j = d.jet([0.5], 3, [([3], 1.0)])
    assert close(j["quotient"], [0.125, 0.75, 1.5, 1.0]) and j["dim"] == 4

    tower = d.ztower(m2, [[1, 0, 0, 1], [0, 1, 0, 0]])
    assert tower["dims"] == [0, 2, 3] and not tower["report"]["stabilized"]

    tau = 2 * math.pi
    v = d.envelope([f"(sin (* (const {tau}) (var 0)))", f"(cos (* (const {tau}) (var 0)))"], [[-1.0, 1.0]])
    assert v["status"] == "FAIL"
    assert v["reasons"][0]["condition"] == "separation"
    assert v["reasons"][0]["witness"] == [[0.0], [1.0]]
    assert d.envelope(["(var 0)"], [[-1.0, 1.0]])["status"] == "PASS"

    f = d.fourier("Z4xZ2")
    assert f["holds"] and f["characters_found"] == 8

    reports = d.dauns_hofmann(d.Algebra.named("matrix:2+func:2"))
    assert all(r["isomorphism"] for r in reports)

    try:
        d.Algebra.named("nonsense:3")
    except d.DiffalgError:
        pass
    else:
        raise AssertionError("unknown constructor accepted")

    criteria = d.run_selftest(seed=1, instances=5)
    assert len(criteria) == 10 and all(c["passed"] for c in criteria), [c["failures"] for c in criteria]

    print("diffalg_py smoke test: ok")


if __name__ == "__main__":
    main()
