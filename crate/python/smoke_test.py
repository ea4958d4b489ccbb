#!/usr/bin/env python3
"""Smoke test for the `polyz` extension module.

Builds nothing itself: it expects `cargo build -p polyz-py` to have produced
target/<profile>/libpolyz.so, copies that next to a temp dir as polyz.so
(the import name CPython looks for), imports it, and exercises the API.

Run from the repository root:

    cargo build -p polyz-py
    python3 python/smoke_test.py
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("libpolyz.so", "libpolyz.dylib", "polyz.dll")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("no built extension found; run `cargo build -p polyz-py` first")
    stage = Path(tempfile.mkdtemp(prefix="polyz-py-"))
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy2(built, stage / f"polyz{suffix}")
    sys.path.insert(0, str(stage))
    import polyz

    return polyz


def main():
    polyz = load_module()
    checks = 0

    def ok(label, cond):
        nonlocal checks
        assert cond, f"FAILED: {label}"
        checks += 1
        print(f"  ok - {label}")

    print("presets")
    ok("preset list", polyz.presets() == ["z", "g2", "zxz", "b1", "a0", "a1", "b0"])

    print("tower arithmetic")
    g2 = polyz.Tower("g2")
    ok("generator count", g2.n == 2)
    ok("collect reorders", g2.collect("g2*g1") == [-1, 1])
    ok("format round trip", g2.format([-1, 1]) == "g1^-1*g2")
    ok("identity formats as 1", g2.format([0, 0]) == "1")
    ok("mul twists signs", g2.mul([1, 1], [1, 0]) == [0, 1])
    ok("inv undoes mul", g2.mul(g2.inv([3, 5]), [3, 5]) == [0, 0])
    big = 10**40
    ok("pow is arbitrary precision", g2.pow([1, 2], big) == [big, 2 * big])
    ok("python ints survive the boundary", g2.pow([1, 0], big) == [big, 0])

    b1 = polyz.Tower("b1")
    ok("b1 pow example", b1.pow([0, 1, 1], 2) == [-1, 2, 2])
    ok("central square", b1.is_central([0, 2, 0]))
    a1 = polyz.Tower("a1")
    ok("a1 has trivial center at g1", not a1.is_central([1, 0, 0]))
    ok("commuting powers", b1.commutes([0, 2, 0], [0, 0, 2]))

    print("presentations")
    custom = polyz.Tower.from_presentation(
        "<g1,g2,g3 | g2*g1 = g1^-1*g2, g3*g1 = g1^-1*g3, g3*g2 = g1*g2*g3>"
    )
    ok("presentation collect", custom.collect("g3*g2") == [1, 1, 1])
    ok(
        "presentation matches preset",
        custom.mul([1, 2, 3], [4, 5, 6]) == b1.mul([1, 2, 3], [4, 5, 6]),
    )

    print("automorphism check")
    zxz = polyz.Tower("zxz")
    shear = [[1, 1], [0, 1]]
    ok("shear with preimages is an automorphism",
       zxz.is_automorphism(shear, [[1, 0], [-1, 1]]))
    ok("doubling preserves relations", zxz.preserves_relations([[2, 0], [0, 1]]))
    ok("but doubling is not onto",
       not zxz.is_automorphism([[2, 0], [0, 1]], [[1, 0], [0, 1]]))
    ok("scaling a relation breaks it",
       not b1.preserves_relations([[1, 0, 0], [0, 2, 0], [0, 0, 1]]))

    print("automorphism families")
    alpha1 = polyz.Aut("g2", "alpha(1)")
    ok("family text", alpha1.text == "alpha(1)")
    ok("matrix shape", alpha1.matrix == [[1, 1], [0, -1]])
    ok("compose lands in gamma", alpha1.compose(alpha1).text == "gamma(2)")
    ok("inverse composes to identity", alpha1.compose(alpha1.inverse()).text == "gamma(0)")
    ok("apply matches matrix", alpha1.apply([0, 1]) == [1, -1])
    ok("round trip through matrix", polyz.Aut.from_matrix("g2", alpha1.matrix) == alpha1)
    ok("inner from element", polyz.Aut.inner("g2", [1, 0]).text == "gamma(2)")
    ok("outer class", polyz.Aut("g2", "beta(3)").out_class() == "[beta(1)]")
    ok("gamma(2) is inner", polyz.Aut("g2", "gamma(2)").is_inner())
    ok("alpha(1) is not inner", not alpha1.is_inner())

    b1_swap = polyz.Aut.from_matrix("b1", [[1, 0, 1], [0, 0, 1], [0, 1, 0]])
    ok("b1 classification", b1_swap.text == "b1:alpha(a=0; A=[[0,1],[1,0]])")
    ok("b1 apply preserves relations", b1_swap.apply(b1.mul([1, 2, 3], [4, 5, 6]))
       == b1.mul(b1_swap.apply([1, 2, 3]), b1_swap.apply([4, 5, 6])))

    try:
        polyz.Aut.from_matrix("b1", [[1, 0, 0], [0, 2, 0], [0, 0, 1]])
        sys.exit("FAILED: non-automorphism was accepted")
    except ValueError as e:
        ok("non-automorphism rejected", "not an automorphism" in str(e))

    print("isomorphism witnesses")
    witness = polyz.inner_twist_witness(alpha1, [1, 0])
    doc = json.loads(witness)
    ok("witness is self-contained JSON", doc["kind"] == "inner_twist")
    report = polyz.verify_witness(witness, samples=500, seed=7)
    ok("inner twist verifies", report.passed() and report.sample_count == 500)

    conj = polyz.conjugation_witness(alpha1, polyz.Aut("g2", "gamma(1)"))
    ok("conjugation verifies", polyz.verify_witness(conj, samples=500).passed())

    doc["element"] = ["0", "1"]
    bad = polyz.verify_witness(json.dumps(doc), samples=200)
    ok("tampered witness fails", not bad.passed())
    ok("failures are reported", len(bad.failures) > 0)

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
