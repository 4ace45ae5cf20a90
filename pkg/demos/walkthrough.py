"""Walk through the fixture maps in maps/ and print what each stage finds.

Run from the repository root:  python3 demos/walkthrough.py
"""
from __future__ import annotations

from pathlib import Path

from newtoninf import (
    compare_definitions,
    compute_N,
    dual_subdivision,
    invertibility_verdict,
    is_convenient,
    is_nondegenerate_at_infinity,
    jacobian_determinant,
    search_asymptotic_values,
)
from newtoninf.parsing import parse_polynomial_map
from newtoninf.poly import format_terms

MAPS = Path(__file__).resolve().parent.parent / "maps"


def load(name):
    return parse_polynomial_map((MAPS / f"{name}.map").read_text())


def heading(text):
    print()
    print(text)
    print("-" * len(text))


def gap_between_conditions():
    heading("x^2 - y^2: the torus condition holds, the stronger real one fails")
    F = load("ex53")
    cmp = compare_definitions(F)
    print("convenient:", is_convenient(F.components[0]))
    print("torus face-system condition:", cmp.torus.tag.value)
    w = cmp.full.verdict.witness
    print("all-components condition:", cmp.full.tag.value, "at", tuple(round(v, 9) for v in w.point))


def mixed_linear_map():
    heading("z1 + conj(z2), z1 - conj(z2): a mixed map with constant Jacobian")
    G = load("ex54")
    det = jacobian_determinant(G)
    print("realified Jacobian determinant:", format_terms(det, ("x1", "y1", "x2", "y2")))
    v = invertibility_verdict(G)
    print("verdict:", v.tag.value, "(certificate)" if v.certificate else "")


def nonconvenient_triangular_map():
    heading("a non-convenient map with unit Jacobian")
    F = load("ex55")
    print("components:", ", ".join(f.format(F.variables) for f in F.components))
    print("N(F) =", compute_N(F).describe())
    res = search_asymptotic_values(F)
    print("asymptotic value candidates:", len([c for c in res.candidates if c.kind == "Kinf"]))
    print("verdict:", invertibility_verdict(F, numeric_evidence=res).tag.value)


def one_asymptotic_value():
    heading("x + x^2 y: the value 0 is approached at infinity")
    F = load("xx2y")
    S = dual_subdivision(F)
    for cone in S.representatives():
        if cone.exceptional:
            print("exceptional direction", list(cone.interior_rep), "J =", cone.J_sigma)
    res = search_asymptotic_values(F)
    for c in res.candidates:
        radii = sorted({s.radius for s in c.evidence})
        center = tuple(round(float(abs(v)), 4) for v in c.center)
        print(f"{c.kind} candidate with |value| {center}, seen at radii {radii}")
    print("non-degeneracy:", is_nondegenerate_at_infinity(F).tag.value)


if __name__ == "__main__":
    gap_between_conditions()
    mixed_linear_map()
    nonconvenient_triangular_map()
    one_asymptotic_value()
