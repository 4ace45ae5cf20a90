"""N(F), A(F), the K_inf bound and the invertibility verdict."""
from __future__ import annotations

import pytest
import sympy as sp

from newtoninf import (
    InvTag,
    PolyMap,
    Tag,
    compute_A,
    cross_check_inclusions,
    invertibility_verdict,
    is_convenient,
    is_nondegenerate_at_infinity,
    kinf_bound,
    parse_polynomial_map,
    search_asymptotic_values,
)
from newtoninf.bounds import minimal_pieces
from newtoninf.numeric import CandidateValue

from conftest import load


def parse(body: str, vars_: str = "x y", setting: str = "real") -> PolyMap:
    lines = "\n".join(f"f{j + 1} = {t}" for j, t in enumerate(body.split(";")))
    return parse_polynomial_map(f"setting: {setting}\nvars: {vars_}\nmap:\n{lines}\n")


def test_minimal_pieces():
    assert minimal_pieces([(1, 2), (2,), (3,), (2, 3), (1, 3)]) == ((2,), (3,))
    assert minimal_pieces([]) == ()


@pytest.mark.parametrize("setting", ["real", "complex"])
def test_atypical_critical_value(setting):
    # along p = (1, -1) the face polynomial is t^2 - 2 t^3 in t = xy, critical value 1/27
    F = parse("x + x^2*y^2 - 2*x^3*y^3", setting=setting)
    A = compute_A(F)
    desc = [d for d in A if d.cone.interior_rep == (1, -1)]
    assert len(desc) == 1
    values = [complex(s.value[0]) for s in desc[0].disc_samples]
    t = sp.Symbol("t")
    g = t**2 - 2 * t**3
    crit = [g.subs(t, r) for r in sp.solve(sp.diff(g, t), t) if r != 0]
    assert crit == [sp.Rational(1, 27)]
    assert any(abs(v - 1 / 27) <= 1e-9 for v in values)


def test_atypical_export(tmp_path):
    F = parse("x + x^2*y^2 - 2*x^3*y^3")
    A = compute_A(F, export_dir=str(tmp_path))
    for d in A:
        G = parse_polynomial_map(open(d.exported).read())
        assert G.k == len(d.I_sigma) + len(d.I_c)


def test_xx2y_bound():
    F = load("xx2y")
    b = kinf_bound(F)
    assert b.n_set.pieces == ((1,),)
    assert [d.cone.interior_rep for d in b.a_set] == [(1, -2)]
    assert not b.kinf_bound_empty
    assert b.bound_established


def test_empty_bound_consistency(fixture_map):
    # convenient and certified: N and A empty, bound says K_inf is empty
    _, F = fixture_map
    nd = is_nondegenerate_at_infinity(F)
    b = kinf_bound(F, nd=nd)
    if all(is_convenient(f) for f in F.components) and nd.tag is Tag.NON_DEGENERATE and F.is_effective:
        assert b.n_set.empty and not b.a_set
        assert b.kinf_bound_empty
    else:
        assert not b.kinf_bound_empty


def test_bound_not_established_for_degenerate_maps():
    b = kinf_bound(load("sq"))
    assert b.nd.tag is Tag.DEGENERATE
    assert not b.bound_established and not b.kinf_bound_empty
    assert "not established" in b.narrative[0]


def test_non_effective_map_warns():
    F = parse_polynomial_map("setting: real\nvars: x y\nmap:\nf = x^2\n")
    b = kinf_bound(F)
    assert b.warnings and not b.kinf_bound_empty


@pytest.mark.parametrize(
    "name, tag",
    [("ex54", InvTag.CERTIFIED), ("ex55", InvTag.CONDITIONAL), ("x2", InvTag.SINGULAR), ("ex53", InvTag.NOT_APPLICABLE)],
)
def test_invertibility_fixtures(name, tag):
    v = invertibility_verdict(load(name))
    assert v.tag is tag
    assert v.certificate == (tag is InvTag.CERTIFIED)


def test_invertibility_details():
    v = invertibility_verdict(load("ex55"))
    assert v.fact("sing").startswith("empty")
    assert v.fact("kinf_candidates") == 0
    v = invertibility_verdict(load("x2"))
    assert v.singular_witness == (0.0,)


def test_identically_singular_map():
    F = parse("x + y; 2*x + 2*y")
    v = invertibility_verdict(F)
    assert v.tag is InvTag.SINGULAR and v.fact("sing").startswith("all")


def test_determinant_zero_search():
    # det = 1 - y^2 vanishes on y = +-1
    F = parse("x - x*y^2; y")
    v = invertibility_verdict(F)
    assert v.tag is InvTag.SINGULAR
    _, y = v.singular_witness
    assert abs(1 - y**2) <= 1e-9


def test_positive_determinant_without_certificate_is_inconclusive():
    F = parse("x + x^3; y")
    v = invertibility_verdict(F)
    assert v.tag is InvTag.INCONCLUSIVE


def test_cross_check_against_n_set():
    F = load("xx2y")
    b = kinf_bound(F)
    res = search_asymptotic_values(F)
    report = cross_check_inclusions(F, res.candidates, b)
    assert report.passed and not report.conditional
    fake = CandidateValue(center=(0.5,), kind="Kinf", evidence=())
    report = cross_check_inclusions(F, [fake], b)
    assert not report.passed and report.violations[0].distance == pytest.approx(0.5)
