"""The function nu, the Milnor residual and the sphere search."""
from __future__ import annotations

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from newtoninf import PolyMap, SearchConfig, Setting, milnor_residual, nu_mixed_formula, nu_at_point, search_asymptotic_values
from newtoninf.errors import InputError, OriginPoint
from newtoninf.numeric import jacobian_norm, wirtinger_derivatives
from newtoninf.poly import random_polynomial

from conftest import load

QUICK = SearchConfig(radii=(10.0, 10.0, 2), restarts=8)


def test_nu_of_single_function_is_gradient_norm():
    F = load("ex53")
    for pt in [(1.0, 1.0), (0.3, -2.0), (5.0, 1.0)]:
        assert nu_at_point(F, pt) == pytest.approx(2 * math.hypot(*pt), rel=1e-12)
    assert nu_at_point(F, (1.0, 1.0)) == pytest.approx(2 * math.sqrt(2))


def test_nu_against_sympy_singular_values():
    F = load("ex55")
    x, y, z = sp.symbols("x y z")
    f = [x + y * z + x * y**2, y, x * y + z]
    J = sp.Matrix([[sp.diff(g, v) for v in (x, y, z)] for g in f])
    pt = {x: 0.4, y: -1.1, z: 2.0}
    s = np.linalg.svd(np.array(J.subs(pt), dtype=float), compute_uv=False)
    assert nu_at_point(F, (0.4, -1.1, 2.0)) == pytest.approx(s[-1], rel=1e-12)
    assert jacobian_norm(F, (0.4, -1.1, 2.0)) == pytest.approx(s[0], rel=1e-12)


def test_nu_constant_on_ex54():
    F = load("ex54")
    rng = np.random.default_rng(0)
    for _ in range(20):
        z = rng.normal(size=2) * 10 + 1j * rng.normal(size=2) * 10
        assert abs(nu_at_point(F, z) - math.sqrt(2)) <= 1e-12
        assert abs(nu_mixed_formula(F, z, samples=2000) - math.sqrt(2)) <= 1e-6


def test_wirtinger_derivatives_by_finite_differences():
    rng = np.random.default_rng(4)
    F = PolyMap([random_polynomial(rng, 2, Setting.MIXED) for _ in range(2)])
    z = np.array([0.6 - 0.2j, -0.4 + 1.1j])
    D, Dbar = wirtinger_derivatives(F, z)
    h = 1e-6
    for j in range(2):
        e = np.zeros(2, dtype=complex)
        e[j] = h
        dx = (F.evaluate(z + e) - F.evaluate(z - e)) / (2 * h)
        dy = (F.evaluate(z + 1j * e) - F.evaluate(z - 1j * e)) / (2 * h)
        assert np.allclose(D[:, j], (dx - 1j * dy) / 2, atol=1e-6)
        assert np.allclose(Dbar[:, j], (dx + 1j * dy) / 2, atol=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_mixed_formula_matches_realified_nu(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    k = 1 + (seed // 3) % n
    F = PolyMap([random_polynomial(rng, n, Setting.MIXED, max_terms=4, max_degree=2) for _ in range(k)])
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert abs(nu_mixed_formula(F, z, samples=4000) - nu_at_point(F, z)) <= 1e-6 * (1 + nu_at_point(F, z))


def test_mixed_formula_needs_complex_map():
    with pytest.raises(InputError):
        nu_mixed_formula(load("ex53"), (1.0, 1.0))


def test_milnor_residual():
    F = load("ex53")
    # at (1, 0) the gradient is parallel to x; at (1, 1) it is orthogonal
    assert milnor_residual(F, (1.0, 0.0)) == pytest.approx(0.0, abs=1e-12)
    assert milnor_residual(F, (1.0, 1.0)) == pytest.approx(1.0)
    assert milnor_residual(load("ex55"), (1.0, 2.0, 3.0)) == 0.0
    with pytest.raises(OriginPoint):
        milnor_residual(F, (0.0, 0.0))


def test_milnor_residual_vanishes_with_the_2x2_determinant():
    F = load("xx2y")
    rng = np.random.default_rng(2)
    for _ in range(10):
        x, y = rng.normal(size=2)
        det = (1 + 2 * x * y) * y - x**2 * x  # [grad f; (x, y)]
        if abs(det) < 1e-3:
            continue
        assert milnor_residual(F, (x, y)) > 0
    # on the curve y (1 + 2xy) = x^3 the two rows are parallel
    x = 1.3
    y = float(max(np.roots([2 * x, 1, -x**3]).real))
    assert milnor_residual(F, (x, y)) == pytest.approx(0.0, abs=1e-9)


def test_config_validation():
    with pytest.raises(InputError):
        SearchConfig(radii=(10.0, 1.0, 3))
    with pytest.raises(InputError):
        SearchConfig(restarts=0)
    with pytest.raises(InputError):
        SearchConfig(tol=-1.0)
    cfg = SearchConfig(radii=(2.0, 3.0, 3))
    assert cfg.schedule == [2.0, 6.0, 18.0]
    assert cfg.kinf_tol == pytest.approx(3e-3)


def test_search_finds_zero_for_xx2y():
    res = search_asymptotic_values(load("xx2y"))
    kinf = [c for c in res.candidates if c.kind == "Kinf"]
    assert len(kinf) == 1
    assert abs(kinf[0].center[0]) <= 1e-2
    for s in kinf[0].evidence:
        assert s.objective < res.config.kinf_tol
    assert {s.radius for s in kinf[0].evidence} >= {100.0, 1000.0}


def test_search_sees_nothing_for_ex54():
    res = search_asymptotic_values(load("ex54"), QUICK)
    assert not res.candidates
    assert res.s_search.startswith("skipped")


def test_search_is_deterministic():
    a = search_asymptotic_values(load("xx2y"))
    b = search_asymptotic_values(load("xx2y"))
    assert a.candidates == b.candidates
    c = search_asymptotic_values(load("xx2y"), SearchConfig(seed=5))
    assert len([x for x in c.candidates if x.kind == "Kinf"]) == 1
