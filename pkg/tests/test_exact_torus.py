"""Exact small-case decisions and the numeric torus witness search."""
from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from newtoninf import Setting, TorusConfig, parse_polynomial
from newtoninf.exact import (
    decide_linear,
    decide_rank_one,
    lattice_rank,
    singular_zero_free,
    torus_zero_free,
    try_exact,
    univariate_forms,
    term_dicts,
)
from newtoninf.torus import TorusSystem, evaluate_point, map_seed, torus_search

from conftest import load


def polys(texts, vars_="x y", setting="real"):
    names = vars_.split()
    return [parse_polynomial(t, names, setting) for t in texts]


def test_linear_kernel_meets_torus():
    rng = np.random.default_rng(0)
    out = decide_linear(polys(["x - y"]), False, rng)
    assert out.zeros and np.allclose(abs(out.witness[0]), abs(out.witness[1]))
    out = decide_linear(polys(["x", "x + y"]), False, rng)
    assert not out.zeros


def test_linear_singular_needs_more_rows_than_rank():
    rng = np.random.default_rng(0)
    assert decide_linear(polys(["x - y", "2*x - 2*y"]), True, rng).singular
    assert not decide_linear(polys(["x - y"]), True, rng).singular


def test_linear_mixed_uses_real_structure():
    # z + conj(z) = 2 Re z vanishes on the imaginary axis, inside the torus
    out = decide_linear(polys(["z + conj(z)"], "z", "mixed"), False, np.random.default_rng(0))
    assert out.zeros
    assert abs(out.witness[0].real) <= 1e-12


def test_univariate_form():
    b, (g,) = univariate_forms(term_dicts(polys(["x^3*y - x*y^3"])), True)
    assert abs(b[0]) == abs(b[1]) == 1
    t = sp.Symbol("t")
    assert sp.degree(g.as_expr(), t) == 2


@pytest.mark.parametrize(
    "text, zeros, singular",
    [
        ("x^2 - y^2", True, False),
        ("x^2 + y^2", False, False),
        ("(x - y)^2", True, True),
        ("x^2*y - 2*x*y^2 + y^3", True, True),
        ("x^4 + 3*x^2*y^2 + y^4", False, False),
    ],
)
def test_rank_one_real(text, zeros, singular):
    out = decide_rank_one(polys([text]), True)
    assert (out.zeros, out.singular) == (zeros, singular)
    if singular:
        f = polys([text])[0]
        assert abs(f.evaluate(out.witness)) <= 1e-9


def test_rank_one_complex_double_root():
    out = decide_rank_one(polys(["(z - i*w)^2"], "z w", "complex"), True)
    assert out.zeros and out.singular
    z, w = out.witness
    assert abs(z - 1j * w) <= 1e-9


def test_lattice_rank():
    assert lattice_rank(polys(["x^2 - y^2"])) == 1
    assert lattice_rank(polys(["x^2 + x*y + y^3"])) == 2


@pytest.mark.parametrize(
    "texts, expected",
    [
        (["x", "y"], True),
        (["x*z + y", "y + z"], None),
        (["x + y*z", "z + x*y"], False),
        (["x^2 + y^2 + z^2"], True),
        (["x*y + z", "x + z^2", "y - z"], None),
    ],
)
def test_torus_zero_free(texts, expected):
    result = torus_zero_free(polys(texts, "x y z"))
    if expected is None:
        assert result in (None, False)
    else:
        assert result is expected


def test_singular_zero_free_diagonal():
    assert singular_zero_free(polys(["x^2 + y^2 - z^2"], "x y z")) is True
    assert singular_zero_free(polys(["(x - y)^2 + z^2 - z^2"], "x y z")) is None


def test_try_exact_skips_large_lattices():
    assert try_exact(polys(["x^2*y + y^2*z + z^2*x"], "x y z"), True, np.random.default_rng(0)) is None


def test_search_finds_known_zero():
    eqs = polys(["x^2*y + y^2*z + z^2*x - 3*x*y*z"], "x y z")
    system = TorusSystem(eqs, eqs, Setting.REAL, 3, (-1, -1, -1))
    hits = torus_search(system, TorusConfig(), (0, 1))
    # (1,1,1) is singular: every partial derivative is 2 + 1 - 3 = 0
    assert hits and hits[0].confirmed
    assert hits[0].rank_residual <= 1e-9


def test_evaluate_point_rejects_points_off_the_torus():
    eqs = polys(["x - y"])
    system = TorusSystem(eqs, None, Setting.REAL, 2, (-1, -1))
    assert evaluate_point(system, (1.0, 1.0), TorusConfig()).confirmed
    assert not evaluate_point(system, (1e-8, 1e-8), TorusConfig()).confirmed
    assert not evaluate_point(system, (1.0, 1.1), TorusConfig()).confirmed


def test_map_seed_depends_on_text_only():
    assert map_seed(load("ex53")) == map_seed(load("ex53"))
    assert map_seed(load("ex53")) != map_seed(load("sq"))


def _random_binomialish(rng):
    from newtoninf.poly import QI, Polynomial

    terms = {}
    for _ in range(int(rng.integers(2, 5))):
        e = tuple(int(v) for v in rng.integers(0, 4, size=2))
        if any(e):
            terms[(e, (0, 0))] = QI(int(rng.choice([-2, -1, 1, 2])))
    return Polynomial(Setting.REAL, 2, terms)


def _sympy(f, x, y):
    return sum(int(c.re) * x ** nu[0] * y ** nu[1] for (nu, _), c in f.terms.items())


@pytest.mark.parametrize("chunk", range(4))
def test_zero_free_claims_are_sound(chunk):
    from oracles import has_real_torus_zero

    x, y = sp.symbols("x y")
    rng = np.random.default_rng(100 + chunk)
    for _ in range(30):
        f, g = _random_binomialish(rng), _random_binomialish(rng)
        fx, gx = _sympy(f, x, y), _sympy(g, x, y)
        claim = torus_zero_free([f, g])
        truth = has_real_torus_zero([fx, gx], x, y)
        if claim is True:
            assert truth is not True, (f.format("xy"), g.format("xy"))
        if claim is False:
            assert truth is not False, (f.format("xy"), g.format("xy"))
        if singular_zero_free([f]):
            assert has_real_torus_zero([fx, sp.diff(fx, x), sp.diff(fx, y)], x, y) is not True, f.format("xy")
