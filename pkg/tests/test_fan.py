"""Dual subdivision: coverage, face-tuple constancy and classification."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newtoninf import PolyMap, compute_N, dual_subdivision, is_convenient, strictness_check
from newtoninf.errors import NotApplicable
from newtoninf.fan import minkowski_sum
from newtoninf.polytope import LatticePolytope, NewtonPolyhedron
from newtoninf.poly import random_polynomial

from conftest import convenient_terms, load, real_poly
from oracles import direction_box, exceptional_index_sets, min_face_points, minimal_sets


def random_map(seed: int, max_n: int = 3) -> PolyMap:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    k = int(rng.integers(1, n + 1))
    comps = []
    for _ in range(k):
        if rng.random() < 0.4:
            comps.append(real_poly(convenient_terms(rng, n), n))
        else:
            comps.append(random_polynomial(rng, n, max_terms=5))
    return PolyMap(comps)


def test_minkowski_sum_vertices_brute_force():
    F = load("ex55")
    polys = [NewtonPolyhedron(f) for f in F.components]
    S = minkowski_sum(polys, F.n)
    pts = {(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)}
    for P in polys:
        pts = {tuple(u + v for u, v in zip(x, g)) for x in pts for g in P.generators}
    assert set(S.vertices) == set(LatticePolytope(pts).vertices)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_face_tuples_match_direct_minimisation(seed):
    F = random_map(seed)
    S = dual_subdivision(F)
    rng = np.random.default_rng(seed + 1)
    for _ in range(40):
        p = rng.integers(-6, 7, size=F.n)
        if p.min() >= 0:
            continue
        idx = S.locate(p)
        assert idx is not None
        cone = S.cones[idx]
        assert tuple(frozenset(f.points) for f in cone.face_tuple) == min_face_points(F, p)
        assert S.cone_contains(idx, p, relative_interior=True)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_classification_from_d_values(seed):
    F = random_map(seed)
    for c in dual_subdivision(F).cones:
        assert min(c.interior_rep) < 0
        assert c.I_sigma == tuple(j + 1 for j, d in enumerate(c.d_supp) if d < 0)
        assert c.J_sigma == tuple(j + 1 for j, d in enumerate(c.d_supp) if d > 0)
        assert c.exceptional == bool(c.J_sigma)
        assert c.atypical == (not c.J_sigma and bool(c.I_sigma_c))
        for r in c.rays:
            assert np.gcd.reduce(np.abs(r)) == 1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_n_set_against_direction_oracle(seed):
    F = random_map(seed)
    N = compute_N(F)
    brute = exceptional_index_sets(F, direction_box(F))
    assert N.empty == (not brute) == all(is_convenient(f) for f in F.components)
    # every exceptional direction contains a computed piece, and every piece is attained
    for J in brute:
        assert any(set(P) <= set(J) for P in N.pieces)
    S = dual_subdivision(F)
    reps = {c.J_sigma for c in S.cones if c.exceptional}
    assert set(N.pieces) == minimal_sets(reps)


def test_ex55_pieces_and_strictness():
    F = load("ex55")
    N = compute_N(F)
    assert N.pieces == ((2,), (3,))
    assert (N.strict, N.strict_witness) == (True, 1)
    assert N.describe() == "{c2 = 0} u {c3 = 0}"


def test_single_function_n_is_origin():
    N = compute_N(load("xx2y"))
    assert N.pieces == ((1,),)
    with pytest.raises(NotApplicable):
        strictness_check(load("xx2y"), dual_subdivision(load("xx2y")))


def test_xx2y_atypical_direction():
    S = dual_subdivision(load("xx2y"))
    aty = [c for c in S.representatives() if c.atypical]
    assert [c.interior_rep for c in aty] == [(1, -2)]
    assert aty[0].face_tuple[0].points == ((0, 0), (2, 1))


def test_tuple_classes_partition_cones(fixture_map):
    _, F = fixture_map
    S = dual_subdivision(F)
    members = sorted(i for idx in S.tuple_classes.values() for i in idx)
    assert members == list(range(len(S.cones)))
    for key, idx in S.tuple_classes.items():
        assert all(S.cones[i].tuple_key == key for i in idx)
