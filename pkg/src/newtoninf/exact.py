"""Exact decisions for small face systems.

Two families are settled without numerics:

* linear systems (every term of combined degree one), through the exact
  rank and kernel of the realified coefficient matrix;
* systems whose exponent differences span a lattice of rank at most one
  (real and complex settings).  Then every ``f_j`` is a monomial times a
  univariate polynomial ``g_j(t)`` in ``t = x^b``, and the questions become
  gcd and root questions for the ``g_j``, answered by sympy.

Beyond these, :func:`torus_zero_free` eliminates variables through binomial
equations and can prove that a zero set on the torus is empty;
:func:`singular_zero_free` does the same for singular zeros.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
from typing import Sequence

import mpmath
import numpy as np
import sympy as sp

from .poly import QI, PolyMap, Polynomial, Setting, raw_determinant, realify
from .polytope import rank_and_pivots

_T = sp.Symbol("t")


@dataclass(frozen=True)
class ExactOutcome:
    """``zeros``: the system has a zero on the torus; ``singular``: a zero
    where the Jacobian drops rank (None when not asked).  ``witness`` is a
    numeric torus point realising the positive answer, if any."""

    method: str
    zeros: bool
    singular: bool | None
    witness: tuple | None


def difference_lattice(system: Sequence[Polynomial]) -> list[tuple[int, ...]]:
    diffs = []
    for f in system:
        exps = [f.combined(key) for key in f.terms]
        base = exps[0]
        diffs += [tuple(a - b for a, b in zip(e, base)) for e in exps[1:]]
    return diffs


def lattice_rank(system: Sequence[Polynomial]) -> int:
    return rank_and_pivots(difference_lattice(system))[0] if difference_lattice(system) else 0


def is_linear(system: Sequence[Polynomial]) -> bool:
    return all(sum(f.combined(key)) == 1 for f in system for key in f.terms)


# ---------------------------------------------------------------------------
# linear systems

def _real_linear_matrix(system: Sequence[Polynomial]) -> tuple[list[list[Fraction]], int]:
    setting = system[0].setting
    n = system[0].n
    if setting is Setting.REAL:
        polys, width = list(system), n
    else:
        polys = list(realify(PolyMap(list(system), names=[f"q{j}" for j in range(len(system))])).components)
        width = 2 * n
    rows = []
    for f in polys:
        row = [Fraction(0)] * width
        for (nu, _), c in f.terms.items():
            row[nu.index(1)] = c.re
        rows.append(row)
    return rows, width


def decide_linear(system: Sequence[Polynomial], want_singular: bool, rng: np.random.Generator) -> ExactOutcome:
    rows, width = _real_linear_matrix(system)
    complex_vars = system[0].setting is not Setting.REAL
    group = 2 if complex_vars else 1
    M = sp.Matrix(rows)
    kernel = M.nullspace()
    rank = width - len(kernel)
    # the kernel meets the torus iff no variable (pair) vanishes on all of it
    meets = all(
        any(any(vec[group * i + s] != 0 for s in range(group)) for vec in kernel)
        for i in range(width // group)
    )
    singular = None
    if want_singular:
        singular = meets and rank < len(rows)
    positive = singular if want_singular else meets
    witness = None
    if positive:
        for _ in range(64):
            weights = rng.integers(-5, 6, size=len(kernel))
            vec = sum((int(w) * v for w, v in zip(weights, kernel)), sp.zeros(width, 1))
            x = [float(v) for v in vec]
            if complex_vars:
                z = [complex(x[2 * i], x[2 * i + 1]) for i in range(width // 2)]
            else:
                z = x
            if min(abs(v) for v in z) > 0:
                scale = max(abs(v) for v in z)
                witness = tuple(v / scale for v in z)
                break
    return ExactOutcome("linear", meets, singular, witness)


# ---------------------------------------------------------------------------
# rank-one systems

def _primitive(vec):
    g = reduce(gcd, (abs(v) for v in vec), 0)
    return tuple(v // g for v in vec)


def _sympy_coeff(c):
    return sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)


def term_dicts(system: Sequence[Polynomial]) -> list[dict]:
    out = []
    for f in system:
        terms: dict = {}
        for key, c in f.terms.items():
            e = f.combined(key)
            terms[e] = terms.get(e, QI(0)) + c
        out.append({e: c for e, c in terms.items() if c})
    return out


def _dict_differences(eqs: Sequence[dict]) -> list[tuple[int, ...]]:
    diffs = []
    for terms in eqs:
        exps = list(terms)
        diffs += [tuple(a - b for a, b in zip(e, exps[0])) for e in exps[1:]]
    return [d for d in diffs if any(d)]


def univariate_forms(eqs: Sequence[dict], real: bool) -> tuple[tuple[int, ...], list[sp.Poly]]:
    """Direction ``b`` and polynomials ``g_j(t)`` with ``f_j = x^{v_j} g_j(x^b)``."""
    b = _primitive(_dict_differences(eqs)[0])
    piv = next(i for i, v in enumerate(b) if v)
    domain = "QQ" if real else "QQ_I"
    polys = []
    for terms in eqs:
        exps = list(terms)
        steps = [(e[piv] - exps[0][piv]) // b[piv] for e in exps]
        low = min(steps)
        expr = sum(_sympy_coeff(terms[e]) * _T ** (s - low) for e, s in zip(exps, steps))
        polys.append(sp.Poly(expr, _T, domain=domain))
    return b, polys


def _strip_t(P: sp.Poly) -> sp.Poly:
    while not P.is_zero and P.degree() > 0 and P.eval(0) == 0:
        P = sp.Poly(sp.quo(P, sp.Poly(_T, _T, domain=P.domain)), _T, domain=P.domain)
    return P


def _nonzero_roots(P: sp.Poly, real: bool) -> list:
    P = _strip_t(P)
    if P.is_zero or P.degree() <= 0:
        return []
    if real:
        return sorted((float(r) for r in sp.real_roots(P)), key=lambda r: (abs(r - 1), -r))
    P = P.sqf_part()
    try:
        roots = [complex(r) for r in P.nroots(n=30, maxsteps=200)]
    except mpmath.libmp.NoConvergence:
        roots = [complex(r) for r in np.roots([complex(c) for c in P.all_coeffs()])]
    return sorted(roots, key=lambda r: (abs(r - 1), -r.real, -r.imag))


def _point_from_t(b, t0, real: bool) -> tuple:
    n = len(b)
    if real:
        i0 = min((i for i in range(n) if b[i] % 2), key=lambda i: abs(b[i]))
        e = b[i0]
        xi = np.sign(t0) * abs(t0) ** (1.0 / e)
        return tuple(xi if i == i0 else 1.0 for i in range(n))
    i0 = min((i for i in range(n) if b[i]), key=lambda i: abs(b[i]))
    xi = complex(t0) ** (1.0 / b[i0])
    return tuple(xi if i == i0 else 1.0 + 0j for i in range(n))


def _rank_one(eqs: Sequence[dict], real: bool, want_singular: bool) -> ExactOutcome:
    if not _dict_differences(eqs):
        # only monomials: no zeros on the torus
        return ExactOutcome("rank-one", False, False if want_singular else None, None)
    b, polys = univariate_forms(eqs, real)
    zero_roots = _nonzero_roots(reduce(sp.gcd, polys), real)
    zeros = bool(zero_roots)
    singular = None
    roots = zero_roots
    if want_singular:
        if len(eqs) > 1:
            # the gradients are all proportional on the torus
            singular = zeros
        else:
            g = polys[0]
            roots = _nonzero_roots(sp.gcd(g, g.diff(_T)), real)
            singular = bool(roots)
    positive = singular if want_singular else zeros
    witness = _point_from_t(b, roots[0], real) if positive else None
    return ExactOutcome("rank-one", zeros, singular, witness)


def decide_rank_one(system: Sequence[Polynomial], want_singular: bool) -> ExactOutcome:
    return _rank_one(term_dicts(system), system[0].setting is Setting.REAL, want_singular)


# ---------------------------------------------------------------------------
# binomial elimination for the emptiness question

def _shift(terms: dict) -> dict:
    n = len(next(iter(terms)))
    low = [min(e[i] for e in terms) for i in range(n)]
    return {tuple(a - b for a, b in zip(e, low)): c for e, c in terms.items()}


def _qi_power(c: QI, e: int) -> QI:
    out = QI(1)
    base = c if e >= 0 else QI(1) / c
    for _ in range(abs(e)):
        out = out * base
    return out


def _substitute(terms: dict, i: int, kappa: QI, shift: tuple[int, ...]) -> dict:
    """Replace ``x_i`` by ``kappa * x^shift`` (``shift[i] = 0``)."""
    out: dict = {}
    for e, c in terms.items():
        k = e[i]
        new = tuple((0 if j == i else e[j] + k * shift[j]) for j in range(len(e)))
        out[new] = out.get(new, QI(0)) + c * _qi_power(kappa, k)
    out = {e: c for e, c in out.items() if c}
    return _shift(out) if out else out


def _definite(terms: dict) -> bool:
    """Even exponents and coefficients of one sign: no zero on the real torus."""
    signs = {c.re > 0 for c in terms.values()}
    return len(signs) == 1 and all(v % 2 == 0 for e in terms for v in e)


def torus_zero_free(system: Sequence[Polynomial]) -> bool | None:
    """True when the system provably has no zero on the torus.

    Repeatedly solves a binomial equation ``c1 x^a + c2 x^b = 0`` in which
    some exponent difference ``a_i - b_i`` is ``+-1`` for ``x_i`` (a monomial
    of the other variables), substitutes, and clears denominators.  A
    monomial equation means no zero; over the reals so does an equation
    whose terms are all even with coefficients of one sign.  Returns False when the
    zeros are shown to exist and None when undetermined.
    """
    if not system or system[0].setting is Setting.MIXED:
        return None
    real = system[0].setting is Setting.REAL
    eqs = [_shift(t) for t in term_dicts(system) if t]
    while True:
        eqs = [t for t in eqs if t]
        if any(len(t) == 1 for t in eqs):
            return True
        if real and any(_definite(t) for t in eqs):
            return True
        if not eqs:
            return False
        pick = None
        for idx, t in enumerate(eqs):
            if len(t) != 2:
                continue
            (a, ca), (b, cb) = t.items()
            d = tuple(x - y for x, y in zip(a, b))
            for i, di in enumerate(d):
                if abs(di) == 1:
                    pick = (idx, i, di, d, ca, cb)
                    break
            if pick:
                break
        if pick is None:
            break
        idx, i, di, d, ca, cb = pick
        # x^d = -cb/ca, so x_i = (-cb/ca)^di * x^(-di * d'), d' = d without i
        kappa = _qi_power(-cb / ca, di)
        shift = tuple(0 if j == i else -di * d[j] for j in range(len(d)))
        eqs = [_substitute(t, i, kappa, shift) for j, t in enumerate(eqs) if j != idx]
    if len(eqs) and rank_and_pivots(_dict_differences(eqs) or [[0]])[0] <= 1:
        return not _rank_one(eqs, real, False).zeros
    return None


def _euler_derivative(f: Polynomial, i: int) -> dict:
    """Terms of ``x_i * df/dx_i``."""
    return {key: c * key[0][i] for key, c in f.terms.items() if key[0][i]}


def singular_zero_free(system: Sequence[Polynomial]) -> bool | None:
    """True when the system provably has no singular zero on the torus.

    On the torus the Jacobian has the rank of ``(x_i df_j/dx_i)``, so a
    singular zero is a zero of the ``f_j`` together with all maximal minors
    of that matrix; :func:`torus_zero_free` is run on the augmented system.
    """
    if not system or system[0].setting is Setting.MIXED:
        return None
    f0 = system[0]
    m, n = len(system), f0.n
    if m > n:
        return False if torus_zero_free(system) is False else None
    rows = [[_euler_derivative(f, i) for i in range(n)] for f in system]
    minors = []
    for cols in combinations(range(n), m):
        det = raw_determinant([[row[c] for c in cols] for row in rows], n)
        if det:
            minors.append(Polynomial(f0.setting, n, det))
    if not minors:
        return None
    return torus_zero_free(list(system) + minors) or None


def try_exact(system: Sequence[Polynomial], want_singular: bool, rng: np.random.Generator) -> ExactOutcome | None:
    """Exact outcome when the system falls in a decidable family, else None."""
    if not system:
        return None
    if is_linear(system):
        return decide_linear(system, want_singular, rng)
    if system[0].setting is not Setting.MIXED and lattice_rank(system) <= 1:
        return decide_rank_one(system, want_singular)
    return None
