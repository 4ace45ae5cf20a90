"""Independent brute-force oracles that only use supports and dot products."""
from __future__ import annotations

from itertools import product

import numpy as np

from newtoninf import PolyMap, support


def support_arrays(F: PolyMap) -> list[np.ndarray]:
    return [np.array(sorted(support(f)), dtype=int) for f in F.components]


def direction_box(F: PolyMap) -> np.ndarray:
    """Integer directions with a negative coordinate in ``[-2, D+1]^n``.

    Any non-convenient component has an exceptional direction of the form
    ``-e_i + (D+1) * sum_{j != i} e_j`` here, ``D`` the largest exponent.
    """
    top = max(int(a.max()) for a in support_arrays(F)) + 1
    grid = np.array(list(product(range(-2, top + 1), repeat=F.n)), dtype=int)
    return grid[grid.min(axis=1) < 0]


def d_values(F: PolyMap, dirs: np.ndarray) -> np.ndarray:
    """``min_{v in supp f_j} <p, v>`` for every direction (rows) and component."""
    return np.stack([(dirs @ a.T).min(axis=1) for a in support_arrays(F)], axis=1)


def exceptional_index_sets(F: PolyMap, dirs: np.ndarray) -> set[tuple[int, ...]]:
    d = d_values(F, dirs)
    out = set()
    for row in d:
        J = tuple(int(j) + 1 for j in np.nonzero(row > 0)[0])
        if J:
            out.add(J)
    return out


def minimal_sets(sets) -> set[tuple[int, ...]]:
    sets = [set(s) for s in sets]
    return {tuple(sorted(s)) for s in sets if not any(t < s for t in sets)}


def min_face_points(F: PolyMap, p) -> tuple[frozenset, ...]:
    out = []
    for a in support_arrays(F):
        pts = np.vstack([np.zeros(a.shape[1], dtype=int), a])
        vals = pts @ np.asarray(p)
        out.append(frozenset(tuple(int(v) for v in row) for row in pts[vals == vals.min()]))
    return tuple(out)


# ---------------------------------------------------------------------------
# real torus zeros of two-variable systems, through gcds and resultants

def _strip_monomials(e, x, y):
    """Divide out the largest monomial factor (irrelevant on the torus)."""
    import sympy as sp

    num, _ = sp.fraction(sp.cancel(sp.expand(e) / (x**50 * y**50)))
    return sp.expand(num)


def _real_y_roots(e, x, y, x0):
    import sympy as sp

    coeffs = [complex(c) for c in sp.Poly(sp.expand(e.subs(x, x0)), y).all_coeffs()]
    if len(coeffs) < 2:
        return []
    return [r.real for r in np.roots(coeffs) if abs(r.imag) < 1e-7 and abs(r) > 1e-7]


def _line_coeffs(e, x, y, x0) -> list[float]:
    """Coefficients in ``y`` of ``e(x0, y)``, with float noise trimmed; [] if zero."""
    import sympy as sp

    poly = sp.Poly(sp.expand(e), y)
    coeffs = [complex(sp.sympify(c).subs(x, x0)) for c in poly.all_coeffs()]
    scale = [sum(abs(complex(t.subs(x, x0))) for t in sp.Add.make_args(sp.expand(c))) for c in poly.all_coeffs()]
    kept = [c for c, m in zip(coeffs, scale) if abs(c) > 1e-9 * m]
    if not kept:
        return []
    first = next(i for i, (c, m) in enumerate(zip(coeffs, scale)) if abs(c) > 1e-9 * m)
    return [c.real for c in coeffs[first:]]


def _magnitude(e, x, y, x0, y0):
    import sympy as sp

    return sum(abs(complex(t.subs({x: x0, y: y0}))) for t in sp.Add.make_args(sp.expand(e)))


def has_real_torus_zero(eqs, x, y) -> bool | None:
    """Whether sympy expressions in ``x, y`` vanish together on ``(R*)^2``.

    A common factor is sampled along vertical lines; isolated zeros come
    from the real roots of a resultant.  None when the resultant vanishes
    identically after removing the common factor.
    """
    import sympy as sp

    eqs = [e for e in (_strip_monomials(e, x, y) for e in eqs) if e != 0]
    if not eqs:
        return True
    if any(e.is_number for e in eqs):
        return False
    h = eqs[0]
    for e in eqs[1:]:
        h = sp.gcd(h, e)
    if not sp.sympify(h).is_number and h.free_symbols == {x}:
        # a common factor in x alone vanishes on whole vertical lines
        if any(abs(float(r)) > 1e-9 for r in sp.Poly(h, x).real_roots()):
            return True
    elif not sp.sympify(h).is_number:
        for x0 in np.linspace(-3, 3, 61):
            if abs(x0) > 1e-9 and _real_y_roots(h, x, y, sp.nsimplify(x0)):
                return True
    rest = [sp.cancel(e / h) for e in eqs]
    if len(rest) < 2:
        return False
    R = sp.resultant(rest[0], rest[1], y)
    if R == 0:
        return None
    if sp.sympify(R).is_number:
        return False
    for x0 in sp.Poly(R, x).real_roots():
        x0 = float(x0)
        if abs(x0) < 1e-9:
            continue
        # equations vanishing on the whole line x = x0 impose nothing there
        on_line = [_line_coeffs(e, x, y, x0) for e in eqs]
        if any(len(c) == 1 for c in on_line):
            continue
        live = [e for e, c in zip(eqs, on_line) if c]
        if not live:
            return True
        roots = np.roots(_line_coeffs(live[0], x, y, x0))
        for y0 in [r.real for r in roots if abs(r.imag) < 1e-7 and abs(r) > 1e-7]:
            if all(abs(complex(e.subs({x: x0, y: y0}))) <= 1e-9 * _magnitude(e, x, y, x0, y0) for e in eqs):
                return True
    return False
