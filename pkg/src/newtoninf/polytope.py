"""Exact lattice polytopes, Newton polyhedra and directional minimal faces.

Facets come from an integer double-description pass on the homogenised
point set; the face lattice is the closure of the facet incidence sets
under intersection.  Faces are identified by *support slices*: the set of
generating points lying on them, stored as a bitmask over the generators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionTooLarge, EmptyPolynomial, ZeroDirection
from .poly import Exponent, Polynomial, support

MAX_DIM = 8
MAX_SUPPORT = 64


def _primitive(vec: Sequence[int]) -> tuple[int, ...]:
    g = reduce(gcd, (abs(v) for v in vec), 0)
    return tuple(v // g for v in vec) if g > 1 else tuple(vec)


def _scale_to_int(vec: Sequence[Fraction]) -> tuple[int, ...]:
    den = reduce(lambda a, b: a * b // gcd(a, b), (Fraction(v).denominator for v in vec), 1)
    return _primitive([int(Fraction(v) * den) for v in vec])


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def rank_and_pivots(rows: Sequence[Sequence]) -> tuple[int, list[int]]:
    """Exact rank of a rational matrix and the pivot columns of its RREF."""
    mat = [[Fraction(v) for v in r] for r in rows]
    if not mat:
        return 0, []
    ncols = len(mat[0])
    pivots, r = [], 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return r, pivots


def affine_dimension(points: Sequence[Sequence[int]]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return rank_and_pivots([[a - b for a, b in zip(p, base)] for p in points[1:]])[0]


def _inverse(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    size = len(mat)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(mat)]
    for c in range(size):
        piv = next(i for i in range(c, size) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for i in range(size):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [row[size:] for row in aug]


@dataclass(frozen=True)
class Facet:
    normal: tuple[int, ...]  # inner normal: normal . v + offset >= 0 on the polytope
    offset: int
    mask: int


def hull_facets(points: Sequence[Sequence[int]]) -> list[Facet]:
    """Facets of a full-dimensional lattice polytope ``conv(points)``.

    Double description on the cone ``{(a0, a) : a0 + a.v >= 0 for all v}``;
    its extreme rays are the facet inequalities.  Points must be distinct
    and affinely span their ambient space.
    """
    pts = [tuple(int(v) for v in p) for p in points]
    d = len(pts[0])
    rows = [(1,) + p for p in pts]
    dim = d + 1
    rank, _ = rank_and_pivots(rows)
    if rank != dim:
        raise ValueError("points are not full-dimensional")

    # greedy choice of an initial simplicial cone
    basis: list[int] = []
    for i in range(len(rows)):
        if rank_and_pivots([rows[j] for j in basis + [i]])[0] == len(basis) + 1:
            basis.append(i)
            if len(basis) == dim:
                break
    inv = _inverse([list(rows[i]) for i in basis])
    rays = [_scale_to_int([inv[r][c] for r in range(dim)]) for c in range(dim)]
    zmask = []
    for c in range(dim):
        zmask.append(sum(1 << basis[t] for t in range(dim) if t != c))

    pending = [i for i in range(len(rows)) if i not in set(basis)]
    for i in pending:
        a = rows[i]
        vals = [_dot(a, r) for r in rays]
        pos = [t for t, v in enumerate(vals) if v > 0]
        neg = [t for t, v in enumerate(vals) if v < 0]
        zer = [t for t, v in enumerate(vals) if v == 0]
        new_rays = [rays[t] for t in pos] + [rays[t] for t in zer]
        new_masks = [zmask[t] for t in pos] + [zmask[t] | 1 << i for t in zer]
        for tp in pos:
            for tn in neg:
                common = zmask[tp] & zmask[tn]
                if common.bit_count() < dim - 2:
                    continue
                adjacent = True
                for t3, z3 in enumerate(zmask):
                    if t3 != tp and t3 != tn and z3 & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vn = vals[tp], vals[tn]
                combo = [vp * x - vn * y for x, y in zip(rays[tn], rays[tp])]
                new_rays.append(_primitive(combo))
                new_masks.append(common | 1 << i)
        rays, zmask = new_rays, new_masks

    facets = []
    for r in rays:
        mask = 0
        for i, row in enumerate(rows):
            if _dot(row, r) == 0:
                mask |= 1 << i
        facets.append(Facet(normal=tuple(r[1:]), offset=r[0], mask=mask))
    facets.sort(key=lambda f: (f.normal, f.offset))
    return facets


@dataclass(frozen=True)
class Face:
    """A nonempty face, given by the generators lying on it."""

    points: tuple[Exponent, ...]
    mask: int = field(repr=False)
    witness: tuple[int, ...] = field(repr=False)
    contains_origin: bool
    dim: int

    def __len__(self):
        return len(self.points)

    @property
    def is_origin(self) -> bool:
        return self.points == (tuple(0 for _ in self.points[0]),)


class LatticePolytope:
    """``conv(points)`` for integer points in Z^n, with its face lattice."""

    def __init__(self, points: Iterable[Sequence[int]], *, guard: bool = True):
        gens = sorted({tuple(int(v) for v in p) for p in points})
        if not gens:
            raise ValueError("empty point set")
        self.n = len(gens[0])
        if guard and (self.n > MAX_DIM):
            raise DimensionTooLarge(f"dimension {self.n} exceeds the guard {MAX_DIM}")
        self.generators: tuple[Exponent, ...] = tuple(gens)
        self._index = {g: i for i, g in enumerate(gens)}
        base = gens[0]
        diffs = [[a - b for a, b in zip(g, base)] for g in gens]
        self.dim, pivots = rank_and_pivots(diffs)
        self.facets: list[Facet] = []
        full = (1 << len(gens)) - 1
        if self.dim > 0:
            proj = [tuple(d[c] for c in pivots) for d in diffs]
            for fct in hull_facets(proj):
                normal = [0] * self.n
                for t, c in enumerate(pivots):
                    normal[c] = fct.normal[t]
                offset = fct.offset - _dot(normal, base)
                self.facets.append(Facet(tuple(normal), offset, fct.mask))
        masks = {full}
        frontier = [f.mask for f in self.facets]
        masks.update(frontier)
        while frontier:
            nxt = []
            for m in frontier:
                for fct in self.facets:
                    sub = m & fct.mask
                    if sub and sub not in masks:
                        masks.add(sub)
                        nxt.append(sub)
            frontier = nxt
        origin = self._index.get(tuple([0] * self.n))
        self.faces: dict[int, Face] = {}
        for m in sorted(masks, key=lambda m: (m.bit_count(), m)):
            pts = tuple(g for i, g in enumerate(gens) if m >> i & 1)
            wit = [0] * self.n
            for fct in self.facets:
                if fct.mask & m == m:
                    wit = [a + b for a, b in zip(wit, fct.normal)]
            self.faces[m] = Face(
                points=pts,
                mask=m,
                witness=_primitive(wit) if any(wit) else tuple(wit),
                contains_origin=origin is not None and bool(m >> origin & 1),
                dim=affine_dimension(pts),
            )
        self.full_mask = full

    @property
    def vertices(self) -> tuple[Exponent, ...]:
        return tuple(f.points[0] for f in self.faces.values() if len(f.points) == 1)

    @property
    def face_lattice(self) -> list[Face]:
        return list(self.faces.values())

    def face_of(self, points: Iterable[Sequence[int]]) -> Face | None:
        mask = 0
        for p in points:
            i = self._index.get(tuple(p))
            if i is None:
                return None
            mask |= 1 << i
        return self.faces.get(mask)

    def argmin_mask(self, p: Sequence) -> tuple[int, Fraction | int]:
        vals = [_dot(p, g) for g in self.generators]
        low = min(vals)
        mask = 0
        for i, v in enumerate(vals):
            if v == low:
                mask |= 1 << i
        return mask, low

    def min_face(self, p: Sequence) -> Face:
        mask, _ = self.argmin_mask(p)
        return self.faces[mask]

    def contains(self, q: Sequence) -> bool:
        """Exact membership of a rational point."""
        q = [Fraction(v) for v in q]
        if self.dim == 0:
            return tuple(q) == self.generators[0]
        base = self.generators[0]
        # q must lie in the affine hull and satisfy every facet inequality
        diffs = [[a - b for a, b in zip(g, base)] for g in self.generators]
        r = rank_and_pivots(diffs)[0]
        if rank_and_pivots(diffs + [[a - b for a, b in zip(q, base)]])[0] != r:
            return False
        return all(_dot(f.normal, q) + f.offset >= 0 for f in self.facets)


@dataclass(frozen=True)
class FaceQueryResult:
    face: Face
    d_supp: Fraction | int  # min of l_p over conv(supp f)
    d_gamma: Fraction | int  # min of l_p over the Newton polyhedron; = min(0, d_supp)


class NewtonPolyhedron(LatticePolytope):
    """``conv({0} U supp f)`` with its face lattice."""

    def __init__(self, f: Polynomial):
        if f.is_zero:
            raise EmptyPolynomial("the zero polynomial has no Newton polyhedron")
        supp = support(f)
        if f.n > MAX_DIM or len(supp) > MAX_SUPPORT:
            raise DimensionTooLarge(
                f"n = {f.n}, |supp| = {len(supp)} exceed the guards n <= {MAX_DIM}, |supp| <= {MAX_SUPPORT}"
            )
        super().__init__([(0,) * f.n, *supp])
        self.polynomial = f
        self.support = frozenset(supp)


def newton_polyhedron(f: Polynomial) -> NewtonPolyhedron:
    return NewtonPolyhedron(f)


def faces_at_infinity(P: LatticePolytope) -> list[Face]:
    """Faces not containing the origin (the Newton boundary at infinity)."""
    return [f for f in P.faces.values() if not f.contains_origin]


def min_face(P: NewtonPolyhedron, p: Sequence) -> FaceQueryResult:
    """Inclusion-maximal face of ``P`` on which ``l_p`` is minimal."""
    if not any(p):
        raise ZeroDirection("direction must be nonzero")
    mask, low = P.argmin_mask(p)
    d_supp = min(_dot(p, v) for v in P.support)
    return FaceQueryResult(face=P.faces[mask], d_supp=d_supp, d_gamma=min(0, d_supp))
