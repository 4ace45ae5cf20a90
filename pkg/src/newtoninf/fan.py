"""Dual subdivision of the directions with a negative coordinate.

The cones are the normal cones of the Minkowski sum
``Gamma_0(f_1) + ... + Gamma_0(f_k) + [0,1]^n``.  Its normal fan refines
each summand's normal fan, so the tuple of minimising faces is constant on
the relative interior of every cone, and the cube summand makes the
coordinate signs constant too.  Cones whose relative interior sits in the
nonnegative orthant are dropped.

Component indices in ``I_sigma``, ``J_sigma`` and ``I_sigma_c`` are
1-based, matching the usual labelling ``f_1, ..., f_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product
from typing import Sequence

from .errors import DimensionTooLarge, NotApplicable
from .poly import PolyMap, Polynomial, face_restriction
from .polytope import Face, LatticePolytope, NewtonPolyhedron, min_face

MAX_CANDIDATES = 100_000


@dataclass(frozen=True)
class ConeRecord:
    rays: tuple[tuple[int, ...], ...]
    interior_rep: tuple[int, ...]
    face_tuple: tuple[Face, ...]
    d_supp: tuple[int, ...]
    I_sigma: tuple[int, ...] = ()
    J_sigma: tuple[int, ...] = ()
    I_sigma_c: tuple[int, ...] = ()
    exceptional: bool = False
    atypical: bool = False
    # bitmask of the dual face of the Minkowski sum; used for exact membership
    sum_face_mask: int = field(default=0, repr=False, compare=False)

    @property
    def dim(self) -> int:
        from .polytope import rank_and_pivots

        return rank_and_pivots(self.rays)[0]

    @property
    def tuple_key(self) -> tuple[int, ...]:
        return tuple(f.mask for f in self.face_tuple)

    @property
    def nd_applicable(self) -> bool:
        """Whether the torus non-degeneracy condition quantifies over this cone."""
        return bool(self.I_sigma) and not self.J_sigma

    def face_system(self, F: PolyMap, indices: Sequence[int] | None = None) -> list[Polynomial]:
        """Face restrictions ``f_j`` restricted to ``Delta_sigma^j`` for 1-based ``indices``."""
        idx = range(1, F.k + 1) if indices is None else indices
        return [face_restriction(F[j - 1], self.face_tuple[j - 1].points) for j in idx]


def _classify_values(d_supp: Sequence) -> dict:
    k = len(d_supp)
    I = tuple(j + 1 for j in range(k) if d_supp[j] < 0)
    J = tuple(j + 1 for j in range(k) if d_supp[j] > 0)
    Ic = tuple(j + 1 for j in range(k) if d_supp[j] >= 0)
    return dict(
        I_sigma=I, J_sigma=J, I_sigma_c=Ic, exceptional=bool(J), atypical=not J and bool(Ic)
    )


@dataclass
class DualSubdivision:
    cones: list[ConeRecord]
    polyhedra: list[NewtonPolyhedron]
    sum_polytope: LatticePolytope
    tuple_classes: dict[tuple[int, ...], list[int]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.tuple_classes:
            classes: dict[tuple[int, ...], list[int]] = {}
            for idx, cone in enumerate(self.cones):
                classes.setdefault(cone.tuple_key, []).append(idx)
            self.tuple_classes = classes
        self._by_mask = {c.sum_face_mask: i for i, c in enumerate(self.cones)}

    def representatives(self) -> list[ConeRecord]:
        """One cone per distinct face tuple, in canonical order."""
        return [self.cones[idx[0]] for idx in self.tuple_classes.values()]

    def direct_tuple(self, p: Sequence) -> tuple[Face, ...]:
        return tuple(min_face(P, p).face for P in self.polyhedra)

    def locate(self, p: Sequence) -> int | None:
        """Index of the cone whose relative interior contains ``p``."""
        if min(p) >= 0:
            return None
        mask, _ = self.sum_polytope.argmin_mask(p)
        return self._by_mask.get(mask)

    def cone_contains(self, idx: int, p: Sequence, *, relative_interior: bool = False) -> bool:
        """Exact membership test of ``p`` in the closed cone (or its relative interior)."""
        mask, _ = self.sum_polytope.argmin_mask(p)
        face_mask = self.cones[idx].sum_face_mask
        if relative_interior:
            return mask == face_mask
        return mask & face_mask == face_mask


def _cube(n: int):
    return [tuple(v) for v in product((0, 1), repeat=n)]


def minkowski_sum(polytopes: Sequence[LatticePolytope], n: int) -> LatticePolytope:
    current = LatticePolytope(_cube(n))
    for P in polytopes:
        verts = current.vertices
        cand = {tuple(a + b for a, b in zip(u, w)) for u in verts for w in P.vertices}
        if len(verts) * len(P.vertices) > MAX_CANDIDATES:
            raise DimensionTooLarge(f"Minkowski sum would need {len(verts) * len(P.vertices)} candidates")
        current = LatticePolytope(cand)
    return current


def build_cone(polyhedra, rays, sum_face_mask=0) -> ConeRecord:
    rays = tuple(sorted(rays))
    rep = tuple(sum(r[i] for r in rays) for i in range(len(rays[0])))
    queries = [min_face(P, rep) for P in polyhedra]
    d = tuple(q.d_supp for q in queries)
    return ConeRecord(
        rays=rays,
        interior_rep=rep,
        face_tuple=tuple(q.face for q in queries),
        d_supp=d,
        sum_face_mask=sum_face_mask,
        **_classify_values(d),
    )


def dual_subdivision(F: PolyMap) -> DualSubdivision:
    polyhedra = [NewtonPolyhedron(f) for f in F.components]
    S = minkowski_sum(polyhedra, F.n)
    cones = []
    for mask, face in S.faces.items():
        if mask == S.full_mask:
            continue
        rays = [f.normal for f in S.facets if f.mask & mask == mask]
        rep = [sum(r[i] for r in rays) for i in range(F.n)]
        if min(rep) >= 0:
            continue
        cones.append(build_cone(polyhedra, rays, mask))
    cones.sort(key=lambda c: (c.dim, c.rays))
    return classify_cones(DualSubdivision(cones, polyhedra, S), F)


def classify_cones(S: DualSubdivision, F: PolyMap) -> DualSubdivision:
    """Recompute the index sets and exceptional/atypical flags of every cone."""
    cones = [replace(c, **_classify_values(c.d_supp)) for c in S.cones]
    return DualSubdivision(cones, S.polyhedra, S.sum_polytope)


def strictness_check(F: PolyMap, S: DualSubdivision) -> tuple[bool, int | None]:
    """Whether ``N(F)`` is strictly smaller than the coordinate hyperplane union.

    Strict exactly when some component ``j`` admits no cone with
    ``J_sigma = {j}``; the smallest such ``j`` is returned as witness.
    """
    if F.k < 2:
        raise NotApplicable("strictness is only meaningful for k >= 2")
    singles = {c.J_sigma[0] for c in S.cones if len(c.J_sigma) == 1}
    for j in range(1, F.k + 1):
        if j not in singles:
            return True, j
    return False, None
