"""The sets ``N(F)`` and ``A(F)``, the bound on ``K_inf(F)`` and the
invertibility verdict for square maps.

``N(F)`` is a union of coordinate subspaces ``{c_j = 0, j in J}``, one for
each exceptional cone; it is stored by its inclusion-minimal index sets.
``A(F)`` is reported as evidence: for every atypical face tuple, sampled
critical values of ``F_sigma = (f_j on Delta_sigma^j)_{j in I_sigma^c}``
restricted to ``G_sigma``, together with the defining system.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .exact import term_dicts, torus_zero_free
from .fan import ConeRecord, DualSubdivision, dual_subdivision, strictness_check
from .nondegeneracy import NDResult, Tag, is_nondegenerate_at_infinity, system_text
from .poly import PolyMap, Setting, is_convenient, jacobian_determinant, raw_is_constant
from .polytope import rank_and_pivots
from .torus import TorusConfig, TorusSystem, map_seed, task_rng, torus_search


@dataclass(frozen=True)
class NSet:
    pieces: tuple[tuple[int, ...], ...]  # 1-based index sets J, inclusion-minimal
    strict: bool | None = None  # None when k = 1
    strict_witness: int | None = None

    @property
    def empty(self) -> bool:
        return not self.pieces

    def describe(self, names: Sequence[str] | None = None) -> str:
        if not self.pieces:
            return "empty"
        parts = []
        for J in self.pieces:
            parts.append("{" + ", ".join(f"c{j} = 0" for j in J) + "}")
        return " u ".join(parts)


def minimal_pieces(sets) -> tuple[tuple[int, ...], ...]:
    """Inclusion-minimal members of a family of index sets, canonically ordered."""
    uniq = sorted({tuple(sorted(s)) for s in sets}, key=lambda s: (len(s), s))
    keep = []
    for s in uniq:
        if not any(set(t) <= set(s) for t in keep):
            keep.append(s)
    return tuple(keep)


def compute_N(F: PolyMap, S: DualSubdivision | None = None) -> NSet:
    S = S or dual_subdivision(F)
    pieces = minimal_pieces(c.J_sigma for c in S.cones if c.exceptional)
    if F.k >= 2:
        strict, witness = strictness_check(F, S)
        return NSet(pieces, strict, witness)
    return NSet(pieces)


@dataclass(frozen=True)
class DiscSample:
    point: tuple
    value: tuple  # F_sigma at the point
    sys_residual: float
    rank_residual: float | None


@dataclass
class AtypicalDescriptor:
    cone: ConeRecord
    cone_id: int
    I_sigma: tuple[int, ...]
    I_c: tuple[int, ...]
    disc_samples: list[DiscSample]
    status: str  # how the sampling ended
    exported: str | None = None

    def system_text(self, F: PolyMap) -> str:
        polys = self.cone.face_system(F, self.I_sigma) + self.cone.face_system(F, self.I_c)
        names = [f"{F.names[j - 1]}_eq" for j in self.I_sigma] + [f"{F.names[j - 1]}_val" for j in self.I_c]
        comment = [
            f"atypical face tuple, cone {self.cone_id}, direction {list(self.cone.interior_rep)}",
            "G_sigma: the *_eq components vanish on the torus",
            "F_sigma: the *_val components; critical values where the stacked Jacobian drops rank",
        ]
        return system_text(F, polys, names, comment)


def _no_critical_points(polys, setting: Setting) -> bool:
    """Monomials with independent exponents have a full-rank Jacobian on the torus."""
    if setting is Setting.MIXED or not all(f.is_monomial for f in polys):
        return False
    exps = [next(iter(t)) for t in term_dicts(polys)]
    return rank_and_pivots(exps)[0] == len(exps)


def compute_A(
    F: PolyMap,
    S: DualSubdivision | None = None,
    cfg: TorusConfig | None = None,
    export_dir: str | None = None,
) -> list[AtypicalDescriptor]:
    """One descriptor per atypical face tuple, with sampled critical values."""
    S = S or dual_subdivision(F)
    cfg = cfg or TorusConfig()
    out = []
    for cone_id, cone in enumerate(S.representatives()):
        if not cone.atypical:
            continue
        eqs = cone.face_system(F, cone.I_sigma)
        vals = cone.face_system(F, cone.I_sigma_c)
        stacked = eqs + vals
        samples: list[DiscSample] = []
        if any(f.is_monomial for f in eqs):
            status = "G_sigma empty (monomial face)"
        elif eqs and torus_zero_free(eqs):
            status = "G_sigma empty (exact elimination)"
        elif _no_critical_points(stacked, F.setting):
            status = "no critical points (independent monomials)"
        else:
            system = TorusSystem(eqs, stacked, F.setting, F.n, cone.interior_rep, values=vals)
            hits = torus_search(system, cfg, (cfg.seed, map_seed(F), cone_id, 2), first_only=False)
            samples = [DiscSample(h.point, h.values, h.sys_residual, h.rank_residual) for h in hits]
            samples.sort(key=lambda s: tuple(np.round(np.asarray(s.value, dtype=complex).real, 12)))
            status = f"{len(samples)} critical values sampled" if samples else "no critical points found"
        desc = AtypicalDescriptor(cone, cone_id, cone.I_sigma, cone.I_sigma_c, samples, status)
        if export_dir is not None:
            os.makedirs(export_dir, exist_ok=True)
            path = os.path.join(export_dir, f"atypical_{cone_id:03d}.map")
            with open(path, "w") as fh:
                fh.write(desc.system_text(F))
            desc.exported = path
        out.append(desc)
    return out


@dataclass
class BoundReport:
    n_set: NSet
    a_set: list[AtypicalDescriptor]
    nd: NDResult
    convenient: tuple[bool, ...]
    kinf_bound_empty: bool
    bound_established: bool  # the inclusion rests on certified non-degeneracy
    narrative: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def kinf_bound(
    F: PolyMap,
    S: DualSubdivision | None = None,
    nd: NDResult | None = None,
    cfg: TorusConfig | None = None,
    export_dir: str | None = None,
) -> BoundReport:
    S = S or dual_subdivision(F)
    nd = nd or is_nondegenerate_at_infinity(F, S, cfg)
    conv = tuple(is_convenient(f) for f in F.components)
    n_set = compute_N(F, S)
    a_set = compute_A(F, S, cfg, export_dir)
    warnings = []
    if not F.is_effective:
        missing = [v for v, e in zip(F.variables, F.effectivity) if not e]
        warnings.append(f"F is not effective (unused variables: {', '.join(missing)}); conclusions are warnings only")
    certified = nd.tag is Tag.NON_DEGENERATE
    hypotheses = F.is_effective
    narrative = []
    if certified:
        narrative.append("non-degenerate at infinity, so K_inf(F) is contained in N(F) u A(F)")
    else:
        narrative.append(
            f"non-degeneracy at infinity is {nd.tag.value}: the inclusion of K_inf(F) in N(F) u A(F) is not established"
        )
    if n_set.empty:
        narrative.append("N(F) is empty (every component is convenient)" if all(conv) else "N(F) is empty")
    else:
        narrative.append(f"N(F) is not empty: N(F) = {n_set.describe()}")
    if not a_set:
        narrative.append("no atypical cones, so A(F) is empty")
    else:
        total = sum(len(d.disc_samples) for d in a_set)
        narrative.append(f"{len(a_set)} atypical face tuple(s); {total} sampled critical value(s) (evidence, not a closed form)")
    empty = all(conv) and certified and hypotheses
    if empty:
        narrative.append("all components convenient and non-degenerate at infinity, so K_inf(F) is empty")
    return BoundReport(n_set, a_set, nd, conv, empty, certified and hypotheses, narrative, warnings)


# ---------------------------------------------------------------------------
# invertibility

class InvTag(str, enum.Enum):
    CERTIFIED = "CertifiedDiffeo"
    CONDITIONAL = "ConditionalDiffeo"
    SINGULAR = "SingularityFound"
    INCONCLUSIVE = "Inconclusive"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class InvertibilityVerdict:
    tag: InvTag
    evidence: list[tuple[str, object]]
    determinant: dict | None = None
    singular_witness: tuple | None = None
    certificate: bool = False  # only CertifiedDiffeo is a proof

    def fact(self, name: str):
        return dict(self.evidence).get(name)


def _det_zero_search(det: dict, nvars: int, seed_key: Sequence[int], restarts: int = 16) -> tuple | None:
    """Multistart least squares on ``det(x) / (1 + |terms|) = 0``."""
    exps = np.array([nu for (nu, _) in det], dtype=float)
    coeffs = np.array([float(c.re) for c in det.values()])

    def scaled(x):
        mono = np.prod(np.power(x, exps), axis=1)
        return np.array([coeffs @ mono / (1.0 + np.abs(coeffs) @ np.abs(mono))])

    for r in range(restarts):
        x0 = task_rng(*seed_key, r).normal(size=nvars)
        sol = least_squares(scaled, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        if abs(scaled(sol.x)[0]) <= 1e-12:
            return tuple(float(v) for v in sol.x)
    return None


def invertibility_verdict(
    F: PolyMap,
    numeric_evidence=None,
    nd: NDResult | None = None,
    search_cfg=None,
) -> InvertibilityVerdict:
    """Global diffeomorphism verdict for a square map.

    ``numeric_evidence`` is a :class:`newtoninf.numeric.SearchResult`; when
    it is needed and missing, the default search is run.
    """
    evidence: list[tuple[str, object]] = [("square", F.n == F.k)]
    if F.n != F.k:
        return InvertibilityVerdict(InvTag.NOT_APPLICABLE, evidence)
    det = jacobian_determinant(F)
    if not det:
        evidence.append(("sing", "all of A^n (determinant is identically zero)"))
        return InvertibilityVerdict(InvTag.SINGULAR, evidence, det, tuple(0.0 for _ in range(2 * F.n if F.setting is not Setting.REAL else F.n)))
    nreal = F.n if F.setting is Setting.REAL else 2 * F.n
    if raw_is_constant(det):
        evidence.append(("sing", "empty (nonzero constant determinant)"))
    else:
        witness = _det_zero_search(det, nreal, (map_seed(F), 3))
        if witness is not None:
            evidence.append(("sing", "nonempty (numeric zero of the determinant)"))
            return InvertibilityVerdict(InvTag.SINGULAR, evidence, det, witness)
        evidence.append(("sing", "unknown (nonconstant determinant, no zero found)"))
        return InvertibilityVerdict(InvTag.INCONCLUSIVE, evidence, det)
    conv = tuple(is_convenient(f) for f in F.components)
    evidence.append(("convenient", all(conv)))
    nd = nd or is_nondegenerate_at_infinity(F)
    evidence.append(("nondegenerate", nd.tag.value))
    if all(conv) and nd.tag is Tag.NON_DEGENERATE:
        return InvertibilityVerdict(InvTag.CERTIFIED, evidence, det, certificate=True)
    if numeric_evidence is None:
        from .numeric import search_asymptotic_values

        numeric_evidence = search_asymptotic_values(F, search_cfg)
    kinf = [c for c in numeric_evidence.candidates if c.kind == "Kinf"]
    evidence.append(("kinf_candidates", len(kinf)))
    radii = numeric_evidence.config.schedule
    evidence.append(("kinf_search", f"radii up to {radii[-1]:g}, {numeric_evidence.config.restarts} restarts per radius"))
    if not kinf:
        return InvertibilityVerdict(InvTag.CONDITIONAL, evidence, det)
    return InvertibilityVerdict(InvTag.INCONCLUSIVE, evidence, det)


__all__ = [
    "AtypicalDescriptor",
    "BoundReport",
    "DiscSample",
    "InvTag",
    "InvertibilityVerdict",
    "NSet",
    "compute_A",
    "compute_N",
    "invertibility_verdict",
    "kinf_bound",
    "minimal_pieces",
]
