"""Non-degeneracy at infinity, in two flavours.

``is_nondegenerate_at_infinity`` checks, for every cone with ``I_sigma``
nonempty and ``J_sigma`` empty, that the face system
``(f_j restricted to Delta_sigma^j)_{j in I_sigma}`` has no singular zero on
the torus.  ``check_all_components_real`` checks the stronger real condition that the
full face system ``(f_j restricted to Delta_p^j)_{j=1..k}`` has no zero on
the real torus at all, for every direction with a negative coordinate.

Each cone goes through a cascade: a monomial face settles it at once, small
systems are decided exactly (:mod:`newtoninf.exact`), and the rest go to a
numeric witness search (:mod:`newtoninf.torus`).  A negative answer from the
search is never a proof, so the verdict is then ``Unknown``.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SettingNotReal, ZeroScaledPoint
from .exact import lattice_rank, singular_zero_free, torus_zero_free, try_exact
from .fan import ConeRecord, DualSubdivision, dual_subdivision
from .poly import PolyMap, Polynomial, Setting, raw_derivative
from .torus import TorusConfig, TorusPoint, TorusSystem, evaluate_point, map_seed, task_rng, torus_search


class Tag(str, enum.Enum):
    NON_DEGENERATE = "NonDegenerate"
    DEGENERATE = "Degenerate"
    UNKNOWN = "Unknown"


# certificate reasons for NonDegenerate
EMPTY_ZERO_SET = "EmptyToroidZeroSet"
MONOMIAL_FACE = "MonomialFace"
SMALL_CASE = "ExhaustiveSmallCase"

# strategy names, in cascade order
S_MONOMIAL = "MonomialFace"
S_EXACT = "ExhaustiveSmallCase"
S_SEARCH = "WitnessSearch"


@dataclass(frozen=True)
class Verdict:
    tag: Tag
    certificate: str | None = None
    witness: TorusPoint | None = None
    strategies: tuple[str, ...] = ()
    note: str = ""

    @property
    def decided(self) -> bool:
        return self.tag is not Tag.UNKNOWN


@dataclass
class ConeCheck:
    cone: ConeRecord
    cone_id: int
    system: list[Polynomial]
    verdict: Verdict
    strategy_log: list[str] = field(default_factory=list)
    indices: tuple[int, ...] = ()  # 1-based components making up ``system``
    singular: bool = True  # whether the question was a singular zero or any zero


@dataclass
class NDResult:
    """Aggregate verdict with one entry per distinct face tuple."""

    verdict: Verdict
    checks: list[ConeCheck]
    subdivision: DualSubdivision

    @property
    def tag(self) -> Tag:
        return self.verdict.tag

    @property
    def undecided(self) -> list[ConeCheck]:
        return [c for c in self.checks if c.verdict.tag is Tag.UNKNOWN]


def _aggregate(checks: Sequence[ConeCheck]) -> Verdict:
    bad = [c for c in checks if c.verdict.tag is Tag.DEGENERATE]
    if bad:
        return Verdict(Tag.DEGENERATE, witness=bad[0].verdict.witness, note=f"cone {bad[0].cone_id}")
    if all(c.verdict.tag is Tag.NON_DEGENERATE for c in checks):
        return Verdict(Tag.NON_DEGENERATE, certificate="all applicable cones certified")
    open_ids = ", ".join(str(c.cone_id) for c in checks if c.verdict.tag is Tag.UNKNOWN)
    return Verdict(Tag.UNKNOWN, note=f"undecided cones: {open_ids}")


def _decide_system(
    system: list[Polynomial],
    setting: Setting,
    n: int,
    p: Sequence[int],
    want_singular: bool,
    cfg: TorusConfig,
    key: Sequence[int],
) -> tuple[Verdict, list[str]]:
    """Run the cascade on one system.

    ``want_singular`` asks for a singular zero (torus non-degeneracy);
    otherwise any zero counts (the all-components condition).
    """
    log = [S_MONOMIAL]
    if any(f.is_monomial for f in system):
        return Verdict(Tag.NON_DEGENERATE, MONOMIAL_FACE, strategies=tuple(log)), log

    log.append(S_EXACT)
    outcome = try_exact(system, want_singular, task_rng(*key, 1 << 20))
    search = TorusSystem(system, system if want_singular else None, setting, n, p)
    if outcome is not None:
        positive = outcome.singular if want_singular else outcome.zeros
        if not positive:
            reason = EMPTY_ZERO_SET if not outcome.zeros else SMALL_CASE
            return Verdict(Tag.NON_DEGENERATE, reason, strategies=tuple(log), note=outcome.method), log
        if outcome.witness is not None:
            wit = evaluate_point(search, outcome.witness, cfg)
            if wit.confirmed:
                return Verdict(Tag.DEGENERATE, SMALL_CASE, wit, tuple(log), note=outcome.method), log
    elif torus_zero_free(system):
        return Verdict(Tag.NON_DEGENERATE, EMPTY_ZERO_SET, strategies=tuple(log), note="binomial elimination"), log
    elif want_singular and singular_zero_free(system):
        note = "binomial elimination with the maximal minors"
        return Verdict(Tag.NON_DEGENERATE, SMALL_CASE, strategies=tuple(log), note=note), log

    log.append(S_SEARCH)
    # when |I| exceeds the lattice rank, every zero is singular
    zeros_suffice = want_singular and setting is not Setting.MIXED and len(system) > lattice_rank(system)
    if zeros_suffice:
        search_zero = TorusSystem(system, None, setting, n, p)
        hits = torus_search(search_zero, cfg, key)
        hits = [evaluate_point(search, h.point, cfg) for h in hits]
    else:
        hits = torus_search(search, cfg, key)
    hits = [h for h in hits if h.confirmed]
    if hits:
        return Verdict(Tag.DEGENERATE, None, hits[0], tuple(log)), log
    return Verdict(Tag.UNKNOWN, strategies=tuple(log), note="no witness found; no certificate applies"), log


def check_cone_nondegeneracy(
    F: PolyMap, cone: ConeRecord, cfg: TorusConfig | None = None, cone_id: int = 0
) -> ConeCheck:
    """Cascade for one cone with ``I_sigma`` nonempty and ``J_sigma`` empty."""
    cfg = cfg or TorusConfig()
    if not cone.nd_applicable:
        raise ValueError("the torus condition only applies when I_sigma is nonempty and J_sigma is empty")
    system = cone.face_system(F, cone.I_sigma)
    key = (cfg.seed, map_seed(F), cone_id)
    verdict, log = _decide_system(system, F.setting, F.n, cone.interior_rep, True, cfg, key)
    return ConeCheck(cone, cone_id, system, verdict, log, cone.I_sigma, True)


def is_nondegenerate_at_infinity(
    F: PolyMap, S: DualSubdivision | None = None, cfg: TorusConfig | None = None
) -> NDResult:
    """Aggregate torus non-degeneracy; identical face tuples are checked once."""
    S = S or dual_subdivision(F)
    checks = []
    for cone_id, cone in enumerate(S.representatives()):
        if cone.nd_applicable:
            checks.append(check_cone_nondegeneracy(F, cone, cfg, cone_id))
    return NDResult(_aggregate(checks), checks, S)


def check_all_components_real(
    F: PolyMap, S: DualSubdivision | None = None, cfg: TorusConfig | None = None
) -> NDResult:
    """The real condition: no face tuple's full system vanishes on ``(R*)^n``."""
    if F.setting is not Setting.REAL:
        raise SettingNotReal("this condition is stated for real maps; pass the realified map explicitly")
    cfg = cfg or TorusConfig()
    S = S or dual_subdivision(F)
    checks = []
    for cone_id, cone in enumerate(S.representatives()):
        # restrictions to the face {0} are identically zero and impose nothing
        indices = tuple(j for j, f in enumerate(cone.face_system(F), start=1) if not f.is_zero)
        system = cone.face_system(F, indices)
        key = (cfg.seed, map_seed(F), cone_id, 1)
        if not system:
            ones = TorusSystem([], None, F.setting, F.n, cone.interior_rep)
            wit = evaluate_point(ones, np.ones(F.n), cfg)
            verdict = Verdict(Tag.DEGENERATE, None, wit, (S_MONOMIAL,), note="every face restriction vanishes")
            log = [S_MONOMIAL]
        else:
            verdict, log = _decide_system(system, F.setting, F.n, cone.interior_rep, False, cfg, key)
        checks.append(ConeCheck(cone, cone_id, system, verdict, log, indices, False))
    return NDResult(_aggregate(checks), checks, S)


# ---------------------------------------------------------------------------
# the Euler relation and the comparison of the two conditions

@dataclass(frozen=True)
class EulerTransfer:
    px: tuple[float, ...]
    residuals: tuple[float, ...]  # <df_j(x), px> - d_j f_j(x)
    kernel_residual: float  # |J px| / (|J| |px|) ; zero when px is a kernel vector
    relative: tuple[float, ...] = ()


def euler_transfer(x: Sequence[float], p: Sequence[int], faces: Sequence[tuple[Polynomial, int]]) -> EulerTransfer:
    """Euler relation ``<df(x), px> = d f(x)`` for p-homogeneous face restrictions.

    ``faces`` pairs each restriction with its weighted degree ``d``.  When all
    restrictions vanish at ``x``, ``px`` spans a kernel direction of their
    Jacobian.
    """
    x = np.asarray(x, dtype=float)
    px = np.asarray(p, dtype=float) * x
    if not np.any(px):
        raise ZeroScaledPoint("px = 0; the point must lie in the torus")
    residuals, relative, rows = [], [], []
    for f, d in faces:
        grad = np.array([_eval_real(raw_derivative(f.raw(), i), x) for i in range(f.n)])
        val = _eval_real(f.raw(), x)
        res = float(grad @ px - d * val)
        scale = float(np.abs(grad) @ np.abs(px) + abs(d) * f.term_magnitude(x)) or 1.0
        residuals.append(res)
        relative.append(abs(res) / scale)
        rows.append(grad)
    J = np.array(rows)
    norm = np.linalg.norm(J) * np.linalg.norm(px)
    kernel = float(np.linalg.norm(J @ px) / norm) if norm else 0.0
    return EulerTransfer(tuple(float(v) for v in px), tuple(residuals), kernel, tuple(relative))


def _eval_real(raw: dict, x: np.ndarray) -> float:
    return float(sum(float(c.re) * np.prod(x ** np.array(nu)) for (nu, _), c in raw.items()))


@dataclass
class ComparisonReport:
    torus: NDResult  # the I_sigma-system condition
    full: NDResult  # the all-components real condition
    transfers: list[tuple[int, EulerTransfer]]
    agree: bool | None  # None when a verdict is Unknown or agreement is not expected
    gap: bool  # torus condition holds while the full one fails


def compare_definitions(F: PolyMap, cfg: TorusConfig | None = None) -> ComparisonReport:
    """Both verdicts side by side, with Euler-relation kernel vectors for
    every full-system witness on a square map."""
    if F.setting is not Setting.REAL:
        raise SettingNotReal("pass a real (or realified) map")
    S = dual_subdivision(F)
    torus = is_nondegenerate_at_infinity(F, S, cfg)
    full = check_all_components_real(F, S, cfg)
    transfers = []
    if F.n == F.k:
        for chk in full.checks:
            w = chk.verdict.witness
            if chk.verdict.tag is Tag.DEGENERATE and w is not None and not chk.cone.J_sigma:
                faces = list(zip(chk.cone.face_system(F), chk.cone.d_supp))
                transfers.append((chk.cone_id, euler_transfer(w.point, chk.cone.interior_rep, faces)))
    decided = torus.tag is not Tag.UNKNOWN and full.tag is not Tag.UNKNOWN
    agree = None
    if decided:
        agree = torus.tag == full.tag
    gap = torus.tag is Tag.NON_DEGENERATE and full.tag is Tag.DEGENERATE
    return ComparisonReport(torus, full, transfers, agree, gap)


# ---------------------------------------------------------------------------
# export

def system_text(F: PolyMap, system: Sequence[Polynomial], names: Sequence[str], comment: Sequence[str] = ()) -> str:
    """A face system in the map file format, with ``#`` comment lines on top."""
    lines = [f"# {c}" for c in comment]
    lines += [f"setting: {F.setting.value}", "vars: " + " ".join(F.variables), "map:"]
    lines += [f"{name} = {f.format(F.variables)}" for name, f in zip(names, system)]
    return "\n".join(lines) + "\n"


def export_undecided(F: PolyMap, result: NDResult, directory: str) -> list[str]:
    """Write every Unknown face system to ``directory``; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for chk in result.undecided:
        names = [f"{F.names[j - 1]}_face" for j in chk.indices]
        comment = [
            f"undecided face system, cone {chk.cone_id}",
            f"direction {list(chk.cone.interior_rep)}, rays {[list(r) for r in chk.cone.rays]}",
            "question: a singular zero on the torus" if chk.singular else "question: a zero on the torus",
        ]
        path = os.path.join(directory, f"cone_{chk.cone_id:03d}.map")
        with open(path, "w") as fh:
            fh.write(system_text(F, chk.system, names, comment))
        paths.append(path)
    return paths
