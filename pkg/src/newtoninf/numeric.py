"""Numerics at infinity: the function nu, the Milnor set and a sphere search.

Everything works on the realified map, with ``k'`` real components and
``n'`` real coordinates.  ``nu(dF(x))`` is the smallest of the ``k'``
singular values of the Jacobian.  The search minimises ``(1 + R) nu`` over
spheres ``|x| = R`` of growing radius and clusters the low points by their
image; a cluster that persists over the largest radii is reported as an
empirical asymptotic critical value.  Nothing here is a certificate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from .errors import DimensionMismatch, InputError, OriginPoint
from .poly import PolyMap, Setting, compiled, raw_derivative, realify_point
from .torus import map_seed, task_rng


def _real_point(F: PolyMap, x) -> np.ndarray:
    point = np.asarray(x)
    if F.setting is Setting.REAL:
        if point.shape != (F.n,):
            raise DimensionMismatch(f"point of shape {point.shape} for {F.n} variables")
        if np.iscomplexobj(point):
            if np.any(point.imag):
                raise DimensionMismatch("complex point for a real map")
            point = point.real
        return point.astype(float)
    if point.shape == (F.n,):
        return realify_point(point)
    if point.shape == (2 * F.n,) and not np.iscomplexobj(point):
        return point.astype(float)
    raise DimensionMismatch(f"point of shape {point.shape} for {F.n} complex variables")


def _sigma_min(J: np.ndarray) -> float:
    s = np.linalg.svd(J, compute_uv=False)
    return float(s[J.shape[0] - 1])


def nu_at_point(F: PolyMap, x) -> float:
    """Smallest of the ``k'`` singular values of the realified Jacobian at ``x``."""
    return _sigma_min(compiled(F).jacobian(_real_point(F, x)))


def jacobian_norm(F: PolyMap, x) -> float:
    return float(np.linalg.norm(compiled(F).jacobian(_real_point(F, x)), 2))


def _conj_derivative(raw: dict, i: int) -> dict:
    out = {}
    for (nu, mu), c in raw.items():
        if mu[i]:
            out[(nu, mu[:i] + (mu[i] - 1,) + mu[i + 1:])] = c * mu[i]
    return out


def wirtinger_derivatives(F: PolyMap, z) -> tuple[np.ndarray, np.ndarray]:
    """``(df_l/dz_j, df_l/dconj(z_j))`` as two complex ``k x n`` matrices."""
    z = np.asarray(z, dtype=complex)
    D = np.zeros((F.k, F.n), dtype=complex)
    Dbar = np.zeros((F.k, F.n), dtype=complex)
    for l, f in enumerate(F.components):
        raw = f.raw()
        for j in range(F.n):
            D[l, j] = _eval_raw(raw_derivative(raw, j), z)
            Dbar[l, j] = _eval_raw(_conj_derivative(raw, j), z)
    return D, Dbar


def _eval_raw(raw: dict, z: np.ndarray) -> complex:
    zc = np.conj(z)
    return complex(sum(complex(c) * np.prod(z ** np.array(nu)) * np.prod(zc ** np.array(mu)) for (nu, mu), c in raw.items()))


def nu_mixed_formula(F: PolyMap, z, *, samples: int = 10_000, seed: int = 0) -> float:
    """Direct minimisation of ``|sum_l conj(mu_l) df_l + mu_l conj(dbar f_l)|``
    over unit ``mu`` in ``C^k``.

    The vector is the coefficient of ``dz`` in the real covector
    ``Re(sum_l conj(mu_l) dF_l)``; its norm is ``|B^* phi|``.  Random unit
    ``mu`` give an upper bound, refined by local minimisation from the best
    few.
    """
    if F.setting is Setting.REAL:
        raise InputError("the mixed formula needs a complex or mixed map")
    D, Dbar = wirtinger_derivatives(F, z)

    def value(mu):
        return float(np.linalg.norm(np.conj(mu) @ D + mu @ np.conj(Dbar)))

    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(samples, F.k)) + 1j * rng.normal(size=(samples, F.k))
    mus = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    vals = np.linalg.norm(np.conj(mus) @ D + mus @ np.conj(Dbar), axis=1)
    best = float(vals.min())

    def objective(w):
        mu = w[: F.k] + 1j * w[F.k:]
        return value(mu / np.linalg.norm(mu))

    for idx in np.argsort(vals)[:5]:
        w0 = np.concatenate([mus[idx].real, mus[idx].imag])
        res = minimize(objective, w0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        best = min(best, float(res.fun))
    return best


def milnor_residual(F: PolyMap, x) -> float:
    """``(k'+1)``-th singular value of the Jacobian stacked with ``x/|x|``.

    Zero exactly on the Milnor set; identically zero when ``n' = k'``.
    """
    xr = _real_point(F, x)
    norm = np.linalg.norm(xr)
    if norm == 0:
        raise OriginPoint("the Milnor residual is undefined at the origin")
    J = compiled(F).jacobian(xr)
    if J.shape[0] + 1 > J.shape[1]:
        return 0.0
    M = np.vstack([J, xr / norm])
    return float(np.linalg.svd(M, compute_uv=False)[J.shape[0]])


# ---------------------------------------------------------------------------
# sphere search

@dataclass(frozen=True)
class SearchConfig:
    radii: tuple[float, float, int] = (10.0, 10.0, 3)  # (R0, factor, count)
    restarts: int = 20
    tol: float | None = None  # default 1e-3 * (1 + R0)
    cluster_radius: float = 1e-2
    seed: int = 0
    max_iter: int = 300
    milnor_tol: float = 1e-6

    def __post_init__(self):
        r0, factor, count = self.radii
        if r0 <= 0 or factor <= 1 or int(count) < 1 or int(count) != count:
            raise InputError("radii need R0 > 0, factor > 1 and a positive integer count")
        if self.restarts < 1 or self.cluster_radius <= 0 or self.max_iter < 1 or self.milnor_tol <= 0:
            raise InputError("restarts, cluster radius, iteration budget and tolerances must be positive")
        if self.tol is not None and self.tol <= 0:
            raise InputError("tol must be positive")

    @property
    def schedule(self) -> list[float]:
        r0, factor, count = self.radii
        return [float(r0 * factor**i) for i in range(int(count))]

    @property
    def kinf_tol(self) -> float:
        return self.tol if self.tol is not None else 1e-3 * (1 + self.radii[0])


@dataclass(frozen=True)
class Sample:
    x: tuple[float, ...]  # real coordinates
    radius: float
    objective: float
    f_value: tuple  # real or complex image


@dataclass(frozen=True)
class CandidateValue:
    center: tuple
    kind: str  # "Kinf" or "S"
    evidence: tuple[Sample, ...]


@dataclass
class SearchResult:
    candidates: list[CandidateValue]
    config: SearchConfig
    samples: list[Sample] = field(default_factory=list)
    budget_exceeded: bool = False
    s_search: str = "run"  # or the reason it was skipped


def _sphere_starts(dim: int, count: int, seed_key: Sequence[int]) -> np.ndarray:
    if dim == 1:
        base = np.array([[1.0], [-1.0]])
        return np.vstack([base] * ((count + 1) // 2))[:count]
    seed = int(task_rng(*seed_key).integers(0, 2**31))
    halton = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    pts = norm.ppf(np.clip(halton, 1e-9, 1 - 1e-9))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


class _NuObjective:
    """``nu`` on the sphere with an analytic subgradient."""

    def __init__(self, F: PolyMap):
        self.cm = compiled(F)
        self.k = self.cm.k

    def __call__(self, x) -> float:
        return _sigma_min(self.cm.jacobian(x))

    def gradient(self, x) -> np.ndarray:
        J = self.cm.jacobian(x)
        u, s, vt = np.linalg.svd(J)
        i = self.k - 1
        H = self.cm.hessian(x)  # (k, n, n)
        return np.einsum("j,jil,i->l", u[:, i], H, vt[i])


class _MilnorObjective:
    """Relative Milnor residual, differentiated numerically on the sphere."""

    def __init__(self, F: PolyMap):
        self.cm = compiled(F)
        self.k = self.cm.k

    def __call__(self, x) -> float:
        J = self.cm.jacobian(x)
        M = np.vstack([J / max(np.linalg.norm(J, 2), 1e-300), x / np.linalg.norm(x)])
        return float(np.linalg.svd(M, compute_uv=False)[self.k])

    def gradient(self, x) -> np.ndarray:
        h = 1e-7 * max(1.0, np.linalg.norm(x))
        base = self(x)
        g = np.empty(x.size)
        for i in range(x.size):
            e = np.zeros(x.size)
            e[i] = h
            g[i] = (self(x + e) - base) / h
        return g


def _descend(obj, x0: np.ndarray, radius: float, max_iter: int) -> tuple[np.ndarray, float]:
    """Projected descent on the sphere with Armijo step halving."""
    x = radius * x0 / np.linalg.norm(x0)
    val = obj(x)
    step = 0.5
    for _ in range(max_iter):
        g = obj.gradient(x)
        g = g - (g @ x) / (radius * radius) * x
        gn = np.linalg.norm(g)
        if gn == 0 or not np.isfinite(gn):
            break
        d = g / gn
        improved = False
        while step > 1e-12:
            trial = x - step * radius * d
            trial = radius * trial / np.linalg.norm(trial)
            tv = obj(trial)
            if tv <= val - 1e-4 * step * radius * gn:
                x, val = trial, tv
                improved = True
                step = min(0.5, 2 * step)
                break
            step *= 0.5
        if not improved:
            break
    return x, val


def _image(F: PolyMap, x: np.ndarray) -> tuple:
    vals = compiled(F).value(x)
    if F.setting is Setting.REAL:
        return tuple(float(v) for v in vals)
    return tuple(complex(a, b) for a, b in zip(vals[0::2], vals[1::2]))


def _value_vector(value: tuple) -> np.ndarray:
    arr = np.asarray(value, dtype=complex)
    return np.concatenate([arr.real, arr.imag])


def _cluster(samples: list[Sample], radius: float, radii: list[float], kind: str, real: bool) -> list[CandidateValue]:
    needed = set(radii[-2:])
    ordered = sorted(samples, key=lambda s: (-s.radius, s.objective, s.x))
    groups: list[list[Sample]] = []
    for s in ordered:
        v = _value_vector(s.f_value)
        for grp in groups:
            if np.linalg.norm(_value_vector(grp[0].f_value) - v) <= radius:
                grp.append(s)
                break
        else:
            groups.append([s])
    out = []
    for grp in groups:
        if not needed <= {s.radius for s in grp}:
            continue
        best = {}
        for s in grp:
            if s.radius not in best or s.objective < best[s.radius].objective:
                best[s.radius] = s
        evidence = tuple(best[r] for r in sorted(best))
        out.append(CandidateValue(center=grp[0].f_value, kind=kind, evidence=evidence))
    out.sort(key=lambda c: tuple(_value_vector(c.center)))
    return out


def search_asymptotic_values(F: PolyMap, cfg: SearchConfig | None = None) -> SearchResult:
    cfg = cfg or SearchConfig()
    cm = compiled(F)
    dim = cm.nvars
    radii = cfg.schedule
    key = map_seed(F)
    real = F.setting is Setting.REAL
    results: dict[str, list[Sample]] = {"Kinf": [], "S": []}
    kinds = [("Kinf", _NuObjective(F))]
    s_note = "run"
    if cm.k < dim:
        kinds.append(("S", _MilnorObjective(F)))
    else:
        s_note = "skipped: n' = k', every point is in the Milnor set"
    for kind, obj in kinds:
        warm: list[np.ndarray] = []
        for ri, R in enumerate(radii):
            starts = list(warm[: cfg.restarts // 2])
            fresh = _sphere_starts(dim, cfg.restarts - len(starts), (cfg.seed, key, ri, len(kind)))
            starts += list(fresh)
            finals = []
            for x0 in starts:
                x, val = _descend(obj, np.asarray(x0, dtype=float), R, cfg.max_iter)
                score = (1 + R) * val if kind == "Kinf" else val
                finals.append((score, tuple(x / R)))
                threshold = cfg.kinf_tol if kind == "Kinf" else cfg.milnor_tol
                if score < threshold:
                    results[kind].append(Sample(tuple(float(v) for v in x), R, float(score), _image(F, x)))
            finals.sort()
            warm = [np.array(d) for _, d in finals]
    candidates = []
    for kind in ("Kinf", "S"):
        candidates += _cluster(results[kind], cfg.cluster_radius, radii, kind, real)
    return SearchResult(candidates, cfg, results["Kinf"] + results["S"], False, s_note)


# ---------------------------------------------------------------------------
# inclusions between the empirical sets and the bound

@dataclass(frozen=True)
class InclusionCheck:
    candidate: CandidateValue
    target: str  # "Kinf" or "N u A"
    distance: float
    ok: bool


@dataclass
class CrossCheckReport:
    checks: list[InclusionCheck]
    conditional: bool  # the bound itself rests on an unproven non-degeneracy

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def violations(self) -> list[InclusionCheck]:
        return [c for c in self.checks if not c.ok]


def _distance_to_bound(center: tuple, bound) -> float:
    c = np.asarray(center, dtype=complex)
    best = np.inf
    for piece in bound.n_set.pieces:
        best = min(best, float(np.linalg.norm([c[j - 1] for j in piece])))
    for desc in bound.a_set:
        idx = [j - 1 for j in desc.I_c]
        for sample in desc.disc_samples:
            best = min(best, float(np.linalg.norm(c[idx] - np.asarray(sample.value, dtype=complex))))
    return best


def cross_check_inclusions(F: PolyMap, candidates: Sequence[CandidateValue], bound, cluster_radius: float = 1e-2) -> CrossCheckReport:
    """Check S-candidates against Kinf-candidates and Kinf-candidates against the bound."""
    kinf = [c for c in candidates if c.kind == "Kinf"]
    checks = []
    for c in candidates:
        if c.kind == "S":
            dist = min(
                (float(np.linalg.norm(_value_vector(c.center) - _value_vector(o.center))) for o in kinf),
                default=np.inf,
            )
            checks.append(InclusionCheck(c, "Kinf", dist, dist <= cluster_radius))
    for c in kinf:
        dist = _distance_to_bound(c.center, bound)
        checks.append(InclusionCheck(c, "N u A", dist, dist <= cluster_radius))
    return CrossCheckReport(checks, conditional=not bound.bound_established)
