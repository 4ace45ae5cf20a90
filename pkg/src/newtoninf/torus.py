"""Numeric search for points of the torus on weighted-homogeneous systems.

Given polynomials ``eqs`` that must vanish and (optionally) polynomials
``rank_polys`` whose realified Jacobian must drop rank, the search runs
multistart least squares over the torus.  Every system handled here is
weighted-homogeneous for a direction ``p`` with a negative entry, so each
solution orbit meets ``{|x_m| = 1}`` for ``m = argmin p``; that coordinate
is pinned to modulus one.

Residuals are scale-free: each equation is divided by its term magnitude
and the rank condition is the smallest singular value of the Jacobian
with rows divided by the term magnitudes and columns multiplied by
``|x_i|`` (entries ``x_i df_j/dx_i / M_j`` are bounded by the degrees).  Accepted
points are re-evaluated with mpmath at higher precision.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np
from scipy.optimize import least_squares

from .poly import PolyMap, Polynomial, Setting, raw_derivative, realify, realify_point

# log-modulus bound for the free coordinates; keeps iterates well inside the torus
LOG_BOUND = 9.0


@dataclass(frozen=True)
class TorusConfig:
    eps_sys: float = 1e-9
    eps_rank: float = 1e-9
    delta_torus: float = 1e-6
    restarts: int = 16
    max_nfev: int = 150
    seed: int = 0
    confirm_dps: int = 32


@dataclass(frozen=True)
class TorusPoint:
    """A point of the torus with its residual evidence."""

    point: tuple  # n real or complex coordinates
    sys_residual: float
    rank_residual: float | None
    confirmed: bool
    mp_sys_residual: float | None = None
    mp_rank_residual: float | None = None
    values: tuple = field(default=(), compare=False)  # auxiliary values (critical values)


def map_seed(F: PolyMap) -> int:
    """Stable 64-bit integer derived from the canonical text of ``F``."""
    digest = hashlib.sha256(F.canonical_text().encode()).hexdigest()
    return int(digest[:16], 16)


def task_rng(*key: int) -> np.random.Generator:
    return np.random.default_rng([int(k) & (2**64 - 1) for k in key])


def _real_parts(polys: Sequence[Polynomial], setting: Setting, n: int) -> list[dict]:
    if setting is Setting.REAL:
        return [f.raw() for f in polys]
    R = realify(PolyMap(list(polys), names=[f"q{j}" for j in range(len(polys))]))
    return [f.raw() for f in R.components]


class _Stack:
    """Vectorised values and term magnitudes of a list of raw polynomials."""

    def __init__(self, polys: Sequence[dict], nvars: int):
        self.k = len(polys)
        exps, coeffs, owner = [], [], []
        for idx, p in enumerate(polys):
            for (nu, mu), c in p.items():
                exps.append(np.add(nu, mu))
                coeffs.append(complex(c))
                owner.append(idx)
        self.exps = np.array(exps, dtype=float).reshape(-1, nvars)
        self.coeffs = np.array(coeffs, dtype=complex)
        self.owner = np.array(owner, dtype=int)

    def magnitudes(self, absz: np.ndarray) -> np.ndarray:
        out = np.zeros(self.k)
        if self.coeffs.size:
            vals = np.abs(self.coeffs) * np.prod(np.power(absz, self.exps), axis=1)
            np.add.at(out, self.owner, vals)
        return out


class _Compiled:
    """Real polynomials with their first partials, evaluated in float64."""

    def __init__(self, polys: Sequence[dict], nvars: int):
        self.polys = [dict(p) for p in polys]
        self.nvars = nvars
        self.k = len(polys)
        self.values = _Real(self.polys, nvars)
        self.partials = _Real([raw_derivative(p, i) for p in self.polys for i in range(nvars)], nvars)

    def value(self, x):
        return self.values(x)

    def jacobian(self, x):
        return self.partials(x).reshape(self.k, self.nvars)


class _Real:
    def __init__(self, polys, nvars):
        exps, coeffs, owner = [], [], []
        for idx, p in enumerate(polys):
            for (nu, _), c in p.items():
                exps.append(nu)
                coeffs.append(float(c.re))
                owner.append(idx)
        self.size = len(polys)
        self.exps = np.array(exps, dtype=float).reshape(-1, nvars)
        self.coeffs = np.array(coeffs)
        self.owner = np.array(owner, dtype=int)

    def __call__(self, x):
        out = np.zeros(self.size)
        if self.coeffs.size:
            np.add.at(out, self.owner, self.coeffs * np.prod(np.power(x, self.exps), axis=1))
        return out


class TorusSystem:
    """The residual function of one search problem."""

    def __init__(
        self,
        eqs: Sequence[Polynomial],
        rank_polys: Sequence[Polynomial] | None,
        setting: Setting,
        n: int,
        p: Sequence[int],
        values: Sequence[Polynomial] = (),
    ):
        self.setting = setting
        self.n = n
        self.m = int(np.argmin(p))
        self.complex = setting is not Setting.REAL
        self.nreal = 2 * n if self.complex else n
        self.eqs = list(eqs)
        self.rank_polys = list(rank_polys) if rank_polys is not None else None
        self.value_polys = list(values)
        self.eq_real = _Compiled(_real_parts(self.eqs, setting, n), self.nreal) if self.eqs else None
        self.eq_mag = _Stack([f.raw() for f in self.eqs], n)
        self.rank_real = (
            _Compiled(_real_parts(self.rank_polys, setting, n), self.nreal) if self.rank_polys else None
        )
        self.rank_mag = _Stack([f.raw() for f in self.rank_polys], n) if self.rank_polys else None
        self.val_real = _Compiled(_real_parts(self.value_polys, setting, n), self.nreal) if self.value_polys else None

    # parameters -> point ---------------------------------------------------
    @property
    def nparams(self) -> int:
        return (self.n - 1) + (self.n if self.complex else 0)

    def point(self, params, signs=None) -> np.ndarray:
        u = np.zeros(self.n)
        free = [i for i in range(self.n) if i != self.m]
        u[free] = params[: self.n - 1]
        if self.complex:
            theta = params[self.n - 1:]
            return np.exp(u + 1j * theta)
        return signs * np.exp(u)

    def real_coords(self, z) -> np.ndarray:
        return realify_point(z) if self.complex else np.asarray(z, dtype=float)

    # residuals ---------------------------------------------------------------
    def sys_residuals(self, z) -> np.ndarray:
        if not self.eqs:
            return np.zeros(0)
        vals = self.eq_real.value(self.real_coords(z))
        mags = self.eq_mag.magnitudes(np.abs(z))
        if self.complex:
            vals = np.hypot(vals[0::2], vals[1::2])
        return vals / np.maximum(mags, 1e-300)

    def sys_residual_vector(self, z) -> np.ndarray:
        if not self.eqs:
            return np.zeros(0)
        vals = self.eq_real.value(self.real_coords(z))
        mags = self.eq_mag.magnitudes(np.abs(z))
        if self.complex:
            mags = np.repeat(mags, 2)
        return vals / np.maximum(mags, 1e-300)

    @property
    def nrows(self) -> int:
        return 0 if self.rank_real is None else self.rank_real.k

    def scaled_jacobian(self, z) -> np.ndarray:
        absz = np.abs(z)
        rows = self.rank_mag.magnitudes(absz)
        cols = absz
        if self.complex:
            rows, cols = np.repeat(rows, 2), np.repeat(cols, 2)
        J = self.rank_real.jacobian(self.real_coords(z))
        return J / np.maximum(rows, 1e-300)[:, None] * cols[None, :]

    def rank_residual(self, z) -> float | None:
        if self.rank_real is None:
            return None
        M = self.scaled_jacobian(z)
        return float(np.linalg.svd(M, compute_uv=False)[min(M.shape) - 1])

    def residual(self, params, signs) -> np.ndarray:
        """Smooth residual in ``(point params, v)``: the equations, then
        ``M^T v`` and ``|v|^2 - 1`` for the scaled Jacobian ``M``."""
        z = self.point(params[: self.nparams], signs)
        parts = [self.sys_residual_vector(z)]
        if self.rank_real is not None:
            v = params[self.nparams:]
            parts.append(self.scaled_jacobian(z).T @ v)
            parts.append([v @ v - 1.0])
        return np.concatenate(parts)

    def initial_covector(self, params, signs) -> np.ndarray:
        if self.rank_real is None:
            return np.zeros(0)
        M = self.scaled_jacobian(self.point(params, signs))
        u, _, _ = np.linalg.svd(M)
        return u[:, -1]

    def aux_values(self, z) -> tuple:
        if self.val_real is None:
            return ()
        vals = self.val_real.value(self.real_coords(z))
        if self.complex:
            return tuple(complex(a, b) for a, b in zip(vals[0::2], vals[1::2]))
        return tuple(float(v) for v in vals)

    # high precision check ----------------------------------------------------
    def mp_residuals(self, z, dps: int) -> tuple[float, float | None]:
        with mpmath.workdps(dps):
            x = [mpmath.mpf(float(v)) for v in self.real_coords(z)]
            absz = [mpmath.sqrt(x[2 * i] ** 2 + x[2 * i + 1] ** 2) for i in range(self.n)] if self.complex else [abs(v) for v in x]
            sys_res = mpmath.mpf(0)
            if self.eqs:
                vals = [_mp_eval(p, x) for p in self.eq_real.polys]
                for j, f in enumerate(self.eqs):
                    mag = _mp_magnitude(f, absz)
                    val = mpmath.sqrt(vals[2 * j] ** 2 + vals[2 * j + 1] ** 2) if self.complex else abs(vals[j])
                    sys_res = max(sys_res, val / mag)
            rank_res = None
            if self.rank_real is not None:
                width = 2 if self.complex else 1
                mags = [_mp_magnitude(f, absz) for f in self.rank_polys]
                rows = [
                    [
                        _mp_eval(raw_derivative(p, i), x) / mags[r // width] * absz[i // width]
                        for i in range(self.nreal)
                    ]
                    for r, p in enumerate(self.rank_real.polys)
                ]
                s = mpmath.svd_r(mpmath.matrix(rows), compute_uv=False)
                rank_res = float(min(abs(s[i]) for i in range(len(rows))))
            return float(sys_res), rank_res


def _mp_magnitude(f: Polynomial, absz) -> mpmath.mpf:
    total = mpmath.mpf(0)
    for (nu, mu), c in f.terms.items():
        # |c| exactly: sqrt(re^2 + im^2) from the rationals
        mod = mpmath.sqrt(mpmath.mpf(c.re.numerator) ** 2 / c.re.denominator**2 + mpmath.mpf(c.im.numerator) ** 2 / c.im.denominator**2)
        total += mod * _mp_monomial(np.add(nu, mu), absz)
    return total


def _mp_monomial(e, vals):
    out = mpmath.mpf(1)
    for v, k in zip(vals, e):
        if k:
            out *= v ** int(k)
    return out


def _mp_eval(raw: dict, x) -> mpmath.mpf:
    total = mpmath.mpf(0)
    for (nu, _), c in raw.items():
        total += mpmath.mpf(c.re.numerator) / c.re.denominator * _mp_monomial(nu, x)
    return total


def evaluate_point(system: TorusSystem, z, cfg: TorusConfig) -> TorusPoint:
    """Residuals of a candidate point, with the confirmation decision."""
    z = np.asarray(z, dtype=complex if system.complex else float)
    sys_res = float(np.max(system.sys_residuals(z), initial=0.0))
    rank_res = system.rank_residual(z)
    in_torus = bool(np.min(np.abs(z)) >= cfg.delta_torus)
    ok = in_torus and sys_res <= cfg.eps_sys and (rank_res is None or rank_res <= cfg.eps_rank)
    mp_sys = mp_rank = None
    if ok:
        mp_sys, mp_rank = system.mp_residuals(z, cfg.confirm_dps)
        ok = mp_sys < 10 * cfg.eps_sys and (mp_rank is None or mp_rank < 10 * cfg.eps_rank)
    coords = tuple(complex(v) for v in z) if system.complex else tuple(float(v) for v in z)
    return TorusPoint(coords, sys_res, rank_res, ok, mp_sys, mp_rank, system.aux_values(z))


def _starts(system: TorusSystem, cfg: TorusConfig, key: Sequence[int]):
    n = system.n
    for r in range(cfg.restarts):
        rng = task_rng(*key, r)
        scale = 0.1 if r < 4 else 1.0
        params = rng.normal(0.0, scale, size=system.nparams)
        if system.complex:
            params[n - 1:] = rng.uniform(-np.pi, np.pi, size=n) if r else 0.0
            signs = None
        else:
            # sweep sign patterns first, then random ones
            pattern = r if r < 2**n else int(rng.integers(0, 2**n))
            signs = np.array([-1.0 if pattern >> i & 1 else 1.0 for i in range(n)])
        yield np.clip(params, -LOG_BOUND, LOG_BOUND) if not system.complex else params, signs


def torus_search(
    system: TorusSystem,
    cfg: TorusConfig,
    key: Sequence[int],
    *,
    first_only: bool = True,
) -> list[TorusPoint]:
    """Multistart least squares; returns confirmed points (deduplicated)."""
    found: list[TorusPoint] = []
    if system.nparams == 0:
        signs_list = [np.array([s]) for s in (1.0, -1.0)] if not system.complex else [None]
        for signs in signs_list:
            tp = evaluate_point(system, system.point(np.zeros(0), signs), cfg)
            if tp.confirmed:
                found.append(tp)
                if first_only:
                    break
        return found
    width = system.nparams + system.nrows
    lo = np.full(width, -LOG_BOUND)
    hi = np.full(width, LOG_BOUND)
    if system.complex:
        lo[system.n - 1: system.nparams] = -4 * np.pi
        hi[system.n - 1: system.nparams] = 4 * np.pi
    lo[system.nparams:], hi[system.nparams:] = -2.0, 2.0
    for params, signs in _starts(system, cfg, key):
        params = np.concatenate([params, system.initial_covector(params, signs)])
        params = np.clip(params, lo + 1e-9, hi - 1e-9)
        try:
            sol = least_squares(
                system.residual, params, args=(signs,), bounds=(lo, hi),
                xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=cfg.max_nfev,
            )
        except (ValueError, np.linalg.LinAlgError):
            continue
        tp = evaluate_point(system, system.point(sol.x[: system.nparams], signs), cfg)
        if not tp.confirmed:
            continue
        if any(_close(tp, other) for other in found):
            continue
        found.append(tp)
        if first_only:
            break
    return found


def _close(a: TorusPoint, b: TorusPoint, tol: float = 1e-6) -> bool:
    if a.values or b.values:
        return np.allclose(np.array(a.values, dtype=complex), np.array(b.values, dtype=complex), atol=tol)
    return np.allclose(np.array(a.point, dtype=complex), np.array(b.point, dtype=complex), atol=tol)
