"""Exact sparse polynomials in the real, complex and mixed settings.

A term is stored as ``(nu, mu) -> coefficient`` where ``nu`` holds the
exponents of ``z`` and ``mu`` those of ``conj(z)``; ``mu`` is all-zero
outside the mixed setting.  Coefficients are Gaussian rationals
(:class:`QI`), with zero imaginary part in the real setting.

Numeric work goes through :class:`CompiledMap`, a float64 evaluator of a
real polynomial map together with its exact first and second partial
derivatives.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AlreadyReal,
    ConjInNonMixed,
    DimensionMismatch,
    EmptyPolynomial,
    InputError,
    NonzeroConstantTerm,
    PointOutsideSupport,
)

Exponent = tuple[int, ...]
Key = tuple[Exponent, Exponent]


class Setting(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    MIXED = "mixed"

    @property
    def is_real(self) -> bool:
        return self is Setting.REAL


@dataclass(frozen=True)
class QI:
    """Gaussian rational ``re + im*i`` with exact :class:`Fraction` parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value) -> "QI":
        if isinstance(value, QI):
            return value
        if isinstance(value, complex):
            raise TypeError("floating complex coefficients are not exact")
        return cls(Fraction(value))

    def __add__(self, other):
        o = QI.coerce(other)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-QI.coerce(other))

    def __rsub__(self, other):
        return QI.coerce(other) - self

    def __mul__(self, other):
        o = QI.coerce(other)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QI.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero coefficient")
        num = self * o.conjugate()
        return QI(num.re / den, num.im / den)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = QI.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return _frac_str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"({_frac_str(self.re)}{sign}{_imag_str(abs(self.im))})"

    def __repr__(self):
        return f"QI({self})"


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _imag_str(q: Fraction) -> str:
    if q == 1:
        return "i"
    if q == -1:
        return "-i"
    return f"{_frac_str(q)}*i"


ONE = QI(1)
I_UNIT = QI(0, 1)


# ---------------------------------------------------------------------------
# raw term dictionaries: {(nu, mu): QI}; constants allowed, used internally

def raw_add(a: Mapping[Key, QI], b: Mapping[Key, QI], scale=ONE) -> dict[Key, QI]:
    out = dict(a)
    for key, c in b.items():
        v = out.get(key, QI(0)) + scale * c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return out


def raw_mul(a: Mapping[Key, QI], b: Mapping[Key, QI]) -> dict[Key, QI]:
    out: dict[Key, QI] = {}
    for (n1, m1), c1 in a.items():
        for (n2, m2), c2 in b.items():
            key = (tuple(x + y for x, y in zip(n1, n2)), tuple(x + y for x, y in zip(m1, m2)))
            v = out.get(key, QI(0)) + c1 * c2
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def raw_pow(a: Mapping[Key, QI], e: int, nvars: int) -> dict[Key, QI]:
    zero = (0,) * nvars
    result: dict[Key, QI] = {(zero, zero): ONE}
    base = dict(a)
    while e:
        if e & 1:
            result = raw_mul(result, base)
        e >>= 1
        if e:
            base = raw_mul(base, base)
    return result


def raw_constant(value, nvars: int) -> dict[Key, QI]:
    c = QI.coerce(value)
    zero = (0,) * nvars
    return {(zero, zero): c} if c else {}


def raw_variable(i: int, nvars: int, conj: bool = False) -> dict[Key, QI]:
    e = tuple(1 if j == i else 0 for j in range(nvars))
    zero = (0,) * nvars
    return {(zero, e) if conj else (e, zero): ONE}


def raw_derivative(a: Mapping[Key, QI], i: int) -> dict[Key, QI]:
    """Partial derivative in the holomorphic variable ``i`` (real polys: d/dx_i)."""
    out: dict[Key, QI] = {}
    for (nu, mu), c in a.items():
        if nu[i]:
            nnu = nu[:i] + (nu[i] - 1,) + nu[i + 1:]
            out[(nnu, mu)] = c * nu[i]
    return out


def raw_determinant(matrix: Sequence[Sequence[Mapping[Key, QI]]], nvars: int) -> dict[Key, QI]:
    """Exact determinant of a square matrix of polynomials (Laplace expansion
    over column subsets, memoised)."""
    size = len(matrix)
    if size == 0:
        return raw_constant(1, nvars)
    # minors[mask] = det of rows 0..popcount(mask)-1 restricted to columns in mask
    minors: dict[int, dict[Key, QI]] = {0: raw_constant(1, nvars)}
    for row in range(size):
        nxt: dict[int, dict[Key, QI]] = {}
        for mask, minor in minors.items():
            if not minor:
                continue
            for col in range(size):
                if mask >> col & 1 or not matrix[row][col]:
                    continue
                # sign: number of chosen columns to the right of col
                sign = -1 if bin(mask >> (col + 1)).count("1") % 2 else 1
                term = raw_mul(minor, matrix[row][col])
                new = mask | 1 << col
                nxt[new] = raw_add(nxt.get(new, {}), term, QI(sign))
        minors = nxt
    return minors.get((1 << size) - 1, {})


def raw_is_constant(a: Mapping[Key, QI]) -> bool:
    return all(not any(nu) and not any(mu) for nu, mu in a)


# ---------------------------------------------------------------------------

class Polynomial:
    """A polynomial with ``f(0) = 0`` in ``n`` variables.

    ``terms`` maps ``(nu, mu)`` to a nonzero :class:`QI`.  The zero
    polynomial (no terms) is allowed; it shows up as the restriction of f
    to the face ``{0}``.
    """

    def __init__(self, setting: Setting, n: int, terms: Mapping[Key, object]):
        self.setting = Setting(setting)
        self.n = int(n)
        clean: dict[Key, QI] = {}
        for (nu, mu), c in terms.items():
            nu, mu = tuple(int(v) for v in nu), tuple(int(v) for v in mu)
            if len(nu) != self.n or len(mu) != self.n:
                raise DimensionMismatch(f"exponent of length {len(nu)} in a polynomial of {self.n} variables")
            if min(nu + mu, default=0) < 0:
                raise InputError("negative exponent")
            c = QI.coerce(c)
            if not c:
                continue
            if not any(nu) and not any(mu):
                raise NonzeroConstantTerm("<polynomial>", c)
            if any(mu) and self.setting is not Setting.MIXED:
                raise ConjInNonMixed("conjugated variables require the mixed setting")
            if self.setting is Setting.REAL and not c.is_real:
                raise InputError("complex coefficient in the real setting")
            clean[(nu, mu)] = c
        order = sorted(clean, reverse=True)
        self._terms = MappingProxyType({key: clean[key] for key in order})

    @property
    def terms(self) -> Mapping[Key, QI]:
        return self._terms

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.setting, self.n, dict(self._terms)) == (other.setting, other.n, dict(other._terms))

    def __hash__(self):
        return hash((self.setting, self.n, tuple(self._terms.items())))

    def __repr__(self):
        return f"Polynomial({self.setting.value}, n={self.n}, {len(self)} terms)"

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def combined(self, key: Key) -> Exponent:
        nu, mu = key
        return tuple(a + b for a, b in zip(nu, mu))

    def raw(self) -> dict[Key, QI]:
        return dict(self._terms)

    def evaluate(self, point) -> complex:
        """Evaluate at a numeric point (complex arithmetic; real for the real setting)."""
        z = np.asarray(point, dtype=complex)
        if z.shape != (self.n,):
            raise DimensionMismatch(f"point of shape {z.shape} for {self.n} variables")
        zc = np.conj(z)
        total = 0j
        for (nu, mu), c in self._terms.items():
            total += complex(c) * np.prod(z ** np.array(nu)) * np.prod(zc ** np.array(mu))
        return total

    def term_magnitude(self, point) -> float:
        """Sum of absolute values of the terms at ``point``; the natural scale
        for relative residuals."""
        z = np.abs(np.asarray(point, dtype=complex))
        return float(sum(abs(c) * np.prod(z ** np.add(nu, mu)) for (nu, mu), c in self._terms.items()))

    def format(self, names: Sequence[str]) -> str:
        return format_terms(self._terms, names)


def _monomial_str(nu: Exponent, mu: Exponent, names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, nu):
        if e:
            parts.append(name if e == 1 else f"{name}^{e}")
    for name, e in zip(names, mu):
        if e:
            parts.append(f"conj({name})" if e == 1 else f"conj({name})^{e}")
    return "*".join(parts)


def format_terms(terms: Mapping[Key, QI], names: Sequence[str]) -> str:
    if not terms:
        return "0"
    out = []
    for idx, key in enumerate(sorted(terms, reverse=True)):
        c = terms[key]
        mono = _monomial_str(*key, names)
        negative = (c.im == 0 and c.re < 0) or (c.re == 0 and c.im < 0)
        mag = -c if negative else c
        if not mono:
            body = str(mag)
        elif mag == ONE:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if idx == 0:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


class PolyMap:
    """An ordered tuple of ``k`` polynomials over the same ``n`` variables."""

    def __init__(
        self,
        components: Sequence[Polynomial],
        variables: Sequence[str] | None = None,
        names: Sequence[str] | None = None,
        shifts: Mapping[str, QI] | None = None,
    ):
        components = tuple(components)
        if not components:
            raise InputError("a map needs at least one component")
        setting, n = components[0].setting, components[0].n
        for f in components:
            if f.setting is not setting or f.n != n:
                raise InputError("components must share setting and variable count")
        if len(components) > n:
            raise InputError(f"k = {len(components)} components exceed n = {n} variables")
        self.components = components
        self.setting = setting
        self.n = n
        self.k = len(components)
        self.variables = tuple(variables) if variables is not None else tuple(f"x{i + 1}" for i in range(n))
        self.names = tuple(names) if names is not None else tuple(f"f{j + 1}" for j in range(self.k))
        # constants subtracted at parse time when translation was requested
        self.shifts = dict(shifts or {})
        if len(self.variables) != n or len(self.names) != self.k:
            raise DimensionMismatch("variable/component name count mismatch")

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, j):
        return self.components[j]

    def __len__(self):
        return self.k

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.components == other.components and self.variables == other.variables

    def __hash__(self):
        return hash((self.components, self.variables))

    def __repr__(self):
        return f"PolyMap({self.setting.value}, n={self.n}, k={self.k})"

    @cached_property
    def effectivity(self) -> tuple[bool, ...]:
        return effective_variables(self)

    @property
    def is_effective(self) -> bool:
        return all(self.effectivity)

    def canonical_text(self) -> str:
        lines = [f"setting: {self.setting.value}", "vars: " + " ".join(self.variables), "map:"]
        for name, f in zip(self.names, self.components):
            lines.append(f"{name} = {f.format(self.variables)}")
        return "\n".join(lines) + "\n"

    def evaluate(self, point) -> np.ndarray:
        return np.array([f.evaluate(point) for f in self.components])


# ---------------------------------------------------------------------------
# operations

def support(f: Polynomial) -> frozenset[Exponent]:
    """Exponents of the nonzero terms; in the mixed setting the sums nu + mu."""
    return frozenset(f.combined(key) for key in f.terms)


def is_convenient(f: Polynomial) -> bool:
    if f.is_zero:
        raise EmptyPolynomial("convenience is undefined for the zero polynomial")
    supp = support(f)
    for i in range(f.n):
        if not any(v[i] > 0 and sum(v) == v[i] for v in supp):
            return False
    return True


def effective_variables(F: PolyMap) -> tuple[bool, ...]:
    flags = [False] * F.n
    for f in F.components:
        for v in support(f):
            for i, e in enumerate(v):
                if e > 0:
                    flags[i] = True
    return tuple(flags)


def face_restriction(f: Polynomial, face_points: Iterable[Exponent]) -> Polynomial:
    """Keep the terms whose (combined) exponent lies in ``face_points``.

    The origin may be listed (it belongs to every slice of a face through
    0) and is ignored.
    """
    pts = {tuple(p) for p in face_points if any(p)}
    supp = support(f)
    stray = pts - supp
    if stray:
        raise PointOutsideSupport(f"points not in the support: {sorted(stray)}")
    return Polynomial(f.setting, f.n, {key: c for key, c in f.terms.items() if f.combined(key) in pts})


def project_variables(F: PolyMap, keep: Sequence[int]) -> PolyMap:
    """Drop every variable not listed in ``keep`` (they must not occur)."""
    keep = list(keep)
    comps = []
    for f in F.components:
        terms = {}
        for (nu, mu), c in f.terms.items():
            if any(nu[i] or mu[i] for i in range(F.n) if i not in keep):
                raise InputError("cannot project away a variable that occurs")
            terms[(tuple(nu[i] for i in keep), tuple(mu[i] for i in keep))] = c
        comps.append(Polynomial(F.setting, len(keep), terms))
    return PolyMap(comps, [F.variables[i] for i in keep], F.names)


def realify(F: PolyMap) -> PolyMap:
    """Underlying real map of a complex or mixed map.

    Variables are interleaved ``(x1, y1, ..., xn, yn)`` with
    ``z_j = x_j + i*y_j``; components are ``(g1, h1, ..., gk, hk)`` with
    ``f_l = g_l + i*h_l``.
    """
    if F.setting is Setting.REAL:
        raise AlreadyReal("the map is already real")
    m = 2 * F.n
    lin_z, lin_zb = [], []
    for j in range(F.n):
        x, y = raw_variable(2 * j, m), raw_variable(2 * j + 1, m)
        lin_z.append(raw_add(x, y, I_UNIT))
        lin_zb.append(raw_add(x, y, -I_UNIT))
    comps, names = [], []
    for name, f in zip(F.names, F.components):
        total: dict[Key, QI] = {}
        for (nu, mu), c in f.terms.items():
            term = raw_constant(c, m)
            for j in range(F.n):
                if nu[j]:
                    term = raw_mul(term, raw_pow(lin_z[j], nu[j], m))
                if mu[j]:
                    term = raw_mul(term, raw_pow(lin_zb[j], mu[j], m))
            total = raw_add(total, term)
        re = {k: QI(c.re) for k, c in total.items() if c.re}
        im = {k: QI(c.im) for k, c in total.items() if c.im}
        comps += [Polynomial(Setting.REAL, m, re), Polynomial(Setting.REAL, m, im)]
        names += [f"re_{name}", f"im_{name}"]
    variables = []
    for v in F.variables:
        variables += [f"re_{v}", f"im_{v}"]
    return PolyMap(comps, variables, names)


def realify_point(point) -> np.ndarray:
    z = np.asarray(point, dtype=complex)
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def complexify_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def real_form(F: PolyMap) -> PolyMap:
    return F if F.setting is Setting.REAL else realify(F)


def jacobian_determinant(F: PolyMap) -> dict[Key, QI]:
    """Exact determinant of the real Jacobian of a square map (realified first)."""
    R = real_form(F)
    if R.k != R.n:
        raise DimensionMismatch(f"Jacobian determinant needs a square map, got {R.k}x{R.n}")
    rows = [[raw_derivative(f.raw(), i) for i in range(R.n)] for f in R.components]
    return raw_determinant(rows, R.n)


class CompiledMap:
    """Float evaluator for a real polynomial map and its derivatives.

    Monomials of all components are stacked into one exponent matrix so a
    single vectorised power/product evaluates everything.
    """

    def __init__(self, polys: Sequence[Mapping[Key, QI]], nvars: int):
        self.nvars = nvars
        self.k = len(polys)
        self._raw = [dict(p) for p in polys]
        self._value = self._stack(self._raw)

    def _stack(self, polys):
        exps, coeffs, owner = [], [], []
        for idx, p in enumerate(polys):
            for (nu, _), c in p.items():
                exps.append(nu)
                coeffs.append(float(c.re))
                owner.append(idx)
        if not exps:
            return (np.zeros((0, self.nvars)), np.zeros(0), np.zeros(0, dtype=int), len(polys))
        return (np.array(exps, dtype=float), np.array(coeffs), np.array(owner), len(polys))

    @classmethod
    def from_map(cls, F: PolyMap) -> "CompiledMap":
        R = real_form(F)
        return cls([f.raw() for f in R.components], R.n)

    @cached_property
    def _jac(self):
        return self._stack([raw_derivative(p, i) for p in self._raw for i in range(self.nvars)])

    @cached_property
    def _hess(self):
        firsts = [raw_derivative(p, i) for p in self._raw for i in range(self.nvars)]
        return self._stack([raw_derivative(d, l) for d in firsts for l in range(self.nvars)])

    @staticmethod
    def _eval(stacked, x):
        exps, coeffs, owner, size = stacked
        out = np.zeros(size)
        if coeffs.size:
            vals = coeffs * np.prod(np.power(x, exps), axis=1)
            np.add.at(out, owner, vals)
        return out

    def value(self, x) -> np.ndarray:
        return self._eval(self._value, np.asarray(x, dtype=float))

    def jacobian(self, x) -> np.ndarray:
        return self._eval(self._jac, np.asarray(x, dtype=float)).reshape(self.k, self.nvars)

    def hessian(self, x) -> np.ndarray:
        """Second partials, shape (k, nvars, nvars)."""
        return self._eval(self._hess, np.asarray(x, dtype=float)).reshape(self.k, self.nvars, self.nvars)


def jacobian(F: PolyMap, x) -> np.ndarray:
    """Real Jacobian matrix of the (realified) map at ``x``.

    For complex and mixed maps ``x`` may be given as ``n`` complex
    coordinates or as ``2n`` interleaved real ones.
    """
    point = np.asarray(x)
    if F.setting is Setting.REAL:
        if point.shape != (F.n,):
            raise DimensionMismatch(f"point of shape {point.shape} for {F.n} variables")
        if np.iscomplexobj(point):
            if np.any(point.imag):
                raise DimensionMismatch("complex point for a real map")
            point = point.real
        real_point = point.astype(float)
    elif point.shape == (F.n,):
        real_point = realify_point(point)
    elif point.shape == (2 * F.n,) and not np.iscomplexobj(point):
        real_point = point.astype(float)
    else:
        raise DimensionMismatch(f"point of shape {point.shape} for {F.n} complex variables")
    return _compiled(F).jacobian(real_point)


_COMPILED_CACHE: dict[int, tuple[PolyMap, CompiledMap]] = {}


def _compiled(F: PolyMap) -> CompiledMap:
    hit = _COMPILED_CACHE.get(id(F))
    if hit is None or hit[0] is not F:
        if len(_COMPILED_CACHE) > 256:
            _COMPILED_CACHE.clear()
        hit = (F, CompiledMap.from_map(F))
        _COMPILED_CACHE[id(F)] = hit
    return hit[1]


def compiled(F: PolyMap) -> CompiledMap:
    """Cached :class:`CompiledMap` of ``F`` (realified if needed)."""
    return _compiled(F)


def random_polynomial(rng, n, setting=Setting.REAL, max_terms=4, max_degree=3, coeffs=(-2, -1, 1, 2)):
    """Random polynomial with small integer coefficients (used by tests)."""
    terms = {}
    zero = (0,) * n
    for _ in range(int(rng.integers(1, max_terms + 1))):
        while True:
            nu = tuple(int(v) for v in rng.integers(0, max_degree + 1, size=n))
            mu = tuple(int(v) for v in rng.integers(0, max_degree + 1, size=n)) if setting is Setting.MIXED else zero
            if any(nu) or any(mu):
                break
        c = int(rng.choice(coeffs))
        if setting is not Setting.REAL and rng.random() < 0.5:
            terms[(nu, mu)] = QI(c, int(rng.choice(coeffs)))
        else:
            terms[(nu, mu)] = QI(c)
    return Polynomial(setting, n, terms)
