"""Shared fixtures: the bundled map files and small random-map generators."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from newtoninf import PolyMap, Polynomial, Setting, parse_polynomial_map
from newtoninf.poly import QI

MAPS = Path(__file__).resolve().parent.parent / "maps"
FIXTURES = ["ex53", "ex54", "ex55", "xx2y", "sq", "x2", "circle"]
COEFFS = (-2, -1, 1, 2)


def load(name: str) -> PolyMap:
    return parse_polynomial_map((MAPS / f"{name}.map").read_text())


def real_poly(terms: dict, n: int = 2) -> Polynomial:
    """Real polynomial from ``{exponent: int}``."""
    zero = (0,) * n
    return Polynomial(Setting.REAL, n, {(e, zero): QI(c) for e, c in terms.items() if c})


def convenient_terms(rng: np.random.Generator, n: int = 2, extra: int = 2) -> dict:
    """Pure powers of every variable plus up to ``extra`` mixed monomials."""
    out = {}
    for i in range(n):
        e = [0] * n
        e[i] = int(rng.integers(1, 4))
        out[tuple(e)] = int(rng.choice(COEFFS))
    for _ in range(int(rng.integers(0, extra + 1))):
        e = tuple(int(v) for v in rng.integers(1, 3, size=n))
        out[e] = int(rng.choice(COEFFS))
    return out


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, ca in p.items():
        for b, cb in q.items():
            e = tuple(x + y for x, y in zip(a, b))
            out[e] = out.get(e, 0) + ca * cb
    return out


def shared_factor_pair(rng: np.random.Generator) -> list[dict]:
    """Two convenient quadratics whose top-degree parts share the factor
    ``x - s*y``; their common top face has a singular torus zero at (s, 1)."""
    s = int(rng.choice(COEFFS))
    common = {(1, 0): 1, (0, 1): -s}
    out = []
    for _ in range(2):
        top = _mul(common, {(1, 0): int(rng.choice(COEFFS)), (0, 1): int(rng.choice(COEFFS))})
        for e in ((1, 0), (0, 1)):
            top[e] = top.get(e, 0) + int(rng.choice((-1, 0, 1)))
        out.append(top)
    return out


@pytest.fixture(params=FIXTURES)
def fixture_map(request):
    return request.param, load(request.param)


# ---------------------------------------------------------------------------
# one line per acceptance criterion in the terminal summary

_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_c" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if report.when == "call" or report.outcome == "failed":
            if report.outcome == "failed" or name not in _ACCEPTANCE:
                _ACCEPTANCE[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split("_")[1][1:])):
        number = name.split("_")[1][1:]
        label = name.split("_", 2)[2].replace("_", " ")
        terminalreporter.write_line(f"criterion {number}: {_ACCEPTANCE[name]}  {label}")


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criterion")
