"""Pipeline orchestration and the JSON / text report.

Every computed number is written as ``{"value": ..., "provenance": p}``
with ``p`` one of ``exact``, ``float`` or ``empirical``.  Exact rationals
are strings ``"p/q"``; floats are rounded to :data:`FLOAT_DIGITS`
significant digits so repeated runs are byte-identical.  Configuration
values count as exact inputs.  Combinatorial labels (exponents, rays,
component indices, counts, seeds) are written as bare integers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from . import __version__
from .bounds import BoundReport, InvertibilityVerdict, invertibility_verdict, kinf_bound
from .fan import DualSubdivision, dual_subdivision
from .nondegeneracy import ComparisonReport, NDResult, Verdict, compare_definitions, export_undecided, is_nondegenerate_at_infinity
from .numeric import SearchConfig, SearchResult, cross_check_inclusions, search_asymptotic_values
from .poly import QI, PolyMap, Setting, format_terms, is_convenient, realify
from .polytope import faces_at_infinity
from .torus import TorusConfig, TorusPoint

SCHEMA = "newtoninf.report/1"
FLOAT_DIGITS = 12


@dataclass(frozen=True)
class Options:
    check_nd: bool = False
    bound: bool = False
    compare: bool = False
    numeric: bool = False
    export_dir: str | None = None
    seed: int = 0
    torus: TorusConfig = TorusConfig()
    search: SearchConfig = SearchConfig()


# ---------------------------------------------------------------------------
# value encoding

def _round(x: float) -> float | str:
    if x != x:
        return "nan"
    if x in (float("inf"), float("-inf")):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{FLOAT_DIGITS}g}")


def exact(value) -> dict:
    if isinstance(value, QI):
        return {"value": str(value), "provenance": "exact"}
    if isinstance(value, Fraction):
        text = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        return {"value": text, "provenance": "exact"}
    return {"value": int(value), "provenance": "exact"}


def number(value, provenance: str = "float") -> dict | None:
    if value is None:
        return None
    if isinstance(value, complex):
        return {"value": {"re": _round(value.real), "im": _round(value.imag)}, "provenance": provenance}
    return {"value": _round(float(value)), "provenance": provenance}


def vector(values, provenance: str = "float") -> list:
    return [number(v, provenance) for v in values]


# ---------------------------------------------------------------------------
# sections

def _input_section(F: PolyMap, path: str | None) -> dict:
    return {
        "path": path,
        "canonical": F.canonical_text(),
        "setting": F.setting.value,
        "n": F.n,
        "k": F.k,
        "variables": list(F.variables),
        "components": list(F.names),
        "translated_constants": {name: exact(c) for name, c in sorted(F.shifts.items())},
    }


def _polyhedra_section(F: PolyMap, S: DualSubdivision) -> list:
    out = []
    for name, P in zip(F.names, S.polyhedra):
        out.append({
            "component": name,
            "dim": P.dim,
            "vertices": [list(v) for v in P.vertices],
            "faces": len(P.faces),
            "faces_at_infinity": len(faces_at_infinity(P)),
        })
    return out


def _cones_section(S: DualSubdivision) -> dict:
    classes = []
    for cid, (key, members) in enumerate(S.tuple_classes.items()):
        cone = S.cones[members[0]]
        classes.append({
            "id": cid,
            "rays": [list(r) for r in cone.rays],
            "direction": list(cone.interior_rep),
            "faces": [[list(p) for p in f.points] for f in cone.face_tuple],
            "d": [exact(d) for d in cone.d_supp],
            "I": list(cone.I_sigma),
            "J": list(cone.J_sigma),
            "I_c": list(cone.I_sigma_c),
            "exceptional": cone.exceptional,
            "atypical": cone.atypical,
            "cones": len(members),
        })
    return {"cones": len(S.cones), "tuple_classes": classes}


def _point(tp: TorusPoint | None) -> dict | None:
    if tp is None:
        return None
    return {
        "point": vector(tp.point),
        "sys_residual": number(tp.sys_residual),
        "rank_residual": number(tp.rank_residual),
        "confirmed": tp.confirmed,
        "hp_sys_residual": number(tp.mp_sys_residual),
        "hp_rank_residual": number(tp.mp_rank_residual),
    }


def _verdict(v: Verdict) -> dict:
    return {
        "tag": v.tag.value,
        "certificate": v.certificate,
        "witness": _point(v.witness),
        "strategies": list(v.strategies),
        "note": v.note,
    }


def _nd_section(F: PolyMap, result: NDResult) -> dict:
    return {
        "verdict": _verdict(result.verdict),
        "cones": [
            {
                "tuple_class": c.cone_id,
                "direction": list(c.cone.interior_rep),
                "components": list(c.indices),
                "system": [f.format(F.variables) for f in c.system],
                "question": "singular zero on the torus" if c.singular else "zero on the torus",
                "verdict": _verdict(c.verdict),
                "strategy_log": list(c.strategy_log),
            }
            for c in result.checks
        ],
    }


def _comparison_section(G: PolyMap, cmp: ComparisonReport, realified: bool) -> dict:
    return {
        "map": "realified" if realified else "input",
        "torus_condition": _nd_section(G, cmp.torus),
        "all_components_condition": _nd_section(G, cmp.full),
        "agree": cmp.agree,
        "gap": cmp.gap,
        "euler_transfers": [
            {
                "tuple_class": cid,
                "px": vector(t.px),
                "residuals": vector(t.residuals),
                "relative_residuals": vector(t.relative),
                "kernel_residual": number(t.kernel_residual),
            }
            for cid, t in cmp.transfers
        ],
    }


def _bound_section(F: PolyMap, bound: BoundReport) -> dict:
    return {
        "N": {
            "pieces": [list(p) for p in bound.n_set.pieces],
            "description": bound.n_set.describe(),
            "strict": bound.n_set.strict,
            "strict_witness": bound.n_set.strict_witness,
        },
        "A": [
            {
                "tuple_class": d.cone_id,
                "direction": list(d.cone.interior_rep),
                "I": list(d.I_sigma),
                "I_c": list(d.I_c),
                "status": d.status,
                "exported": d.exported,
                "samples": [
                    {
                        "value": vector(s.value, "empirical"),
                        "point": vector(s.point, "empirical"),
                        "sys_residual": number(s.sys_residual, "empirical"),
                        "rank_residual": number(s.rank_residual, "empirical"),
                    }
                    for s in d.disc_samples
                ],
            }
            for d in bound.a_set
        ],
        "kinf_bound_empty": bound.kinf_bound_empty,
        "bound_established": bound.bound_established,
        "narrative": list(bound.narrative),
        "warnings": list(bound.warnings),
    }


def _invertibility_section(F: PolyMap, inv: InvertibilityVerdict) -> dict:
    names = list(F.variables) if F.setting is Setting.REAL else list(realify(F).variables)
    det = None
    if inv.determinant is not None:
        det = {"text": format_terms(inv.determinant, names), "provenance": "exact"}
    return {
        "tag": inv.tag.value,
        "certificate": inv.certificate,
        "evidence": [{"fact": k, "value": v} for k, v in inv.evidence],
        "determinant": det,
        "singular_witness": vector(inv.singular_witness) if inv.singular_witness else None,
    }


def _numeric_section(res: SearchResult, cross) -> dict:
    cfg = res.config
    return {
        "config": {
            "radii": vector(cfg.schedule, "exact"),
            "restarts": cfg.restarts,
            "tol": number(cfg.kinf_tol, "exact"),
            "cluster_radius": number(cfg.cluster_radius, "exact"),
            "milnor_tol": number(cfg.milnor_tol, "exact"),
            "seed": cfg.seed,
        },
        "s_search": res.s_search,
        "budget_exceeded": res.budget_exceeded,
        "samples_below_tol": len(res.samples),
        "candidates": [
            {
                "kind": c.kind,
                "center": vector(c.center, "empirical"),
                "evidence": [
                    {"radius": number(s.radius, "exact"), "objective": number(s.objective, "empirical"), "f_value": vector(s.f_value, "empirical")}
                    for s in c.evidence
                ],
            }
            for c in res.candidates
        ],
        "cross_check": None if cross is None else {
            "passed": cross.passed,
            "conditional": cross.conditional,
            "checks": [
                {"kind": c.candidate.kind, "target": c.target, "distance": number(c.distance, "empirical"), "ok": c.ok}
                for c in cross.checks
            ],
        },
        "label": "empirical evidence, not a certificate",
    }


# ---------------------------------------------------------------------------

@dataclass
class Analysis:
    F: PolyMap
    subdivision: DualSubdivision
    nd: NDResult | None = None
    comparison: ComparisonReport | None = None
    bound: BoundReport | None = None
    invertibility: InvertibilityVerdict | None = None
    search: SearchResult | None = None
    cross: Any = None
    exported: tuple[str, ...] = ()


def analyze(F: PolyMap, opts: Options) -> Analysis:
    """Run the pipeline stages requested in ``opts``."""
    S = dual_subdivision(F)
    out = Analysis(F, S)
    torus = opts.torus
    if opts.check_nd or opts.bound or opts.numeric:
        out.nd = is_nondegenerate_at_infinity(F, S, torus)
        if opts.export_dir:
            out.exported += tuple(export_undecided(F, out.nd, opts.export_dir))
    if opts.compare:
        G = F if F.setting is Setting.REAL else realify(F)
        out.comparison = compare_definitions(G, torus)
        if opts.export_dir:
            out.exported += tuple(export_undecided(G, out.comparison.full, opts.export_dir + "/all_components"))
    if opts.bound or opts.numeric:
        out.bound = kinf_bound(F, S, out.nd, torus, opts.export_dir)
        out.exported += tuple(d.exported for d in out.bound.a_set if d.exported)
    if opts.numeric:
        out.search = search_asymptotic_values(F, opts.search)
        out.cross = cross_check_inclusions(F, out.search.candidates, out.bound, opts.search.cluster_radius)
    if opts.bound and F.n == F.k:
        out.invertibility = invertibility_verdict(F, out.search, out.nd, opts.search)
    elif opts.bound:
        out.invertibility = invertibility_verdict(F)
    return out


def build_report(a: Analysis, path: str | None, opts: Options) -> dict:
    F = a.F
    rep: dict[str, Any] = {
        "schema": SCHEMA,
        "tool": {"name": "newtoninf", "version": __version__},
        "seed": opts.seed,
        "input": _input_section(F, path),
        "convenience": [{"component": n, "convenient": is_convenient(f)} for n, f in zip(F.names, F.components)],
        "effectivity": [{"variable": v, "effective": e} for v, e in zip(F.variables, F.effectivity)],
        "polyhedra": _polyhedra_section(F, a.subdivision),
        "fan": _cones_section(a.subdivision),
        "tolerances": {
            "eps_sys": number(opts.torus.eps_sys, "exact"),
            "eps_rank": number(opts.torus.eps_rank, "exact"),
            "delta_torus": number(opts.torus.delta_torus, "exact"),
            "witness_restarts": opts.torus.restarts,
        },
    }
    if F.setting is not Setting.REAL:
        R = realify(F)
        rep["realified"] = {
            "canonical": R.canonical_text(),
            "convenience": [{"component": n, "convenient": is_convenient(f)} for n, f in zip(R.names, R.components)],
        }
    if a.nd is not None:
        rep["nondegeneracy"] = _nd_section(F, a.nd)
        rep["nondegeneracy"]["sing_convention"] = (
            "realified Jacobian rank" if F.setting is Setting.MIXED else "Jacobian rank"
        )
    if a.comparison is not None:
        rep["comparison"] = _comparison_section(
            F if F.setting is Setting.REAL else realify(F), a.comparison, F.setting is not Setting.REAL
        )
    if a.bound is not None:
        rep.update(_bound_section(F, a.bound))
    if a.invertibility is not None:
        rep["invertibility"] = _invertibility_section(F, a.invertibility)
    if a.search is not None:
        rep["numeric"] = _numeric_section(a.search, a.cross)
    if opts.export_dir:
        rep["exported_systems"] = sorted(a.exported)
    rep["summary"] = summary_lines(a)
    return rep


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def _witness_text(tp: TorusPoint | None) -> str:
    if tp is None:
        return ""
    coords = ", ".join(f"{v:.6g}" if not isinstance(v, complex) else f"{v.real:.6g}{v.imag:+.6g}i" for v in tp.point)
    return f" with witness ({coords})"


def summary_lines(a: Analysis) -> list[str]:
    F = a.F
    lines = [f"map: {F.setting.value}, n = {F.n}, k = {F.k}"]
    conv = [is_convenient(f) for f in F.components]
    lines.append("convenient: " + ", ".join(f"{n} {'yes' if c else 'no'}" for n, c in zip(F.names, conv)))
    if F.setting is not Setting.REAL:
        R = realify(F)
        rconv = [is_convenient(f) for f in R.components]
        if not any(rconv):
            lines.append("realified map: no component is convenient")
    if not F.is_effective:
        lines.append("warning: F is not effective")
    lines.append(f"dual subdivision: {len(a.subdivision.cones)} cones, {len(a.subdivision.tuple_classes)} face tuples")
    if a.nd is not None:
        lines.append(
            f"non-degenerate at infinity (torus face-system condition): {a.nd.tag.value}{_witness_text(a.nd.verdict.witness)}"
        )
    if a.comparison is not None:
        c = a.comparison
        lines.append(f"all-components real condition: {c.full.tag.value}{_witness_text(c.full.verdict.witness)}")
        if c.gap:
            conv_text = "F is convenient" if all(conv) else "F is not convenient"
            lines.append(
                f"{conv_text}; non-degenerate at infinity (torus face-system condition) but degenerate "
                f"under the all-components real condition, witness{_witness_text(c.full.verdict.witness)[len(' with witness'):]}"
            )
        elif c.agree:
            lines.append("both conditions agree")
        for cid, t in c.transfers:
            lines.append(f"Euler relation at the witness of face tuple {cid}: px is a kernel vector (residual {t.kernel_residual:.3g})")
    if a.bound is not None:
        lines += a.bound.narrative
        lines += [f"warning: {w}" for w in a.bound.warnings]
    if a.invertibility is not None:
        inv = a.invertibility
        sing = inv.fact("sing")
        if sing:
            lines.append(f"Sing F: {sing}")
        detail = {
            "CertifiedDiffeo": "constant nonzero Jacobian determinant, convenient and non-degenerate: global diffeomorphism",
            "ConditionalDiffeo": "Sing F empty and no asymptotic critical value found: diffeomorphism if K_inf(F) is empty (empirical, not a certificate)",
            "SingularityFound": "the Jacobian determinant vanishes somewhere",
            "Inconclusive": "no conclusion",
            "NotApplicable": "needs n = k",
        }[inv.tag.value]
        lines.append(f"invertibility: {inv.tag.value} ({detail})")
    if a.search is not None:
        kinf = [c for c in a.search.candidates if c.kind == "Kinf"]
        lines.append(f"numeric K_inf search: {len(kinf)} candidate(s) (empirical)")
        if a.cross is not None:
            if a.cross.passed:
                lines.append("inclusion cross-check: pass")
            elif a.cross.conditional:
                lines.append("inclusion cross-check: a candidate lies outside N(F) u A(F); the inclusion is not established for this map")
            else:
                lines.append("inclusion cross-check: FAIL, a candidate lies outside N(F) u A(F)")
    return lines
