"""Deterministic JSON reports for every analysis."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .design import DesignResult
from .globalobs import GlobalResult, IdealChain
from .local import RankResult
from .structural import StructuralResult, permutation_cycles

REPORT_SCHEMA = "hyperobs.report/1"


def frac(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def vec(vs) -> List[str]:
    return [frac(v) for v in vs]


def polys(ps) -> List[str]:
    return [str(p) for p in ps]


def chain_report(chain: IdealChain) -> Dict[str, Any]:
    levels = []
    for r, gens in enumerate(chain.level_generators):
        entry = {
            "level": r,
            "new_generators": polys(gens),
            "basis_size": len(chain.bases[r]),
            "basis_max_degree": max((g.total_degree() for g in chain.bases[r]), default=-1),
        }
        if r >= 1:
            entry["equal_to_previous"] = chain.equal_steps[r - 1]
        levels.append(entry)
    return {
        "N": chain.N,
        "stabilized": chain.stabilized,
        "truncated": chain.truncated,
        "levels": levels,
        "basis": polys(chain.bases[chain.N]),
    }


def global_report(res: GlobalResult) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "sigma": vec(res.sigma),
        "verdict": res.verdict.value,
        "reason": res.reason,
        "substituted_generators": polys(res.J_sigma),
        "substituted_basis": polys(res.J_sigma_basis),
    }
    if res.augmented:
        out["real_augmentation"] = polys(res.augmented)
    if res.witness is not None:
        out["witness"] = vec(res.witness)
    return out


def structural_report(res: StructuralResult) -> Dict[str, Any]:
    nontrivial = [p for p in res.automorphisms if list(p) != sorted(p)]
    return {
        "certified": res.certified,
        "reason": res.reason,
        "diameter": res.T,
        "layers": res.layers,
        "distances": {str(k): v for k, v in sorted(res.distances.items())},
        "unreached": res.unreached,
        "automorphism_count": len(res.automorphisms),
        "nontrivial_automorphisms": [{"map": list(p), "cycles": [list(c) for c in permutation_cycles(p)]} for p in nontrivial],
    }


def local_report(res: RankResult) -> Dict[str, Any]:
    return {
        "rank": res.rank,
        "n": res.n,
        "full_rank": res.full_rank,
        "mode": res.mode,
        "method": res.method,
        "points": [vec(p) for p in res.points],
        "ranks": res.ranks,
        "vanishing_conditions": res.vanishing,
    }


def design_report(res: DesignResult) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "success": res.success,
        "reason": res.reason,
        "designed_outputs": polys(res.outputs),
        "all_outputs": polys(res.all_outputs),
        "degree": res.degree,
        "relaxed_order": res.relaxed_order,
        "kernels": {str(d): polys(k) for d, k in sorted(res.kernels.items())},
        "log": res.log,
    }
    if res.verdict is not None:
        out["verdict"] = global_report(res.verdict)
    return out


def envelope(command: str, source: Optional[str], body: Dict[str, Any]) -> Dict[str, Any]:
    return {"schema": REPORT_SCHEMA, "command": command, "source": source, "result": body}


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def text_lines(report: Dict[str, Any], indent: int = 0) -> List[str]:
    """A plain indented rendering of a report for terminals."""
    pad = "  " * indent
    out = []
    for k, v in report.items():
        if isinstance(v, dict):
            out.append(f"{pad}{k}:")
            out.extend(text_lines(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            out.append(f"{pad}{k}:")
            for item in v:
                out.extend(text_lines(item, indent + 1))
                out.append(f"{pad}  --")
        elif isinstance(v, list):
            out.append(f"{pad}{k}: " + ("[]" if not v else ", ".join(map(str, v))))
        else:
            out.append(f"{pad}{k}: {v}")
    return out


