"""
JSON documents and CSV preambles for command output.

Every document carries ``schema_version``, ``config_hash``, ``seed`` and
``kind``. Field names only ever get added within a schema version.
"""

import math
from typing import Any

from .. import __version__
from ..config.options import OUTPUT
from ..config.run_config import RunConfig
from ..errors import UnsupportedClassification
from ..kms.census import AtomicState, KMSCensus, NonAtomicState
from ..kms.isotropy import IsotropyClass
from ..orbits.records import GrandOrbitClass, JuliaVerdict, OrbitRecord, PrePeriodic
from ..sphere.parser import format_point
from ..sphere.point import SpherePoint
from ..thermo.measures import DiscretizedMeasure
from ..thermo.pressure import BowenEstimate


def number(value: float | None) -> float | None:
    """Finite floats pass through; NaN and infinities become null."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def point(p: "SpherePoint | complex") -> str:
    return format_point(SpherePoint.of(p))


def header(config: RunConfig, kind: str) -> dict[str, Any]:
    return {
        "schema_version": OUTPUT.schema_version,
        "config_hash": config.config_hash,
        "seed": config.seed,
        "kind": kind,
        "software": f"{OUTPUT.software_tag} {__version__}",
        "config": config.canonical(),
    }


def preamble(config: RunConfig, kind: str, **extra) -> list[str]:
    """``key=value`` comment lines for CSV output."""
    lines = [
        f"schema_version={OUTPUT.schema_version}",
        f"config_hash={config.config_hash}",
        f"seed={config.seed}",
        f"kind={kind}",
    ]
    lines.extend(f"{key}={value}" for key, value in sorted(extra.items()))
    return lines


def orbit_document(record: OrbitRecord) -> dict[str, Any]:
    verdict = record.verdict
    data: dict[str, Any] = {
        "arithmetic": record.arithmetic.value,
        "ambiguous": record.ambiguous,
        "critical_indices": list(record.critical_indices),
    }
    if isinstance(verdict, PrePeriodic):
        data.update(
            verdict="pre-periodic",
            preperiod=verdict.preperiod,
            period=verdict.period,
            cycle_points=[point(p) for p in verdict.cycle],
            multiplier=number(verdict.multiplier),
            critical_cycle=verdict.critical_cycle,
        )
    else:
        data.update(
            verdict="attracted" if record.is_attracted else "no-cycle",
            horizon=verdict.horizon,
            attracted_to=[point(p) for p in verdict.attracted_to] if verdict.attracted_to else None,
        )
    return data


def isotropy_document(iso: IsotropyClass) -> dict[str, Any]:
    return {
        "label": iso.label,
        "tag": iso.tag.value,
        "orders": list(iso.orders),
        "order": iso.order,
        "inconclusive": iso.inconclusive,
    }


def julia_document(verdict: JuliaVerdict) -> dict[str, Any]:
    return {"location": verdict.location.value, "confidence": verdict.confidence.value, "method": verdict.method}


def class_document(grand: GrandOrbitClass) -> dict[str, Any]:
    return {
        "representative": point(grand.representative),
        "critical_members": [point(p) for p in grand.critical_members],
        "VAL_inf": grand.val_infinity,
        "finite": grand.finite,
        "orbit_members": [point(p) for p in grand.orbit_members] if grand.finite else None,
        "confidence": grand.confidence.value,
        "ambiguous": grand.ambiguous,
        "witnesses": [list(w) for w in grand.witnesses],
    }


def bowen_document(hd: BowenEstimate | None) -> dict[str, Any] | None:
    if hd is None:
        return None
    return {"value": number(hd.value), "error": number(hd.error), "rigorous": hd.rigorous, "depth": hd.depth}


def _state_document(state: AtomicState | NonAtomicState) -> dict[str, Any]:
    if isinstance(state, NonAtomicState):
        return {"type": "non-atomic", "provenance": state.provenance.value, "multiplicity": state.multiplicity}
    data = {"type": "atomic", "multiplicity": state.multiplicity, "class": class_document(state.grand_class)}
    if state.grand_class.finite:
        measure = state.measure
        data["atoms"] = [[point(z), number(w)] for z, w in zip(measure.points, measure.weights)]
    return data


def census_document(census: KMSCensus) -> dict[str, Any]:
    return {
        "beta": number(census.beta),
        "action": census.spec,
        "theorem": census.theorem,
        "total": census.total,
        "atomic_count": census.atomic_count,
        "nonatomic_count": census.nonatomic_count,
        "region": census.region.value,
        "assumptions": {
            "collet_eckmann": census.assumptions.collet_eckmann,
            "preperiodic_critical": census.assumptions.preperiodic_critical,
        },
        "confidence": census.confidence.value,
        "hd": bowen_document(census.hd),
        "states": [_state_document(s) for s in census.states],
    }


def unsupported_document(beta: float, error: UnsupportedClassification) -> dict[str, Any]:
    return {
        "beta": number(beta),
        "unsupported": str(error),
        "summable_orbits": [class_document(g) for g in error.summable_orbits],
    }


def cloud_preamble(config: RunConfig, measure: DiscretizedMeasure) -> list[str]:
    return preamble(
        config,
        "measure",
        provenance=measure.provenance.value,
        delta="none" if measure.delta is None else repr(measure.delta),
        depth=measure.depth,
        drift=repr(measure.drift),
        converged=int(measure.converged),
        discretization_error=repr(measure.discretization_error),
        excluded_branches=measure.excluded_branches,
    )

