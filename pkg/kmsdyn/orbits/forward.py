"""
Forward-orbit analysis: pre-periodicity, cycle type, VAL_inf and the
Collet-Eckmann envelope.

Maps with an exact form are iterated in Gaussian-rational arithmetic while the
coefficient sizes stay inside ``ORBIT.exact_bits``; the numeric scan takes over
from the first point that leaves the budget.
"""

import cmath
import math
from typing import Sequence

import numpy as np

from ..config.options import ORBIT, TOLERANCE
from ..errors import InconclusiveError, PreconditionError
from ..sphere.metric import Chordal, default_metric, derivative_norms
from ..sphere.point import SpherePoint, chordal_distance, chordal_distance_array
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger
from .records import (
    Arithmetic,
    CEEnvelope,
    Confidence,
    CycleClass,
    JuliaLocation,
    JuliaVerdict,
    NoCycleDetected,
    OrbitRecord,
    PrePeriodic,
)

logger = get_logger("kmsdyn_orbits")


def _exact_key(point: SpherePoint):
    if point.is_infinite:
        return "inf"
    return (point.exact.x, point.exact.y)


def cycle_multiplier(map: RationalMap, cycle: Sequence[SpherePoint]) -> float:
    """Product of spherical derivatives over the cycle; metric independent for cycles."""
    return float(np.prod([map.spherical_derivative(complex(p)) for p in cycle]))


def classify_multiplier(multiplier: float, critical: bool = False, neutral_tol: float | None = None) -> CycleClass:
    neutral_tol = TOLERANCE.neutral if neutral_tol is None else neutral_tol
    if critical or multiplier == 0.0:
        return CycleClass.SUPERATTRACTING
    if abs(multiplier - 1.0) < neutral_tol:
        return CycleClass.NEUTRAL
    return CycleClass.ATTRACTING if multiplier < 1.0 else CycleClass.REPELLING


def classify_cycle(record: OrbitRecord, neutral_tol: float | None = None) -> CycleClass:
    if not record.is_pre_periodic:
        raise PreconditionError("classify_cycle needs a pre-periodic orbit record")
    verdict = record.verdict
    return classify_multiplier(verdict.multiplier, verdict.critical_cycle, neutral_tol)


def _critical_indices(map: RationalMap, samples: Sequence[SpherePoint]) -> tuple[int, ...]:
    return tuple(i for i, p in enumerate(samples) if map.is_critical(p))


def _record(map, x, samples, verdict, arithmetic, ambiguous=False, nearest=1.0) -> OrbitRecord:
    return OrbitRecord(
        base=x,
        samples=tuple(samples),
        verdict=verdict,
        critical_indices=_critical_indices(map, samples),
        arithmetic=arithmetic,
        ambiguous=ambiguous,
        nearest_return=float(nearest),
    )


def _landed(map, x, samples, i, j, arithmetic, horizon) -> OrbitRecord:
    cycle = tuple(samples[i:j])
    critical_cycle = any(map.is_critical(p) for p in cycle)
    multiplier = 0.0 if critical_cycle else cycle_multiplier(map, cycle)
    kind = classify_multiplier(multiplier, critical_cycle)

    # A numeric "return" that was already inside the capture radius one step
    # earlier is convergence to an attracting cycle, not a landing on it
    if (
        arithmetic is Arithmetic.NUMERIC
        and kind in (CycleClass.ATTRACTING, CycleClass.SUPERATTRACTING)
        and i > 0
        and chordal_distance(complex(samples[i - 1]), complex(samples[j - 1])) <= ORBIT.capture_radius
    ):
        return _attracted(map, x, samples[:j], cycle, arithmetic, horizon)

    verdict = PrePeriodic(i, j - i, cycle, multiplier, critical_cycle)
    return _record(map, x, samples[:j], verdict, arithmetic)


def _attracted(map, x, samples, cycle, arithmetic, horizon) -> OrbitRecord:
    values = np.array([complex(p) for p in samples])
    targets = np.array([complex(p) for p in cycle])
    distance = chordal_distance_array(values[:, None], targets[None, :]).min(axis=1)
    inside = np.flatnonzero(distance <= ORBIT.capture_radius)
    cut = max(int(inside[0]), 1) if inside.size else len(samples)
    verdict = NoCycleDetected(horizon, attracted_to=tuple(cycle))
    return _record(map, x, samples[:cut], verdict, arithmetic)


def _trailing_cycle(map: RationalMap, samples: list[SpherePoint]) -> tuple[SpherePoint, ...] | None:
    """An attracting cycle the end of a non-returning orbit is converging to, if any."""
    last = complex(samples[-1])
    for p in range(1, min(ORBIT.max_attracting_period, len(samples) - 1) + 1):
        if chordal_distance(last, complex(samples[-1 - p])) > ORBIT.capture_radius:
            continue
        cycle = tuple(samples[-p:])
        if cycle_multiplier(map, cycle) < 1.0 - TOLERANCE.neutral:
            return cycle
    return None


def analyze_orbit(
    map: RationalMap,
    x: "SpherePoint | complex",
    horizon: int | None = None,
    tol: float | None = None,
) -> OrbitRecord:
    """Forward orbit of ``x`` up to ``horizon`` with a pre-periodicity verdict.

    Args:
        map: The rational map.
        x: Base point.
        horizon: Number of iterates examined (default ``ORBIT.horizon``).
        tol: Chordal return tolerance (default ``TOLERANCE.orbit_return``).

    Returns:
        OrbitRecord: ``PrePeriodic`` with minimal (n, p) when the orbit returns,
        otherwise ``NoCycleDetected``.
    """
    horizon = ORBIT.horizon if horizon is None else horizon
    tol = TOLERANCE.orbit_return if tol is None else tol
    if horizon < 1:
        raise PreconditionError("horizon must be at least 1")
    if tol <= 0:
        raise PreconditionError("return tolerance must be positive")

    x = SpherePoint.of(x)
    samples = [x]
    arithmetic = Arithmetic.NUMERIC
    next_index = 1

    if map.exact is not None and x.is_exact:
        arithmetic = Arithmetic.EXACT
        seen = {_exact_key(x): 0}
        while len(samples) <= horizon:
            image = map(samples[-1])
            j = len(samples)
            samples.append(image)
            if not image.is_exact:
                logger.debug(f"Exact orbit of {x} left the size budget at index {j}")
                arithmetic = Arithmetic.NUMERIC
                next_index = j
                break
            key = _exact_key(image)
            if key in seen:
                return _landed(map, x, samples, seen[key], j, Arithmetic.EXACT, horizon)
            seen[key] = j
        else:
            return _record(map, x, samples, NoCycleDetected(horizon), Arithmetic.EXACT)

    values = [complex(p) for p in samples]
    nearest = 1.0
    j = next_index
    while j <= horizon:
        if j >= len(samples):
            z = map.value(values[-1])
            samples.append(SpherePoint.of(z))
            values.append(z)
        distance = chordal_distance_array(np.array(values[:j]), values[j])
        hits = np.flatnonzero(distance <= tol)
        if hits.size:
            return _landed(map, x, samples, int(hits[0]), j, arithmetic, horizon)
        nearest = min(nearest, float(distance.min()))
        j += 1

    cycle = _trailing_cycle(map, samples)
    if cycle is not None:
        return _attracted(map, x, samples, cycle, arithmetic, horizon)
    ambiguous = nearest <= tol * ORBIT.ambiguity_factor
    if ambiguous:
        logger.warning(
            f"Orbit of {x} came within {nearest:.2e} of itself without returning; verdict is ambiguous"
        )
    return _record(map, x, samples, NoCycleDetected(horizon), arithmetic, ambiguous, nearest)


def val_infinity(map: RationalMap, c: "SpherePoint | complex", horizon: int | None = None) -> int:
    """Stabilized valency ``lim val(R^n, c)`` of a non-pre-periodic point."""
    record = analyze_orbit(map, c, horizon)
    if record.is_pre_periodic:
        raise PreconditionError(f"{record.base} is pre-periodic; VAL_inf is undefined")
    last = record.critical_indices[-1] if record.critical_indices else -1
    clear_run = len(record.samples) - 1 - last
    if not record.is_attracted and clear_run < ORBIT.stabilization_run:
        raise InconclusiveError(
            f"orbit of {record.base} keeps hitting critical points up to index {last}"
        )
    return math.prod(map.valency(record.samples[i]) for i in record.critical_indices)


def ce_envelope(map: RationalMap, c: "SpherePoint | complex", horizon: int | None = None) -> CEEnvelope:
    """Empirical Collet-Eckmann exponents along the critical value orbit."""
    horizon = ORBIT.horizon if horizon is None else horizon
    orbit = np.array([complex(p) for p in map.orbit(c, horizon)[1:]])
    metric = default_metric(map)
    if np.any(np.isinf(orbit)):
        metric = Chordal()
    with np.errstate(divide="ignore"):
        logs = np.log(derivative_norms(map, orbit, metric))
    exponents = np.cumsum(logs) / np.arange(1, len(logs) + 1)
    tail = exponents[min(ORBIT.ce_burn_in, len(exponents) - 1) :]
    lower = float(np.min(tail))
    if lower <= 0:
        logger.warning(f"Collet-Eckmann envelope at {c} is not positive ({lower:.3f})")
    return CEEnvelope(tuple(float(e) for e in exponents), lower)


def lyapunov_exponent(map: RationalMap, samples: Sequence[SpherePoint]) -> float:
    values = np.array([complex(p) for p in samples])
    with np.errstate(divide="ignore"):
        logs = np.log(map.spherical_derivatives(values))
    logs = logs[np.isfinite(logs)]
    return float(logs.mean()) if logs.size else 0.0


def escape_radius(map: RationalMap) -> float:
    """Radius beyond which ``|R(z)| >= 2|z|``, so every orbit of the polynomial tends to infinity."""
    if not map.is_polynomial or map.degree < 2:
        raise PreconditionError("escape radius needs a polynomial of degree at least 2")
    coeffs = map.numerator / map.denominator[0]
    lead = abs(coeffs[-1])
    return max(1.0, (2.0 + float(np.sum(np.abs(coeffs[:-1])))) / lead)


def escape_index(map: RationalMap, z: "SpherePoint | complex", horizon: int | None = None) -> int | None:
    """First iterate of ``z`` outside the escape radius, or None within the horizon."""
    horizon = ORBIT.horizon if horizon is None else horizon
    radius = escape_radius(map)
    w = complex(SpherePoint.of(z))
    for n in range(horizon + 1):
        if not cmath.isfinite(w) or abs(w) > radius:
            return n
        w = map.value(w)
    return None


def julia_membership(map: RationalMap, z: "SpherePoint | complex", horizon: int | None = None) -> JuliaVerdict:
    """Heuristic location of ``z`` relative to the Julia set.

    Polynomials first try escape time. Landing on a cycle decides by the cycle
    type. Otherwise an attracted orbit is in the Fatou set and a non-attracted
    orbit is placed in the Julia set when the spherical derivative grows
    along it.
    """
    if map.is_polynomial and map.degree >= 2 and escape_index(map, z, horizon) is not None:
        return JuliaVerdict(JuliaLocation.OUTSIDE, Confidence.EXACT, "escape-time")
    record = analyze_orbit(map, z, horizon)
    if record.is_attracted:
        return JuliaVerdict(JuliaLocation.OUTSIDE, Confidence.HEURISTIC, "attracting-basin")
    confidence = Confidence.EXACT if record.arithmetic is Arithmetic.EXACT else Confidence.HEURISTIC
    if record.is_pre_periodic:
        kind = classify_cycle(record)
        if kind in (CycleClass.SUPERATTRACTING, CycleClass.ATTRACTING):
            return JuliaVerdict(JuliaLocation.OUTSIDE, confidence, "cycle-landing")
        if kind is CycleClass.REPELLING:
            return JuliaVerdict(JuliaLocation.INSIDE, confidence, "cycle-landing")
        return JuliaVerdict(JuliaLocation.BOUNDARY, Confidence.HEURISTIC, "neutral-cycle")
    if lyapunov_exponent(map, record.samples) > 0:
        return JuliaVerdict(JuliaLocation.INSIDE, Confidence.HEURISTIC, "derivative-growth")
    return JuliaVerdict(JuliaLocation.BOUNDARY, Confidence.HEURISTIC, "derivative-growth")
