"""
Extremal KMS-state census for the gauge and conformal actions.

The gauge census counts states class by class: every finite critical class
contributes ``VAL_inf`` atomic states for all beta, infinite classes join above
``log d``, and at ``beta = log d`` the Lyubich measure adds one non-atomic state.
The conformal census covers Collet-Eckmann quadratic polynomials only, with
the phase boundary at the Hausdorff dimension of the Julia set.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..config.options import POINCARE
from ..errors import InconclusiveError, KmsdynError, PreconditionError, UnsupportedClassification
from ..orbits.forward import analyze_orbit
from ..orbits.grand import critical_classes
from ..orbits.records import Assumptions, Confidence, GrandOrbitClass, RegionTag
from ..sphere.point import SpherePoint
from ..sphere.rational import RationalMap
from ..thermo.eigenmeasure import conformal_eigenmeasure
from ..thermo.lyubich import lyubich_measure
from ..thermo.measures import DiscretizedMeasure, Provenance
from ..thermo.pressure import BowenEstimate, bowen_dimension
from ..utils.logging import get_logger
from .cocycle import CocycleSpec, Conformal, Gauge, describe, spec_metric
from .poincare import AtomicConformalMeasure, affordable_depth, atomic_measure, poincare_partial_sums

logger = get_logger("kmsdyn_census")

Measure = AtomicConformalMeasure | DiscretizedMeasure


@dataclass
class MeasureHandle:
    """Builds the measure of a state on first access and keeps it."""

    build: Callable[[], Measure]
    _measure: Measure | None = field(default=None, repr=False)

    def get(self) -> Measure:
        if self._measure is None:
            self._measure = self.build()
        return self._measure

    @property
    def built(self) -> bool:
        return self._measure is not None


@dataclass(frozen=True)
class AtomicState:
    """``multiplicity`` extremal states, one per character of the isotropy group ``Z_VAL``."""

    grand_class: GrandOrbitClass
    multiplicity: int
    handle: MeasureHandle = field(compare=False)

    @property
    def measure(self) -> AtomicConformalMeasure:
        return self.handle.get()


@dataclass(frozen=True)
class NonAtomicState:
    provenance: Provenance
    handle: MeasureHandle = field(compare=False)
    multiplicity: int = 1

    @property
    def measure(self) -> DiscretizedMeasure:
        return self.handle.get()


State = AtomicState | NonAtomicState


@dataclass(frozen=True)
class KMSCensus:
    beta: float
    spec: str
    states: tuple[State, ...]
    region: RegionTag
    assumptions: Assumptions
    confidence: Confidence
    theorem: str
    hd: BowenEstimate | None = None

    @property
    def total(self) -> int:
        return sum(state.multiplicity for state in self.states)

    @property
    def atomic_count(self) -> int:
        return sum(s.multiplicity for s in self.states if isinstance(s, AtomicState))

    @property
    def nonatomic_count(self) -> int:
        return sum(s.multiplicity for s in self.states if isinstance(s, NonAtomicState))

    def states_supported_at(self, p: "SpherePoint | complex") -> int:
        """Number of extremal states whose measure is the Dirac mass at ``p``."""
        p = SpherePoint.of(p)
        count = 0
        for state in self.states:
            if isinstance(state, AtomicState) and state.grand_class.finite:
                measure = state.measure
                if measure.is_dirac and SpherePoint.of(measure.points[0]).close_to(p):
                    count += state.multiplicity
        return count


def _rng_factory(seed: int | None) -> Callable[[], np.random.Generator]:
    return lambda: np.random.default_rng(seed)


def _atomic_state(map, grand, beta, spec, depth) -> AtomicState:
    depth = affordable_depth(map, depth)

    def build() -> AtomicConformalMeasure:
        return atomic_measure(map, grand.representative, beta, spec, depth)

    return AtomicState(grand, grand.val_infinity, MeasureHandle(build))


def _weakest(classes: list[GrandOrbitClass]) -> Confidence:
    found = {c.confidence for c in classes}
    return next((c for c in (Confidence.HEURISTIC, Confidence.ASSERTED) if c in found), Confidence.EXACT)


def _gauge_census(map, beta, spec, region, assumptions, horizon, depth, seed) -> KMSCensus:
    classes = critical_classes(map, region, horizon, assumptions)
    log_d = math.log(map.degree)
    at_threshold = math.isclose(beta, log_d, rel_tol=0.0, abs_tol=1e-9)
    states: list[State] = []
    for grand in classes:
        if grand.finite or (beta > log_d and not at_threshold):
            states.append(_atomic_state(map, grand, beta, spec, depth))
    if at_threshold:
        rng = _rng_factory(seed)
        states.append(NonAtomicState(Provenance.LYUBICH, MeasureHandle(lambda: lyubich_measure(map, rng=rng()))))
    return KMSCensus(
        beta=float(beta),
        spec=describe(spec),
        states=tuple(states),
        region=region,
        assumptions=assumptions,
        confidence=_weakest(classes),
        theorem="gauge",
    )


def _summable_orbits(map, beta, spec, region, assumptions, horizon, depth) -> list[GrandOrbitClass]:
    """Critical classes whose Poincaré series is numerically summable."""
    try:
        classes = critical_classes(map, region, horizon, assumptions)
    except KmsdynError as error:
        logger.debug(f"Summable-orbit search skipped: {error}")
        return []
    found = []
    for grand in classes:
        try:
            series = poincare_partial_sums(map, grand.representative, beta, spec, affordable_depth(map, depth))
        except KmsdynError as error:
            logger.debug(f"No Poincaré verdict at {grand.representative}: {error}")
            continue
        if series.verdict.summable:
            found.append(grand)
    return found


def _finite_critical_point(map: RationalMap) -> SpherePoint:
    return next(p for p, _ in map.critical_points if not p.is_infinite)


def _unsupported(message, map, beta, spec, region, assumptions, horizon, depth) -> UnsupportedClassification:
    found = _summable_orbits(map, beta, spec, region, assumptions, horizon, depth)
    logger.warning(f"{message}; {len(found)} summable critical classes found")
    return UnsupportedClassification(message, found)


def _conformal_census(map, beta, spec, region, assumptions, horizon, depth, seed, hd) -> KMSCensus:
    def unsupported(message: str) -> UnsupportedClassification:
        return _unsupported(message, map, beta, spec, region, assumptions, horizon, depth)

    if map.degree != 2 or not map.is_polynomial:
        raise unsupported("conformal classification is only available for quadratic polynomials")
    if not assumptions.collet_eckmann:
        raise unsupported("conformal classification needs the Collet-Eckmann assumption")
    if beta <= 0:
        raise unsupported("conformal classification covers positive beta only")

    c = _finite_critical_point(map)
    record = analyze_orbit(map, c, horizon)
    if record.is_attracted or (record.is_pre_periodic and record.verdict.preperiod == 0):
        raise unsupported(f"critical point {c} is periodic or attracted, so the map is not Collet-Eckmann")

    hd = bowen_dimension(map, metric=spec_metric(spec)) if hd is None else hd
    lo, hi = hd.band
    metric = spec_metric(spec)
    rng = _rng_factory(seed)
    sullivan = NonAtomicState(
        Provenance.EIGENMEASURE,
        MeasureHandle(lambda: conformal_eigenmeasure(map, hd.value, rng=rng(), metric=metric)),
    )

    states: list[State] = []
    classes: list[GrandOrbitClass] = []
    if lo <= beta <= hi:
        states.append(sullivan)
    elif beta > hi and not (record.is_pre_periodic or assumptions.preperiodic_critical):
        classes = critical_classes(map, region, horizon, assumptions)
        grand = next((g for g in classes if g.representative.close_to(c)), None)
        if grand is None:
            raise InconclusiveError(f"critical point {c} was not placed in the {RegionTag(region).value} region")
        states.append(_atomic_state(map, grand, beta, spec, depth))

    return KMSCensus(
        beta=float(beta),
        spec=describe(spec),
        states=tuple(states),
        region=region,
        assumptions=assumptions,
        confidence=_weakest(classes) if classes else Confidence.ASSERTED,
        theorem="conformal-quadratic",
        hd=hd,
    )


def kms_census(
    map: RationalMap,
    region: RegionTag | str = RegionTag.JULIA,
    beta: float = 1.0,
    spec: CocycleSpec | None = None,
    assumptions: Assumptions | None = None,
    horizon: int | None = None,
    depth: int | None = None,
    hd: BowenEstimate | None = None,
    seed: int | None = None,
) -> KMSCensus:
    """Extremal beta-KMS states of the action given by ``spec``.

    Args:
        map: Rational map of degree at least 2.
        region: Where critical classes are taken.
        beta: Inverse temperature, non-zero.
        spec: Gauge (default) or conformal cocycle.
        assumptions: User-asserted Collet-Eckmann and pre-periodic-critical flags.
        horizon: Forward-orbit horizon.
        depth: Depth of the atomic measures.
        hd: Precomputed dimension estimate for the conformal census.
        seed: Seed for the non-atomic measure builders.

    Returns:
        KMSCensus: The state descriptors; measures are built on access.

    Raises:
        PreconditionError: for beta = 0 or degree below 2.
        UnsupportedClassification: when no classification covers the configuration.
    """
    if beta == 0:
        raise PreconditionError("beta must be non-zero")
    if map.degree < 2:
        raise PreconditionError("the census needs degree at least 2")
    spec = Gauge() if spec is None else spec
    region = RegionTag(region)
    assumptions = Assumptions() if assumptions is None else assumptions
    depth = POINCARE.depth if depth is None else depth

    match spec:
        case Gauge():
            census = _gauge_census(map, beta, spec, region, assumptions, horizon, depth, seed)
        case Conformal():
            census = _conformal_census(map, beta, spec, region, assumptions, horizon, depth, seed, hd)
        case _:
            raise _unsupported(
                f"no classification for the {describe(spec)} action", map, beta, spec, region, assumptions, horizon, depth
            )

    logger.info(
        f"Census for {map!r} at beta={beta:.6g} ({census.spec}): {census.total} extremal states, "
        f"{census.atomic_count} atomic, {census.nonatomic_count} non-atomic"
    )
    return census
