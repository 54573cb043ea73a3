"""
Result types for orbit analysis.
"""

from dataclasses import dataclass, field
from enum import Enum

from ..sphere.point import SpherePoint


class CycleClass(str, Enum):
    SUPERATTRACTING = "superattracting"
    ATTRACTING = "attracting"
    NEUTRAL = "neutral"
    REPELLING = "repelling"


class Arithmetic(str, Enum):
    EXACT = "exact"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class PrePeriodic:
    """``R^{n+p}(x) = R^n(x)`` with ``n`` and then ``p`` minimal."""

    preperiod: int
    period: int
    cycle: tuple[SpherePoint, ...]
    multiplier: float
    critical_cycle: bool = False


@dataclass(frozen=True)
class NoCycleDetected:
    """No return inside the horizon.

    ``attracted_to`` is set when the orbit entered the capture radius of an
    attracting cycle before the horizon, so it converges without landing.
    """

    horizon: int
    attracted_to: tuple[SpherePoint, ...] | None = None


@dataclass(frozen=True)
class OrbitRecord:
    base: SpherePoint
    samples: tuple[SpherePoint, ...]
    verdict: PrePeriodic | NoCycleDetected
    critical_indices: tuple[int, ...] = ()
    arithmetic: Arithmetic = Arithmetic.NUMERIC
    ambiguous: bool = False
    nearest_return: float = 1.0

    @property
    def is_pre_periodic(self) -> bool:
        return isinstance(self.verdict, PrePeriodic)

    @property
    def is_attracted(self) -> bool:
        return isinstance(self.verdict, NoCycleDetected) and self.verdict.attracted_to is not None

    @property
    def pre_critical(self) -> bool:
        return bool(self.critical_indices)

    @property
    def first_critical_index(self) -> int | None:
        return self.critical_indices[0] if self.critical_indices else None


class Confidence(str, Enum):
    EXACT = "exact"
    ASSERTED = "asserted"
    HEURISTIC = "heuristic"


class RegionTag(str, Enum):
    """Where the critical classes are taken: the whole sphere or the Julia set."""

    SPHERE = "sphere"
    JULIA = "julia"


class JuliaLocation(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class JuliaVerdict:
    location: JuliaLocation
    confidence: Confidence
    method: str

    @property
    def in_julia(self) -> bool:
        return self.location is not JuliaLocation.OUTSIDE


@dataclass(frozen=True)
class Assumptions:
    """User-asserted hypotheses; neither is decidable at desk scale."""

    collet_eckmann: bool = False
    preperiodic_critical: bool = False


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: tuple[int, int] | None = None
    ambiguous: bool = False


@dataclass(frozen=True)
class GrandOrbitClass:
    """A class of non-pre-periodic critical points under the grand-orbit relation.

    ``orbit_members`` enumerates the grand orbit: for a finite class the whole
    orbit, otherwise the members found within the enumeration depth.
    """

    representative: SpherePoint
    critical_members: tuple[SpherePoint, ...]
    val_infinity: int
    finite: bool
    orbit_members: tuple[SpherePoint, ...]
    confidence: Confidence = Confidence.EXACT
    ambiguous: bool = False
    witnesses: tuple[tuple[int, int], ...] = field(default=())


@dataclass(frozen=True)
class CEEnvelope:
    """``(1/n) log |(R^n)'(R(c))|`` for n = 1..horizon and its lower envelope."""

    exponents: tuple[float, ...]
    lower_envelope: float

    @property
    def plausible(self) -> bool:
        return self.lower_envelope > 0
