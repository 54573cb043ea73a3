"""
Isotropy groups of the transfer groupoid and orbit consistency.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from ..config.options import ORBIT, TOLERANCE
from ..errors import InconclusiveError
from ..orbits.forward import analyze_orbit, classify_cycle, val_infinity
from ..orbits.records import CycleClass, OrbitRecord
from ..sphere.germs import prefix_valencies
from ..sphere.point import SpherePoint
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger
from .cocycle import CocycleSpec, Conformal, Gauge, Generalized

logger = get_logger("kmsdyn_isotropy")


class IsotropyTag(str, Enum):
    TRIVIAL = "trivial"
    INTEGER = "integer"
    TORSION = "torsion"
    INTEGER_CROSS_CYCLIC = "integer-cross-cyclic"


@dataclass(frozen=True)
class IsotropyClass:
    """Isotropy group at a point.

    For torsion groups ``orders`` lists the distinct cyclic orders
    ``val(R^n, x)`` observed up to the horizon; ``infinite`` is set when they
    had not stabilized (a critical cycle). ``d`` is the cyclic factor of
    ``Z ⊕ Z_d``.
    """

    tag: IsotropyTag
    orders: tuple[int, ...] = ()
    infinite: bool = False
    d: int | None = None
    inconclusive: bool = False
    record: OrbitRecord | None = field(default=None, compare=False, repr=False)

    @property
    def order(self) -> int | None:
        """Order of the torsion part (1 for torsion-free groups), None if unbounded."""
        if self.tag is IsotropyTag.INTEGER_CROSS_CYCLIC:
            return self.d
        if self.tag is IsotropyTag.TORSION:
            return None if self.infinite else self.orders[-1]
        return 1

    @property
    def label(self) -> str:
        match self.tag:
            case IsotropyTag.TRIVIAL:
                return "trivial"
            case IsotropyTag.INTEGER:
                return "Z"
            case IsotropyTag.TORSION:
                return "Q/Z" if self.infinite else f"Z_{self.orders[-1]}"
            case IsotropyTag.INTEGER_CROSS_CYCLIC:
                return f"Z⊕Z_{self.d}"


def _distinct(values: list[int]) -> tuple[int, ...]:
    out: list[int] = []
    for v in values:
        if not out or v != out[-1]:
            out.append(v)
    return tuple(out)


def isotropy_class(map: RationalMap, x: "SpherePoint | complex", horizon: int | None = None) -> IsotropyClass:
    """Decides the isotropy group at ``x`` from its forward orbit.

    Not pre-periodic and not pre-critical gives the trivial group, pre-periodic
    and not pre-critical gives Z, pre-critical and not pre-periodic gives a
    cyclic torsion group of order VAL_inf. A pre-periodic, pre-critical point
    gives ``Z ⊕ Z_d`` with ``d = val(R^n, x)`` at the preperiod ``n``, unless
    the cycle itself is critical, in which case the orders grow without bound.
    """
    horizon = ORBIT.horizon if horizon is None else horizon
    record = analyze_orbit(map, x, horizon)
    inconclusive = record.ambiguous

    if record.is_pre_periodic:
        verdict = record.verdict
        if verdict.critical_cycle:
            orders = _distinct(prefix_valencies(map, list(record.samples))[1:])
            return IsotropyClass(IsotropyTag.TORSION, orders, infinite=True, record=record)
        if not record.pre_critical:
            return IsotropyClass(IsotropyTag.INTEGER, record=record)
        d = prefix_valencies(map, list(record.samples[: verdict.preperiod + 1]))[-1]
        return IsotropyClass(IsotropyTag.INTEGER_CROSS_CYCLIC, d=d, record=record)

    if not record.pre_critical:
        return IsotropyClass(IsotropyTag.TRIVIAL, inconclusive=inconclusive, record=record)

    orders = _distinct(prefix_valencies(map, list(record.samples))[1:])
    try:
        stable = val_infinity(map, x, horizon)
    except InconclusiveError as e:
        logger.warning(f"Isotropy at {x}: {e}")
        return IsotropyClass(IsotropyTag.TORSION, orders, infinite=True, inconclusive=True, record=record)
    if orders[-1] != stable:
        orders = orders + (stable,)
    return IsotropyClass(IsotropyTag.TORSION, orders, inconclusive=inconclusive, record=record)


def orbit_consistent(
    map: RationalMap,
    x: "SpherePoint | complex",
    horizon: int | None = None,
    spec: CocycleSpec | None = None,
) -> bool:
    """Whether the cocycle vanishes on the isotropy group at ``x``.

    Points that are not pre-periodic, or land on a critical cycle, have torsion
    isotropy and are always consistent. Otherwise the generating loop around
    the cycle must have zero cocycle: a neutral cycle for the conformal
    cocycle, never for the gauge cocycle, and a zero Birkhoff sum of f over
    the cycle for the generalized one.

    Raises:
        InconclusiveError: when the orbit came close to itself without returning.
    """
    spec = Conformal() if spec is None else spec
    record = analyze_orbit(map, x, horizon)
    if not record.is_pre_periodic:
        if record.ambiguous:
            raise InconclusiveError(f"orbit of {record.base} is ambiguous within the horizon")
        return True
    verdict = record.verdict
    if verdict.critical_cycle:
        return True
    match spec:
        case Gauge():
            return False
        case Generalized():
            total = float(sum(spec.f(complex(p)) for p in verdict.cycle))
            return math.isclose(total, 0.0, abs_tol=TOLERANCE.neutral)
        case _:
            return classify_cycle(record) is CycleClass.NEUTRAL
