"""
Cocycles on the transfer groupoid and the weights they assign to transfers.

A transfer path ``x -> z`` with exponents ``(n, l)`` stands for the germs
``eta`` with ``R^n = R^l o eta`` near ``x``. Cocycle values are taken along
the path from ``x`` to ``z``; ``l_x(z) = exp(cocycle)`` and an atom at ``z``
carries ``l_x(z) ** beta`` relative to ``x``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..config.options import TOLERANCE
from ..errors import PreconditionError
from ..sphere.metric import Chordal, MetricSpec, Weighted, chart_log_density, derivative_norms, resolve_metric
from ..sphere.point import SpherePoint
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger

logger = get_logger("kmsdyn_cocycle")


@dataclass(frozen=True)
class Conformal:
    """``log |eta'(x)|_g``; the default metric is flat for polynomials, chordal otherwise."""

    metric: MetricSpec | None = None
    name: str = "conformal"


@dataclass(frozen=True)
class Gauge:
    """``n - l``."""

    name: str = "gauge"


@dataclass(frozen=True)
class Generalized:
    """Birkhoff difference of a real potential ``f``."""

    f: Callable = field(compare=False)
    label: str = "f"
    name: str = "generalized"

    def values(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        out = np.real(np.broadcast_to(self.f(zs), zs.shape)).astype(float)
        if not np.all(np.isfinite(out)):
            raise PreconditionError(f"potential {self.label} is not finite on the sample")
        return out


CocycleSpec = Conformal | Gauge | Generalized


@dataclass(frozen=True)
class TransferPath:
    """``R^n(source) = R^l(target)`` with matching iterate valencies ``j``."""

    source: SpherePoint
    target: SpherePoint
    n: int
    l: int
    valency: int = 1
    branch: tuple[int, int] | None = None

    @property
    def k(self) -> int:
        return self.n - self.l

    @classmethod
    def between(
        cls,
        map: RationalMap,
        x: "SpherePoint | complex",
        z: "SpherePoint | complex",
        n: int,
        l: int,
        branch: tuple[int, int] | None = None,
        tol: float | None = None,
    ) -> "TransferPath":
        """Builds a path after checking the orbit and valency conditions.

        Raises:
            PreconditionError: if ``R^n(x) != R^l(z)`` or the valencies differ.
        """
        if n < 0 or l < 0:
            raise PreconditionError("path exponents must be non-negative")
        tol = TOLERANCE.orbit_return if tol is None else tol
        orbit_x, orbit_z = map.orbit(x, n), map.orbit(z, l)
        if not orbit_x[-1].close_to(orbit_z[-1], tol):
            raise PreconditionError(f"R^{n}({x}) = {orbit_x[-1]} differs from R^{l}({z}) = {orbit_z[-1]}")
        j = math.prod(map.valency(p) for p in orbit_x[:-1])
        i = math.prod(map.valency(p) for p in orbit_z[:-1])
        if i != j:
            raise PreconditionError(f"no transfer germ: val(R^{n}, x) = {j} but val(R^{l}, z) = {i}")
        return cls(orbit_x[0], orbit_z[0], n, l, j, branch)


def _log_derivative_along(map: RationalMap, orbit: Sequence[SpherePoint], metric: MetricSpec) -> float:
    if not orbit:
        return 0.0
    values = np.array([complex(p) for p in orbit])
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(derivative_norms(map, values, metric))))


def _log_chart_lead(map: RationalMap, orbit: Sequence[SpherePoint]) -> tuple[int, float]:
    """Valency and ``log |a|`` of ``R^n(x + t) - R^n(x) = a t^v + ...`` in charts."""
    valency, log_lead = 1, 0.0
    for point in orbit:
        expansion = map.local_expansion(point)
        log_lead = math.log(abs(expansion.lead)) + expansion.valency * log_lead
        valency *= expansion.valency
    return valency, log_lead


def log_transfer_weight(map: RationalMap, path: TransferPath, metric: MetricSpec | None = None) -> float:
    """``log |eta'(x)|_g`` for the germs of the path.

    Without critical points on the path this is the chain rule
    ``log |(R^n)'(x)|_g - log |(R^l)'(z)|_g``. Through critical points of total
    valency j the j-th root rule ``(log |a_n| - log |a_l|) / j`` is used, with
    a_n, a_l the leading local coefficients of R^n at x and R^l at z.

    Raises:
        PreconditionError: when the local expansions disagree with the declared valency.
    """
    metric = resolve_metric(map, metric)
    orbit_x = map.orbit(path.source, path.n)[:-1]
    orbit_z = map.orbit(path.target, path.l)[:-1]
    if path.valency == 1:
        return _log_derivative_along(map, orbit_x, metric) - _log_derivative_along(map, orbit_z, metric)

    vx, ax = _log_chart_lead(map, orbit_x)
    vz, az = _log_chart_lead(map, orbit_z)
    if vx != path.valency or vz != path.valency:
        raise PreconditionError(
            f"degenerate path: local valencies {vx} and {vz}, declared {path.valency}"
        )
    chart_log = (ax - az) / path.valency
    return (
        chart_log
        + chart_log_density(complex(path.target), metric)
        - chart_log_density(complex(path.source), metric)
    )


def transfer_weight(map: RationalMap, path: TransferPath, metric: MetricSpec | None = None) -> float:
    return math.exp(log_transfer_weight(map, path, metric))


def cocycle_value(spec: CocycleSpec, path: TransferPath, map: RationalMap) -> float:
    """Cocycle value along ``path`` from source to target."""
    match spec:
        case Gauge():
            return float(path.n - path.l)
        case Generalized():
            orbit_x = [complex(p) for p in map.orbit(path.source, path.n)[:-1]]
            orbit_z = [complex(p) for p in map.orbit(path.target, path.l)[:-1]]
            return float(spec.values(orbit_x).sum() - spec.values(orbit_z).sum())
        case Conformal():
            return log_transfer_weight(map, path, spec.metric)
    raise TypeError(f"unknown cocycle {spec!r}")


def compose(map: RationalMap, first: TransferPath, second: TransferPath) -> TransferPath:
    """``x -> z`` followed by ``z -> w`` as one path ``x -> w`` with exponents ``(n + n', l + l')``."""
    if not first.target.close_to(second.source, TOLERANCE.orbit_return):
        raise PreconditionError("paths are not composable")
    return TransferPath.between(map, first.source, second.target, first.n + second.n, first.l + second.l)


def metric_reweight(values, sources, targets, r: Callable) -> np.ndarray:
    """Shifts cocycle values by the coboundary ``log r(target) - log r(source)``.

    Raises:
        PreconditionError: where r is not positive.
    """
    weight = r if isinstance(r, Weighted) else Weighted(r, base=Chordal())
    shift = np.log(weight.rs(np.asarray(targets, dtype=complex))) - np.log(
        weight.rs(np.asarray(sources, dtype=complex))
    )
    return np.asarray(values, dtype=float) + shift


def spec_metric(spec: CocycleSpec) -> MetricSpec | None:
    return spec.metric if isinstance(spec, Conformal) else None


def describe(spec: CocycleSpec) -> str:
    match spec:
        case Conformal(metric=None):
            return "conformal"
        case Conformal():
            return f"conformal[{spec.metric.name}]"
        case Generalized():
            return f"generalized[{spec.label}]"
    return spec.name
