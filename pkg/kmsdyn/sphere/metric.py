"""
Conformal metrics on the sphere and derivative norms measured in them.
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ConfigError, PreconditionError
from .point import SpherePoint, chart
from .rational import RationalMap


@dataclass(frozen=True)
class Flat:
    name: str = "flat"


@dataclass(frozen=True)
class Chordal:
    name: str = "chordal"


@dataclass(frozen=True)
class Weighted:
    """``r(z)`` times a base metric; r must be positive and continuous where it is used."""

    weight: Callable = field(compare=False)
    base: Flat | Chordal = Chordal()
    label: str = "r"

    @property
    def name(self) -> str:
        return f"weighted:{self.label}"

    def r(self, z: complex) -> float:
        value = float(np.real(self.weight(z)))
        if not (math.isfinite(value) and value > 0):
            raise PreconditionError(f"metric weight {self.label} is not positive at {z}: {value}")
        return value

    def rs(self, zs) -> np.ndarray:
        values = np.real(np.broadcast_to(self.weight(np.asarray(zs, dtype=complex)), np.shape(zs)))
        if not np.all(np.isfinite(values) & (values > 0)):
            raise PreconditionError(f"metric weight {self.label} is not positive on the sample")
        return np.asarray(values, dtype=float)


MetricSpec = Flat | Chordal | Weighted


def default_metric(map: RationalMap) -> MetricSpec:
    """Flat for polynomials, chordal otherwise."""
    return Flat() if map.is_polynomial else Chordal()


def resolve_metric(map: RationalMap, metric: MetricSpec | None) -> MetricSpec:
    return default_metric(map) if metric is None else metric


def derivative_norm(map: RationalMap, x: "SpherePoint | complex", metric: MetricSpec | None = None) -> float:
    """``|R'(x)|`` measured in ``metric`` (default: flat for polynomials, chordal otherwise)."""
    metric = resolve_metric(map, metric)
    z = complex(SpherePoint.of(x))
    if isinstance(metric, Weighted):
        base = derivative_norm(map, z, metric.base)
        return base * metric.r(map.value(z)) / metric.r(z)
    if isinstance(metric, Flat):
        if cmath.isinf(z):
            raise PreconditionError("the flat metric is undefined at infinity")
        d = map.derivative(z)
        return math.inf if cmath.isinf(d) else abs(d)
    return map.spherical_derivative(z)


def derivative_norms(map: RationalMap, zs, metric: MetricSpec | None = None) -> np.ndarray:
    """Vectorized :func:`derivative_norm`; flat norms at infinity are inf."""
    metric = resolve_metric(map, metric)
    zs = np.asarray(zs, dtype=complex)
    if isinstance(metric, Weighted):
        return derivative_norms(map, zs, metric.base) * metric.rs(map.values(zs)) / metric.rs(zs)
    if isinstance(metric, Flat):
        return map.derivatives(zs)
    return map.spherical_derivatives(zs)


def chart_log_density(z: complex, metric: MetricSpec) -> float:
    """Log of the metric density in the chart coordinate of ``z``.

    Converts chart derivatives to metric derivatives:
    ``log|f'|_g = log|f'|_chart + density(f(x)) - density(x)``.
    """
    inverted, c = chart(z)
    if isinstance(metric, Weighted):
        return chart_log_density(z, metric.base) + math.log(metric.r(z))
    if isinstance(metric, Flat):
        if cmath.isinf(z):
            raise PreconditionError("the flat metric is undefined at infinity")
        return 2.0 * math.log(abs(z)) if inverted else 0.0
    return -math.log1p(abs(c) ** 2)


def parse_metric(text: str, weight_parser: Callable[[str], Callable] | None = None) -> MetricSpec | None:
    """``auto`` | ``flat`` | ``chordal`` | ``weighted:<expr>`` | ``weighted:flat:<expr>``."""
    text = text.strip()
    lowered = text.lower()
    if lowered == "auto":
        return None
    if lowered == "flat":
        return Flat()
    if lowered == "chordal":
        return Chordal()
    if lowered.startswith("weighted:"):
        body = text.split(":", 1)[1]
        base: Flat | Chordal = Chordal()
        if body.lower().startswith("flat:"):
            base, body = Flat(), body.split(":", 1)[1]
        elif body.lower().startswith("chordal:"):
            body = body.split(":", 1)[1]
        if weight_parser is None:
            from .parser import compile_weight

            weight_parser = compile_weight
        return Weighted(weight_parser(body), base=base, label=body.strip())
    raise ConfigError(f"unknown metric {text!r}; expected auto, flat, chordal or weighted:<expr>")
