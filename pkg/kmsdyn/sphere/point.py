"""
Points of the Riemann sphere and the chordal metric.

Internally infinity is ``complex(inf, 0)``; at the API it is ``SpherePoint(None)``.
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from ..config.options import TOLERANCE

INFINITY = complex(math.inf, 0.0)


def is_infinite(z: complex) -> bool:
    return cmath.isinf(z)


def chordal_distance(a: complex, b: complex) -> float:
    """Chordal distance, 0 <= d <= 1, with d(0, inf) = 1."""
    a_inf, b_inf = cmath.isinf(a), cmath.isinf(b)
    if a_inf and b_inf:
        return 0.0
    if a_inf or b_inf:
        w = b if a_inf else a
        return 1.0 / math.hypot(1.0, abs(w))
    # inversion is an isometry; use it when both points are large
    if abs(a) > 1.0 and abs(b) > 1.0:
        a, b = 1.0 / a, 1.0 / b
    return abs(a - b) / (math.hypot(1.0, abs(a)) * math.hypot(1.0, abs(b)))


def chordal_distance_array(a, b) -> np.ndarray:
    """Broadcasting version of :func:`chordal_distance`."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    a_inf, b_inf = np.isinf(a), np.isinf(b)
    flip = (np.abs(a) > 1.0) & (np.abs(b) > 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        aa = np.where(flip, 1.0 / a, a)
        bb = np.where(flip, 1.0 / b, b)
        d = np.abs(aa - bb) / (np.hypot(1.0, np.abs(aa)) * np.hypot(1.0, np.abs(bb)))
        d = np.where(a_inf & ~b_inf, 1.0 / np.hypot(1.0, np.abs(b)), d)
        d = np.where(b_inf & ~a_inf, 1.0 / np.hypot(1.0, np.abs(a)), d)
    return np.where(a_inf & b_inf, 0.0, d)


def chart(z: complex) -> tuple[bool, complex]:
    """Returns ``(inverted, coordinate)``; the w = 1/z chart is used when |z| > 1."""
    if cmath.isinf(z):
        return True, 0j
    if abs(z) > 1.0:
        return True, 1.0 / z
    return False, z


def format_complex(z: complex) -> str:
    """Round-trippable literal in the map grammar, e.g. ``(0.3+0.9i)``."""
    if cmath.isinf(z):
        return "inf"
    re, im = float(z.real), float(z.imag)
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"({re!r}{sign}{abs(im)!r}i)"


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A point of the Riemann sphere.

    ``value`` is None at infinity. ``exact`` optionally holds the point as a
    Gaussian-rational domain element; equality then compares exactly.
    """

    value: complex | None = None
    exact: Any = field(default=None, repr=False)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(None)

    @classmethod
    def of(cls, z: "SpherePoint | complex | float | None") -> "SpherePoint":
        if isinstance(z, SpherePoint):
            return z
        if z is None:
            return cls(None)
        z = complex(z)
        if cmath.isinf(z):
            return cls(None)
        if cmath.isnan(z):
            raise ValueError("NaN is not a point of the sphere")
        return cls(z)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def is_exact(self) -> bool:
        return self.value is None or self.exact is not None

    def __complex__(self) -> complex:
        return INFINITY if self.value is None else self.value

    def distance(self, other: "SpherePoint | complex") -> float:
        return chordal_distance(complex(self), complex(SpherePoint.of(other)))

    def close_to(self, other: "SpherePoint | complex", tol: float | None = None) -> bool:
        other = SpherePoint.of(other)
        if self.is_infinite and other.is_infinite:
            return True
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return self.distance(other) <= (TOLERANCE.point if tol is None else tol)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpherePoint):
            return NotImplemented
        return self.close_to(other)

    def __str__(self) -> str:
        return "∞" if self.value is None else format_complex(self.value)


def as_array(points: Iterable["SpherePoint | complex"]) -> np.ndarray:
    return np.array([complex(SpherePoint.of(p)) for p in points], dtype=complex)


def cluster_points(values: np.ndarray, tol: float) -> list[tuple[complex, int, float]]:
    """Single-linkage chordal clusters as ``(centroid, size, spread)`` in first-seen order."""
    values = np.asarray(values, dtype=complex)
    n = len(values)
    if n == 0:
        return []
    close = chordal_distance_array(values[:, None], values[None, :]) <= tol
    label = np.full(n, -1)
    clusters = []
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = len(clusters)
        stack, members = [start], [start]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(close[i] & (label < 0)):
                label[j] = label[start]
                stack.append(j)
                members.append(j)
        clusters.append(sorted(members))

    result = []
    for members in clusters:
        group = values[members]
        inverted, _ = chart(group[0])
        if inverted:
            with np.errstate(divide="ignore"):
                mean = np.mean(np.where(np.isinf(group), 0j, 1.0 / group))
            centroid = INFINITY if mean == 0 else 1.0 / mean
        else:
            centroid = complex(np.mean(group))
        spread = float(chordal_distance_array(group, centroid).max())
        result.append((complex(centroid), len(members), spread))
    return result
