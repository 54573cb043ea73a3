"""
Test cells for discretized measures: arcs by argument, intervals by real part
and rectangles in the plane.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..config.options import THERMO
from ..errors import PreconditionError

TAU = 2.0 * math.pi


@dataclass(frozen=True)
class AngleCell:
    """``lo <= arg z < hi`` with arguments in ``[0, 2 pi)``."""

    lo: float
    hi: float

    def contains(self, zs) -> np.ndarray:
        angle = np.mod(np.angle(np.asarray(zs, dtype=complex)), TAU)
        return (angle >= self.lo) & (angle < self.hi)

    @property
    def label(self) -> str:
        return f"arg[{self.lo:.6f},{self.hi:.6f})"


@dataclass(frozen=True)
class IntervalCell:
    """``lo <= Re z < hi`` (closed on the right when ``closed``)."""

    lo: float
    hi: float
    closed: bool = False

    def contains(self, zs) -> np.ndarray:
        x = np.real(np.asarray(zs, dtype=complex))
        upper = x <= self.hi if self.closed else x < self.hi
        return (x >= self.lo) & upper & np.isfinite(x)

    @property
    def label(self) -> str:
        return f"re[{self.lo:.6f},{self.hi:.6f}{']' if self.closed else ')'}"


@dataclass(frozen=True)
class BoxCell:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    def contains(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        x, y = zs.real, zs.imag
        return (x >= self.re_lo) & (x < self.re_hi) & (y >= self.im_lo) & (y < self.im_hi)

    @property
    def label(self) -> str:
        return f"box[{self.re_lo:.6f},{self.re_hi:.6f})x[{self.im_lo:.6f},{self.im_hi:.6f})"


Cell = AngleCell | IntervalCell | BoxCell


def angular_partition(n: int) -> list[AngleCell]:
    if n < 1:
        raise PreconditionError("a partition needs at least one cell")
    edges = np.linspace(0.0, TAU, n + 1)
    return [AngleCell(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])]


def interval_partition(lo: float, hi: float, n: int) -> list[IntervalCell]:
    if n < 1 or not hi > lo:
        raise PreconditionError("an interval partition needs n >= 1 and lo < hi")
    edges = np.linspace(lo, hi, n + 1)
    return [
        IntervalCell(float(a), float(b), closed=(i == n - 1))
        for i, (a, b) in enumerate(zip(edges[:-1], edges[1:]))
    ]


def adaptive_partition(points, cells: int | None = None) -> list[Cell]:
    """A partition of the bounding box of a finite point cloud.

    Clouds on a horizontal segment get ``cells`` intervals; otherwise the box
    is cut into a ``sqrt(cells)`` square grid.
    """
    cells = THERMO.cells if cells is None else cells
    zs = np.asarray(points, dtype=complex)
    zs = zs[np.isfinite(zs)]
    if zs.size == 0:
        raise PreconditionError("cannot partition an empty cloud")
    x_lo, x_hi = float(zs.real.min()), float(zs.real.max())
    y_lo, y_hi = float(zs.imag.min()), float(zs.imag.max())
    scale = max(x_hi - x_lo, y_hi - y_lo, 1e-12)
    if y_hi - y_lo <= 1e-9 * scale:
        return interval_partition(x_lo, x_hi if x_hi > x_lo else x_lo + 1e-12, cells)

    side = max(int(round(math.sqrt(cells))), 1)
    pad = 1e-9 * scale
    xs = np.linspace(x_lo, x_hi + pad, side + 1)
    ys = np.linspace(y_lo, y_hi + pad, side + 1)
    return [
        BoxCell(float(xs[i]), float(xs[i + 1]), float(ys[j]), float(ys[j + 1]))
        for i in range(side)
        for j in range(side)
    ]
