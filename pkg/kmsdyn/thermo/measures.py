"""
Weighted point clouds approximating non-atomic measures on the sphere.

Binary cloud layout (little-endian)::

    magic    4 bytes   b"KMSC"
    version  uint16
    kind     uint16    1 = Lyubich, 2 = eigenmeasure
    count    uint64
    delta    float64   NaN for Lyubich clouds
    records  count x (re float64, im float64, weight float64)
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from ..config.options import OUTPUT
from ..errors import OutputError, PreconditionError
from ..sphere.rational import RationalMap
from ..utils.file_operations import csv_text
from .cells import Cell, adaptive_partition

HEADER = np.dtype(
    [("magic", "S4"), ("version", "<u2"), ("kind", "<u2"), ("count", "<u8"), ("delta", "<f8")]
)
RECORD = np.dtype([("re", "<f8"), ("im", "<f8"), ("weight", "<f8")])


class Provenance(str, Enum):
    LYUBICH = "lyubich"
    EIGENMEASURE = "eigenmeasure"

    @property
    def code(self) -> int:
        return 1 if self is Provenance.LYUBICH else 2

    @classmethod
    def from_code(cls, code: int) -> "Provenance":
        return {1: cls.LYUBICH, 2: cls.EIGENMEASURE}[code]


@dataclass(frozen=True)
class DiscretizedMeasure:
    """A probability measure given as a weighted cloud.

    ``drift`` is the total variation between the last two generations on an
    adaptive partition; ``excluded_branches`` counts preimage branches dropped
    because their weight was not finite (critical points).
    """

    points: np.ndarray
    weights: np.ndarray
    depth: int
    provenance: Provenance
    delta: float | None = None
    discretization_error: float = 0.0
    drift: float = math.nan
    converged: bool = True
    excluded_branches: int = 0

    def __post_init__(self):
        if len(self.points) != len(self.weights) or len(self.points) == 0:
            raise PreconditionError("a cloud needs matching, non-empty point and weight arrays")
        if np.any(self.weights <= 0):
            raise PreconditionError("cloud weights must be positive")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def mass(self, cell: Cell) -> float:
        return float(self.weights[cell.contains(self.points)].sum())

    def cell_masses(self, cells: Sequence[Cell]) -> np.ndarray:
        return np.array([self.mass(cell) for cell in cells])

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray], cell: Cell | None = None) -> float:
        inside = np.ones(len(self.points), dtype=bool) if cell is None else cell.contains(self.points)
        return float(np.sum(self.weights[inside] * fn(self.points[inside])))

    def preimage_mass(self, map: RationalMap, cell: Cell) -> float:
        """``m(R^{-1}(B))``: mass of the points mapped into the cell."""
        return float(self.weights[cell.contains(map.values(self.points))].sum())

    def image_mass(self, map: RationalMap, cell: Cell) -> float:
        """``m(R(A))``: mass of the points having a preimage in the cell."""
        return float(self.image_masses(map, [cell])[0])

    def image_masses(self, map: RationalMap, cells: Sequence[Cell]) -> np.ndarray:
        children, parents, _, _ = map.preimages_batch(self.points)
        masses = np.zeros(len(cells))
        for i, cell in enumerate(cells):
            hit = np.zeros(len(self.points), dtype=bool)
            hit[parents[cell.contains(children)]] = True
            masses[i] = self.weights[hit].sum()
        return masses

    def total_variation(self, other: "DiscretizedMeasure", cells: Sequence[Cell] | None = None) -> float:
        cells = adaptive_partition(np.concatenate([self.points, other.points])) if cells is None else cells
        return 0.5 * float(np.abs(self.cell_masses(cells) - other.cell_masses(cells)).sum())

    def to_csv(self, preamble: Sequence[str] = ()) -> str:
        rows = ((z.real, z.imag, w) for z, w in zip(self.points, self.weights))
        return csv_text(("re", "im", "weight"), rows, preamble)

    def to_binary(self) -> bytes:
        header = np.zeros(1, dtype=HEADER)
        header["magic"] = OUTPUT.binary_magic
        header["version"] = OUTPUT.binary_version
        header["kind"] = self.provenance.code
        header["count"] = len(self.points)
        header["delta"] = math.nan if self.delta is None else self.delta
        records = np.zeros(len(self.points), dtype=RECORD)
        records["re"] = self.points.real
        records["im"] = np.where(np.isinf(self.points), 0.0, self.points.imag)
        records["weight"] = self.weights
        return header.tobytes() + records.tobytes()

    @classmethod
    def from_binary(cls, payload: bytes) -> "DiscretizedMeasure":
        if len(payload) < HEADER.itemsize:
            raise OutputError("binary cloud is truncated")
        header = np.frombuffer(payload[: HEADER.itemsize], dtype=HEADER)[0]
        if bytes(header["magic"]) != OUTPUT.binary_magic:
            raise OutputError("not a kmsdyn binary cloud")
        if int(header["version"]) != OUTPUT.binary_version:
            raise OutputError(f"unsupported cloud version {int(header['version'])}")
        count = int(header["count"])
        body = payload[HEADER.itemsize :]
        if len(body) != count * RECORD.itemsize:
            raise OutputError("binary cloud length does not match its header")
        records = np.frombuffer(body, dtype=RECORD)
        points = records["re"] + 1j * records["im"]
        points = np.where(np.isinf(records["re"]), complex("inf"), points)
        delta = float(header["delta"])
        return cls(
            points=points,
            weights=records["weight"].copy(),
            depth=0,
            provenance=Provenance.from_code(int(header["kind"])),
            delta=None if math.isnan(delta) else delta,
        )


def weighted_ks_distance(values, weights, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov distance between a weighted sample and a continuous CDF."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values)
    x = values[order]
    w = np.asarray(weights, dtype=float)[order]
    w = w / w.sum()
    upper = np.cumsum(w)
    lower = upper - w
    F = cdf(x)
    return float(max(np.max(np.abs(upper - F)), np.max(np.abs(lower - F))))


def arcsine_ks_distance(measure: DiscretizedMeasure) -> float:
    """KS distance of the real-part pushforward from the arcsine law on ``[-2, 2]``."""
    law = stats.arcsine(loc=-2.0, scale=4.0)
    return weighted_ks_distance(measure.points.real, measure.weights, law.cdf)


def uniform_ks_distance(measure: DiscretizedMeasure, lo: float = -2.0, hi: float = 2.0) -> float:
    law = stats.uniform(loc=lo, scale=hi - lo)
    return weighted_ks_distance(measure.points.real, measure.weights, law.cdf)
