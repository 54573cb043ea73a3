"""
Conformality residuals of atomic and discretized measures.

Three notions are checked:

* ordinary: ``m(R(A)) = ∫_A |R'|_g^beta dm`` on sets where R is injective;
* groupoid: ``m({z}) = l_x(z)^beta m({x})`` for every transfer ``x -> z``;
* Jacobian: ``m(R(A)) = ∫_A e^{beta f} dm`` for a potential f (f = 1 by default).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from ..config.options import TOLERANCE
from ..errors import PreconditionError
from ..sphere.metric import MetricSpec, derivative_norms, resolve_metric
from ..sphere.point import SpherePoint, chordal_distance_array
from ..sphere.rational import RationalMap
from ..thermo.cells import Cell, adaptive_partition
from ..thermo.measures import DiscretizedMeasure
from ..utils.file_operations import csv_text
from ..utils.logging import get_logger
from .cocycle import CocycleSpec, Conformal, Generalized, TransferPath, cocycle_value
from .poincare import AtomicConformalMeasure

logger = get_logger("kmsdyn_conformality")


class Notion(str, Enum):
    ORDINARY = "ordinary"
    GROUPOID = "groupoid"
    JACOBIAN = "jacobian"


@dataclass(frozen=True)
class AtomSet:
    """A finite test set of points."""

    points: tuple[SpherePoint, ...]

    @classmethod
    def of(cls, *points) -> "AtomSet":
        return cls(tuple(SpherePoint.of(p) for p in points))

    @property
    def label(self) -> str:
        return "{" + ", ".join(str(p) for p in self.points) + "}"


@dataclass(frozen=True)
class ResidualRow:
    label: str
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        if math.isinf(self.lhs) or math.isinf(self.rhs):
            return math.inf
        return abs(self.lhs - self.rhs)


@dataclass(frozen=True)
class ResidualReport:
    notion: Notion
    beta: float
    rows: tuple[ResidualRow, ...]
    skipped: tuple[str, ...] = ()

    @property
    def max_residual(self) -> float:
        return max((row.residual for row in self.rows), default=0.0)

    def to_csv(self, preamble: Sequence[str] = ()) -> str:
        rows = ((row.label, row.lhs, row.rhs, row.residual) for row in self.rows)
        return csv_text(("test", "lhs", "rhs", "residual"), rows, preamble)


def _potential(spec: CocycleSpec | None) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(spec, Generalized):
        return spec.values
    return lambda zs: np.ones(np.shape(zs))


def _jacobian(map, beta, notion, spec, metric) -> Callable[[np.ndarray], np.ndarray]:
    """The density integrated over a test set, evaluated only where the measure has mass."""
    if notion is Notion.ORDINARY:
        metric = resolve_metric(map, metric)

        def ordinary(zs):
            with np.errstate(divide="ignore"):
                return derivative_norms(map, zs, metric) ** beta

        return ordinary
    f = _potential(spec)
    return lambda zs: np.exp(beta * f(zs))


def _check_injective(map: RationalMap, test: AtomSet) -> None:
    images = np.array([complex(map(p)) for p in test.points])
    if len(images) > 1:
        distance = chordal_distance_array(images[:, None], images[None, :])
        np.fill_diagonal(distance, np.inf)
        if np.any(distance <= TOLERANCE.point):
            raise PreconditionError(f"the map is not injective on {test.label}")


def _atomic_rows(measure, map, beta, notion, tests, spec, metric) -> list[ResidualRow]:
    density = _jacobian(map, beta, notion, spec, metric)
    rows = []
    for test in tests:
        if not isinstance(test, AtomSet):
            raise PreconditionError("atomic measures are tested on finite point sets")
        _check_injective(map, test)
        images = [map(p) for p in test.points]
        lhs = measure.mass(images)
        rhs = 0.0
        for p in test.points:
            mass = measure.mass_at(p)
            if mass > 0:
                rhs += mass * float(density(np.array([complex(p)]))[0])
        rows.append(ResidualRow(test.label, lhs, rhs))
    return rows


def _default_paths(measure: AtomicConformalMeasure, limit: int = 16) -> list[tuple[int, int]]:
    count = min(len(measure.points), limit)
    return [(i, j) for i in range(count) for j in range(count) if i != j]


def _groupoid_rows(measure, map, beta, tests, spec) -> list[ResidualRow]:
    """Checks ``m(z) = exp(beta c(x -> z)) m(x)`` with cocycles recomputed from scratch."""
    spec = Conformal() if spec is None else spec
    rows = []
    if tests is None:
        tests = []
        for i, j in _default_paths(measure):
            zi, zj = SpherePoint.of(measure.points[i]), SpherePoint.of(measure.points[j])
            tests.append(TransferPath.between(map, zi, zj, int(measure.generations[i]), int(measure.generations[j])))
    for path in tests:
        if not isinstance(path, TransferPath):
            raise PreconditionError("groupoid conformality is tested on transfer paths")
        source, target = measure.mass_at(path.source), measure.mass_at(path.target)
        rhs = math.exp(beta * cocycle_value(spec, path, map)) * source
        label = f"{path.source}->{path.target} ({path.n},{path.l})"
        rows.append(ResidualRow(label, target, rhs))
    return rows


def _cloud_rows(measure, map, beta, notion, tests, spec, metric) -> tuple[list[ResidualRow], list[str]]:
    density = _jacobian(map, beta, notion, spec, metric)
    tests = adaptive_partition(measure.points) if tests is None else tests
    critical = np.array([complex(p) for p, _ in map.critical_points])
    if any(isinstance(cell, (AtomSet, TransferPath)) for cell in tests):
        raise PreconditionError("discretized measures are tested on cells")
    kept, skipped = [], []
    for cell in tests:
        if np.any(cell.contains(critical)) and measure.mass(cell) > 0:
            skipped.append(cell.label)
        else:
            kept.append(cell)
    images = measure.image_masses(map, kept) if kept else np.zeros(0)
    rows = [
        ResidualRow(cell.label, float(lhs), measure.integrate(density, cell)) for cell, lhs in zip(kept, images)
    ]
    if skipped:
        logger.warning(f"Skipped {len(skipped)} test cells containing critical points")
    return rows, skipped


def conformality_residual(
    measure: AtomicConformalMeasure | DiscretizedMeasure,
    map: RationalMap,
    beta: float,
    notion: Notion | str = Notion.ORDINARY,
    tests: Sequence[AtomSet | TransferPath | Cell] | None = None,
    spec: CocycleSpec | None = None,
    metric: MetricSpec | None = None,
) -> ResidualReport:
    """Per-test residuals ``|LHS - RHS|`` of a conformality identity.

    Args:
        measure: Atomic measure or weighted cloud.
        map: The rational map.
        beta: Exponent.
        notion: Ordinary, groupoid or Jacobian.
        tests: Point sets (atomic, ordinary/Jacobian), transfer paths
            (groupoid) or cells (clouds). Defaults: paths between the first
            atoms, or an adaptive cell partition of the cloud.
        spec: Cocycle for the groupoid notion (conformal by default) or the
            potential for the Jacobian notion.
        metric: Metric of the ordinary notion.

    Returns:
        ResidualReport: One row per test and the maximum residual.

    Raises:
        PreconditionError: for non-injective test sets, a missing default test
            family, or the groupoid notion on a cloud.
    """
    notion = Notion(notion)
    skipped: list[str] = []
    if isinstance(measure, DiscretizedMeasure):
        if notion is Notion.GROUPOID:
            raise PreconditionError("groupoid conformality needs an atomic measure")
        rows, skipped = _cloud_rows(measure, map, beta, notion, tests, spec, metric)
    elif notion is Notion.GROUPOID:
        rows = _groupoid_rows(measure, map, beta, tests, spec)
    else:
        if tests is None:
            raise PreconditionError("ordinary and Jacobian residuals of atomic measures need explicit test sets")
        rows = _atomic_rows(measure, map, beta, notion, tests, spec, metric)
    report = ResidualReport(notion, float(beta), tuple(rows), tuple(skipped))
    logger.debug(f"{notion.value} residual at beta={beta}: max {report.max_residual:.3e} over {len(rows)} tests")
    return report
