"""
Poincaré series of grand orbits and the atomic conformal measures they normalize.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from ..config.options import POINCARE, TOLERANCE, TREE
from ..errors import InconclusiveError, PreconditionError
from ..orbits.forward import analyze_orbit
from ..orbits.tree import BackwardTree, backward_tree, tree_size
from ..sphere.metric import Chordal, Weighted, derivative_norms
from ..sphere.point import SpherePoint, chordal_distance_array
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger
from .cocycle import CocycleSpec, Conformal, Gauge, Generalized, TransferPath, log_transfer_weight, spec_metric
from .isotropy import orbit_consistent

logger = get_logger("kmsdyn_poincare")


@dataclass(frozen=True)
class SummabilityVerdict:
    """``summable`` is None when the finite-depth evidence does not decide.

    ``method`` is ``finite`` (the member search closed up), ``analytic`` (the
    gauge threshold ``beta > log d``) or ``tail-ratio``.
    """

    summable: bool | None
    method: str
    tail_ratio: float
    tail_estimate: float


@dataclass(frozen=True)
class PoincareSeries:
    beta: float
    base: SpherePoint
    partial_sums: np.ndarray  # S_1 .. S_depth
    increments: np.ndarray  # generation sums for k = 1 .. depth
    slope: float | None
    tail_ratio: float
    members: int
    finite: bool
    verdict: SummabilityVerdict
    numeric_verdict: SummabilityVerdict

    @property
    def depth(self) -> int:
        return len(self.partial_sums)

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1]) if len(self.partial_sums) else 1.0


@dataclass(frozen=True)
class AtomicConformalMeasure:
    """Normalized atoms ``l_x(z)^beta / sum`` on a truncated grand orbit.

    ``generations`` is the backward-tree generation each atom was found in,
    so the atom at index i is related to the base by the path
    ``(forward, generations[i])``.
    """

    beta: float
    base: SpherePoint
    points: np.ndarray
    log_weights: np.ndarray
    generations: np.ndarray
    forward: int = 0
    depth: int = 0
    tail_estimate: float = 0.0
    truncated: bool = False
    spec_name: str = "conformal"

    def __post_init__(self):
        if len(self.points) == 0:
            raise PreconditionError("an atomic measure needs at least one atom")

    @property
    def log_normalization(self) -> float:
        return float(logsumexp(self.log_weights))

    @property
    def normalization(self) -> float:
        return math.exp(self.log_normalization)

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_normalization)

    @property
    def atoms(self) -> list[tuple[SpherePoint, float]]:
        return [(SpherePoint.of(z), float(w)) for z, w in zip(self.points, self.weights)]

    @property
    def is_dirac(self) -> bool:
        return len(self.points) == 1

    def mass_at(self, z: "SpherePoint | complex", tol: float | None = None) -> float:
        tol = TOLERANCE.cluster if tol is None else tol
        hit = chordal_distance_array(self.points, complex(SpherePoint.of(z))) <= tol
        return float(self.weights[hit].sum())

    def mass(self, zs) -> float:
        """Mass of a finite set of points."""
        return float(sum(self.mass_at(z) for z in _distinct_points(zs)))


def _distinct_points(zs) -> list[complex]:
    out: list[complex] = []
    for z in (complex(SpherePoint.of(p)) for p in zs):
        if not out or chordal_distance_array(np.array(out), z).min() > TOLERANCE.cluster:
            out.append(z)
    return out


def affordable_depth(map: RationalMap, depth: int) -> int:
    """Largest depth not above ``depth`` whose full tree fits the node budget."""
    while depth > 0 and tree_size(map.degree, depth) > TREE.node_budget:
        depth -= 1
    return depth


@dataclass
class _Members:
    points: list[np.ndarray] = field(default_factory=list)
    cocycles: list[np.ndarray] = field(default_factory=list)
    generations: list[np.ndarray] = field(default_factory=list)


def _node_cocycles(
    map: RationalMap,
    tree: BackwardTree,
    k: int,
    index: np.ndarray,
    spec: CocycleSpec,
    x: SpherePoint,
    forward: int,
    valency: int,
    potentials: list[np.ndarray] | None,
) -> np.ndarray:
    """Cocycle values of the paths ``(forward, k)`` from ``x`` to the selected generation-k nodes."""
    match spec:
        case Gauge():
            return np.full(index.size, float(forward - k))
        case Generalized():
            orbit = np.array([complex(p) for p in map.orbit(x, forward)[:-1]])
            head = float(spec.values(orbit).sum()) if forward else 0.0
            tail = tree.ancestor_sum(potentials, k)[index] if k else np.zeros(index.size)
            return head - tail
    if valency == 1:
        orbit = map.orbit(x, forward)[:-1]
        values = np.array([complex(p) for p in orbit])
        with np.errstate(divide="ignore"):
            head = float(np.sum(np.log(derivative_norms(map, values, tree.metric)))) if forward else 0.0
        return head - tree.generation(k).log_derivative[index]
    points = tree.generation(k).points
    return np.array(
        [
            log_transfer_weight(map, TransferPath(x, SpherePoint.of(points[i]), forward, k, valency), tree.metric)
            for i in index
        ]
    )


def _enumerate_members(
    map: RationalMap, x: SpherePoint, spec: CocycleSpec, depth: int, forward: int
) -> tuple[_Members, bool]:
    """Grand-orbit members reached as backward-tree nodes of ``R^forward(x)``.

    A node at generation k is a member when its branch valency equals
    ``val(R^forward, x)``. Points are deduplicated only for pre-periodic bases,
    whose trees revisit the cycle.
    """
    orbit = map.orbit(x, forward)
    valency = math.prod(map.valency(p) for p in orbit[:-1])
    # Only the conformal cocycle reads the tree's derivatives
    metric = spec_metric(spec) if isinstance(spec, Conformal) else Chordal()
    tree = backward_tree(map, orbit[-1], depth, metric)
    potentials = None
    if isinstance(spec, Generalized):
        potentials = [spec.values(g.points) for g in tree.generations]

    members = _Members()
    for k in range(depth + 1):
        g = tree.generation(k)
        index = np.flatnonzero(g.valency == valency)
        members.points.append(g.points[index])
        members.generations.append(np.full(index.size, k))
        members.cocycles.append(
            _node_cocycles(map, tree, k, index, spec, x, forward, valency, potentials)
            if index.size
            else np.zeros(0)
        )

    record = analyze_orbit(map, x)
    if record.is_pre_periodic:
        _dedupe(members)
    empty_tail = all(p.size == 0 for p in members.points[-2:]) if depth >= 2 else False
    return members, empty_tail


def _dedupe(members: _Members) -> None:
    seen = np.zeros(0, dtype=complex)
    for k in range(len(members.points)):
        points = members.points[k]
        keep = np.ones(points.size, dtype=bool)
        for i, z in enumerate(points):
            near = seen.size and chordal_distance_array(seen, z).min() <= TOLERANCE.cluster
            if near:
                keep[i] = False
            else:
                seen = np.append(seen, z)
        members.points[k] = points[keep]
        members.cocycles[k] = members.cocycles[k][keep]
        members.generations[k] = members.generations[k][keep]


def _slope(log_increments: np.ndarray) -> float | None:
    k = np.arange(1, len(log_increments) + 1)
    usable = np.isfinite(log_increments) & (k > POINCARE.fit_skip)
    if usable.sum() < 2:
        return None
    return float(np.polyfit(k[usable], log_increments[usable], 1)[0])


def _tail(increments: np.ndarray, total: float) -> tuple[float, float]:
    if len(increments) < 2 or increments[-1] == 0:
        return 0.0, 0.0
    if increments[-2] == 0:
        return math.inf, math.inf
    ratio = float(increments[-1] / increments[-2])
    estimate = increments[-1] * ratio / (1 - ratio) if ratio < 1 else math.inf
    return ratio, float(estimate / total)


def _numeric_verdict(finite: bool, ratio: float, estimate: float) -> SummabilityVerdict:
    if finite:
        return SummabilityVerdict(True, "finite", ratio, 0.0)
    if ratio < 1 - POINCARE.tail_margin:
        summable = True if estimate <= POINCARE.tail_tolerance else None
        return SummabilityVerdict(summable, "tail-ratio", ratio, estimate)
    if ratio >= 1:
        return SummabilityVerdict(False, "tail-ratio", ratio, estimate)
    return SummabilityVerdict(None, "tail-ratio", ratio, estimate)


def poincare_partial_sums(
    map: RationalMap,
    x: "SpherePoint | complex",
    beta: float,
    spec: CocycleSpec,
    depth: int | None = None,
    forward: int = 0,
    horizon: int | None = None,
) -> PoincareSeries:
    """Partial sums ``S_N`` of ``sum l_x(z)^beta`` over grand-orbit members up to generation N.

    Members are the nodes of the backward tree of ``R^forward(x)`` whose branch
    valency equals ``val(R^forward, x)``; with ``forward = 0`` these are the
    preimages of x through non-critical branches, and ``S_0 = 1``.

    Raises:
        PreconditionError: when the orbit of x is not consistent for the cocycle.
        BudgetExceeded: when the tree does not fit the node budget.
    """
    series, _ = _series(map, x, beta, spec, depth, forward, horizon)
    return series


def _series(map, x, beta, spec, depth, forward, horizon) -> tuple[PoincareSeries, _Members]:
    if forward < 0:
        raise PreconditionError("forward exponent must be non-negative")
    x = SpherePoint.of(x)
    if not orbit_consistent(map, x, horizon, spec):
        raise PreconditionError(f"the orbit of {x} is not consistent; its Poincaré series is undefined")
    depth = POINCARE.depth if depth is None else depth
    members, finite = _enumerate_members(map, x, spec, depth, forward)

    with np.errstate(over="ignore"):
        log_generation = np.array(
            [logsumexp(beta * c) if c.size else -np.inf for c in members.cocycles]
        )
    generation_sums = np.exp(log_generation)
    increments = generation_sums[1:]
    partial = np.cumsum(generation_sums)[1:]
    total = float(partial[-1]) if partial.size else float(generation_sums[0])
    with np.errstate(divide="ignore"):
        log_increments = np.log(increments)
    ratio, estimate = _tail(increments, total)
    numeric = _numeric_verdict(finite, ratio, estimate)

    verdict = numeric
    if isinstance(spec, Gauge) and not finite:
        verdict = SummabilityVerdict(beta > math.log(map.degree), "analytic", ratio, estimate)

    series = PoincareSeries(
        beta=beta,
        base=x,
        partial_sums=partial,
        increments=increments,
        slope=_slope(log_increments),
        tail_ratio=ratio,
        members=int(sum(p.size for p in members.points)),
        finite=finite,
        verdict=verdict,
        numeric_verdict=numeric,
    )
    logger.debug(
        f"Poincaré series at {x}, beta={beta}: S_{depth}={series.total:.6g}, "
        f"tail ratio {ratio:.4g}, verdict {verdict.summable} ({verdict.method})"
    )
    return series, members


def atomic_measure(
    map: RationalMap,
    x: "SpherePoint | complex",
    beta: float,
    spec: CocycleSpec,
    depth: int | None = None,
    forward: int = 0,
    require_converged: bool = True,
) -> AtomicConformalMeasure:
    """The normalized atomic measure on the grand orbit of ``x``.

    Raises:
        PreconditionError: when the series diverges.
        InconclusiveError: when summability is undecided and ``require_converged`` is set.
    """
    series, members = _series(map, x, beta, spec, depth, forward, None)
    verdict = series.verdict
    if require_converged and verdict.summable is False:
        raise PreconditionError(f"the Poincaré series at {series.base} diverges for beta={beta}")
    if require_converged and verdict.summable is None:
        raise InconclusiveError(
            f"summability at {series.base} undecided (tail ratio {verdict.tail_ratio:.4g})"
        )
    points = np.concatenate(members.points)
    return AtomicConformalMeasure(
        beta=beta,
        base=series.base,
        points=points,
        log_weights=beta * np.concatenate(members.cocycles),
        generations=np.concatenate(members.generations),
        forward=forward,
        depth=series.depth,
        tail_estimate=verdict.tail_estimate,
        truncated=not series.finite,
        spec_name=spec.name,
    )


def reweight_measure(measure: AtomicConformalMeasure, r: Callable) -> AtomicConformalMeasure:
    """Atomic weights rescaled by ``(r(z) / r(x))^beta`` and renormalized.

    Raises:
        PreconditionError: where r is not positive.
    """
    weight = r if isinstance(r, Weighted) else Weighted(r, base=Chordal())
    shift = np.log(weight.rs(measure.points)) - math.log(weight.r(complex(measure.base)))
    return replace(measure, log_weights=measure.log_weights + measure.beta * shift)
