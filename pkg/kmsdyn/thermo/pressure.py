"""
Preimage pressure of ``-delta log |R'|`` and the root of Bowen's equation.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from ..config.options import THERMO
from ..errors import InconclusiveError, PreconditionError
from ..orbits.forward import analyze_orbit, classify_cycle
from ..orbits.records import CycleClass
from ..orbits.tree import BackwardTree, backward_tree
from ..sphere.metric import MetricSpec
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger
from .base_iteration import julia_seeds

logger = get_logger("kmsdyn_pressure")

ESTIMATORS = ("birkhoff", "ratio")


@dataclass(frozen=True)
class PressureEstimate:
    delta: float
    value: float
    error: float
    depth: int
    estimator: str
    per_seed: tuple[float, ...]
    excluded_branches: int = 0
    low_confidence: bool = False


@dataclass(frozen=True)
class PressureCurve:
    """Pressure samples on a delta grid; ``monotone`` is False when a sample rose."""

    samples: tuple[PressureEstimate, ...]
    monotone: bool
    bracket: tuple[float, float] | None
    violations: tuple[int, ...] = ()

    @property
    def deltas(self) -> np.ndarray:
        return np.array([s.delta for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples])


@dataclass(frozen=True)
class BowenEstimate:
    value: float
    error: float
    rigorous: bool
    depth: int
    curve: PressureCurve | None = None

    @property
    def band(self) -> tuple[float, float]:
        return self.value - self.error, self.value + self.error


def is_hyperbolic(map: RationalMap, horizon: int | None = None) -> bool:
    """Every critical point is attracted to, or lands on, an attracting cycle."""
    for point, _ in map.critical_points:
        record = analyze_orbit(map, point, horizon)
        if record.is_attracted:
            continue
        if record.is_pre_periodic and classify_cycle(record) in (CycleClass.ATTRACTING, CycleClass.SUPERATTRACTING):
            continue
        return False
    return True


class PressureSampler:
    """Backward trees of a few Julia seeds, built once and evaluated for any delta."""

    def __init__(
        self,
        map: RationalMap,
        depth: int | None = None,
        metric: MetricSpec | None = None,
        seeds: int | None = None,
        rng: np.random.Generator | None = None,
    ):
        self.map = map
        self.depth = THERMO.pressure_depth if depth is None else depth
        if self.depth < 2:
            raise PreconditionError("pressure needs depth at least 2")
        rng = np.random.default_rng(0) if rng is None else rng
        count = THERMO.seeds if seeds is None else seeds
        self.trees: list[BackwardTree] = [
            backward_tree(map, z, self.depth, metric) for z in julia_seeds(map, count, rng)
        ]
        self.hyperbolic = is_hyperbolic(map)
        logger.debug(f"Pressure sampler for {map!r}: {count} seeds to depth {self.depth}")

    def _log_sums(self, tree: BackwardTree, delta: float) -> tuple[np.ndarray, int]:
        """``log Z_k`` for k = 0..depth with valency-aware branch weights."""
        sums, excluded = [], 0
        for g in tree.generations:
            log_valency = np.log(g.valency)
            critical = ~np.isfinite(g.log_derivative)
            if delta == 0:
                terms = log_valency
            elif delta > 0:
                excluded += int(critical.sum())
                terms = (log_valency - delta * g.log_derivative)[~critical]
            else:
                terms = np.where(critical, -np.inf, log_valency - delta * g.log_derivative)
            sums.append(float(logsumexp(terms)) if terms.size else -np.inf)
        return np.array(sums), excluded

    def estimate(self, delta: float, estimator: str | None = None) -> PressureEstimate:
        estimator = THERMO.estimator if estimator is None else estimator
        if estimator not in ESTIMATORS:
            raise PreconditionError(f"unknown pressure estimator {estimator!r}")
        n = self.depth
        finals, previous, excluded = [], [], 0
        for tree in self.trees:
            log_z, dropped = self._log_sums(tree, delta)
            excluded += dropped
            if estimator == "birkhoff":
                finals.append(log_z[n] / n)
                previous.append(log_z[n - 1] / (n - 1))
            else:
                finals.append(log_z[n] - log_z[n - 1])
                previous.append(log_z[n - 1] - log_z[n - 2])
        finals_a, previous_a = np.array(finals), np.array(previous)
        value = float(finals_a.mean())
        seed_spread = float(finals_a.max() - finals_a.min())
        depth_spread = float(abs(value - previous_a.mean()))
        error = max(seed_spread + depth_spread, THERMO.min_error)
        return PressureEstimate(
            delta=float(delta),
            value=value,
            error=error,
            depth=n,
            estimator=estimator,
            per_seed=tuple(float(v) for v in finals_a),
            excluded_branches=excluded,
            low_confidence=not self.hyperbolic or excluded > 0 or not math.isfinite(value),
        )

    def curve(self, deltas, estimator: str | None = None) -> PressureCurve:
        samples = tuple(self.estimate(float(d), estimator) for d in sorted(deltas))
        values = [s.value for s in samples]
        violations = tuple(i for i in range(1, len(values)) if values[i] > values[i - 1])
        bracket = None
        for a, b in zip(samples, samples[1:]):
            if a.value >= 0 >= b.value:
                bracket = (a.delta, b.delta)
                break
        if violations:
            logger.warning(f"Pressure not monotone at deltas {[samples[i].delta for i in violations]}")
        return PressureCurve(samples, monotone=not violations, bracket=bracket, violations=violations)


def pressure_estimate(
    map: RationalMap,
    delta: float,
    depth: int | None = None,
    metric: MetricSpec | None = None,
    estimator: str | None = None,
    rng: np.random.Generator | None = None,
) -> PressureEstimate:
    return PressureSampler(map, depth, metric, rng=rng).estimate(delta, estimator)


def pressure(
    map: RationalMap,
    delta: float,
    depth: int | None = None,
    metric: MetricSpec | None = None,
) -> float:
    """``(1/n) log sum |(R^n)'(z)|^-delta`` over ``R^-n`` of Julia seeds, averaged over seeds."""
    return pressure_estimate(map, delta, depth, metric).value


def pressure_curve(
    map: RationalMap,
    deltas,
    depth: int | None = None,
    metric: MetricSpec | None = None,
    estimator: str | None = None,
    rng: np.random.Generator | None = None,
) -> PressureCurve:
    return PressureSampler(map, depth, metric, rng=rng).curve(deltas, estimator)


def bowen_dimension(
    map: RationalMap,
    tol: float | None = None,
    depth: int | None = None,
    metric: MetricSpec | None = None,
    rng: np.random.Generator | None = None,
) -> BowenEstimate:
    """Root of ``P(delta) = 0`` on ``THERMO.bracket``.

    The error bar is the pressure error at the root divided by the slope of the
    pressure there, plus the root-finding tolerance.

    Raises:
        InconclusiveError: when the sampled pressure is not monotone or does
            not change sign on the bracket.
    """
    tol = THERMO.bowen_tol if tol is None else tol
    sampler = PressureSampler(map, depth, metric, rng=rng)
    estimator = THERMO.bowen_estimator
    lo, hi = THERMO.bracket
    curve = sampler.curve(np.linspace(lo, hi, THERMO.monotone_grid), estimator)
    if not curve.monotone:
        raise InconclusiveError(f"pressure samples are not monotone at depth {sampler.depth}; increase the depth")
    if curve.bracket is None:
        raise InconclusiveError(f"pressure does not change sign on [{lo}, {hi}]")

    def f(delta: float) -> float:
        return sampler.estimate(delta, estimator).value

    root = brentq(f, *curve.bracket, xtol=tol)
    at_root = sampler.estimate(root, estimator)
    h = (hi - lo) / (THERMO.monotone_grid - 1)
    slope = (f(root + h / 2) - f(root - h / 2)) / h
    if slope >= 0:
        raise InconclusiveError("pressure is not decreasing at the root")
    error = max(at_root.error / abs(slope) + tol, THERMO.min_error)
    logger.info(f"Bowen root for {map!r}: {root:.5f} ± {error:.5f} ({'rigorous' if sampler.hyperbolic else 'non-rigorous'})")
    return BowenEstimate(
        value=float(root),
        error=float(error),
        rigorous=sampler.hyperbolic,
        depth=sampler.depth,
        curve=curve,
    )
