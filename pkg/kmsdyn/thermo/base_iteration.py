"""
Base class for measures built by pulling a seed back through the map.
Provides cloud propagation, renormalization, resampling and the drift test.
"""

from abc import ABC, abstractmethod

import numpy as np
from scipy.special import logsumexp

from ..config.options import THERMO, TOLERANCE
from ..errors import PreconditionError
from ..sphere.metric import MetricSpec, resolve_metric
from ..sphere.point import SpherePoint, chordal_distance_array
from ..sphere.rational import RationalMap
from ..sphere.roots import polynomial_roots, trim
from ..utils.logging import get_logger
from .measures import DiscretizedMeasure, Provenance

logger = get_logger("kmsdyn_iteration")


def fixed_points(map: RationalMap) -> list[complex]:
    """Fixed points of the map, infinity included."""
    p = np.pad(map.numerator, (0, map.degree + 2 - len(map.numerator)))
    zq = np.concatenate([[0.0], np.pad(map.denominator, (0, map.degree + 1 - len(map.denominator)))])
    row = trim(p - zq, tol=1e-12)
    points = list(polynomial_roots(row, check=False)) if len(row) > 1 else []
    if len(row) - 1 < map.degree + 1:
        points.append(complex("inf"))
    return [complex(z) for z in points]


def repelling_fixed_point(map: RationalMap) -> complex | None:
    """The fixed point with the largest multiplier above 1, if any."""
    best, best_multiplier = None, 1.0 + TOLERANCE.neutral
    for z in fixed_points(map):
        multiplier = map.spherical_derivative(z)
        if multiplier > best_multiplier:
            best, best_multiplier = z, multiplier
    return best


def is_exceptional(map: RationalMap, z: "SpherePoint | complex", generations: int = 3) -> bool:
    """Whether ``z`` has a finite backward orbit (at most two points)."""
    found = np.array([complex(SpherePoint.of(z))])
    frontier = found
    for _ in range(generations):
        children, _, _, _ = map.preimages_batch(frontier)
        new = [c for c in children if chordal_distance_array(found, c).min() > TOLERANCE.cluster]
        if len(found) + len(new) > 2:
            return False
        if not new:
            return True
        found = np.concatenate([found, new])
        frontier = np.array(new)
    return len(found) <= 2


def julia_seeds(map: RationalMap, count: int, rng: np.random.Generator, burn_in: int | None = None) -> np.ndarray:
    """Points near the Julia set from random backward branches.

    Starts at a repelling fixed point (or a generic point when there is none)
    and follows ``burn_in`` uniformly chosen preimages per seed.
    """
    burn_in = THERMO.burn_in if burn_in is None else burn_in
    start = repelling_fixed_point(map)
    if start is None or np.isinf(start):
        start = complex(0.3, 0.2)
    points = np.full(count, start, dtype=complex)
    for _ in range(burn_in):
        children, parents, _, _ = map.preimages_batch(points)
        counts = np.bincount(parents, minlength=count)
        if np.any(counts == 0):
            raise PreconditionError("backward branch lost during seeding")
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        pick = offsets + rng.integers(0, counts)
        points = children[pick]
    return points


def systematic_resample(weights: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Indices drawn by systematic resampling; each index appears within one of its expected count."""
    positions = (rng.random() + np.arange(size)) / size
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0
    return np.searchsorted(cumulative, positions, side="right")


class BackwardIteration(ABC):
    """Pulls a weighted cloud back through the map one generation at a time.

    Subclasses decide the log weight each preimage branch receives.
    """

    provenance: Provenance

    def __init__(
        self,
        map: RationalMap,
        seed: "SpherePoint | complex | None" = None,
        rng: np.random.Generator | None = None,
        metric: MetricSpec | None = None,
        cloud_cap: int | None = None,
    ):
        self.map = map
        self.rng = np.random.default_rng(0) if rng is None else rng
        self.metric = resolve_metric(map, metric)
        self.cloud_cap = THERMO.cloud_cap if cloud_cap is None else cloud_cap
        if seed is None:
            seed = julia_seeds(map, 1, self.rng)[0]
        self.seed = SpherePoint.of(seed)
        if is_exceptional(map, self.seed):
            raise PreconditionError(f"seed {self.seed} is an exceptional point of the map")

        self.points = np.array([complex(self.seed)])
        self.log_weights = np.zeros(1)
        self.generation = 0
        self.excluded = 0
        self.resampled = False

        logger.info(f"Initialized {self.__class__.__name__} for {map!r} from seed {self.seed}")

    @abstractmethod
    def step_log_weights(self, children: np.ndarray, multiplicity: np.ndarray) -> np.ndarray:
        """
        Log weight factor of each preimage branch.

        Args:
            children: Preimage points.
            multiplicity: Branch multiplicities.

        Returns:
            Array of log factors; non-finite entries drop the branch.
        """
        pass

    def step(self) -> None:
        children, parents, multiplicity, ill = self.map.preimages_batch(self.points)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_weights = self.log_weights[parents] + self.step_log_weights(children, multiplicity)
        keep = np.isfinite(log_weights)
        dropped = int((~keep).sum())
        if dropped:
            self.excluded += dropped
            logger.warning(f"Generation {self.generation + 1}: excluded {dropped} branches with non-finite weight")
        if ill.any():
            logger.warning(f"Generation {self.generation + 1}: {int(ill.sum())} ill-conditioned preimage clusters")
        children, log_weights = children[keep], log_weights[keep]
        if children.size == 0:
            raise PreconditionError("every branch was excluded")
        log_weights = log_weights - logsumexp(log_weights)

        if children.size > self.cloud_cap:
            index = systematic_resample(np.exp(log_weights), self.cloud_cap, self.rng)
            children = children[index]
            log_weights = np.full(self.cloud_cap, -np.log(self.cloud_cap))
            self.resampled = True

        self.points, self.log_weights = children, log_weights
        self.generation += 1

    def snapshot(self, drift: float = np.nan, converged: bool = True) -> DiscretizedMeasure:
        weights = np.exp(self.log_weights)
        weights = weights / weights.sum()
        # Sampling scale of the cloud plus the last step-to-step drift
        error = 1.0 / np.sqrt(len(self.points)) + (drift if np.isfinite(drift) else 0.0)
        return DiscretizedMeasure(
            points=self.points.copy(),
            weights=weights,
            depth=self.generation,
            provenance=self.provenance,
            delta=getattr(self, "delta", None),
            discretization_error=float(error),
            drift=float(drift),
            converged=converged,
            excluded_branches=self.excluded,
        )

    def run(self, generations: int, stop_on_drift: bool = False, drift_tol: float | None = None) -> DiscretizedMeasure:
        """Main iteration loop.

        With ``stop_on_drift`` the loop ends as soon as the total-variation
        drift between consecutive clouds drops below ``drift_tol`` after
        ``THERMO.min_generations``; a loop that never gets there returns a
        measure marked not converged.
        """
        drift_tol = THERMO.drift_tol if drift_tol is None else drift_tol
        logger.info(f"Starting {self.__class__.__name__} for {generations} generations")
        previous = self.snapshot()
        drift, history = np.nan, []
        for _ in range(generations):
            self.step()
            current = self.snapshot()
            drift = previous.total_variation(current)
            history.append(drift)
            previous = current
            if self.generation % THERMO.progress_every == 0:
                logger.debug(f"Generation {self.generation}: {len(self.points)} points, drift {drift:.3e}")
            if stop_on_drift and self.generation >= THERMO.min_generations and drift < drift_tol:
                logger.info(f"{self.__class__.__name__} converged after {self.generation} generations")
                return self.snapshot(drift, converged=True)

        converged = not stop_on_drift
        if stop_on_drift:
            tail = history[-THERMO.min_generations :]
            trend = "decreasing" if len(tail) > 1 and tail[-1] < tail[0] else "not decreasing"
            logger.warning(
                f"{self.__class__.__name__} stopped at generation {self.generation} with drift {drift:.3e} ({trend})"
            )
        return self.snapshot(drift, converged=converged)
