"""
Conformal eigenmeasures: fixed points of the normalized dual transfer operator.
"""

import numpy as np

from ..config.options import THERMO
from ..sphere.metric import MetricSpec, derivative_norms
from ..sphere.point import SpherePoint
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger
from .base_iteration import BackwardIteration
from .measures import DiscretizedMeasure, Provenance

logger = get_logger("kmsdyn_eigenmeasure")


class EigenmeasureIteration(BackwardIteration):
    """Pullback with branch weights ``mult * |R'(z)|^-delta``; critical branches are dropped."""

    provenance = Provenance.EIGENMEASURE

    def __init__(self, map: RationalMap, delta: float, seed=None, rng=None, metric: MetricSpec | None = None):
        self.delta = float(delta)
        super().__init__(map, seed, rng, metric)

    def step_log_weights(self, children: np.ndarray, multiplicity: np.ndarray) -> np.ndarray:
        norms = derivative_norms(self.map, children, self.metric)
        return np.log(multiplicity) - self.delta * np.log(norms)


def conformal_eigenmeasure(
    map: RationalMap,
    delta: float,
    depth: int | None = None,
    seed: "SpherePoint | complex | None" = None,
    rng: np.random.Generator | None = None,
    metric: MetricSpec | None = None,
) -> DiscretizedMeasure:
    """Iterates the weighted pullback until the drift falls below ``THERMO.drift_tol``.

    ``depth`` caps the number of iterations (default ``THERMO.max_iterations``).
    The result records the final drift and whether the criterion was met.
    """
    depth = THERMO.max_iterations if depth is None else depth
    iteration = EigenmeasureIteration(map, delta, seed, rng, metric)
    measure = iteration.run(depth, stop_on_drift=True)
    if not measure.converged:
        logger.warning(f"Eigenmeasure for delta={delta} did not converge (drift {measure.drift:.3e})")
    return measure
