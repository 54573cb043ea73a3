"""
Lyubich measure of maximal entropy by equidistribution of preimages.
"""

import math

import numpy as np

from ..config.options import THERMO, TREE
from ..errors import BudgetExceeded, PreconditionError
from ..orbits.tree import tree_size
from ..sphere.point import SpherePoint
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger
from .base_iteration import BackwardIteration
from .measures import DiscretizedMeasure, Provenance

logger = get_logger("kmsdyn_lyubich")


class LyubichIteration(BackwardIteration):
    """Each preimage branch gets ``1/d`` of its parent's mass, counted with multiplicity."""

    provenance = Provenance.LYUBICH

    def step_log_weights(self, children: np.ndarray, multiplicity: np.ndarray) -> np.ndarray:
        return np.log(multiplicity) - math.log(self.map.degree)


def lyubich_measure(
    map: RationalMap,
    depth: int | None = None,
    seed: "SpherePoint | complex | None" = None,
    rng: np.random.Generator | None = None,
) -> DiscretizedMeasure:
    """Mass ``d^-depth`` on every branch of ``R^-depth(seed)``.

    Raises:
        PreconditionError: when the seed is exceptional.
        BudgetExceeded: when ``d^depth`` exceeds the node budget.
    """
    depth = THERMO.lyubich_depth if depth is None else depth
    if depth < 0:
        raise PreconditionError("depth must be non-negative")
    requested = tree_size(map.degree, depth)
    if requested > TREE.node_budget:
        raise BudgetExceeded(requested, TREE.node_budget)
    iteration = LyubichIteration(map, seed, rng)
    return iteration.run(depth)
