"""
Truncated backward-orbit trees.

The tree is over branches, not points: two branches reaching the same point
stay separate nodes, since weights attach to branches.
"""

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..config.options import TREE
from ..errors import BudgetExceeded, PreconditionError
from ..sphere.metric import MetricSpec, derivative_norms, resolve_metric
from ..sphere.point import SpherePoint
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger

logger = get_logger("kmsdyn_tree")


@dataclass(frozen=True)
class TreeGeneration:
    """One generation of a backward tree, as parallel arrays.

    ``log_derivative`` is ``log |(R^k)'(z)|_g`` along the branch from the node
    to the root; it is ``-inf`` for branches through a critical point.
    """

    points: np.ndarray
    parents: np.ndarray
    multiplicity: np.ndarray
    valency: np.ndarray
    log_derivative: np.ndarray
    ill_conditioned: np.ndarray

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class TreeNode:
    point: SpherePoint
    generation: int
    index: int
    parent: int
    multiplicity: int
    valency: int
    log_derivative: float
    ill_conditioned: bool

    @property
    def derivative(self) -> float:
        return float(np.exp(self.log_derivative))


class BackwardTree:
    """Preimage tree of ``root`` to ``depth`` with derivative and valency accumulators."""

    def __init__(self, map: RationalMap, root: SpherePoint, metric: MetricSpec, generations: list[TreeGeneration]):
        self.map = map
        self.root = root
        self.metric = metric
        self.generations = generations

    @property
    def depth(self) -> int:
        return len(self.generations) - 1

    def generation(self, k: int) -> TreeGeneration:
        return self.generations[k]

    def node(self, k: int, index: int) -> TreeNode:
        g = self.generations[k]
        return TreeNode(
            point=SpherePoint.of(g.points[index]),
            generation=k,
            index=index,
            parent=int(g.parents[index]),
            multiplicity=int(g.multiplicity[index]),
            valency=int(g.valency[index]),
            log_derivative=float(g.log_derivative[index]),
            ill_conditioned=bool(g.ill_conditioned[index]),
        )

    def nodes(self, k: int | None = None) -> Iterator[TreeNode]:
        levels = range(len(self.generations)) if k is None else [k]
        for level in levels:
            for index in range(len(self.generations[level])):
                yield self.node(level, index)

    def count_with_multiplicity(self, k: int) -> int:
        """Number of generation-k preimages counted with multiplicity (``d^k``)."""
        return int(self.generations[k].valency.sum())

    def branch(self, k: int, index: int) -> list[int]:
        """Node indices from generation k down to the root (inclusive)."""
        path = [index]
        for level in range(k, 0, -1):
            index = int(self.generations[level].parents[index])
            path.append(index)
        return path

    def branch_points(self, k: int, index: int) -> list[complex]:
        """``[z, R(z), ..., R^k(z) = root]`` read off the tree."""
        indices = self.branch(k, index)
        return [complex(self.generations[k - i].points[j]) for i, j in enumerate(indices)]

    def ancestor_sum(self, values: list[np.ndarray], k: int) -> np.ndarray:
        """For each generation-k node, the sum of per-node ``values`` over the
        node and its ancestors, excluding the root."""
        total = values[k].astype(float).copy()
        index = np.arange(len(self.generations[k]))
        for level in range(k, 1, -1):
            index = self.generations[level].parents[index]
            total += values[level - 1][index]
        return total


def tree_size(degree: int, depth: int) -> int:
    return sum(degree**k for k in range(depth + 1))


def backward_tree(
    map: RationalMap,
    x: "SpherePoint | complex",
    depth: int,
    metric: MetricSpec | None = None,
    node_budget: int | None = None,
) -> BackwardTree:
    """Full preimage tree of ``x`` to ``depth``.

    Raises:
        BudgetExceeded: when ``1 + d + ... + d^depth`` exceeds the node budget.
    """
    if depth < 0:
        raise PreconditionError("depth must be non-negative")
    budget = TREE.node_budget if node_budget is None else node_budget
    requested = tree_size(map.degree, depth)
    if requested > budget:
        raise BudgetExceeded(requested, budget)
    metric = resolve_metric(map, metric)
    root = SpherePoint.of(x)

    generations = [
        TreeGeneration(
            points=np.array([complex(root)]),
            parents=np.array([-1]),
            multiplicity=np.array([1]),
            valency=np.array([1]),
            log_derivative=np.array([0.0]),
            ill_conditioned=np.array([False]),
        )
    ]
    for k in range(1, depth + 1):
        previous = generations[-1]
        children, parents, multiplicity, ill = map.preimages_batch(previous.points)
        with np.errstate(divide="ignore"):
            step = np.log(derivative_norms(map, children, metric))
        generations.append(
            TreeGeneration(
                points=children,
                parents=parents,
                multiplicity=multiplicity,
                valency=previous.valency[parents] * multiplicity,
                log_derivative=previous.log_derivative[parents] + step,
                ill_conditioned=ill | previous.ill_conditioned[parents],
            )
        )
        if ill.any():
            logger.warning(f"Generation {k}: {int(ill.sum())} ill-conditioned preimage clusters")
        if k % TREE.progress_every == 0:
            logger.debug(f"Backward tree of {root}: generation {k} has {len(children)} nodes")
    return BackwardTree(map, root, metric, generations)
