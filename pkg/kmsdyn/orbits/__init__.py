"""
Orbit dynamics: forward orbits, backward trees, grand orbits and critical classes.
"""

from .forward import (
    analyze_orbit,
    ce_envelope,
    classify_cycle,
    classify_multiplier,
    cycle_multiplier,
    escape_index,
    escape_radius,
    julia_membership,
    lyapunov_exponent,
    val_infinity,
)
from .grand import critical_classes, grand_orbit_member, orbits_collide
from .records import (
    Arithmetic,
    Assumptions,
    CEEnvelope,
    Confidence,
    CycleClass,
    GrandOrbitClass,
    JuliaLocation,
    JuliaVerdict,
    Membership,
    NoCycleDetected,
    OrbitRecord,
    PrePeriodic,
    RegionTag,
)
from .tree import BackwardTree, TreeGeneration, TreeNode, backward_tree

__all__ = [
    "Arithmetic",
    "Assumptions",
    "BackwardTree",
    "CEEnvelope",
    "Confidence",
    "CycleClass",
    "GrandOrbitClass",
    "JuliaLocation",
    "JuliaVerdict",
    "Membership",
    "NoCycleDetected",
    "OrbitRecord",
    "PrePeriodic",
    "RegionTag",
    "TreeGeneration",
    "TreeNode",
    "analyze_orbit",
    "backward_tree",
    "ce_envelope",
    "classify_cycle",
    "classify_multiplier",
    "critical_classes",
    "cycle_multiplier",
    "grand_orbit_member",
    "escape_index",
    "escape_radius",
    "julia_membership",
    "lyapunov_exponent",
    "orbits_collide",
    "val_infinity",
]
