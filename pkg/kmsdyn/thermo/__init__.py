"""
Non-atomic measures, pressure and Bowen's equation.
"""

from .base_iteration import BackwardIteration, is_exceptional, julia_seeds, repelling_fixed_point
from .cells import AngleCell, BoxCell, Cell, IntervalCell, adaptive_partition, angular_partition, interval_partition
from .eigenmeasure import EigenmeasureIteration, conformal_eigenmeasure
from .lyubich import LyubichIteration, lyubich_measure
from .measures import DiscretizedMeasure, Provenance, arcsine_ks_distance, uniform_ks_distance, weighted_ks_distance
from .pressure import (
    BowenEstimate,
    PressureCurve,
    PressureEstimate,
    PressureSampler,
    bowen_dimension,
    is_hyperbolic,
    pressure,
    pressure_curve,
    pressure_estimate,
)

__all__ = [
    "AngleCell",
    "BackwardIteration",
    "BowenEstimate",
    "BoxCell",
    "Cell",
    "DiscretizedMeasure",
    "EigenmeasureIteration",
    "IntervalCell",
    "LyubichIteration",
    "PressureCurve",
    "PressureEstimate",
    "PressureSampler",
    "Provenance",
    "adaptive_partition",
    "angular_partition",
    "arcsine_ks_distance",
    "bowen_dimension",
    "conformal_eigenmeasure",
    "interval_partition",
    "is_exceptional",
    "is_hyperbolic",
    "julia_seeds",
    "lyubich_measure",
    "pressure",
    "pressure_curve",
    "pressure_estimate",
    "repelling_fixed_point",
    "uniform_ks_distance",
    "weighted_ks_distance",
]
