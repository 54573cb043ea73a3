"""
Riemann-sphere arithmetic: points, rational maps, metrics and the map parser.
"""

from .germs import germ_count, prefix_valencies, valency_iterate
from .metric import Chordal, Flat, MetricSpec, Weighted, default_metric, derivative_norm, derivative_norms, parse_metric
from .parser import compile_weight, format_map, format_point, parse_map, parse_point, parse_real
from .point import INFINITY, SpherePoint, chordal_distance, chordal_distance_array
from .rational import LocalExpansion, RationalMap, critical_points, evaluate, preimages, valency

__all__ = [
    "INFINITY",
    "Chordal",
    "Flat",
    "LocalExpansion",
    "MetricSpec",
    "RationalMap",
    "SpherePoint",
    "Weighted",
    "chordal_distance",
    "chordal_distance_array",
    "compile_weight",
    "critical_points",
    "default_metric",
    "derivative_norm",
    "derivative_norms",
    "evaluate",
    "format_map",
    "format_point",
    "germ_count",
    "parse_map",
    "parse_metric",
    "parse_point",
    "parse_real",
    "preimages",
    "prefix_valencies",
    "valency",
    "valency_iterate",
]
