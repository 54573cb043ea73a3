"""
KMS classification data: isotropy, cocycles, Poincaré series, conformal
measures and the extremal-state census.
"""

from .census import AtomicState, KMSCensus, MeasureHandle, NonAtomicState, kms_census
from .cocycle import (
    CocycleSpec,
    Conformal,
    Gauge,
    Generalized,
    TransferPath,
    cocycle_value,
    compose,
    describe,
    log_transfer_weight,
    metric_reweight,
    transfer_weight,
)
from .conformality import AtomSet, Notion, ResidualReport, ResidualRow, conformality_residual
from .isotropy import IsotropyClass, IsotropyTag, isotropy_class, orbit_consistent
from .poincare import (
    AtomicConformalMeasure,
    PoincareSeries,
    SummabilityVerdict,
    atomic_measure,
    poincare_partial_sums,
    reweight_measure,
)

__all__ = [
    "AtomSet",
    "AtomicConformalMeasure",
    "AtomicState",
    "CocycleSpec",
    "Conformal",
    "Gauge",
    "Generalized",
    "IsotropyClass",
    "IsotropyTag",
    "KMSCensus",
    "MeasureHandle",
    "NonAtomicState",
    "Notion",
    "PoincareSeries",
    "ResidualReport",
    "ResidualRow",
    "SummabilityVerdict",
    "TransferPath",
    "atomic_measure",
    "cocycle_value",
    "compose",
    "conformality_residual",
    "describe",
    "isotropy_class",
    "kms_census",
    "log_transfer_weight",
    "metric_reweight",
    "orbit_consistent",
    "poincare_partial_sums",
    "reweight_measure",
    "transfer_weight",
]
