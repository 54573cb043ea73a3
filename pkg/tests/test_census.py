import math

import numpy as np
import pytest

from kmsdyn.errors import PreconditionError, UnsupportedClassification
from kmsdyn.kms import AtomicState, Conformal, Gauge, NonAtomicState, kms_census, reweight_measure
from kmsdyn.orbits import Assumptions, RegionTag
from kmsdyn.sphere import Chordal, Flat, Weighted, parse_map
from kmsdyn.thermo import BowenEstimate, Provenance, bowen_dimension

LOG2 = math.log(2)


def _counts(census):
    return census.total, census.atomic_count, census.nonatomic_count


@pytest.mark.parametrize("beta, total", [(0.5, 0), (LOG2, 1), (1.2, 0)])
def test_square_gauge_census(square, beta, total):
    census = kms_census(square, RegionTag.JULIA, beta, Gauge())
    assert census.total == total
    assert census.atomic_count == 0
    assert census.theorem == "gauge"


def test_square_at_log_two_has_the_lyubich_state(square):
    census = kms_census(square, RegionTag.JULIA, LOG2, seed=1)
    (state,) = census.states
    assert isinstance(state, NonAtomicState)
    assert state.provenance is Provenance.LYUBICH
    assert not state.handle.built


@pytest.mark.parametrize("beta, total", [(-1.0, 2), (0.5, 2), (LOG2, 3), (3.0, 6)])
def test_rees_gauge_census(rees, beta, total):
    census = kms_census(rees, RegionTag.SPHERE, beta, Gauge(), depth=6)
    assert census.total == total
    assert census.states_supported_at(0) == 2


def test_rees_finite_class_state(rees):
    census = kms_census(rees, RegionTag.SPHERE, 0.5, Gauge(), depth=6)
    (state,) = census.states
    assert isinstance(state, AtomicState)
    assert state.multiplicity == 2
    assert state.grand_class.finite
    assert state.measure.is_dirac


def test_beta_zero_is_rejected(square):
    with pytest.raises(PreconditionError):
        kms_census(square, beta=0)


def test_conformal_census_needs_collet_eckmann(square):
    with pytest.raises(UnsupportedClassification) as info:
        kms_census(square, RegionTag.JULIA, 1.0, Conformal())
    assert info.value.exit_code == 4
    assert info.value.summable_orbits == []


def test_conformal_census_rejects_cubics():
    cubic = parse_map("z^3 + c", {"c": "0.3"})
    with pytest.raises(UnsupportedClassification):
        kms_census(cubic, RegionTag.JULIA, 1.0, Conformal(), assumptions=Assumptions(collet_eckmann=True))


@pytest.mark.parametrize("beta, total", [(0.5, 0), (1.2, 1), (2.0, 0)])
def test_misiurewicz_conformal_census(beta, total):
    map = parse_map("z^2 + c", {"c": "i"})
    hd = BowenEstimate(1.2, 0.05, rigorous=False, depth=0)
    assumptions = Assumptions(collet_eckmann=True, preperiodic_critical=True)
    census = kms_census(map, RegionTag.JULIA, beta, Conformal(), assumptions, hd=hd)
    assert _counts(census) == (total, 0, total)
    assert census.theorem == "conformal-quadratic"


def test_collet_eckmann_census_above_the_dimension():
    map = parse_map("z^2 + c", {"c": "-1.99"})
    hd = BowenEstimate(1.5, 0.05, rigorous=False, depth=0)
    census = kms_census(
        map, RegionTag.JULIA, 3.0, Conformal(), Assumptions(collet_eckmann=True), horizon=30, depth=4, hd=hd
    )
    assert _counts(census) == (2, 2, 0)
    assert census.states[0].grand_class.val_infinity == 2


def test_asserted_preperiodic_critical_point_has_no_atomic_state():
    # horizon 2 stops before the critical orbit of c = i lands on its cycle
    map = parse_map("z^2 + c", {"c": "i"})
    hd = BowenEstimate(1.2, 0.05, rigorous=False, depth=0)
    assumptions = Assumptions(collet_eckmann=True, preperiodic_critical=True)
    census = kms_census(map, RegionTag.JULIA, 2.0, Conformal(), assumptions, horizon=2, hd=hd)
    assert _counts(census) == (0, 0, 0)


def _weight(z):
    return 2 + np.cos(np.real(z))


@pytest.mark.parametrize(
    "metric",
    [Flat(), Chordal(), Weighted(_weight, base=Flat(), label="2+cos(re z)")],
    ids=["flat", "chordal", "weighted"],
)
def test_census_counts_do_not_depend_on_the_metric(metric):
    map = parse_map("z^2 + c", {"c": "-1.99"})
    hd = BowenEstimate(1.5, 0.05, rigorous=False, depth=0)
    assumptions = Assumptions(collet_eckmann=True)
    census = kms_census(map, RegionTag.JULIA, 3.0, Conformal(metric), assumptions, horizon=30, depth=4, hd=hd)
    assert _counts(census) == (2, 2, 0)


def test_weighted_census_measure_is_the_reweighted_flat_measure():
    map = parse_map("z^2 + c", {"c": "-1.99"})
    hd = BowenEstimate(1.5, 0.05, rigorous=False, depth=0)
    assumptions = Assumptions(collet_eckmann=True)
    weighted = Weighted(_weight, base=Flat(), label="2+cos(re z)")
    flat, reweighted = (
        kms_census(map, RegionTag.JULIA, 3.0, Conformal(metric), assumptions, horizon=30, depth=4, hd=hd)
        for metric in (Flat(), weighted)
    )
    expected = reweight_measure(flat.states[0].measure, weighted)
    np.testing.assert_allclose(reweighted.states[0].measure.points, expected.points, atol=1e-12)
    np.testing.assert_allclose(reweighted.states[0].measure.weights, expected.weights, rtol=1e-9)


@pytest.mark.slow
def test_misiurewicz_phase_pattern_around_the_dimension():
    map = parse_map("z^2 + c", {"c": "i"})
    hd = bowen_dimension(map)
    assert hd.error < 0.2
    assumptions = Assumptions(collet_eckmann=True, preperiodic_critical=True)
    totals = [
        kms_census(map, RegionTag.JULIA, beta, Conformal(), assumptions, hd=hd).total
        for beta in (hd.value - 0.2, hd.value, hd.value + 0.2)
    ]
    assert totals == [0, 1, 0]
