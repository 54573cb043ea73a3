import math

import numpy as np
import pytest

from kmsdyn.errors import BudgetExceeded, OutputError, PreconditionError
from kmsdyn.thermo import (
    DiscretizedMeasure,
    PressureSampler,
    Provenance,
    angular_partition,
    arcsine_ks_distance,
    bowen_dimension,
    conformal_eigenmeasure,
    interval_partition,
    is_exceptional,
    is_hyperbolic,
    lyubich_measure,
    pressure,
    repelling_fixed_point,
    uniform_ks_distance,
)

LOG2 = math.log(2)


def test_repelling_fixed_point(square, chebyshev):
    assert repelling_fixed_point(square) == pytest.approx(1.0)
    assert repelling_fixed_point(chebyshev) == pytest.approx(2.0)


def test_exceptional_points(square):
    assert is_exceptional(square, 0)
    assert is_exceptional(square, complex("inf"))
    assert not is_exceptional(square, 1)


def test_exceptional_seed_is_rejected(square):
    with pytest.raises(PreconditionError):
        lyubich_measure(square, depth=3, seed=0)


def test_lyubich_budget(square):
    with pytest.raises(BudgetExceeded):
        lyubich_measure(square, depth=40)


def test_lyubich_measure_is_invariant(square):
    measure = lyubich_measure(square, depth=12, rng=np.random.default_rng(0))
    assert measure.provenance is Provenance.LYUBICH
    assert measure.total == pytest.approx(1.0)
    assert np.abs(measure.points) == pytest.approx(1.0)
    for cell in angular_partition(16):
        assert measure.preimage_mass(square, cell) == pytest.approx(measure.mass(cell), abs=0.01)


def test_lyubich_measure_does_not_depend_on_the_seed(square):
    a = lyubich_measure(square, depth=12, rng=np.random.default_rng(1))
    b = lyubich_measure(square, depth=12, rng=np.random.default_rng(2))
    assert a.total_variation(b, angular_partition(32)) < 0.05


def test_chebyshev_lyubich_measure_is_arcsine(chebyshev):
    measure = lyubich_measure(chebyshev, depth=14, rng=np.random.default_rng(0))
    np.testing.assert_allclose(measure.points.imag, 0.0, atol=1e-9)
    assert arcsine_ks_distance(measure) < 0.01
    assert uniform_ks_distance(measure) > 0.05
    masses = measure.cell_masses(interval_partition(-2, 2, 8))
    assert masses.sum() == pytest.approx(1.0)
    # arcsine mass piles up at the ends of the interval
    assert masses[0] > masses[3]


def test_binary_cloud_roundtrip(square):
    measure = lyubich_measure(square, depth=6, rng=np.random.default_rng(0))
    payload = measure.to_binary()
    assert payload[:4] == b"KMSC"
    again = DiscretizedMeasure.from_binary(payload)
    np.testing.assert_array_equal(again.points, measure.points)
    np.testing.assert_array_equal(again.weights, measure.weights)
    assert again.provenance is Provenance.LYUBICH
    with pytest.raises(OutputError):
        DiscretizedMeasure.from_binary(payload[:-3])
    with pytest.raises(OutputError):
        DiscretizedMeasure.from_binary(b"XXXX" + payload[4:])


def test_cloud_csv(square):
    text = lyubich_measure(square, depth=3, rng=np.random.default_rng(0)).to_csv(["kind=measure"])
    lines = text.splitlines()
    assert lines[0] == "# kind=measure"
    assert lines[1] == "re,im,weight"
    assert len(lines) == 2 + 8


def test_hyperbolicity(square, chebyshev, ruelle):
    assert is_hyperbolic(square)
    assert is_hyperbolic(ruelle)
    assert not is_hyperbolic(chebyshev)


@pytest.mark.parametrize("delta", [0.0, 1.0, 2.0])
def test_square_pressure_is_linear(square, delta):
    assert pressure(square, delta, depth=10) == pytest.approx(LOG2 * (1 - delta), abs=1e-9)


def test_pressure_curve_brackets_the_root(square):
    sampler = PressureSampler(square, depth=10, rng=np.random.default_rng(0))
    curve = sampler.curve([0.5, 1.5, 0.0, 2.0])
    assert curve.monotone
    assert list(curve.deltas) == [0.0, 0.5, 1.5, 2.0]
    assert curve.bracket == (0.5, 1.5)
    estimate = sampler.estimate(1.0, "birkhoff")
    assert estimate.estimator == "birkhoff"
    assert estimate.value == pytest.approx(0.0, abs=1e-9)


def test_unknown_estimator(square):
    with pytest.raises(PreconditionError):
        PressureSampler(square, depth=4).estimate(1.0, "median")


@pytest.mark.slow
def test_bowen_dimension_of_the_circle(square):
    hd = bowen_dimension(square, depth=12)
    assert hd.value == pytest.approx(1.0, abs=1e-3)
    assert hd.rigorous
    lo, hi = hd.band
    assert lo <= 1.0 <= hi


def test_zero_exponent_pressure_is_topological_entropy(chebyshev, rees):
    assert pressure(chebyshev, 0.0, depth=8) == pytest.approx(LOG2, abs=1e-12)
    assert pressure(rees, 0.0, depth=8) == pytest.approx(LOG2, abs=1e-12)


@pytest.mark.slow
def test_quadratic_julia_set_near_the_circle_is_thicker(ruelle):
    assert pressure(ruelle, 1.0, depth=14) > 0


@pytest.mark.slow
def test_eigenmeasure_of_square_is_uniform_on_the_circle(square):
    measure = conformal_eigenmeasure(square, 1.0, rng=np.random.default_rng(0))
    assert measure.converged
    assert measure.provenance is Provenance.EIGENMEASURE
    assert measure.delta == 1.0
    np.testing.assert_allclose(measure.cell_masses(angular_partition(8)), 1 / 8, atol=0.01)


@pytest.mark.slow
def test_bowen_dimension_near_the_circle_follows_the_small_parameter_asymptotic(ruelle):
    hd = bowen_dimension(ruelle, rng=np.random.default_rng(0))
    assert hd.rigorous
    assert hd.value == pytest.approx(1 + 0.01 / (4 * LOG2), abs=0.005)


@pytest.mark.slow
def test_bowen_dimension_of_the_chebyshev_interval(chebyshev):
    hd = bowen_dimension(chebyshev, rng=np.random.default_rng(0))
    assert not hd.rigorous
    assert hd.value == pytest.approx(1.0, abs=0.02)
