import math

import numpy as np
import pytest

from kmsdyn.errors import PreconditionError
from kmsdyn.kms import (
    Conformal,
    Gauge,
    Generalized,
    TransferPath,
    atomic_measure,
    cocycle_value,
    compose,
    describe,
    log_transfer_weight,
    metric_reweight,
    poincare_partial_sums,
    reweight_measure,
    transfer_weight,
)
from kmsdyn.sphere import Chordal, parse_map


def test_gauge_cocycle_is_exponent_difference(square):
    path = TransferPath.between(square, 1, 1, 3, 1)
    assert cocycle_value(Gauge(), path, square) == 2


def test_constant_potential_reproduces_gauge(square):
    path = TransferPath.between(square, 1, 1j, 2, 3)
    ones = Generalized(lambda z: 1.0, label="1")
    assert cocycle_value(ones, path, square) == cocycle_value(Gauge(), path, square) == -1


def test_conformal_cocycle_between_symmetric_points(square):
    path = TransferPath.between(square, 1, -1, 1, 1)
    assert cocycle_value(Conformal(), path, square) == pytest.approx(0.0, abs=1e-12)


def test_transfer_weight_of_second_preimage(square):
    path = TransferPath.between(square, 1, 1j, 0, 2)
    assert transfer_weight(square, path) == pytest.approx(0.25)
    assert log_transfer_weight(square, path) == pytest.approx(-math.log(4))


def test_path_conditions_are_checked(square, rees):
    with pytest.raises(PreconditionError):
        TransferPath.between(square, 1, 2, 1, 1)
    # 2 maps onto 0 with valency 2, 0 itself has valency 1 under R^0
    with pytest.raises(PreconditionError):
        TransferPath.between(rees, 2, 0, 1, 0)


@pytest.mark.parametrize(
    "spec",
    [Gauge(), Conformal(), Conformal(Chordal()), Generalized(lambda z: np.real(z), label="re")],
    ids=describe,
)
def test_cocycles_are_additive(square, spec):
    first = TransferPath.between(square, 1, -1, 1, 1)
    second = TransferPath.between(square, -1, 1j, 1, 2)
    joined = compose(square, first, second)
    assert (joined.n, joined.l) == (2, 3)
    assert cocycle_value(spec, joined, square) == pytest.approx(
        cocycle_value(spec, first, square) + cocycle_value(spec, second, square), abs=1e-12
    )


def test_critical_path_uses_root_of_leading_coefficients():
    # R(t) = t^2 - 1 near 0 and R^2(1 + t) = -1 + 4 t^2 + ..., so eta(t) ~ t / 2
    map = parse_map("z^2 - 1")
    path = TransferPath.between(map, 0, 1, 1, 2)
    assert path.valency == 2
    assert transfer_weight(map, path) == pytest.approx(0.5)


def test_describe():
    assert describe(Gauge()) == "gauge"
    assert describe(Conformal()) == "conformal"
    assert describe(Conformal(Chordal())) == "conformal[chordal]"
    assert describe(Generalized(lambda z: 1.0, label="1")) == "generalized[1]"


def test_metric_reweight():
    values = np.array([0.5, -1.0])
    sources, targets = np.array([1.0, 2.0]), np.array([3.0, 1j])
    unchanged = metric_reweight(values, sources, targets, lambda z: np.ones(np.shape(z)))
    np.testing.assert_allclose(unchanged, values)

    shifted = metric_reweight(values, sources, targets, lambda z: 1 + np.abs(z) ** 2)
    np.testing.assert_allclose(shifted, values + np.log([10 / 2, 2 / 5]))

    with pytest.raises(PreconditionError):
        metric_reweight(values, sources, targets, lambda z: -np.ones(np.shape(z)))


def test_rees_series_stops_at_the_base(rees):
    series = poincare_partial_sums(rees, 0, 0.7, Conformal(), depth=6)
    np.testing.assert_allclose(series.partial_sums, 1.0)
    assert series.finite
    assert series.verdict.summable

    measure = atomic_measure(rees, 0, 0.7, Conformal(), depth=6)
    assert measure.is_dirac
    assert measure.mass_at(0) == pytest.approx(1.0)
    assert reweight_measure(measure, lambda z: 1 + np.abs(z) ** 2).weights == pytest.approx([1.0])


def test_gauge_series_slope(square):
    series = poincare_partial_sums(square, 0.5 + 0.5j, 1.0, Gauge(), depth=10)
    assert series.slope == pytest.approx(math.log(2) - 1.0, abs=1e-9)
    assert series.verdict.summable
    assert series.verdict.method == "analytic"
    assert not poincare_partial_sums(square, 0.5 + 0.5j, 0.5, Gauge(), depth=10).verdict.summable


def test_series_undefined_on_inconsistent_orbit(chebyshev):
    with pytest.raises(PreconditionError):
        poincare_partial_sums(chebyshev, 0, 1.0, Conformal(), depth=4)


@pytest.mark.slow
def test_conformal_series_slope_on_the_circle(square):
    beta = 1.5
    series = poincare_partial_sums(square, 0.5 + 0.5j, beta, Conformal(), depth=14)
    expected = math.log(2) - beta * math.log(2)
    assert series.slope == pytest.approx(expected, rel=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("shift", [-0.3, 0.3])
def test_gauge_series_slope_around_log_two(square, shift):
    beta = math.log(2) + shift
    series = poincare_partial_sums(square, 0.5 + 0.5j, beta, Gauge(), depth=14)
    assert series.slope == pytest.approx(-shift, rel=0.1)
    assert series.verdict.summable is (shift > 0)
