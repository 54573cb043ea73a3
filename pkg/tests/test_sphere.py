import cmath

import numpy as np
import pytest

from kmsdyn.errors import MapSpecError, PreconditionError
from kmsdyn.sphere import (
    Chordal,
    Flat,
    RationalMap,
    SpherePoint,
    Weighted,
    derivative_norm,
    format_map,
    format_point,
    germ_count,
    parse_map,
    parse_metric,
    parse_point,
    parse_real,
    valency_iterate,
)

REES_LAMBDA = "0.3+0.9i"
LAMBDA = complex(0.3, 0.9)


def _finite_critical(map):
    return sorted((complex(p) for p, _ in map.critical_points if not p.is_infinite), key=lambda z: z.real)


def _preimage_table(map, w):
    return sorted(((complex(p), m) for p, m in map.preimages(w)), key=lambda pm: pm[0].real)


def test_parse_reads_coefficients():
    m = parse_map("z^2 + c", {"c": -2})
    np.testing.assert_allclose(m.numerator, [-2, 0, 1])
    np.testing.assert_allclose(m.denominator, [1])
    assert m.degree == 2
    assert m.is_polynomial
    assert m.exact is not None


def test_parse_expands_rees_map(rees):
    np.testing.assert_allclose(rees.numerator, LAMBDA * np.array([4, -4, 1]), atol=1e-15)
    np.testing.assert_allclose(rees.denominator, [0, 0, 1])
    assert not rees.is_polynomial


def test_parse_reports_error_offset():
    with pytest.raises(MapSpecError) as info:
        parse_map("z/(z")
    assert info.value.position == 4
    assert info.value.exit_code == 2


@pytest.mark.parametrize(
    "spec, params",
    [("z^2 + c", {}), ("exp(z)", {}), ("z^(1/2)", {}), ("z^2 - z^2 + 1", {}), ("", {})],
)
def test_parse_rejects_bad_maps(spec, params):
    with pytest.raises(MapSpecError):
        parse_map(spec, params)


def test_parse_cancels_common_factors():
    m = parse_map("(z^3 - z)/(z - 1)")
    assert m.degree == 2
    assert m.is_polynomial


def test_parameter_bindings_accept_literals_and_numbers():
    a = parse_map("l*(1 - 2/z)^2", {"l": REES_LAMBDA})
    b = parse_map("l*(1 - 2/z)^2", {"l": LAMBDA})
    np.testing.assert_allclose(a.numerator, b.numerator)


def test_format_map_is_idempotent(rees, ruelle):
    for m in (rees, ruelle, parse_map("z*(1+z/2)^2")):
        text = format_map(m)
        again = parse_map(text)
        assert format_map(again) == text
        np.testing.assert_allclose(again.numerator, m.numerator)


def test_points_parse_and_print():
    assert parse_point("inf").is_infinite
    p = parse_point("1+i")
    assert p.is_exact
    assert complex(p) == 1 + 1j
    assert parse_point(format_point(p)).close_to(p, 1e-15)
    assert parse_real("log(2)") == pytest.approx(np.log(2))
    with pytest.raises(MapSpecError):
        parse_real("i")


def test_evaluation(chebyshev, parabolic, rees):
    assert complex(chebyshev(0)) == -2
    assert complex(parabolic(-2)) == 0
    assert complex(rees(2)) == 0
    assert rees(0).is_infinite
    assert complex(rees(SpherePoint.infinity())) == pytest.approx(LAMBDA)
    assert chebyshev(SpherePoint.infinity()).is_infinite


def test_vectorized_evaluation_matches_scalar(rees):
    zs = np.array([0.5 + 0.1j, 3 - 2j, -0.2j, 10 + 10j])
    np.testing.assert_allclose(rees.values(zs), [rees.value(z) for z in zs])
    assert np.isinf(rees.values(np.array([0j]))[0])


def test_derivative_norms(square, chebyshev, parabolic):
    assert derivative_norm(square, cmath.exp(0.7j), Flat()) == pytest.approx(2.0)
    assert derivative_norm(chebyshev, 2, Flat()) == pytest.approx(4.0)
    assert derivative_norm(parabolic, 0, Flat()) == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        derivative_norm(square, SpherePoint.infinity(), Flat())


def test_weighted_metric_scales_by_weight_ratio(square):
    weighted = Weighted(lambda z: 1 + np.abs(z) ** 2, base=Flat(), label="1+|z|^2")
    z = 0.5 + 0.5j
    expected = derivative_norm(square, z, Flat()) * (1 + abs(z * z) ** 2) / (1 + abs(z) ** 2)
    assert derivative_norm(square, z, weighted) == pytest.approx(expected)


def test_chordal_derivative_is_chart_independent(rees):
    rng = np.random.default_rng(1)
    radii = rng.uniform(0.5, 2.0, 20)
    angles = rng.uniform(0, 2 * np.pi, 20)
    for z in radii * np.exp(1j * angles):
        assert rees.spherical_derivative(z, "z") == pytest.approx(rees.spherical_derivative(z, "w"), rel=1e-9)
    assert derivative_norm(rees, 0.7 + 0.2j, Chordal()) == pytest.approx(rees.spherical_derivative(0.7 + 0.2j))


def test_parse_metric():
    assert parse_metric("auto") is None
    assert isinstance(parse_metric("flat"), Flat)
    assert isinstance(parse_metric("chordal"), Chordal)
    weighted = parse_metric("weighted:flat:1+abs(z)^2")
    assert isinstance(weighted.base, Flat)
    assert weighted.r(1j) == pytest.approx(2.0)


def test_critical_points(ruelle, rees, parabolic):
    points = ruelle.critical_points
    assert len(points) == 2
    assert all(v == 2 for _, v in points)
    assert any(p.is_infinite for p, _ in points)
    assert any(p.close_to(0) for p, _ in points)

    assert _finite_critical(rees) == pytest.approx([0, 2])
    assert _finite_critical(parabolic) == pytest.approx([-2, -2 / 3])
    excess = sum(v - 1 for _, v in parabolic.critical_points)
    assert excess == 2 * parabolic.degree - 2


def test_numeric_critical_points_match_exact():
    exact = parse_map("z^3 - 3*z/4 + i/5")
    numeric = type(exact)(exact.numerator, exact.denominator)
    assert numeric.exact is None
    assert _finite_critical(numeric) == pytest.approx(_finite_critical(exact))


def test_valency(square, rees):
    assert square.valency(0) == 2
    assert rees.valency(2) == 2
    assert square.valency(1) == 1
    assert square.valency(SpherePoint.infinity()) == 2


def test_valency_iterate(square, chebyshev, rees):
    assert valency_iterate(chebyshev, 2, 0) == 2
    assert valency_iterate(square, 3, 0) == 8
    assert valency_iterate(rees, 0, 0.123) == 1
    assert valency_iterate(rees, 2, 2) == 4


@pytest.mark.parametrize(
    "name, w, expected",
    [("square", 4, [(-2, 1), (2, 1)]), ("rees", 0, [(2, 2)]), ("parabolic", 0, [(-2, 2), (0, 1)])],
)
def test_preimages(request, name, w, expected):
    table = _preimage_table(request.getfixturevalue(name), w)
    assert [m for _, m in table] == [m for _, m in expected]
    assert [z for z, _ in table] == pytest.approx([z for z, _ in expected], abs=1e-12)


def test_preimage_multiplicities_sum_to_degree(rees, parabolic):
    for map in (rees, parabolic):
        for w in (0.3 + 0.1j, 5.0, SpherePoint.infinity()):
            assert sum(m for _, m in map.preimages(w)) == map.degree


def test_batched_preimages_close_up(ruelle):
    ws = np.array([0.2 + 0.1j, -1.5, 3j])
    children, parents, multiplicity, _ = ruelle.preimages_batch(ws)
    assert list(np.bincount(parents, weights=multiplicity).astype(int)) == [2, 2, 2]
    np.testing.assert_allclose(ruelle.values(children), ws[parents], atol=1e-12)


def test_germ_count(square, rees):
    assert germ_count(1, 1, 1, -1, square) == 1
    assert germ_count(1, 0, 1, 0, square) == 2
    assert germ_count(1, 0, 2, 2, rees) == 0
    with pytest.raises(PreconditionError):
        germ_count(1, 1, 1, 2, square)


def _germ_cases(count=20, seed=11):
    """Cubics z^3 + a z + b with either a critical point or a generic point."""
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(count):
        a = complex(*np.round(rng.uniform(-1, 1, 2), 3))
        b = complex(*np.round(rng.uniform(-1, 1, 2), 3))
        map = parse_map("z^3 + a*z + b", {"a": a, "b": b})
        if i % 2 == 0:
            x = _finite_critical(map)[(i // 2) % 2]
        else:
            x = complex(*np.round(rng.uniform(-1.5, 1.5, 2), 3))
        cases.append((map, x))
    return cases


def test_germ_count_matches_valency_on_random_pairs():
    critical_seen = 0
    for map, x in _germ_cases():
        fibre = map.preimages(map(x))
        (mult_x,) = [m for z, m in fibre if z.close_to(x, 1e-6)]
        critical_seen += mult_x > 1
        assert germ_count(1, x, 1, x, map) == mult_x == map.valency(x)
        for y, mult_y in fibre:
            if y.close_to(x, 1e-6):
                continue
            expected = mult_x if mult_x == mult_y else 0
            assert germ_count(1, x, 1, complex(y), map) == expected
    assert critical_seen == 10


def test_near_common_factor_is_rejected():
    with pytest.raises(PreconditionError):
        RationalMap([-1, 1], [-1 - 1e-7, 1])
    with pytest.raises(PreconditionError):
        parse_map("(z - 1)/(z - 1 - 1/10000000)")
    assert RationalMap([-1, 1], [-1 - 1e-3, 1]).degree == 1
