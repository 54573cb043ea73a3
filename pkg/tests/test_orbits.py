import numpy as np
import pytest

from kmsdyn.errors import BudgetExceeded, PreconditionError
from kmsdyn.orbits import (
    Arithmetic,
    Assumptions,
    CycleClass,
    JuliaLocation,
    PrePeriodic,
    RegionTag,
    analyze_orbit,
    backward_tree,
    ce_envelope,
    classify_cycle,
    critical_classes,
    escape_index,
    escape_radius,
    grand_orbit_member,
    julia_membership,
    orbits_collide,
    val_infinity,
)
from kmsdyn.sphere import SpherePoint, parse_map, parse_point


def _by_angle(points):
    return sorted((complex(z) for z in points), key=lambda z: np.angle(z) % (2 * np.pi))


def test_chebyshev_critical_orbit_lands_on_repelling_fixed_point(chebyshev):
    record = analyze_orbit(chebyshev, 0, 50)
    assert isinstance(record.verdict, PrePeriodic)
    assert (record.verdict.preperiod, record.verdict.period) == (2, 1)
    assert complex(record.verdict.cycle[0]) == 2
    assert record.verdict.multiplier == pytest.approx(4.0)
    assert record.critical_indices == (0,)
    assert record.arithmetic is Arithmetic.EXACT
    assert classify_cycle(record) is CycleClass.REPELLING


def test_misiurewicz_orbit_has_period_two():
    map = parse_map("z^2 + c", {"c": "i"})
    record = analyze_orbit(map, 0, 50)
    assert (record.verdict.preperiod, record.verdict.period) == (2, 2)
    cycle = sorted((complex(p) for p in record.verdict.cycle), key=lambda z: z.imag)
    assert cycle == [-1j, -1 + 1j]


def test_parabolic_fixed_point(parabolic):
    record = analyze_orbit(parabolic, 0, 50)
    assert (record.verdict.preperiod, record.verdict.period) == (0, 1)
    assert record.verdict.multiplier == pytest.approx(1.0)
    assert classify_cycle(record) is CycleClass.NEUTRAL


def test_superattracting_cycle(square):
    record = analyze_orbit(square, 0, 50)
    assert record.verdict.critical_cycle
    assert classify_cycle(record) is CycleClass.SUPERATTRACTING


def test_convergence_is_not_a_landing(square):
    record = analyze_orbit(square, parse_point("0.3+0.1i"))
    assert not record.is_pre_periodic
    assert record.is_attracted
    assert record.verdict.attracted_to[0].close_to(0, 1e-6)
    assert not record.pre_critical
    with pytest.raises(PreconditionError):
        classify_cycle(record)


def test_analyze_orbit_rejects_bad_arguments(square):
    with pytest.raises(PreconditionError):
        analyze_orbit(square, 1, 0)
    with pytest.raises(PreconditionError):
        analyze_orbit(square, 1, 10, tol=0.0)


def test_backward_tree_generations(square):
    tree = backward_tree(square, 1, 2)
    assert _by_angle(tree.generation(0).points) == pytest.approx([1])
    assert _by_angle(tree.generation(1).points) == pytest.approx([1, -1])
    assert _by_angle(tree.generation(2).points) == pytest.approx([1, 1j, -1, -1j])
    assert tree.count_with_multiplicity(2) == 4
    np.testing.assert_allclose(tree.generation(2).log_derivative, 2 * np.log(2))


def test_backward_tree_branches_end_at_root(ruelle):
    tree = backward_tree(ruelle, 0.4 + 0.3j, 5)
    for index in range(len(tree.generation(5))):
        branch = tree.branch_points(5, index)
        assert branch[-1] == pytest.approx(0.4 + 0.3j)
        np.testing.assert_allclose(ruelle.values(np.array(branch[:-1])), branch[1:], atol=1e-9)


def test_backward_tree_through_critical_value(rees):
    tree = backward_tree(rees, 0, 1)
    child = tree.generation(1)
    assert len(child) == 1
    assert complex(child.points[0]) == pytest.approx(2)
    assert child.multiplicity[0] == 2
    assert child.valency[0] == 2
    assert np.isneginf(child.log_derivative[0])


def test_backward_tree_budget(square):
    with pytest.raises(BudgetExceeded) as info:
        backward_tree(square, 1, 30)
    assert info.value.exit_code == 3


def test_grand_orbit_membership(square, rees, ruelle):
    verdict = grand_orbit_member(square, 1, -1)
    assert verdict.member
    # least n + m first, then least n
    assert verdict.witness == (0, 1)

    assert not grand_orbit_member(rees, 0, 2).member
    assert orbits_collide(rees, 0, 2).member

    x = SpherePoint.of(0.5 + 0.2j)
    forward = grand_orbit_member(ruelle, x, ruelle(x))
    assert forward.member and forward.witness == (1, 0)


def test_val_infinity(rees, square, chebyshev):
    assert val_infinity(rees, 0) == 2
    assert val_infinity(rees, 2) == 4
    assert val_infinity(square, parse_point("0.3+0.1i")) == 1
    with pytest.raises(PreconditionError):
        val_infinity(chebyshev, 0)


def test_critical_classes_of_square_are_empty(square):
    assert critical_classes(square, RegionTag.JULIA) == []


def test_rees_critical_point_zero_is_alone_in_its_class(rees):
    classes = critical_classes(rees, RegionTag.SPHERE)
    by_point = {round(complex(g.representative).real): g for g in classes}
    zero = by_point[0]
    assert zero.finite
    assert zero.val_infinity == 2
    assert len(zero.orbit_members) == 1 and zero.orbit_members[0].close_to(0, 1e-9)
    # 2 maps onto 0 but with valency 4, so it heads a class of its own
    assert by_point[2].val_infinity == 4
    assert not by_point[2].finite


def test_asserted_collet_eckmann_class_is_infinite():
    map = parse_map("z^2 + c", {"c": "-1.99"})
    classes = critical_classes(map, RegionTag.JULIA, horizon=30, assumptions=Assumptions(collet_eckmann=True))
    assert len(classes) == 1
    assert classes[0].representative.close_to(0)
    assert classes[0].val_infinity == 2
    assert not classes[0].finite
    assert classes[0].confidence.value == "asserted"


def test_julia_membership(square):
    assert julia_membership(square, 1).location is JuliaLocation.INSIDE
    assert julia_membership(square, parse_point("1/2")).location is JuliaLocation.OUTSIDE


def test_julia_membership_by_escape_time(square, ruelle, rees):
    assert escape_radius(square) == 2.0
    assert escape_index(square, 1.5) == 1
    assert escape_index(square, 1) is None
    verdict = julia_membership(ruelle, 2)
    assert verdict.location is JuliaLocation.OUTSIDE
    assert verdict.method == "escape-time"
    assert julia_membership(ruelle, SpherePoint.infinity()).method == "escape-time"
    with pytest.raises(PreconditionError):
        escape_radius(rees)


def test_ce_envelope_along_chebyshev_critical_orbit(chebyshev):
    envelope = ce_envelope(chebyshev, 0, 30)
    assert envelope.plausible
    assert envelope.exponents[-1] == pytest.approx(np.log(4), rel=0.1)
