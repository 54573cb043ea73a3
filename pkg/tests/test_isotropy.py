import pytest

from kmsdyn.kms import Gauge, Generalized, IsotropyTag, isotropy_class, orbit_consistent
from kmsdyn.sphere import parse_map, parse_point


def test_generic_point_has_trivial_isotropy(ruelle):
    group = isotropy_class(ruelle, parse_point("0.5+0.2i"))
    assert group.tag is IsotropyTag.TRIVIAL
    assert group.label == "trivial"
    assert group.order == 1


def test_repelling_fixed_point_has_integer_isotropy(chebyshev):
    group = isotropy_class(chebyshev, 2)
    assert group.tag is IsotropyTag.INTEGER
    assert group.label == "Z"


def test_rees_critical_point_has_cyclic_isotropy(rees):
    group = isotropy_class(rees, 0)
    assert group.tag is IsotropyTag.TORSION
    assert group.order == 2
    assert group.label == "Z_2"


def test_pre_critical_landing_gives_integer_cross_cyclic(chebyshev):
    group = isotropy_class(chebyshev, 0)
    assert group.tag is IsotropyTag.INTEGER_CROSS_CYCLIC
    assert group.d == 2
    assert group.label == "Z⊕Z_2"


def test_critical_cycle_has_unbounded_torsion(square):
    group = isotropy_class(square, 0)
    assert group.tag is IsotropyTag.TORSION
    assert group.infinite
    assert group.order is None
    assert group.label == "Q/Z"


@pytest.mark.parametrize(
    "name, point, expected",
    [("chebyshev", 0, False), ("parabolic", 0, True), ("rees", 0, True), ("square", 0, True)],
)
def test_conformal_orbit_consistency(request, name, point, expected):
    assert orbit_consistent(request.getfixturevalue(name), point) is expected


def test_consistency_depends_on_the_cocycle(parabolic):
    assert not orbit_consistent(parabolic, 0, spec=Gauge())
    assert orbit_consistent(parabolic, 0, spec=Generalized(lambda z: z.real, label="re"))
    assert not orbit_consistent(parabolic, 0, spec=Generalized(lambda z: 1.0, label="1"))


def test_misiurewicz_point_is_inconsistent_for_conformal_cocycle():
    map = parse_map("z^2 + c", {"c": "i"})
    assert not orbit_consistent(map, 0)
