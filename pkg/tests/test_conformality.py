import numpy as np
import pytest

from kmsdyn.errors import PreconditionError
from kmsdyn.kms import AtomSet, Conformal, Notion, TransferPath, atomic_measure, conformality_residual
from kmsdyn.thermo import lyubich_measure


@pytest.fixture
def parabolic_dirac(parabolic):
    return atomic_measure(parabolic, 0, 1.0, Conformal(), depth=6)


def test_parabolic_measure_is_dirac_at_the_fixed_point(parabolic_dirac):
    assert parabolic_dirac.is_dirac
    assert parabolic_dirac.mass_at(0) == pytest.approx(1.0)


@pytest.mark.parametrize("beta", [-1.0, 1.0, 2.0])
def test_parabolic_dirac_is_groupoid_conformal(parabolic, beta):
    measure = atomic_measure(parabolic, 0, beta, Conformal(), depth=6)
    paths = [TransferPath.between(parabolic, 0, 0, 1, 0), TransferPath.between(parabolic, 0, 0, 3, 1)]
    report = conformality_residual(measure, parabolic, beta, Notion.GROUPOID, paths)
    assert report.max_residual < 1e-12


def test_parabolic_dirac_fails_ordinary_conformality_at_the_critical_point(parabolic, parabolic_dirac):
    report = conformality_residual(parabolic_dirac, parabolic, 1.0, Notion.ORDINARY, [AtomSet.of(-2)])
    assert report.rows[0].lhs == pytest.approx(1.0)
    assert report.rows[0].rhs == 0.0
    assert report.max_residual == pytest.approx(1.0)

    fixed = conformality_residual(parabolic_dirac, parabolic, 1.0, Notion.ORDINARY, [AtomSet.of(0)])
    assert fixed.max_residual < 1e-12


def test_atomic_ordinary_residual_needs_tests(parabolic, parabolic_dirac):
    with pytest.raises(PreconditionError):
        conformality_residual(parabolic_dirac, parabolic, 1.0, Notion.ORDINARY)


def test_non_injective_test_set_is_rejected(square):
    measure = atomic_measure(square, 0.5 + 0.5j, 3.0, Conformal(), depth=4, require_converged=False)
    with pytest.raises(PreconditionError):
        conformality_residual(measure, square, 3.0, Notion.ORDINARY, [AtomSet.of(0.5, -0.5)])


def test_infinite_atomic_measure_default_paths(ruelle):
    measure = atomic_measure(ruelle, 0.5, 3.0, Conformal(), depth=8, require_converged=False)
    assert not measure.is_dirac
    assert measure.truncated
    report = conformality_residual(measure, ruelle, 3.0, Notion.GROUPOID)
    assert len(report.rows) == 16 * 15
    assert report.max_residual < 1e-9
    assert "test,lhs,rhs,residual" in report.to_csv()


def test_groupoid_notion_needs_atoms(square):
    cloud = lyubich_measure(square, depth=4, rng=np.random.default_rng(0))
    with pytest.raises(PreconditionError):
        conformality_residual(cloud, square, np.log(2), Notion.GROUPOID)


@pytest.mark.slow
def test_lyubich_measure_is_jacobian_conformal(square):
    cloud = lyubich_measure(square, rng=np.random.default_rng(3))
    report = conformality_residual(cloud, square, np.log(2), Notion.JACOBIAN)
    assert report.rows
    assert report.max_residual < 0.01
