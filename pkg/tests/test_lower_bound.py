from fractions import Fraction

import pytest

from app.exceptions import ConstructionError
from app.models.lower_bound import GAMMA_5, L, TwoBitLBParams
from app.services.lower_bound_service import LowerBoundService


@pytest.fixture(scope="module")
def params():
    return TwoBitLBParams.build(33, k=1)


def test_parameters(params):
    assert params.gamma_1 == Fraction(1, 64 * 33 * 33)
    assert params.epsilon == params.gamma_1 / 2
    assert params.Delta == Fraction(1, 384)
    assert params.delta == Fraction(1, 768)
    assert params.gamma_4 == 4 * params.gamma_1 * (13 * 33 - 14)
    assert params.seller(0) == Fraction(11, 24)
    assert params.seller(32) == Fraction(13, 24)
    assert params.band == (Fraction(11, 24), Fraction(13, 24))
    assert params.w5_buyer == Fraction(13, 24)


def test_c_values(params):
    c1, c2, c3, c4 = params.c_values
    assert c4 == params.gamma_6
    assert c1 - c2 == GAMMA_5 * (1 + L) / 2
    assert c2 - c4 == params.gamma_1 * Fraction(77, 96) * 33


@pytest.mark.parametrize("kwargs", [
    dict(N=32),
    dict(N=40, k=39),
    dict(N=40, k=-1),
    dict(N=40, epsilon=Fraction(1, 10)),
    dict(N=40, epsilon=0),
])
def test_invalid_parameters(kwargs):
    with pytest.raises(ConstructionError):
        TwoBitLBParams.build(**kwargs)


def test_float_epsilon_is_read_exactly():
    params = TwoBitLBParams.build(40, epsilon=1e-6)
    assert params.epsilon == Fraction(1, 10**6)


def test_perturbation(params):
    assert LowerBoundService.perturbation(params, 0) == []
    moves = LowerBoundService.perturbation(params, 1)
    assert len(moves) == 4
    assert sum(sign for _, _, sign in moves) == 0


@pytest.mark.parametrize("k", [0, 1, 31])
def test_support_is_a_probability_law(params, k):
    points = LowerBoundService.support(params, k)
    assert len(points) == 4 * 33 + 5
    assert sum(m for _, _, _, m in points) == 1
    assert all(m >= 0 for _, _, _, m in points)


def test_distribution_keeps_exact_masses(params):
    dist = LowerBoundService.twobit_lb_distribution(params)
    assert len(dist) == 4 * 33 + 5
    assert sum(m for _, _, m in dist.exact) == 1
    assert dist.labels[-1] == "W6(1,0)"


def test_structure_report_passes(params):
    report = LowerBoundService.twobit_lb_structure_report(params)
    assert report.passed
    names = {c.name for c in report.checks}
    assert {"a-argmax", "b-lower-dominated", "c-exploration-cost", "d-feedback-invariance",
            "c1-closed-form", "plateau-c1", "plateau-c2", "plateau-c3", "plateau-c4",
            "gamma6-floor", "w3-positive", "w3-below-2gamma1"} <= names
    argmax = report.check("a-argmax")
    assert Fraction(argmax.exact_lhs) >= params.rho * params.epsilon


def test_base_instance_report():
    report = LowerBoundService.twobit_lb_structure_report(TwoBitLBParams.build(33, k=0))
    assert report.passed
    assert report.epsilon == str(Fraction(1, 64 * 33 * 33 * 2))


def test_literal_w5_placement():
    params = TwoBitLBParams.build(33, k=1, w5_upper=False)
    assert params.w5_buyer == Fraction(11, 24)
    report = LowerBoundService.twobit_lb_structure_report(params)
    assert report.w5_buyer == "11/24"


def test_expected_gft_at_origin_is_c1(params):
    base = LowerBoundService.support(params, 0)
    assert LowerBoundService.expected_gft(base, Fraction(0), Fraction(0)) == params.c_values[0]
