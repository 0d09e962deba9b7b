"""Closed-form transforms, their structural properties, and the
confluent-hypergeometric cross-check routes.

Frozen reference values come from 40-digit quadrature of
c^-s E[(1+2b gamma)^-p] / E[(1+2c gamma)^-p] with the appropriate
(gamma shape, p) for each index sign.
"""

import math

import numpy as np
import pytest

from rootbound.errors import (
    ConsistencyError,
    DomainError,
    NearIntegerParameterError,
)
from rootbound.transforms import (
    BesselSpec,
    Boundary,
    TransformQuery,
    duality_residual,
    gamma_expectation,
    gamma_expectation_via_u,
    mellin_neg_index,
    mellin_pos_index,
    mellin_transform,
    tricomi_u,
    whittaker_w,
)

REF_BND = Boundary(0.25, 1.0)

MELLIN_NEG_REF = {  # nu=0.5, b=0.25, c=1.0
    0.5: 1.2852901517519535,
    1.0: 1.8269206834659704,
    1.5: 2.7452841851973630,
    2.0: 4.2760941816013160,
}
MELLIN_POS_REF = {  # nu=0.5, b=0.25, c=1.0
    0.75: 1.1140759970114863,
    1.5: 1.8269206834659700,
    3.0: 6.8320595592370249,
}
MELLIN_NEG_WIDE = 21.308860316961349  # nu=1.2, b=0.1, c=0.4, s=2
U_1_1_1 = 0.5963473623231940
U_HALF_NEG = 1.4775336253308405   # U(-0.5, 0.3, 2.0)
U_07_03_2 = 0.4494798597086021    # U(0.7, 0.3, 2.0)
WHITW_REF = 0.2601300475114444    # W_{-1/2,1}(2)
GAMMA_EXPECT_COMPLEX = complex(0.2400752296760591, -0.1094957397615451)


# --- parameter containers ----------------------------------------------------

def test_bessel_spec_validation():
    assert BesselSpec(0.5, -1).dimension == pytest.approx(1.0)
    assert BesselSpec(0.5, 1).dimension == pytest.approx(3.0)
    with pytest.raises(DomainError):
        BesselSpec(0.0, -1)
    with pytest.raises(DomainError):
        BesselSpec(-1.0, 1)
    with pytest.raises(DomainError):
        BesselSpec(1.0, 0)
    with pytest.raises(DomainError):
        BesselSpec(float("inf"), 1)


def test_boundary_validation():
    with pytest.raises(DomainError):
        Boundary(0.0, 1.0)
    with pytest.raises(DomainError):
        Boundary(-0.5, 1.0)
    with pytest.raises(DomainError):
        Boundary(1.5, 1.0)
    with pytest.raises(DomainError):
        Boundary(1.0, 1.0)  # equality only via the named constructor
    deg = Boundary.degenerate(0.7)
    assert deg.is_degenerate
    assert not Boundary(0.25, 1.0).is_degenerate


def test_transform_query_regime():
    assert TransformQuery(2.0).closed_form_regime
    assert not TransformQuery(complex(1.0, 3.0)).closed_form_regime
    assert not TransformQuery(-1.0 + 0j).closed_form_regime


# --- closed forms against frozen references ---------------------------------

def test_neg_index_reference_values():
    for s, want in MELLIN_NEG_REF.items():
        assert mellin_neg_index(0.5, REF_BND, s) == pytest.approx(want, rel=1e-10)


def test_pos_index_reference_values():
    for s, want in MELLIN_POS_REF.items():
        assert mellin_pos_index(0.5, REF_BND, s) == pytest.approx(want, rel=1e-10)


def test_neg_index_second_parameter_set():
    got = mellin_neg_index(1.2, Boundary(0.1, 0.4), 2.0)
    assert got == pytest.approx(MELLIN_NEG_WIDE, rel=1e-10)


def test_s_zero_returns_one_exactly():
    assert mellin_neg_index(0.5, REF_BND, 0.0) == 1.0
    assert mellin_pos_index(0.5, REF_BND, 0.0) == 1.0
    assert mellin_neg_index(0.5, REF_BND, 1e-9) == 1.0


def test_pos_index_at_s_equal_nu_is_c_power():
    # p = s - nu = 0 makes both expectations 1, leaving c^-s
    assert mellin_pos_index(0.5, REF_BND, 0.5) == pytest.approx(1.0, rel=1e-12)
    assert mellin_pos_index(1.0, Boundary(0.2, 0.5), 1.0) == pytest.approx(2.0, rel=1e-12)


def test_degenerate_boundary_gives_pure_power():
    deg = Boundary.degenerate(0.7)
    for s in (0.5, 1.0, 3.0):
        assert mellin_neg_index(0.5, deg, s) == pytest.approx(0.7 ** -s, rel=1e-14)
        assert mellin_pos_index(0.5, deg, s) == pytest.approx(0.7 ** -s, rel=1e-14)


def test_dispatch_matches_index_sign():
    assert mellin_transform(BesselSpec(0.5, -1), REF_BND, 1.0) == pytest.approx(
        mellin_neg_index(0.5, REF_BND, 1.0), rel=1e-14)
    assert mellin_transform(BesselSpec(0.5, 1), REF_BND, 1.5) == pytest.approx(
        mellin_pos_index(0.5, REF_BND, 1.5), rel=1e-14)


def test_domain_errors():
    with pytest.raises(DomainError):
        mellin_neg_index(-0.5, REF_BND, 1.0)
    with pytest.raises(DomainError):
        mellin_neg_index(0.5, REF_BND, complex(-0.6, 0.0))  # re(nu+s) <= 0
    with pytest.raises(DomainError):
        mellin_pos_index(0.5, REF_BND, -1.0)


def test_conjugate_symmetry_on_the_contour():
    s = complex(1.0, 7.0)
    up = mellin_neg_index(0.5, REF_BND, s)
    down = mellin_neg_index(0.5, REF_BND, s.conjugate())
    assert abs(up - np.conj(down)) < 1e-12 * abs(up)


# --- structural invariants ----------------------------------------------------

S_GRID = np.arange(0.25, 5.01, 0.25)


def test_transform_bounds():
    # 1 = E[Y^0]... Y = b+sigma > b, so 0 < E[Y^-s] <= b^-s
    for s in S_GRID:
        val = mellin_neg_index(0.5, REF_BND, float(s))
        assert 0.0 < val <= REF_BND.b ** (-float(s))


def test_log_convexity_in_s():
    # E[Y^-s] is log-convex in s (Hoelder), so second differences of the
    # log are nonnegative up to quadrature error
    logs = np.array([math.log(mellin_neg_index(0.5, REF_BND, float(s))) for s in S_GRID])
    second = logs[2:] - 2.0 * logs[1:-1] + logs[:-2]
    assert np.all(second >= -1e-8)


def test_normalization_continuity_at_zero():
    assert abs(mellin_neg_index(0.5, REF_BND, 1e-6) - 1.0) <= 1e-4
    assert abs(mellin_pos_index(0.5, REF_BND, 1e-6) - 1.0) <= 1e-4


def test_closed_form_nonincreasing_in_b():
    for s in (0.5, 2.0):
        vals = [mellin_neg_index(0.5, Boundary(b, 1.0), s)
                for b in (0.1, 0.25, 0.5, 0.75, 0.9)]
        assert all(x >= y - 1e-12 for x, y in zip(vals, vals[1:]))


def test_duality_reference_points():
    assert duality_residual(0.5, REF_BND, 0.5) <= 1e-12
    assert duality_residual(0.5, REF_BND, 2.0) <= 1e-12
    assert duality_residual(1.2, Boundary(0.1, 0.4), 3.0) <= 1e-12


def test_duality_requires_s_at_least_nu():
    with pytest.raises(DomainError):
        duality_residual(1.0, REF_BND, 0.5)


# --- Tricomi U and the oracle route ------------------------------------------

def test_tricomi_u_closed_forms():
    # U(a, a+1, z) = z^-a
    assert tricomi_u(0.7, 1.7, 2.0) == pytest.approx(2.0 ** -0.7, rel=1e-10)
    assert tricomi_u(2.0, 3.0, 0.5) == pytest.approx(0.5 ** -2.0, rel=1e-10)
    # U(0, b, z) = 1
    assert tricomi_u(0.0, 0.3, 1.0) == 1.0


def test_tricomi_u_reference_values():
    assert tricomi_u(1.0, 1.0, 1.0) == pytest.approx(U_1_1_1, rel=1e-10)
    assert tricomi_u(0.7, 0.3, 2.0) == pytest.approx(U_07_03_2, rel=1e-10)


def test_tricomi_u_negative_first_parameter():
    # only the series route applies here
    assert tricomi_u(-0.5, 0.3, 2.0) == pytest.approx(U_HALF_NEG, rel=1e-9)


def test_tricomi_u_series_only_near_integer_raises():
    with pytest.raises(NearIntegerParameterError):
        tricomi_u(-0.5, 1.0 + 1e-9, 2.0)


def test_tricomi_u_domain():
    with pytest.raises(DomainError):
        tricomi_u(1.0, 0.5, 0.0)
    with pytest.raises(DomainError):
        tricomi_u(1.0, 0.5, -2.0)


def test_gamma_expectation_basics():
    assert gamma_expectation(1.3, 0.7, 0.0) == 1.0
    got = gamma_expectation(1.0, 0.5, 1.0)
    assert got == pytest.approx(U_1_1_1, rel=1e-10)  # e*E1(1)


def test_gamma_expectation_complex_exponent():
    got = gamma_expectation(2.3, 0.7, complex(1.1, 0.4))
    assert abs(got - GAMMA_EXPECT_COMPLEX) < 1e-9 * abs(GAMMA_EXPECT_COMPLEX)


def test_gamma_expectation_in_unit_interval_for_positive_p():
    for alpha, beta, p in ((0.5, 0.3, 1.0), (3.0, 1.5, 2.5), (1.0, 0.2, 0.7)):
        v = gamma_expectation(alpha, beta, p)
        assert 0.0 < v < 1.0


def test_oracle_route_matches_direct():
    # second parameter alpha+1-p kept off the integers
    for alpha, beta, p in ((1.0, 0.5, 0.8), (2.5, 0.8, 1.3),
                           (0.7, 0.3, 2.2), (3.8, 1.6, 0.4),
                           (1.9, 0.11, 3.3)):
        direct = gamma_expectation(alpha, beta, p)
        oracle = gamma_expectation_via_u(alpha, beta, p)
        assert abs(direct - oracle) <= 1e-7 * abs(direct)


def test_oracle_route_near_integer_raises():
    # alpha + 1 - p integral => connection formula degenerate
    with pytest.raises(NearIntegerParameterError):
        gamma_expectation_via_u(1.5, 0.5, 1.5)


def test_oracle_route_p_zero():
    assert gamma_expectation_via_u(1.5, 0.5, 0.0) == 1.0


def test_oracle_route_domain():
    with pytest.raises(DomainError):
        gamma_expectation_via_u(-1.0, 0.5, 1.0)
    with pytest.raises(DomainError):
        gamma_expectation_via_u(1.0, 0.0, 1.0)


def test_whittaker_reduction_to_exponential():
    # kappa=0, mu=1/2: U(1, 2, z) = z^-1, so W = e^(-z/2)
    for z in (0.5, 1.0, 3.0):
        assert whittaker_w(0.0, 0.5, z) == pytest.approx(math.exp(-0.5 * z), rel=1e-10)


def test_whittaker_reference_value():
    assert whittaker_w(-0.5, 1.0, 2.0) == pytest.approx(WHITW_REF, rel=1e-9)


def test_whittaker_domain():
    with pytest.raises(DomainError):
        whittaker_w(2.0, 1.0, 1.0)  # mu - kappa + 1/2 <= 0
    with pytest.raises(DomainError):
        whittaker_w(0.0, 0.5, -1.0)
