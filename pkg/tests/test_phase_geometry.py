import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mch_asymptotics.errors import DomainError, SectorError
from mch_asymptotics.phase_geometry import (
    KAPPA_CRITICAL,
    IntervalUnion,
    RayParameter,
    SectorClass,
    classify_sector,
    dtheta_hat_dk,
    f_of_kappa,
    k_of_mu,
    kappa0_of_xi,
    kappa1_of_xi,
    sigma_a,
    sigma_b,
    stationary_points,
    theta,
    theta_hat,
    xi_of_kappa,
)

# bisection/mpmath oracle at 30 digits, frozen
KAPPA0_XI1 = 0.242934135878322839
MU0_XI1 = 1.597654212259488022
F0_XI1 = 0.355540300628614442
KAPPA0_XI_M18 = 0.579470825518338715
KAPPA1_XI_M18 = 1.778823645663924451
MU1_XI_M18 = 7.253165421372995926


def test_theta_spot_value():
    # k(2) = 3/8, theta_hat = 3/8 - (3/4)/(1 + 9/16)
    assert theta(2.0, 1.0) == pytest.approx(-0.105, abs=1e-15)


def test_k_of_mu_rejects_zero():
    with pytest.raises(DomainError):
        k_of_mu(0.0)


def test_theta_hat_poles():
    with pytest.raises(DomainError):
        theta_hat(0.5j, 1.0)


def test_stationary_values_at_xi_one():
    s = stationary_points(1.0)
    assert s.kappa0 == pytest.approx(KAPPA0_XI1, abs=1e-15)
    assert s.mu0 == pytest.approx(MU0_XI1, abs=1e-15)
    assert s.f0 == pytest.approx(F0_XI1, abs=1e-15)
    assert not s.has_branch1


def test_two_branches_in_left_sector():
    s = stationary_points(-0.125)
    assert s.kappa0 == pytest.approx(KAPPA0_XI_M18, abs=1e-14)
    assert s.kappa1 == pytest.approx(KAPPA1_XI_M18, abs=1e-14)
    assert s.mu1 == pytest.approx(MU1_XI_M18, abs=1e-13)
    assert s.f0 > 0 > s.f1


def test_endpoint_values():
    assert kappa0_of_xi(2.0) == 0.0
    assert kappa0_of_xi(-0.25) == pytest.approx(KAPPA_CRITICAL, abs=1e-12)
    assert kappa1_of_xi(-0.25) == pytest.approx(KAPPA_CRITICAL, abs=1e-12)
    assert kappa0_of_xi(0.0) == pytest.approx(0.5, abs=1e-15)


def test_kappa0_continuous_through_zero():
    left, right = kappa0_of_xi(-1e-12), kappa0_of_xi(1e-12)
    assert abs(left - right) < 1e-11


def test_kappa1_grows_near_zero():
    assert kappa1_of_xi(-1e-6) > 400


def test_out_of_range_raises():
    with pytest.raises(SectorError):
        kappa0_of_xi(2.5)
    with pytest.raises(SectorError):
        kappa1_of_xi(0.1)


@given(st.floats(min_value=-0.2499, max_value=1.9999))
def test_round_trip_branch0(xi):
    assert abs(float(xi_of_kappa(kappa0_of_xi(xi))) - xi) < 1e-12


@given(st.floats(min_value=-0.2499, max_value=-1e-3))
def test_round_trip_branch1_and_stationarity(xi):
    k1 = kappa1_of_xi(xi)
    assert abs(float(xi_of_kappa(k1)) - xi) < 1e-12 * max(1.0, k1)
    assert abs(float(dtheta_hat_dk(k1, xi))) < 1e-8
    assert abs(float(dtheta_hat_dk(-k1, xi))) < 1e-8


def test_f_changes_sign_at_critical():
    assert f_of_kappa(KAPPA_CRITICAL) == pytest.approx(0.0, abs=1e-15)
    assert f_of_kappa(0.5) > 0 > f_of_kappa(1.0)


@pytest.mark.parametrize(
    "xi, sector",
    [
        (3.0, SectorClass.FAST_DECAY_RIGHT),
        (1.0, SectorClass.OSCILLATORY1),
        (-0.1, SectorClass.OSCILLATORY2),
        (-1.0, SectorClass.FAST_DECAY_LEFT),
        (2.0, SectorClass.BOUNDARY),
        (0.0, SectorClass.BOUNDARY),
        (-0.25, SectorClass.BOUNDARY),
    ],
)
def test_classify(xi, sector):
    assert classify_sector(xi) is sector


def test_classify_margin():
    assert classify_sector(1.9995, margin=1e-3) is SectorClass.BOUNDARY
    assert classify_sector(1.9995) is SectorClass.OSCILLATORY1


def test_ray_parameter_frames():
    assert RayParameter.from_zeta(2.0, "u").xi == 1.0
    assert RayParameter.from_zeta(2.0, "u_tilde").xi == 2.0
    with pytest.raises(ValueError):
        RayParameter.from_zeta(1.0, "v")


def test_sigma_b_shapes():
    assert sigma_b(3.0).is_empty
    assert list(sigma_b(-1.0)) == [(-math.inf, math.inf)]
    s = stationary_points(1.0)
    assert list(sigma_b(1.0)) == [(-s.mu0, -1 / s.mu0), (1 / s.mu0, s.mu0)]
    assert len(sigma_b(-0.125)) == 5
    with pytest.raises(SectorError):
        sigma_b(0.0)


def test_sigma_a_complements_sigma_b():
    sb, sa = sigma_b(-0.125), sigma_a(-0.125)
    for s in np.linspace(-20, 20, 4001):
        assert not (sb.contains(s) and sa.contains(s))
    assert sigma_a(3.0).intervals == ((-math.inf, math.inf),)


def test_interval_union_validation():
    with pytest.raises(ValueError):
        IntervalUnion(((1.0, 0.0),))
    with pytest.raises(ValueError):
        IntervalUnion(((0.0, 2.0), (1.0, 3.0)))
    u = IntervalUnion(((-2.0, -1.0), (0.5, 3.0)))
    assert u.positive_part().intervals == ((0.5, 3.0),)
    assert u.endpoints() == [-2.0, -1.0, 0.5, 3.0]
    assert u.in_closure(3.0) and not u.contains(3.0)
