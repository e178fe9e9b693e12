import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mch_asymptotics.asymptotic_coeffs import coefficients, local_factors
from mch_asymptotics.errors import ContractError, DomainError, SectorError
from mch_asymptotics.phase_geometry import stationary_points
from mch_asymptotics.reflection_model import ZERO_REFLECTION, ReflectionCoefficient
from mch_asymptotics.rh_algebra import (
    ANTISYM,
    IDENTITY,
    SIGMA1,
    ExpansionAtI,
    assemble_leading,
    delta_from_MR0,
    dress_regular,
    expand_at_i,
    local_contribution_sum,
    matrix,
    pm1_factor_jet,
    reconstruct,
    remove_pm1_singularity,
)

RC = ReflectionCoefficient(0.8, 0.3, 0.4)


def _random_unimodular(rng):
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return m / np.sqrt(np.linalg.det(m))


def test_remove_singularity_identity():
    out = remove_pm1_singularity(IDENTITY, 2.0)
    assert np.allclose(out, IDENTITY - SIGMA1 / 2)
    assert np.linalg.det(out) == pytest.approx(0.75)
    assert abs(np.linalg.det(remove_pm1_singularity(IDENTITY, 1.0))) < 1e-15
    with pytest.raises(DomainError):
        remove_pm1_singularity(IDENTITY, 0)


def test_remove_singularity_accepts_function():
    f = lambda mu: matrix(1, mu, 0, 1)
    assert np.allclose(remove_pm1_singularity(f, 3.0), (IDENTITY - SIGMA1 / 3) @ f(3.0))


def test_det_identity_random():
    rng = np.random.default_rng(7)
    for _ in range(200):
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        mu = complex(rng.normal(), rng.normal())
        got = np.linalg.det(remove_pm1_singularity(M, mu))
        assert abs(got - (1 - 1 / mu**2) * np.linalg.det(M)) < 1e-12 * max(1, abs(got))


def test_delta_identity_input():
    assert np.array_equal(delta_from_MR0(IDENTITY), SIGMA1)


def test_delta_hyperbolic():
    s = 0.3
    a, b = math.cosh(s), math.sinh(s)
    D = delta_from_MR0(matrix(a, 1j * b, -1j * b, a))
    assert np.allclose(D, matrix(1j * b, a, a, -1j * b), atol=1e-15)
    assert np.max(np.abs(D @ D - IDENTITY)) < 1e-15


def test_delta_rejects_bad_determinant():
    a = 1.0
    b = math.sqrt(a * a - 0.9)
    with pytest.raises(ContractError):
        delta_from_MR0(matrix(a, 1j * b, -1j * b, a))


def test_delta_rejects_bad_structure():
    with pytest.raises(ContractError):
        delta_from_MR0(matrix(1, 0.1, -0.1, 1))


def test_dress_inverse_pair():
    assert np.allclose(dress_regular(IDENTITY, SIGMA1, 0.7 + 0.2j), IDENTITY)
    with pytest.raises(DomainError):
        dress_regular(IDENTITY, SIGMA1, 1)


def test_pm1_factor_at_i():
    val, der = pm1_factor_jet(1j)
    assert np.allclose(val, matrix(0.5, -0.5j, -0.5j, 0.5), atol=1e-15)
    assert np.allclose(der, -0.5j * IDENTITY, atol=1e-15)


def test_dress_determinant_bookkeeping():
    rng = np.random.default_rng(11)
    for _ in range(100):
        s = rng.normal()
        Delta = delta_from_MR0(matrix(math.cosh(s), 1j * math.sinh(s), -1j * math.sinh(s), math.cosh(s)))
        MR = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        mu = complex(rng.normal(), rng.normal())
        got = np.linalg.det(dress_regular(MR, Delta, mu))
        want = np.linalg.det(MR) / (1 - 1 / mu**2) * np.linalg.det(IDENTITY - Delta / mu)
        assert abs(got - want) < 1e-12 * max(1, abs(want))


def test_expand_and_reconstruct_trivial():
    a = expand_at_i(0.0, 0.0, 0.0, 1.0)
    assert (a.a1, a.a2, a.a3) == (1.0, 0.0, 0.0)
    rec = reconstruct(a, 5.0)
    assert rec.u_hat == 0.0 and rec.x == 5.0
    assert reconstruct(ExpansionAtI(math.exp(0.1), 0, 0), 2.0).x == pytest.approx(2.2, abs=1e-15)
    assert reconstruct(ExpansionAtI(1.0, 0.01, -0.01), 0.0).u_hat == 0.0
    with pytest.raises(DomainError):
        ExpansionAtI(0.0, 0.0, 0.0)


@given(
    st.floats(-1e-3, 1e-3), st.floats(-1e-3, 1e-3), st.floats(-1e-3, 1e-3), st.floats(0.5, 1.5)
)
def test_reconstruct_leading_order(eta, b1, b2, d):
    rec = reconstruct(expand_at_i(eta, b1, b2, d), 0.0)
    # exact expression minus the linear part -(b1 + b2) is quadratic in the small data
    assert abs(rec.u_hat + (b1 + b2)) <= 10 * (abs(eta) + abs(b1) + abs(b2)) ** 2 + 1e-18
    assert rec.x == pytest.approx(2 * math.log((1 - eta) * d), abs=1e-15)


def test_local_sum_examples():
    assert np.allclose(local_contribution_sum(0.7, 2.0, target="at0"), IDENTITY)
    at0 = local_contribution_sum(1j, 2.0, target="at0", t=1.0)
    assert at0[0, 1] == pytest.approx(2j) and at0[1, 0] == pytest.approx(-2j)
    atI = local_contribution_sum(1j, 2.0, target="atI", t=1.0)
    assert np.allclose(atI - IDENTITY, 0.5 * (at0 - IDENTITY))


def test_local_sum_matches_closed_forms_two_branches():
    B0, B1, m0, m1, t = 0.3 - 0.2j, -0.1 + 0.4j, 2.1, 6.5, 49.0
    k = 4j / math.sqrt(t) * (B0.imag / m0 - B1.imag / m1)
    assert np.allclose(local_contribution_sum(B0, m0, B1, m1, "at0", t), IDENTITY + k * ANTISYM)
    assert np.allclose(local_contribution_sum(B0, m0, B1, m1, "atI", t), IDENTITY + 0.5 * k * ANTISYM)
    e12 = (B0 / (m0 - 1j) ** 2).real + (B1 / (m1 + 1j) ** 2).real
    e21 = (np.conj(B0) / (m0 - 1j) ** 2).real + (np.conj(B1) / (m1 + 1j) ** 2).real
    lin = local_contribution_sum(B0, m0, B1, m1, "linI", t)
    assert np.allclose(lin, 4 / math.sqrt(t) * matrix(0, e12, e21, 0))


def test_local_sum_contracts():
    with pytest.raises(ContractError):
        local_contribution_sum(0.1, 2.0, B1=0.2)
    with pytest.raises(ContractError):
        local_contribution_sum(0.1, 2.0, B1=0.2, mu1=1.5)
    with pytest.raises(ValueError):
        local_contribution_sum(0.1, 2.0, target="nowhere")


def test_assemble_zero_reflection():
    res = assemble_leading(ZERO_REFLECTION, 1.0, 100.0)
    assert res.u_hat == 0.0 and res.x_minus_y == 0.0


def test_assemble_outside_sector():
    with pytest.raises(SectorError):
        assemble_leading(RC, 2.5, 100.0)


@pytest.mark.parametrize("xi,t", [(1.0, 100.0), (-0.125, 400.0), (0.3, 1e4), (-0.22, 1e3)])
def test_assemble_matches_closed_form(xi, t):
    res = assemble_leading(RC, xi, t)
    cs = coefficients(RC, xi)
    ref = sum(c.term(t, shifted=False) for c in cs)
    amp = sum(c.envelope(t) for c in cs)
    assert abs(res.u_hat - ref) <= 1e-9 * amp
    assert res.structure_defect < 1e-12


def test_assemble_first_order_terms_match_expand_at_i():
    xi, t = 0.9, 250.0
    res = assemble_leading(RC, xi, t)
    stat = stationary_points(xi)
    B0 = local_factors(RC, xi, t).B
    eta = 2 * B0.imag / (stat.mu0 * math.sqrt(t))
    b1 = 4 / math.sqrt(t) * (B0 / (stat.mu0 - 1j) ** 2).real
    b2 = 4 / math.sqrt(t) * (np.conj(B0) / (stat.mu0 - 1j) ** 2).real
    d = res.expansion_order0.a1
    ref = expand_at_i(eta, b1, b2, d)
    assert res.a1_order1 == pytest.approx(ref.a1 - d, abs=1e-15)
    assert res.a2_order1 == pytest.approx(ref.a2, abs=1e-15)
    assert res.a3_order1 == pytest.approx(ref.a3, abs=1e-15)
    assert res.u_hat == pytest.approx(-(b1 + b2), abs=1e-15)
