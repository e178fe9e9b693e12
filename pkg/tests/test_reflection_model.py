import numpy as np
import pytest
from hypothesis import given, strategies as st

from mch_asymptotics.errors import DomainError, SingularDataError
from mch_asymptotics.reflection_model import (
    ZERO_REFLECTION,
    ReflectionCoefficient,
    TabulatedReflection,
    h_at,
    validate_symmetries,
)


def test_model_symmetries_exact():
    rep = validate_symmetries(ReflectionCoefficient(0.8, 1.0, 0.3))
    assert rep.passed
    assert rep.negation_defect == 0.0  # the inversion check loses a rounding in 1/(1/mu)


def test_broken_model_fails_symmetry_check():
    def bad(mu):
        mu = np.asarray(mu, dtype=float)
        return 0.3 * np.exp(-mu * mu) + 0.1j * mu
    assert not validate_symmetries(bad).passed


def test_r_at_one_is_real_minus_A():
    rc = ReflectionCoefficient(0.7, 2.0, 0.5)
    assert rc(1.0) == -0.7
    assert rc(-1.0) == 0.7


def test_r_at_zero_undefined():
    with pytest.raises(DomainError):
        ReflectionCoefficient()(0.0)


@given(st.floats(min_value=1e-3, max_value=1e3))
def test_log_transmission_matches_direct(mu):
    rc = ReflectionCoefficient(0.8, 0.5, 1.0)
    assert rc.log_transmission(mu) == pytest.approx(np.log1p(-abs(rc(mu)) ** 2), rel=1e-12, abs=1e-300)


def test_full_reflection_log_is_finite_off_one():
    rc = ReflectionCoefficient(1.0, 1.0, 0.0)
    val = rc.log_transmission(1.0 + 1e-9)
    # 1 - exp(-2 a w^2) ~ 2 a w^2 with w ~ 2e-9
    assert val == pytest.approx(np.log(2 * (2e-9) ** 2), rel=1e-6)
    assert rc.log_transmission(1.0) == -np.inf


def test_analytic_derivative_matches_difference():
    rc = ReflectionCoefficient(0.8, 0.7, 0.2)
    for mu in (-3.0, -0.4, 0.3, 1.7, 4.0):
        fd = (rc.log_transmission(mu + 1e-6) - rc.log_transmission(mu - 1e-6)) / 2e-6
        assert rc.dlog_transmission(mu) == pytest.approx(fd, rel=1e-6)


def test_with_abs2_at():
    rc = ReflectionCoefficient.with_abs2_at(1.6, 0.5)
    assert rc.abs2(1.6) == pytest.approx(0.5, rel=1e-14)
    with pytest.raises(ValueError):
        ReflectionCoefficient.with_abs2_at(1.6, 0.7)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        ReflectionCoefficient(A=1.2)
    with pytest.raises(ValueError):
        ReflectionCoefficient(a=0.0)


def test_h_values():
    assert h_at(ZERO_REFLECTION, 2.0) == 0.0
    rc = ReflectionCoefficient.with_abs2_at(2.0, 0.5)
    assert h_at(rc, 2.0) == pytest.approx(np.log(2) / (2 * np.pi), rel=1e-14)
    with pytest.raises(SingularDataError):
        h_at(ReflectionCoefficient(1.0, 1.0), 1.0)


def test_tabulated_symmetry_and_interpolation(tmp_path):
    mu = np.linspace(1.0, 5.0, 41)
    vals = -0.5 * np.exp(-(mu - 1 / mu) ** 2) * np.exp(0.3j * (mu - 1 / mu))
    path = tmp_path / "r.csv"
    np.savetxt(path, np.column_stack([mu, vals.real, vals.imag]), delimiter=",", header="mu,re,im")
    tab = TabulatedReflection.from_file(path)
    assert validate_symmetries(tab).passed
    assert tab(2.0) == pytest.approx(vals[10], abs=1e-15)
    assert tab(10.0) == 0
    assert not tab.is_zero


def test_tabulated_validation():
    with pytest.raises(ValueError):
        TabulatedReflection(np.array([0.5, 1.0]), np.array([0.1, 0.1]))
    with pytest.raises(ValueError):
        TabulatedReflection(np.array([1.0, 2.0]), np.array([0.1j, 0.1]))
    with pytest.raises(ValueError):
        TabulatedReflection(np.array([1.0, 2.0]), np.array([0.5, 1.5]))
