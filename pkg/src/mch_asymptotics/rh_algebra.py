"""2x2 matrix algebra of the regular RH problem and an independent leading-order assembly.

The chain implemented here is

    M(mu) = (I - sigma1/mu)^{-1} (I - Delta/mu) M^R(mu),   Delta = sigma1 M^R(0)^{-1},

expanded at mu = i as diag(a1, 1/a1) + offdiag(a2, a3) (mu - i) + ..., followed by

    u_hat = -a2 a1 - a3 / a1,     x = y + 2 ln a1.

:func:`assemble_leading` feeds the small-circle residue sums into this chain
using truncated two-variable expansions (order in mu - i, order in t^{-1/2}),
so every product that is formally O(1/t) is dropped exactly.  Its output has
to match the closed-form coefficients of :mod:`asymptotic_coeffs`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from . import cauchy_engine as ce
from .asymptotic_coeffs import local_factors
from .errors import ContractError, DomainError, SectorError
from .phase_geometry import SectorClass, classify_sector, stationary_points

Matrix2C = np.ndarray

IDENTITY = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
ANTISYM = np.array([[0, 1], [-1, 0]], dtype=complex)

STRUCTURE_TOL = 1e-10


def matrix(a, b, c, d) -> Matrix2C:
    return np.array([[a, b], [c, d]], dtype=complex)


def _as_matrix(m) -> Matrix2C:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class ExpansionAtI:
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        if not self.a1 > 0:
            raise DomainError(f"a1 must be positive, got {self.a1}")


@dataclass(frozen=True)
class Reconstruction:
    u_hat: float
    x: float


def remove_pm1_singularity(M: Union[Matrix2C, Callable], mu: complex) -> Matrix2C:
    """(I - sigma1/mu) M(mu); ``M`` may be a matrix or a matrix-valued function."""
    if mu == 0:
        raise DomainError("mu = 0 is excluded")
    Mv = _as_matrix(M(mu) if callable(M) else M)
    return (IDENTITY - SIGMA1 / mu) @ Mv


def _check_mr0_structure(MR0: Matrix2C, tol: float) -> tuple:
    """Return (alpha, beta) if MR0 = ((alpha, i beta), (-i beta, alpha)) with real alpha, beta."""
    alpha = MR0[0, 0]
    beta = (MR0[0, 1] / 1j)
    scale = max(1.0, float(np.max(np.abs(MR0))))
    defects = (
        abs(MR0[1, 1] - alpha),
        abs(MR0[1, 0] + 1j * beta),
        abs(alpha.imag),
        abs(beta.imag),
    )
    if max(defects) > tol * scale:
        raise ContractError(f"M^R(0) lacks the ((a, ib), (-ib, a)) structure: {MR0!r}")
    return float(alpha.real), float(beta.real)


def delta_from_MR0(MR0: Matrix2C, tol: float = STRUCTURE_TOL) -> Matrix2C:
    """Delta = sigma1 M^R(0)^{-1} for an exact M^R(0) (requires alpha^2 - beta^2 = 1)."""
    MR0 = _as_matrix(MR0)
    alpha, beta = _check_mr0_structure(MR0, tol)
    if abs(alpha * alpha - beta * beta - 1.0) > tol:
        raise ContractError(f"alpha^2 - beta^2 = {alpha * alpha - beta * beta}, expected 1")
    delta = SIGMA1 @ np.linalg.inv(MR0)
    if np.max(np.abs(delta @ delta - IDENTITY)) > tol:
        raise ContractError("Delta^2 != I")
    return delta


def dress_regular(MR: Union[Matrix2C, Callable], Delta: Matrix2C, mu: complex) -> Matrix2C:
    """M(mu) = (I - sigma1/mu)^{-1} (I - Delta/mu) M^R(mu)."""
    if mu == 0:
        raise DomainError("mu = 0 is excluded")
    if mu in (1, -1):
        raise DomainError(f"(I - sigma1/mu) is singular at mu = {mu}")
    MRv = _as_matrix(MR(mu) if callable(MR) else MR)
    left = np.linalg.inv(IDENTITY - SIGMA1 / mu)
    return left @ (IDENTITY - _as_matrix(Delta) / mu) @ MRv


def pm1_factor_jet(mu: complex = 1j) -> tuple:
    """Value and mu-derivative of (I - sigma1/mu)^{-1} at ``mu``."""
    inv = np.linalg.inv(IDENTITY - SIGMA1 / mu)
    return inv, -inv @ (SIGMA1 / mu**2) @ inv


def expand_at_i(eta: float, beta1: float, beta2: float, delta_i: float) -> ExpansionAtI:
    """Leading-order a1, a2, a3 from eta, the two linear coefficients and delta(i)."""
    if not delta_i > 0:
        raise DomainError("delta(i) must be positive")
    if not abs(eta) < 1:
        raise DomainError("|eta| must be < 1")
    return ExpansionAtI(
        a1=(1.0 - eta) * delta_i,
        a2=(beta1 + eta) / delta_i,
        a3=(beta2 - eta) * delta_i,
    )


def reconstruct(a: ExpansionAtI, y: float) -> Reconstruction:
    """Exact u_hat = -a2 a1 - a3/a1 and x = y + 2 ln a1."""
    if not a.a1 > 0:
        raise DomainError("a1 must be positive")
    return Reconstruction(
        u_hat=-a.a2 * a.a1 - a.a3 / a.a1,
        x=y + 2.0 * math.log(a.a1),
    )


# ---------------------------------------------------------------------------
# small-circle residue sums


def _images(p: complex, C: Matrix2C) -> list:
    """The pole (p, C) and its images under mu -> -mu and mu -> 1/mu."""

    def neg(p, C):
        return -np.conj(p), -SIGMA3 @ np.conj(C) @ SIGMA3

    def inv(p, C):
        pc = np.conj(p)
        return 1.0 / pc, -np.conj(C) / pc**2

    p1, C1 = neg(p, C)
    p2, C2 = inv(p, C)
    p3, C3 = neg(p2, C2)
    return [(p, C), (p1, C1), (p2, C2), (p3, C3)]


def _base_poles(B0, mu0, B1, mu1) -> list:
    poles = [(complex(mu0), matrix(0, B0, np.conj(B0), 0))]
    if B1 is not None:
        poles.append((complex(-mu1), matrix(0, B1, np.conj(B1), 0)))
    return poles


def local_contribution_sum(
    B0: complex,
    mu0: float,
    B1: Optional[complex] = None,
    mu1: Optional[float] = None,
    target: str = "at0",
    t: float = 1.0,
) -> Matrix2C:
    """Symmetrized residue sums of the local parametrices.

    ``at0``/``atI`` give I + sum C/((p - tau) sqrt t) at tau = 0 or i;
    ``linI`` gives the mu-derivative at i, sum C/((p - i)^2 sqrt t).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if (B1 is None) != (mu1 is None):
        raise ContractError("B1 and mu1 must be given together")
    if not mu0 > 1:
        raise ContractError(f"mu0 must exceed 1, got {mu0}")
    if mu1 is not None and not mu1 > mu0:
        raise ContractError(f"need mu1 > mu0 > 1, got mu0={mu0}, mu1={mu1}")
    if target not in ("at0", "atI", "linI"):
        raise ValueError(f"unknown target {target!r}")
    tau = 0.0 if target == "at0" else 1j
    power = 2 if target == "linI" else 1
    total = np.zeros((2, 2), dtype=complex)
    for p, C in _base_poles(B0, mu0, B1, mu1):
        for q, D in _images(p, C):
            total += D / (q - tau) ** power
    total /= math.sqrt(t)
    return total if target == "linI" else IDENTITY + total


# ---------------------------------------------------------------------------
# truncated expansions in (mu - i) and t^{-1/2}


class _Jet:
    """2x2 matrix series c[m, n] (mu - i)^m eps^n truncated at m, n <= 1."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        self.c = np.zeros((2, 2, 2, 2), dtype=complex) if c is None else c

    @classmethod
    def of(cls, **terms):
        jet = cls()
        for key, val in terms.items():
            m, n = int(key[1]), int(key[2])
            jet.c[m, n] = val
        return jet

    def __matmul__(self, other):
        out = _Jet()
        for m1 in range(2):
            for n1 in range(2):
                for m2 in range(2 - m1):
                    for n2 in range(2 - n1):
                        out.c[m1 + m2, n1 + n2] += self.c[m1, n1] @ other.c[m2, n2]
        return out


@dataclass(frozen=True)
class LeadingAssembly:
    u_hat: float
    x_minus_y: float
    expansion_order0: ExpansionAtI
    a1_order1: float
    a2_order1: float
    a3_order1: float
    structure_defect: float


def _branches(xi: float) -> tuple:
    sector = classify_sector(xi)
    if not sector.oscillatory:
        raise SectorError(f"xi={xi} is not in an oscillatory sector ({sector.value})")
    return (0, 1) if sector is SectorClass.OSCILLATORY2 else (0,)


def assemble_leading(rc, xi: float, t: float, spec: ce.QuadratureSpec = ce.DEFAULT_QUAD) -> LeadingAssembly:
    """Leading u_hat(y, t) at y = xi t and the shift x - y, via the RH chain."""
    if t <= 0:
        raise ValueError("t must be positive")
    branches = _branches(xi)
    stat = stationary_points(xi)
    Bs = [local_factors(rc, xi, t, j, spec).B for j in branches]
    B1 = Bs[1] if len(Bs) == 2 else None
    mu1 = stat.mu1 if len(Bs) == 2 else None

    at0 = local_contribution_sum(Bs[0], stat.mu0, B1, mu1, "at0", t)
    atI = local_contribution_sum(Bs[0], stat.mu0, B1, mu1, "atI", t)
    linI = local_contribution_sum(Bs[0], stat.mu0, B1, mu1, "linI", t)
    _check_mr0_structure(at0, STRUCTURE_TOL)

    if rc.is_zero:
        log_d, d1 = 0.0, 0.0j
    else:
        log_d = ce.log_delta_at_i(rc, xi, spec, stat)
        d1 = ce.delta_first_order_at_i(rc, xi, spec)
    d = math.exp(log_d)
    dsig = np.diag([d, 1.0 / d]).astype(complex)
    # d/dmu delta^{sigma3} = delta^{sigma3} * d1 sigma3 at mu = i
    dsig_lin = dsig @ (d1 * SIGMA3)

    # Delta = sigma1 (I + X)^{-1} = sigma1 - sigma1 X + O(1/t)
    X = at0 - IDENTITY
    Delta = _Jet.of(c00=SIGMA1, c01=-SIGMA1 @ X)
    # I - Delta/mu: value I + i Delta, derivative Delta/mu^2 = -Delta
    second = _Jet.of(
        c00=IDENTITY + 1j * Delta.c[0, 0],
        c01=1j * Delta.c[0, 1],
        c10=-Delta.c[0, 0],
        c11=-Delta.c[0, 1],
    )
    f_val, f_der = pm1_factor_jet(1j)
    first = _Jet.of(c00=f_val, c10=f_der)
    Y = atI - IDENTITY
    regular = _Jet.of(
        c00=dsig,
        c01=Y @ dsig,
        c10=dsig_lin,
        c11=linI @ dsig + Y @ dsig_lin,
    )
    M = first @ second @ regular

    # the expansion must be diagonal at order 0 and off-diagonal at order 1 in (mu - i)
    off = np.array([[0, 1], [1, 0]], dtype=bool)
    defect = max(
        float(np.max(np.abs(M.c[0][:, off]))),
        float(np.max(np.abs(M.c[1][:, ~off]))),
        abs(M.c[0, 0, 0, 0] * M.c[0, 0, 1, 1] - 1.0),
    )
    a1 = M.c[0, 0, 0, 0].real
    a1_1 = M.c[0, 1, 0, 0].real
    a2_0, a2_1 = M.c[1, 0, 0, 1].real, M.c[1, 1, 0, 1].real
    a3_0, a3_1 = M.c[1, 0, 1, 0].real, M.c[1, 1, 1, 0].real
    # u_hat = -a2 a1 - a3/a1 kept to first order in t^{-1/2}
    u_hat = -(a2_0 + a2_1) * a1 - a2_0 * a1_1 - (a3_0 + a3_1) / a1 + a3_0 * a1_1 / a1**2
    return LeadingAssembly(
        u_hat=float(u_hat),
        x_minus_y=2.0 * math.log(a1),
        expansion_order0=ExpansionAtI(a1, a2_0, a3_0),
        a1_order1=float(a1_1),
        a2_order1=float(a2_1),
        a3_order1=float(a3_1),
        structure_defect=defect,
    )
