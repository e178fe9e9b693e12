"""Closed-form leading asymptotics in the two oscillatory sectors.

Along a ray ``zeta = x/t`` of the zero-background field

    u~(x, t) ~ sum_j  C1_j / sqrt(t) * cos(C2_j t + C3_j ln t + C4~_j)

with one term (j = 0) for 0 < zeta < 2 and two terms (j = 0, 1) for
-1/4 < zeta < 0.  Outside [-1/4, 2] the deviation from the background decays
faster than any t^{-1/2} law and the leading value is just the background.

The same numbers appear in two guises: as local-model factors (beta_j,
delta_{mu_j}, B_j) that feed the RH algebra in :mod:`rh_algebra`, and as the
real coefficient quadruple assembled directly.  Both are produced here from
shared ingredients (h_j, chi_j, geometry), but along separate arithmetic paths.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import loggamma

from . import cauchy_engine as ce
from .errors import SectorError
from .phase_geometry import (
    SectorClass,
    StationaryData,
    classify_sector,
    stationary_points,
)
from .reflection_model import h_at

BOUNDARY_MARGIN = 1e-6


@dataclass(frozen=True)
class LocalFactors:
    """Local-parametrix data at one stationary point (mu0, or -mu1 for branch 1)."""

    branch: int
    point: float
    h: float
    beta: complex
    phi_beta: float
    delta_mu: complex
    phi_delta: float
    B: complex


@dataclass(frozen=True)
class AsymptoticCoefficients:
    zeta: float
    branch: int
    kappa: float
    mu: float
    h: float
    C1: float
    C2: float
    C3: float
    C4: float
    C4_tilde: float

    def phase(self, t: float, shifted: bool = True) -> float:
        c4 = self.C4_tilde if shifted else self.C4
        return self.C2 * t + self.C3 * math.log(t) + c4

    def term(self, t: float, shifted: bool = True) -> float:
        if self.C1 == 0.0:
            return 0.0
        return self.C1 / math.sqrt(t) * math.cos(self.phase(t, shifted))

    def envelope(self, t: float) -> float:
        return abs(self.C1) / math.sqrt(t)


@dataclass(frozen=True)
class LeadingValue:
    value: Optional[float]
    sector: SectorClass
    envelope: Optional[float] = None


def _wrap(phase: float) -> float:
    """Reduce a phase to (-pi, pi]."""
    w = math.remainder(phase, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


def arg_gamma_i(h: float) -> float:
    """Continuous branch of arg Gamma(i h) via the complex log-gamma."""
    return float(loggamma(1j * h).imag)


def _sector_for_branches(xi: float) -> SectorClass:
    sector = classify_sector(xi)
    if not sector.oscillatory:
        raise SectorError(f"xi={xi} is not in an oscillatory sector ({sector.value})")
    return sector


def _cross_log(stat: StationaryData) -> float:
    """ln((kappa1 + kappa0)/(kappa1 - kappa0)); zero when there is no second branch."""
    if not stat.has_branch1:
        return 0.0
    return math.log((stat.kappa1 + stat.kappa0) / (stat.kappa1 - stat.kappa0))


@dataclass(frozen=True)
class _Ingredients:
    stat: StationaryData
    sector: SectorClass
    h: Tuple[float, ...]
    chi_phase: Tuple[float, ...]  # -2i chi_j (real)
    log_delta_i: float


@functools.lru_cache(maxsize=4096)
def _ingredients(rc, xi: float, spec: ce.QuadratureSpec) -> _Ingredients:
    sector = _sector_for_branches(xi)
    stat = stationary_points(xi)
    branches = (0, 1) if sector is SectorClass.OSCILLATORY2 else (0,)
    h = []
    chi_phase = []
    for j in branches:
        point = stat.mu0 if j == 0 else -stat.mu1
        h.append(h_at(rc, point))
        chi = ce.chi_at(rc, xi, j, spec, stat)
        chi_phase.append(float((-2j * chi).real))
    return _Ingredients(
        stat=stat,
        sector=sector,
        h=tuple(h),
        chi_phase=tuple(chi_phase),
        log_delta_i=ce.log_delta_at_i(rc, xi, spec, stat),
    )


def _point(stat: StationaryData, j: int) -> float:
    return stat.mu0 if j == 0 else -stat.mu1


def local_factors(
    rc, xi: float, t: float, branch: int = 0, spec: ce.QuadratureSpec = ce.DEFAULT_QUAD
) -> LocalFactors:
    """beta_j, delta_{mu_j}(xi, t) and B_j for one stationary point.

    delta_{mu_j} carries the cross factor ((k1+k0)/(k1-k0))^{i h_{1-j}} once;
    B_j = i delta_{mu_j}^2 beta_j / ((1 + mu_j^-2) sqrt(2|f_j|)).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    sector = _sector_for_branches(xi)
    if branch == 1 and sector is not SectorClass.OSCILLATORY2:
        raise SectorError("branch 1 exists only for -1/4 < xi < 0")
    ing = _ingredients(rc, float(xi), spec)
    stat = ing.stat
    h = ing.h[branch]
    point = _point(stat, branch)
    kappa, mu, f = stat.kappa(branch), stat.mu(branch), stat.f(branch)
    sign = 1.0 if branch == 0 else -1.0

    h_other = ing.h[1 - branch] if len(ing.h) == 2 else 0.0
    chi = 1j * ing.chi_phase[branch] / 2.0  # chi itself (purely imaginary)
    delta_mu = (
        np.exp(-1j * sign * t * stat.theta_hat(branch))
        * np.exp(chi)
        * np.exp(1j * h_other * _cross_log(stat))
        * (128.0 * abs(f) * kappa**2 * t) ** (-0.5j * h)
    )
    phi_delta = float(np.angle(delta_mu**2))
    if h == 0.0:
        return LocalFactors(branch, point, 0.0, 0j, 0.0, complex(delta_mu), phi_delta, 0j)
    phi_beta = math.pi / 4 - float(np.angle(-np.conj(rc(point)))) + arg_gamma_i(h)
    beta = math.sqrt(h) * np.exp(1j * phi_beta)
    B = 1j * delta_mu**2 * beta / ((1.0 + mu**-2) * math.sqrt(2.0 * abs(f)))
    return LocalFactors(
        branch, point, h, complex(beta), phi_beta, complex(delta_mu), phi_delta, complex(B)
    )


def _coefficients(rc, zeta: float, branch: int, spec: ce.QuadratureSpec) -> AsymptoticCoefficients:
    ing = _ingredients(rc, float(zeta), spec)
    stat = ing.stat
    kappa, mu = stat.kappa(branch), stat.mu(branch)
    h = ing.h[branch]
    sign = 1.0 if branch == 0 else -1.0
    q = abs(3.0 - 4.0 * kappa**2)
    C2 = sign * 32.0 * kappa**3 / (1.0 + 4.0 * kappa**2) ** 2
    if h == 0.0:
        # zero amplitude: the phase carries no information
        return AsymptoticCoefficients(zeta, branch, kappa, mu, 0.0, 0.0, C2, 0.0, 0.0, 0.0)
    C1 = -math.sqrt(8.0 * h * kappa / q)
    C3 = -h
    h_other = ing.h[1 - branch] if len(ing.h) == 2 else 0.0
    C4 = (
        0.75 * math.pi
        + ing.chi_phase[branch]
        - h * math.log(128.0 * kappa**3 * q / (1.0 + 4.0 * kappa**2) ** 3)
        - float(np.angle(-np.conj(rc(_point(stat, branch)))))
        + arg_gamma_i(h)
        + 2.0 * h_other * _cross_log(stat)
    )
    # x = y + y_shift moves the phase by -C2'(zeta) y_shift, C2' = -2 sign kappa
    C4_tilde = C4 + sign * 2.0 * kappa * (2.0 * ing.log_delta_i)
    return AsymptoticCoefficients(
        zeta, branch, kappa, mu, h, C1, C2, C3, _wrap(C4), _wrap(C4_tilde)
    )


def coeffs_region1(rc, zeta: float, spec: ce.QuadratureSpec = ce.DEFAULT_QUAD) -> AsymptoticCoefficients:
    """Coefficients for 0 < zeta < 2 (u~ frame)."""
    if classify_sector(zeta) is not SectorClass.OSCILLATORY1:
        raise SectorError(f"coeffs_region1 needs 0 < zeta < 2, got {zeta}")
    return _coefficients(rc, zeta, 0, spec)


def coeffs_region2(
    rc, zeta: float, spec: ce.QuadratureSpec = ce.DEFAULT_QUAD
) -> Tuple[AsymptoticCoefficients, AsymptoticCoefficients]:
    """Both coefficient quadruples for -1/4 < zeta < 0 (u~ frame)."""
    if classify_sector(zeta) is not SectorClass.OSCILLATORY2:
        raise SectorError(f"coeffs_region2 needs -1/4 < zeta < 0, got {zeta}")
    return _coefficients(rc, zeta, 0, spec), _coefficients(rc, zeta, 1, spec)


def coefficients(rc, zeta: float, spec: ce.QuadratureSpec = ce.DEFAULT_QUAD) -> tuple:
    """All branches at ``zeta`` (u~ frame); empty tuple outside the oscillatory sectors."""
    sector = classify_sector(zeta)
    if sector is SectorClass.OSCILLATORY1:
        return (coeffs_region1(rc, zeta, spec),)
    if sector is SectorClass.OSCILLATORY2:
        return coeffs_region2(rc, zeta, spec)
    return ()


def u_hat_closed_form(rc, xi: float, t: float, spec: ce.QuadratureSpec = ce.DEFAULT_QUAD) -> float:
    """Parametric leading term u^(y, t) at y = xi t (unshifted C4)."""
    return sum(c.term(t, shifted=False) for c in coefficients(rc, xi, spec))


def u_hat_from_B(rc, xi: float, t: float, spec: ce.QuadratureSpec = ce.DEFAULT_QUAD) -> float:
    """u^(y, t) = (8/sqrt t) sum_j (1 - mu_j^2)/(1 + mu_j^2)^2 Re B_j."""
    sector = _sector_for_branches(xi)
    stat = stationary_points(xi)
    branches = (0, 1) if sector is SectorClass.OSCILLATORY2 else (0,)
    total = 0.0
    for j in branches:
        mu = stat.mu(j)
        B = local_factors(rc, xi, t, j, spec).B
        total += 8.0 * (1.0 - mu * mu) / (1.0 + mu * mu) ** 2 * B.real
    return total / math.sqrt(t)


def u_leading(
    rc, x: float, t: float, frame: str = "u", spec: ce.QuadratureSpec = ce.DEFAULT_QUAD
) -> LeadingValue:
    """Leading large-time value of u (frame "u") or u~ (frame "u_tilde") at (x, t).

    The u-frame rays 1 < x/t < 3 and 3/4 < x/t < 1 map to the u~ rays
    0 < zeta < 2 and -1/4 < zeta < 0 through u(x, t) = u~(x - t, t) + 1.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if frame == "u":
        zeta, background = (x - t) / t, 1.0
    elif frame == "u_tilde":
        zeta, background = x / t, 0.0
    else:
        raise ValueError(f"unknown frame {frame!r}")
    sector = classify_sector(zeta, margin=BOUNDARY_MARGIN)
    if sector is SectorClass.BOUNDARY:
        return LeadingValue(None, sector)
    if sector.fast_decay:
        return LeadingValue(background, sector, 0.0)
    cs = coefficients(rc, zeta, spec)
    value = background + sum(c.term(t) for c in cs)
    envelope = sum(c.envelope(t) for c in cs)
    return LeadingValue(value, sector, envelope)
