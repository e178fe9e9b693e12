"""Scalar Cauchy integrals built from ln(1 - |r|^2) on Sigma_b.

    delta(mu, xi) = exp{ (1/2 pi i) int_{Sigma_b(xi)} ln(1 - |r(s)|^2) / (s - mu) ds }

plus its value at mu = i, the coordinate shift 2 ln delta(i, xi), and the
regularized phases chi evaluated at the stationary points.

Unbounded pieces of Sigma_b are mapped onto compact ones by s = 1/u.  The
points s = +-1 (where |r| may reach 1 and the logarithm blows up) are always
split off and approached through a power-graded substitution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

from .errors import AccuracyError, ContractError, SectorError
from .phase_geometry import (
    IntervalUnion,
    SectorClass,
    StationaryData,
    classify_sector,
    sigma_b,
    stationary_points,
)


@dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-10
    atol: float = 1e-12
    limit: int = 500
    grading: float = 2.0
    # accept QUADPACK error estimates up to this multiple of the target
    slack: float = 100.0

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.grading < 1:
            raise ValueError("grading exponent must be >= 1")


DEFAULT_QUAD = QuadratureSpec()

# points where ln(1 - |r|^2) may carry an integrable log singularity
_SINGULAR = (-1.0, 1.0)
_TAYLOR_RADIUS = 1e-4


def _quad(f: Callable[[float], float], a: float, b: float, spec: QuadratureSpec) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            f, a, b, epsabs=spec.atol, epsrel=spec.rtol, limit=spec.limit
        )
    if not math.isfinite(val) or err > spec.slack * max(spec.atol, spec.rtol * abs(val)):
        raise AccuracyError(
            f"quadrature on [{a}, {b}] did not converge: value {val}, error estimate {err}"
        )
    return val


def _graded(f, a, b, spec, grade_a, grade_b):
    """int_a^b f, clustering nodes toward flagged endpoints via s = a + (b-a) v^p."""
    p = spec.grading
    if grade_a and grade_b:
        m = 0.5 * (a + b)
        return _graded(f, a, m, spec, True, False) + _graded(f, m, b, spec, False, True)
    if grade_a:
        h = b - a
        return _quad(lambda v: f(a + h * v**p) * p * h * v ** (p - 1), 0.0, 1.0, spec)
    if grade_b:
        h = b - a
        return _quad(lambda v: f(b - h * v**p) * p * h * v ** (p - 1), 0.0, 1.0, spec)
    return _quad(f, a, b, spec)


def _split(a: float, b: float, extra: Iterable[float] = ()) -> list:
    cuts = sorted({c for c in (-1.0, 0.0, 1.0, *extra) if a < c < b})
    edges = [a, *cuts, b]
    return list(zip(edges[:-1], edges[1:]))


def integrate_real(
    g: Callable[[float], float],
    intervals: IntervalUnion | Iterable,
    spec: QuadratureSpec = DEFAULT_QUAD,
    singular: Iterable[float] = (),
) -> float:
    """Integral of a real function over a union of (possibly unbounded) intervals.

    ``singular`` lists extra points (besides +-1) that receive graded meshes
    when they occur as piece endpoints.
    """
    sing = set(_SINGULAR) | set(singular)
    total = 0.0
    for a, b in intervals:
        for lo, hi in _split(a, b, singular):
            if math.isinf(hi):
                # s = 1/u, u in (0, 1/lo)
                def h(u, g=g):
                    return g(1.0 / u) / (u * u)

                total += _graded(h, 0.0, 1.0 / lo, spec, False, lo in sing)
            elif math.isinf(lo):
                def h(u, g=g):
                    return g(1.0 / u) / (u * u)

                total += _graded(h, 1.0 / hi, 0.0, spec, hi in sing, False)
            else:
                total += _graded(g, lo, hi, spec, lo in sing, hi in sing)
    return total


def integrate_complex(g, intervals, spec=DEFAULT_QUAD, singular=()) -> complex:
    re = integrate_real(lambda s: g(s).real, intervals, spec, singular)
    im = integrate_real(lambda s: g(s).imag, intervals, spec, singular)
    return complex(re, im)


def _log_t(rc) -> Callable[[float], float]:
    return lambda s: float(rc.log_transmission(s))


def _oscillatory_sigma_b(xi: float, stat=None):
    sector = classify_sector(xi)
    if not sector.oscillatory:
        raise SectorError(f"xi={xi} is not in an oscillatory sector ({sector.value})")
    stat = stat if stat is not None else stationary_points(xi)
    return sector, stat, sigma_b(xi, stat)


def log_delta(rc, xi: float, mu: complex, spec: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """(1/2 pi i) int_{Sigma_b} ln(1-|r(s)|^2)/(s - mu) ds.

    ``mu = 0`` is accepted even when 0 lies on Sigma_b: r(0) = 0 makes the
    integrand regular there.
    """
    mu = complex(mu)
    sb = sigma_b(xi)
    if sb.is_empty or rc.is_zero:
        return 0.0j
    L = _log_t(rc)
    if mu == 0:
        if sb.in_closure(0.0) and float(rc.abs2(1e-8)) > 1e-20:
            raise ContractError("delta(0) needs r(0) = 0 when 0 lies on Sigma_b")
        val = integrate_real(lambda s: L(s) / s, sb, spec)
        return val / (2j * math.pi)
    if mu.imag == 0 and sb.in_closure(mu.real):
        raise ContractError(f"mu={mu} lies on closure(Sigma_b(xi={xi}))")
    val = integrate_complex(lambda s: L(s) / (s - mu), sb, spec)
    return val / (2j * math.pi)


def delta_eval(rc, xi: float, mu: complex, spec: QuadratureSpec = DEFAULT_QUAD) -> complex:
    return complex(np.exp(log_delta(rc, xi, mu, spec)))


def _positive_sigma_b(xi: float, stat=None) -> IntervalUnion:
    _, stat, sb = _oscillatory_sigma_b(xi, stat)
    return sb.positive_part()


def log_delta_at_i(rc, xi: float, spec: QuadratureSpec = DEFAULT_QUAD, stat=None) -> float:
    """ln delta(i, xi) = (1/pi) int_{Sigma_b, s>0} ln(1-|r(s)|^2)/(s^2+1) ds."""
    pos = _positive_sigma_b(xi, stat)
    if rc.is_zero:
        return 0.0
    L = _log_t(rc)
    return integrate_real(lambda s: L(s) / (s * s + 1.0), pos, spec) / math.pi


def delta_at_i(rc, xi: float, spec: QuadratureSpec = DEFAULT_QUAD, stat=None) -> float:
    return math.exp(log_delta_at_i(rc, xi, spec, stat))


def y_shift(rc, xi: float, spec: QuadratureSpec = DEFAULT_QUAD, stat=None) -> float:
    """x - y at leading order: 2 ln delta(i, xi) (y0 in range II, y01 in range III)."""
    return 2.0 * log_delta_at_i(rc, xi, spec, stat)


def delta_first_order_at_i(rc, xi: float, spec: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """Coefficient I1 of (mu - i) in ln delta(mu) at mu = i (vanishes by symmetry)."""
    _oscillatory_sigma_b(xi)
    if rc.is_zero:
        return 0.0j
    L = _log_t(rc)
    val = integrate_complex(lambda s: L(s) / (s - 1j) ** 2, sigma_b(xi), spec)
    return val / (2j * math.pi)


def delta_first_order_reduced(rc, xi: float, spec: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """I1 through the folded integrand (1/pi i) int_{s>0} L (s^2-1)/(s^2+1)^2 ds."""
    pos = _positive_sigma_b(xi)
    if rc.is_zero:
        return 0.0j
    L = _log_t(rc)
    val = integrate_real(lambda s: L(s) * (s * s - 1.0) / (s * s + 1.0) ** 2, pos, spec)
    return val / (1j * math.pi)


def _removable_ratio(L, dL, L_ref: float, point: float):
    """s -> (L(s) - L_ref)/(s - point), with a Taylor branch near ``point``."""
    d1 = float(dL(point))
    hh = 1e-4 * max(1.0, abs(point))
    d2 = float((dL(point + hh) - dL(point - hh)) / (2 * hh))

    def g(s):
        ds = s - point
        if abs(ds) < _TAYLOR_RADIUS:
            return d1 + 0.5 * d2 * ds
        return (L(s) - L_ref) / ds

    return g


def chi_at(
    rc,
    xi: float,
    branch: int = 0,
    spec: QuadratureSpec = DEFAULT_QUAD,
    stat: StationaryData | None = None,
) -> complex:
    """Regularized phase chi at mu0 (branch 0) or at -mu1 (branch 1).

    Returns a purely imaginary number (real integrals divided by 2 pi i).
    """
    sector, stat, _ = _oscillatory_sigma_b(xi, stat)
    if branch == 1 and sector is not SectorClass.OSCILLATORY2:
        raise SectorError("branch 1 exists only for -1/4 < xi < 0")
    if branch not in (0, 1):
        raise ValueError(f"branch must be 0 or 1, got {branch}")
    if rc.is_zero:
        return 0.0j
    L = _log_t(rc)
    dL = rc.dlog_transmission
    m0 = stat.mu0
    point = m0 if branch == 0 else -stat.mu1
    L0 = L(m0)

    # (-mu0, -1/mu0) u (1/mu0, mu0), normalized by |r(mu0)|
    inner = IntervalUnion(((-m0, -1.0 / m0), (1.0 / m0, m0)))
    if branch == 0:
        g0 = _removable_ratio(L, dL, L0, m0)
    else:
        def g0(s):
            return (L(s) - L0) / (s - point)

    total = integrate_real(g0, inner, spec)

    if sector is SectorClass.OSCILLATORY2:
        m1 = stat.mu1
        L1 = L(m1)
        central = IntervalUnion(((-1.0 / m1, 1.0 / m1),))
        total += integrate_real(lambda s: (L(s) - L1) / (s - point), central, spec)
        # tails in integrated-by-parts form: -int ln|point - s| dL(s)
        left = IntervalUnion(((-math.inf, -m1),))
        right = IntervalUnion(((m1, math.inf),))

        def tail(s):
            d = float(dL(s))
            if d == 0.0:
                return 0.0
            return -math.log(abs(point - s)) * d

        total += integrate_real(tail, left, spec, singular=(-m1,))
        total += integrate_real(tail, right, spec, singular=(m1,))
    return total / (2j * math.pi)
