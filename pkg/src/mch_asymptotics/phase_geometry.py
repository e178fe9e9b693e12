"""Spectral-plane geometry of the mCH phase function.

The phase is ``theta(mu, xi) = theta_hat(k(mu), xi)`` with

    k(mu)            = (mu - 1/mu) / 4
    theta_hat(k, xi) = k*xi - 2k / (1 + 4k^2)

Its real stationary points in ``k`` satisfy ``xi = (2 - 8k^2)/(1 + 4k^2)^2``.
Depending on the ray slope ``xi = y/t`` there are zero, two (+-kappa0) or
four (+-kappa0, +-kappa1) of them, which splits the real xi-axis into four
sectors with qualitatively different large-time behaviour.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, SectorError

XI_RIGHT = 2.0
XI_MIDDLE = 0.0
XI_LEFT = -0.25
SECTOR_BOUNDARIES = (XI_LEFT, XI_MIDDLE, XI_RIGHT)

# kappa where f(kappa) = kappa(3 - 4kappa^2)/(1 + 4kappa^2)^3 changes sign
KAPPA_CRITICAL = math.sqrt(3.0) / 2.0


class SectorClass(str, enum.Enum):
    FAST_DECAY_RIGHT = "FastDecayRight"
    OSCILLATORY1 = "Oscillatory1"
    OSCILLATORY2 = "Oscillatory2"
    FAST_DECAY_LEFT = "FastDecayLeft"
    BOUNDARY = "Boundary"

    @property
    def oscillatory(self) -> bool:
        return self in (SectorClass.OSCILLATORY1, SectorClass.OSCILLATORY2)

    @property
    def fast_decay(self) -> bool:
        return self in (SectorClass.FAST_DECAY_LEFT, SectorClass.FAST_DECAY_RIGHT)


@dataclass(frozen=True)
class RayParameter:
    """Ray slope in the shifted frame (``xi``) and in x/t (``zeta``)."""

    xi: float
    zeta: float

    @classmethod
    def from_zeta(cls, zeta: float, frame: str = "u_tilde") -> "RayParameter":
        if frame == "u":
            return cls(xi=zeta - 1.0, zeta=zeta)
        if frame == "u_tilde":
            return cls(xi=zeta, zeta=zeta)
        raise ValueError(f"unknown frame {frame!r}")


@dataclass(frozen=True)
class StationaryData:
    """Stationary-point data for one ray slope.

    ``kappa1``/``mu1``/``f1``/``theta_hat1`` are only present for
    ``-1/4 <= xi < 0``.
    """

    xi: float
    kappa0: float
    mu0: float
    f0: float
    theta_hat0: float
    kappa1: Optional[float] = None
    mu1: Optional[float] = None
    f1: Optional[float] = None
    theta_hat1: Optional[float] = None

    @property
    def has_branch1(self) -> bool:
        return self.kappa1 is not None

    def kappa(self, branch: int) -> float:
        return self._pick(branch, self.kappa0, self.kappa1)

    def mu(self, branch: int) -> float:
        return self._pick(branch, self.mu0, self.mu1)

    def f(self, branch: int) -> float:
        return self._pick(branch, self.f0, self.f1)

    def theta_hat(self, branch: int) -> float:
        return self._pick(branch, self.theta_hat0, self.theta_hat1)

    def _pick(self, branch, v0, v1):
        if branch == 0:
            return v0
        if branch == 1 and v1 is not None:
            return v1
        raise SectorError(f"branch {branch} undefined at xi={self.xi}")


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted union of disjoint open intervals; endpoints may be +-inf."""

    intervals: tuple = ()

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in ivs:
            if not a < b:
                raise ValueError(f"empty or reversed interval ({a}, {b})")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if not b0 <= a1:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", ivs)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, s: float) -> bool:
        return any(a < s < b for a, b in self.intervals)

    def in_closure(self, s: float) -> bool:
        return any(a <= s <= b for a, b in self.intervals)

    def endpoints(self) -> list:
        return sorted({e for iv in self.intervals for e in iv if math.isfinite(e)})

    def positive_part(self) -> "IntervalUnion":
        out = [(max(a, 0.0), b) for a, b in self.intervals if b > 0.0]
        return IntervalUnion(tuple(iv for iv in out if iv[0] < iv[1]))

    def complement(self) -> "IntervalUnion":
        """Open complement in R of the closure (Sigma_a from Sigma_b)."""
        edges = [-math.inf]
        for a, b in self.intervals:
            edges.extend([a, b])
        edges.append(math.inf)
        out = []
        for a, b in zip(edges[::2], edges[1::2]):
            if a < b:
                out.append((a, b))
        return IntervalUnion(tuple(out))


def k_of_mu(mu):
    """Map mu -> k = (mu - 1/mu)/4; real input gives real output."""
    mu_arr = np.asarray(mu)
    if np.any(mu_arr == 0):
        raise DomainError("k(mu) undefined at mu = 0")
    out = (mu_arr - 1.0 / mu_arr) / 4.0
    return out if out.ndim else out[()]


def theta_hat(k, xi: float):
    """theta_hat(k, xi) = k*xi - 2k/(1 + 4k^2)."""
    k_arr = np.asarray(k)
    den = 1.0 + 4.0 * k_arr * k_arr
    if np.any(den == 0):
        raise DomainError("theta_hat has poles at k = +-i/2 (mu = +-i)")
    out = k_arr * xi - 2.0 * k_arr / den
    return out if out.ndim else out[()]


def dtheta_hat_dk(k, xi: float):
    k = np.asarray(k, dtype=float)
    return xi - 2.0 * (1.0 - 4.0 * k * k) / (1.0 + 4.0 * k * k) ** 2


def theta(mu, xi: float):
    """Phase theta(mu, xi) = theta_hat(k(mu), xi)."""
    return theta_hat(k_of_mu(mu), xi)


def xi_of_kappa(kappa):
    """Ray slope at which kappa is a stationary point of theta_hat."""
    k2 = np.asarray(kappa, dtype=float) ** 2
    return (2.0 - 8.0 * k2) / (1.0 + 4.0 * k2) ** 2


def f_of_kappa(kappa):
    """Curvature factor: theta_hat ~ theta_hat(kappa) + 8 f (k - kappa)^2."""
    kappa = np.asarray(kappa, dtype=float)
    return kappa * (3.0 - 4.0 * kappa**2) / (1.0 + 4.0 * kappa**2) ** 3


def theta_hat_at_stationary(kappa):
    kappa = np.asarray(kappa, dtype=float)
    return -16.0 * kappa**3 / (1.0 + 4.0 * kappa**2) ** 2


def mu_of_kappa(kappa: float) -> float:
    """Root > 1 (for kappa > 0) of mu^2 - 4 kappa mu - 1 = 0."""
    return 2.0 * kappa + math.sqrt(4.0 * kappa * kappa + 1.0)


def kappa0_of_xi(xi: float) -> float:
    """Stationary point kappa0 for -1/4 <= xi <= 2.

    Uses kappa0^2 = (2 - xi) / (4 (sqrt(1+4xi) + 1 + xi)), which equals the
    textbook form (sqrt(1+4xi) - 1 - xi)/(4xi) but has no 0/0 at xi = 0
    (where it gives the continuous value 1/2).
    """
    if not XI_LEFT <= xi <= XI_RIGHT:
        raise SectorError(f"kappa0 undefined for xi={xi}")
    s = math.sqrt(max(1.0 + 4.0 * xi, 0.0))
    return math.sqrt((2.0 - xi) / (4.0 * (s + 1.0 + xi)))


def kappa1_of_xi(xi: float) -> float:
    """Stationary point kappa1 for -1/4 <= xi < 0."""
    if not XI_LEFT <= xi < XI_MIDDLE:
        raise SectorError(f"kappa1 undefined for xi={xi}")
    s = math.sqrt(max(1.0 + 4.0 * xi, 0.0))
    return math.sqrt(-(s + 1.0 + xi) / (4.0 * xi))


def stationary_points(xi: float) -> StationaryData:
    kappa0 = kappa0_of_xi(xi)
    data = dict(
        xi=float(xi),
        kappa0=kappa0,
        mu0=mu_of_kappa(kappa0),
        f0=float(f_of_kappa(kappa0)),
        theta_hat0=float(theta_hat_at_stationary(kappa0)),
    )
    if xi < XI_MIDDLE:
        kappa1 = kappa1_of_xi(xi)
        data.update(
            kappa1=kappa1,
            mu1=mu_of_kappa(kappa1),
            f1=float(f_of_kappa(kappa1)),
            theta_hat1=float(theta_hat_at_stationary(kappa1)),
        )
    return StationaryData(**data)


def classify_sector(xi: float, margin: float = 0.0) -> SectorClass:
    """Sector of the ray slope; points within ``margin`` of 2, 0, -1/4 are Boundary."""
    if any(abs(xi - b) <= margin for b in SECTOR_BOUNDARIES):
        return SectorClass.BOUNDARY
    if xi > XI_RIGHT:
        return SectorClass.FAST_DECAY_RIGHT
    if xi > XI_MIDDLE:
        return SectorClass.OSCILLATORY1
    if xi > XI_LEFT:
        return SectorClass.OSCILLATORY2
    return SectorClass.FAST_DECAY_LEFT


def sigma_b(xi: float, stat: Optional[StationaryData] = None) -> IntervalUnion:
    """Part of R where the lower/upper factorization with the diagonal factor is used."""
    sector = classify_sector(xi)
    if sector is SectorClass.BOUNDARY:
        raise SectorError(f"Sigma_b not defined at the sector boundary xi={xi}")
    if sector is SectorClass.FAST_DECAY_RIGHT:
        return IntervalUnion(())
    if sector is SectorClass.FAST_DECAY_LEFT:
        return IntervalUnion(((-math.inf, math.inf),))
    if stat is None:
        stat = stationary_points(xi)
    m0 = stat.mu0
    if sector is SectorClass.OSCILLATORY1:
        return IntervalUnion(((-m0, -1.0 / m0), (1.0 / m0, m0)))
    m1 = stat.mu1
    return IntervalUnion(
        (
            (-math.inf, -m1),
            (-m0, -1.0 / m0),
            (-1.0 / m1, 1.0 / m1),
            (1.0 / m0, m0),
            (m1, math.inf),
        )
    )


def sigma_a(xi: float, stat: Optional[StationaryData] = None) -> IntervalUnion:
    return sigma_b(xi, stat).complement()
