"""Reflection coefficients with the exact mCH symmetries.

Any admissible r must satisfy

    r(mu) = -conj(r(-mu)) = conj(r(1/mu)),   mu real, mu != 0.

Both model families below are specified on the base ray ``mu >= 1`` only and
extended to the rest of the real line by those two relations, so the
symmetries hold to the last bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, SingularDataError


def _extend(base: Callable[[np.ndarray], np.ndarray], mu) -> np.ndarray:
    """Evaluate ``base`` (defined on mu >= 1) anywhere on R minus 0 by symmetry."""
    mu = np.asarray(mu, dtype=float)
    if np.any(mu == 0):
        raise DomainError("r(mu) undefined at mu = 0")
    a = np.abs(mu)
    out = np.empty(mu.shape, dtype=complex)
    big = a >= 1.0
    out[big] = base(a[big])
    small = ~big
    out[small] = np.conj(base(1.0 / a[small]))
    neg = mu < 0
    out[neg] = -np.conj(out[neg])
    return out


class _ReflectionBase:
    def __call__(self, mu):
        out = _extend(self._base, mu)
        return out if out.ndim else out[()]

    def abs2(self, mu):
        r = np.asarray(self(mu))
        return (r.real**2 + r.imag**2)

    def log_transmission(self, mu):
        """ln(1 - |r(mu)|^2) evaluated without cancellation."""
        mu = np.asarray(mu, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.log1p(-self.abs2(mu))
        return out if out.ndim else out[()]

    def dlog_transmission(self, mu, step: float = 1e-6):
        """d/dmu ln(1 - |r|^2) by central differences (relative step)."""
        mu = np.asarray(mu, dtype=float)
        h = step * np.maximum(np.abs(mu), 1.0)
        out = (self.log_transmission(mu + h) - self.log_transmission(mu - h)) / (2 * h)
        return out if np.ndim(out) else out[()]

    def _base(self, mu: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class ReflectionCoefficient(_ReflectionBase):
    """Gaussian-modulated chirp on mu >= 1.

    r(mu) = -A exp(-a w^2) exp(i b w),  w = mu - 1/mu,  mu >= 1.

    ``A = 1`` gives the generic r(1) = -1 case; ``1 - |r|^2`` then vanishes
    quadratically in w at mu = +-1.
    """

    A: float = 0.8
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.A <= 1.0:
            raise ValueError(f"amplitude A must lie in [0, 1], got {self.A}")
        if self.a <= 0.0:
            raise ValueError(f"width a must be positive, got {self.a}")

    def _base(self, mu):
        w = mu - 1.0 / mu
        return -self.A * np.exp(-self.a * w * w) * np.exp(1j * self.b * w)

    def abs2(self, mu):
        mu = np.asarray(mu, dtype=float)
        if np.any(mu == 0):
            raise DomainError("r(mu) undefined at mu = 0")
        a = np.abs(mu)
        w = a - 1.0 / a
        return self.A**2 * np.exp(-2.0 * self.a * w * w)

    def log_transmission(self, mu):
        mu = np.asarray(mu, dtype=float)
        a = np.abs(mu)
        if np.any(a == 0):
            raise DomainError("r(mu) undefined at mu = 0")
        w = a - 1.0 / a
        x = -2.0 * self.a * w * w
        with np.errstate(divide="ignore"):
            if self.A == 1.0:
                # 1 - e^x loses every digit near w = 0 otherwise
                out = np.log(-np.expm1(x))
            else:
                out = np.log1p(-(self.A**2) * np.exp(x))
        return out if out.ndim else out[()]

    def dlog_transmission(self, mu, step=None):
        mu = np.asarray(mu, dtype=float)
        a = np.abs(mu)
        w = a - 1.0 / a
        dw = np.sign(mu) * (1.0 + 1.0 / (a * a))
        x = -2.0 * self.a * w * w
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.A == 1.0:
                ratio = np.exp(x) / -np.expm1(x)
            else:
                e = self.A**2 * np.exp(x)
                ratio = e / (1.0 - e)
            out = 4.0 * self.a * w * dw * ratio
        return out if out.ndim else out[()]

    @property
    def is_zero(self) -> bool:
        return self.A == 0.0

    @classmethod
    def with_abs2_at(cls, mu0: float, abs2: float, A: float = 0.8, b: float = 0.0):
        """Model whose |r(mu0)|^2 equals ``abs2`` (solves for the width a)."""
        w2 = (mu0 - 1.0 / mu0) ** 2
        if not 0.0 < abs2 < A * A or w2 == 0.0:
            raise ValueError("need 0 < abs2 < A^2 and mu0 != 1")
        a = math.log(A * A / abs2) / (2.0 * w2)
        return cls(A=A, a=a, b=b)


@dataclass(frozen=True, eq=False)
class TabulatedReflection(_ReflectionBase):
    """r given on a grid mu_1 = 1 < mu_2 < ... ; linear interpolation, zero beyond."""

    mu: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if mu.ndim != 1 or mu.shape != values.shape or mu.size < 2:
            raise ValueError("table needs matching 1-d mu and r arrays (>= 2 rows)")
        if mu[0] != 1.0 or np.any(np.diff(mu) <= 0):
            raise ValueError("table grid must start at mu = 1 and increase strictly")
        if abs(values[0].imag) > 1e-12:
            raise ValueError("r(1) must be real (r(1) = conj(r(1)))")
        if np.any(np.abs(values) > 1.0 + 1e-12):
            raise ValueError("|r| must not exceed 1")
        values = values.copy()
        values[0] = values[0].real
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "values", values)

    def _base(self, mu):
        re = np.interp(mu, self.mu, self.values.real, right=0.0)
        im = np.interp(mu, self.mu, self.values.imag, right=0.0)
        return re + 1j * im

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    @classmethod
    def from_file(cls, path) -> "TabulatedReflection":
        """Read rows ``mu, Re r, Im r`` (comma or whitespace separated)."""
        with open(path) as fh:
            text = fh.read()
        rows = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                continue  # header line
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[1] != 3:
            raise ValueError(f"{path}: expected three numeric columns (mu, Re r, Im r)")
        return cls(mu=data[:, 0], values=data[:, 1] + 1j * data[:, 2])


ZERO_REFLECTION = ReflectionCoefficient(A=0.0)


def r_eval(rc, mu):
    return rc(mu)


def h_at(rc, mu_j: float) -> float:
    """h = -ln(1 - |r(mu_j)|^2) / (2 pi)."""
    abs2 = float(rc.abs2(mu_j))
    if abs2 >= 1.0:
        raise SingularDataError(f"|r({mu_j})| = {math.sqrt(abs2)} >= 1")
    return -math.log1p(-abs2) / (2.0 * math.pi)


@dataclass(frozen=True)
class SymmetryReport:
    negation_defect: float
    inversion_defect: float
    tolerance: float

    @property
    def max_defect(self) -> float:
        return max(self.negation_defect, self.inversion_defect)

    @property
    def passed(self) -> bool:
        return self.max_defect < self.tolerance


def validate_symmetries(
    r: Callable, n: int = 10_000, tol: float = 1e-14, span: float = 6.0
) -> SymmetryReport:
    """Max defect of r(mu) = -conj(r(-mu)) and r(mu) = conj(r(1/mu)).

    Grid: ``n`` log-spaced points in [10^-span/2, 10^span/2].
    """
    mu = np.logspace(-span / 2, span / 2, n)
    rp = np.asarray(r(mu), dtype=complex)
    neg = np.max(np.abs(rp + np.conj(np.asarray(r(-mu), dtype=complex))))
    inv = np.max(np.abs(rp - np.conj(np.asarray(r(1.0 / mu), dtype=complex))))
    return SymmetryReport(float(neg), float(inv), tol)
