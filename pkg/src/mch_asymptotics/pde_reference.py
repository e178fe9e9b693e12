"""Fourier pseudospectral solver for the zero-background mCH equation.

    m_t + (w m)_x = 0,   m = u - u_xx + 1,   w = u^2 - u_x^2 + 2u

on the periodic box [-L, L).  The prognostic variable is the spectrum of
m - 1; the zero mode never changes because the flux term carries a factor iq,
so the mean of m - 1 is conserved to the last bit.  Time stepping is classical
RK4, products are dealiased by the 2/3 rule.

Observables for comparison with the asymptotic theory: the local wavenumber
of the oscillating tail along a ray x = zeta t, and the power law of its
envelope in t.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft as sfft

from .errors import InsufficientDataError, IntegrationError

MIN_OSCILLATIONS = 6


@dataclass(frozen=True)
class SimConfig:
    L: float = 1024.0
    N: int = 2**14
    dt: float = 5e-3
    t_end: float = 400.0
    dealias: float = 2.0 / 3.0
    eps: float = 0.05
    width: float = 5.0
    x0: float = 0.0

    def __post_init__(self):
        if self.N < 8 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")
        if self.L <= 0 or self.dt <= 0 or self.t_end < 0 or self.width <= 0:
            raise ValueError("L, dt, width must be positive and t_end non-negative")
        if not 0 < self.dealias <= 1:
            raise ValueError("dealias fraction must lie in (0, 1]")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    def grid(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)

    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * sfft.rfftfreq(self.N, d=self.dx)

    def initial_u(self) -> np.ndarray:
        x = self.grid()
        return self.eps * np.exp(-((x - self.x0) / self.width) ** 2)


@dataclass(frozen=True)
class FieldState:
    t: float
    x: np.ndarray = field(repr=False)
    u_tilde: np.ndarray = field(repr=False)
    m_tilde: np.ndarray = field(repr=False)


def helmholtz_solve(m_tilde: np.ndarray, L: float) -> np.ndarray:
    """u = (1 - d_xx)^{-1}(m - 1) on the periodic box of half-length L."""
    m_tilde = np.asarray(m_tilde, dtype=float)
    n = m_tilde.size
    q = 2.0 * np.pi * sfft.rfftfreq(n, d=2.0 * L / n)
    return sfft.irfft(sfft.rfft(m_tilde - 1.0) / (1.0 + q * q), n=n)


def apply_helmholtz(u: np.ndarray, L: float) -> np.ndarray:
    """(1 - d_xx) u + 1, the inverse of :func:`helmholtz_solve`."""
    u = np.asarray(u, dtype=float)
    n = u.size
    q = 2.0 * np.pi * sfft.rfftfreq(n, d=2.0 * L / n)
    return sfft.irfft(sfft.rfft(u) * (1.0 + q * q), n=n) + 1.0


class Simulation:
    """One solver instance; owns its state and FFT workspace."""

    def __init__(self, config: SimConfig = SimConfig(), u0: Optional[np.ndarray] = None):
        self.config = config
        self.x = config.grid()
        self.q = config.wavenumbers()
        self.mask = (self.q <= config.dealias * self.q[-1]).astype(float)
        self.symbol = 1.0 + self.q * self.q
        self.iq = 1j * self.q
        u0 = config.initial_u() if u0 is None else np.asarray(u0, dtype=float)
        if u0.shape != self.x.shape:
            raise ValueError("initial profile does not match the grid")
        self.w_hat = sfft.rfft(u0) * self.symbol * self.mask
        self.t = 0.0
        self.steps = 0
        self.mean0 = float(self.w_hat[0].real)

    def _rhs(self, w_hat: np.ndarray) -> np.ndarray:
        n = self.config.N
        u_hat = w_hat / self.symbol
        u = sfft.irfft(u_hat, n=n)
        ux = sfft.irfft(self.iq * u_hat, n=n)
        omega_hat = sfft.rfft(u * u - ux * ux + 2.0 * u) * self.mask
        omega = sfft.irfft(omega_hat, n=n)
        m = sfft.irfft(w_hat, n=n) + 1.0
        return -self.iq * sfft.rfft(omega * m) * self.mask

    def step(self, dt: Optional[float] = None) -> None:
        dt = self.config.dt if dt is None else dt
        w = self.w_hat
        # overflow is caught below as a non-finite state
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = self._rhs(w)
            k2 = self._rhs(w + 0.5 * dt * k1)
            k3 = self._rhs(w + 0.5 * dt * k2)
            k4 = self._rhs(w + dt * k3)
            new = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(new)):
            raise IntegrationError(
                f"non-finite spectrum at t={self.t + dt:.6g} (step {self.steps + 1}); "
                f"max|u| before the step was {np.max(np.abs(self.u())):.3e}"
            )
        self.w_hat = new
        self.steps += 1
        self.t = self.steps * self.config.dt if dt == self.config.dt else self.t + dt

    def u(self) -> np.ndarray:
        return sfft.irfft(self.w_hat / self.symbol, n=self.config.N)

    def state(self) -> FieldState:
        m = sfft.irfft(self.w_hat, n=self.config.N) + 1.0
        return FieldState(self.t, self.x, self.u(), m)

    def mean_drift(self) -> float:
        """Relative change of the mean of m - 1 since the start."""
        return abs(float(self.w_hat[0].real) - self.mean0) / max(abs(self.mean0), 1e-300)

    def run(self, snapshot_times: Iterable[float] = ()) -> Dict[float, FieldState]:
        """Advance to t_end, returning states at the requested times (rounded to steps)."""
        dt = self.config.dt
        total = int(round(self.config.t_end / dt))
        wanted = {}
        for ts in snapshot_times:
            k = int(round(ts / dt))
            if k < 0 or k > total:
                raise ValueError(f"snapshot time {ts} outside [0, t_end]")
            wanted[k] = float(ts)
        out = {}
        if 0 in wanted and self.steps == 0:
            out[wanted[0]] = self.state()
        while self.steps < total:
            self.step()
            if self.steps in wanted:
                out[wanted[self.steps]] = self.state()
        return out


def step(state: FieldState, dt: float, config: SimConfig) -> FieldState:
    """Functional single RK4 step (builds a throwaway solver around ``state``)."""
    sim = Simulation(config, state.u_tilde)
    sim.t = state.t
    sim.step(dt)
    return sim.state()


# ---------------------------------------------------------------------------
# observables


def linear_frequency(q):
    """Dispersion relation of the linearized equation: 2q/(1 + q^2)."""
    q = np.asarray(q, dtype=float)
    return 2.0 * q / (1.0 + q * q)


def group_velocity(q):
    q = np.asarray(q, dtype=float)
    return 2.0 * (1.0 - q * q) / (1.0 + q * q) ** 2


def _window(state: FieldState, centre: float, half_width: float) -> Tuple[np.ndarray, np.ndarray]:
    """Samples of u in [centre - hw, centre + hw], with periodic wrap."""
    x = state.x
    period = x[-1] - x[0] + (x[1] - x[0])
    rel = (x - centre + 0.5 * period) % period - 0.5 * period
    sel = np.abs(rel) <= half_width
    order = np.argsort(rel[sel])
    return rel[sel][order], state.u_tilde[sel][order]


def _spectrum(values: np.ndarray, dx: float, pad: int = 2**16):
    taper = np.hanning(values.size)
    n = max(pad, 4 * values.size)
    spec = np.abs(sfft.rfft((values - values.mean()) * taper, n=n))
    k = 2.0 * np.pi * sfft.rfftfreq(n, d=dx)
    return k, spec


def _refine(k: np.ndarray, spec: np.ndarray, i: int) -> float:
    if 0 < i < spec.size - 1:
        a, b, c = spec[i - 1], spec[i], spec[i + 1]
        den = a - 2.0 * b + c
        if den != 0:
            return float(k[i] + 0.5 * (a - c) / den * (k[1] - k[0]))
    return float(k[i])


def _peaks(state: FieldState, centre: float, half: float, count: int, min_separation: float) -> list:
    dx = float(state.x[1] - state.x[0])
    xs, vals = _window(state, centre, half)
    if xs.size < 16:
        raise InsufficientDataError("window holds too few grid points")
    k, spec = _spectrum(vals, dx)
    found: List[float] = []
    for i in np.argsort(spec)[::-1]:
        if len(found) == count:
            break
        if i == 0 or i == spec.size - 1 or spec[i] < spec[i - 1] or spec[i] < spec[i + 1]:
            continue
        kk = _refine(k, spec, i)
        if all(abs(kk - f) > min_separation for f in found):
            found.append(kk)
    if len(found) < count:
        raise InsufficientDataError(f"found {len(found)} spectral peaks, wanted {count}")
    return found


def _oscillations(k: float, half: float) -> float:
    return k * 2.0 * half / (2.0 * math.pi)


def local_wavenumber(
    state: FieldState,
    zeta_tilde: float,
    window: Optional[float] = None,
    peaks: int = 1,
    min_separation: float = 0.5,
):
    """Dominant wavenumber(s) of u near x = zeta_tilde * t from Hann-windowed spectra.

    ``window`` is the half-width as a fraction of t (default 0.15 for one
    peak).  With ``peaks = 2`` the default detection window is 0.02 t, narrow
    enough to keep a strongly chirped short wave compact in q; each detected
    peak is then re-measured in the smallest window (not below the detection
    one) that holds MIN_OSCILLATIONS of its own periods.  Returns a float or
    an increasing tuple.
    """
    if state.t <= 0:
        raise InsufficientDataError("need t > 0")
    if peaks not in (1, 2):
        raise ValueError("peaks must be 1 or 2")
    centre = zeta_tilde * state.t
    if peaks == 1:
        half = (0.15 if window is None else window) * state.t
        (kk,) = _peaks(state, centre, half, 1, min_separation)
        if _oscillations(kk, half) < MIN_OSCILLATIONS:
            raise InsufficientDataError(
                f"only {_oscillations(kk, half):.2f} oscillations of k={kk:.4f} fit the window"
            )
        return kk
    detect = (0.02 if window is None else window) * state.t
    refined = []
    for kk in _peaks(state, centre, detect, 2, min_separation):
        half = max(detect, MIN_OSCILLATIONS * math.pi / kk)
        if half > 0.5 * abs(state.x[-1] - state.x[0]):
            raise InsufficientDataError(f"k={kk:.4f} needs a window wider than the box")
        dx = float(state.x[1] - state.x[0])
        k, spec = _spectrum(_window(state, centre, half)[1], dx)
        near = np.abs(k - kk) < 0.5 * min_separation
        i = int(np.flatnonzero(near)[np.argmax(spec[near])])
        refined.append(_refine(k, spec, i))
    return tuple(sorted(refined))


def analytic_band(state: FieldState, k_centre: float) -> np.ndarray:
    """Analytic signal of u restricted to wavenumbers around ``k_centre``.

    Weights rise smoothly on [k/2, 3k/4], stay 1 up to 3k/2 and fall to 0 at
    2k; non-oscillatory content (mean, solitary humps) is removed so it cannot
    leak into the envelope through the slowly decaying Hilbert kernel.
    """
    n = state.u_tilde.size
    dx = float(state.x[1] - state.x[0])
    q = 2.0 * np.pi * sfft.rfftfreq(n, d=dx)
    r = q / k_centre
    w = np.zeros_like(q)
    rise = (r >= 0.5) & (r < 0.75)
    w[rise] = 0.5 - 0.5 * np.cos(np.pi * (r[rise] - 0.5) / 0.25)
    w[(r >= 0.75) & (r <= 1.5)] = 1.0
    fall = (r > 1.5) & (r <= 2.0)
    w[fall] = 0.5 + 0.5 * np.cos(np.pi * (r[fall] - 1.5) / 0.5)
    spec = np.zeros(n, dtype=complex)
    spec[: q.size] = 2.0 * sfft.rfft(state.u_tilde) * w
    return sfft.ifft(spec)


def envelope_at(
    state: FieldState, zeta_tilde: float, half_width: float = 0.02, k_centre: Optional[float] = None
) -> float:
    """Mean band-limited Hilbert envelope of u over x in (zeta +- half_width) t.

    The band is centred on the measured local wavenumber unless ``k_centre``
    is given.
    """
    if k_centre is None:
        k_centre = local_wavenumber(state, zeta_tilde)
    env = np.abs(analytic_band(state, k_centre))
    local = FieldState(state.t, state.x, env, state.m_tilde)
    _, vals = _window(local, zeta_tilde * state.t, half_width * state.t)
    if vals.size == 0:
        raise InsufficientDataError("empty envelope window")
    return float(np.mean(vals))


def max_abs_in(state: FieldState, zeta_lo: float, zeta_hi: float) -> float:
    """max |u| over x in [zeta_lo t, zeta_hi t] (periodic wrap)."""
    centre = 0.5 * (zeta_lo + zeta_hi) * state.t
    _, vals = _window(state, centre, 0.5 * (zeta_hi - zeta_lo) * state.t)
    if vals.size == 0:
        raise InsufficientDataError("empty window")
    return float(np.max(np.abs(vals)))


def fit_power_law(times: Sequence[float], values: Sequence[float], noise_floor: float = 0.0) -> float:
    """Least-squares slope of ln(values) against ln(times)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 3 or times.max() < 4.0 * times.min():
        raise InsufficientDataError("need >= 3 times spanning a factor >= 4")
    if np.any(values <= noise_floor):
        raise InsufficientDataError(
            f"envelope {values.min():.3e} at or below the noise floor {noise_floor:.3e}"
        )
    slope, _ = np.polyfit(np.log(times), np.log(values), 1)
    return float(slope)


def envelope_exponent(
    states: Sequence[FieldState],
    zeta_tilde,
    half_width: float = 0.02,
    noise_floor: float = 1e-12,
) -> float:
    """Power of t in the envelope along a ray.

    A scalar ``zeta_tilde`` uses the band-limited envelope near that ray,
    with the band centred on the wavenumber measured at the latest time (the
    local wavenumber depends on the ray only); a pair ``(lo, hi)`` uses
    max |u| over the ray sector, for quiet regions.
    """
    times = [s.t for s in states]
    if np.ndim(zeta_tilde) == 0:
        latest = max(states, key=lambda s: s.t)
        k = local_wavenumber(latest, float(zeta_tilde))
        values = [envelope_at(s, float(zeta_tilde), half_width, k) for s in states]
    else:
        lo, hi = zeta_tilde
        values = [max_abs_in(s, lo, hi) for s in states]
    return fit_power_law(times, values, noise_floor)


# ---------------------------------------------------------------------------
# output


def write_snapshot_csv(state: FieldState, path) -> None:
    data = np.column_stack([state.x, state.u_tilde, state.m_tilde])
    np.savetxt(path, data, delimiter=",", header="x,u_tilde,m_tilde", comments="", fmt="%.17g")


def write_snapshot_npz(state: FieldState, path) -> None:
    np.savez(path, t=state.t, x=state.x, u_tilde=state.u_tilde, m_tilde=state.m_tilde)


def read_snapshot_npz(path) -> FieldState:
    with np.load(path) as d:
        return FieldState(float(d["t"]), d["x"], d["u_tilde"], d["m_tilde"])


def write_metadata(path, config: SimConfig, sim: Simulation, snapshots: Dict[float, str]) -> None:
    meta = {
        "config": asdict(config),
        "t_final": sim.t,
        "steps": sim.steps,
        "mean_m_minus_1": sim.mean0 / config.N,
        "mean_relative_drift": sim.mean_drift(),
        "snapshots": {f"{t:.6g}": name for t, name in sorted(snapshots.items())},
    }
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
