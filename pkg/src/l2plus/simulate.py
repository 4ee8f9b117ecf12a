"""Time-domain simulation, signal norms, and empirical gain estimates.

Simulation uses exact zero-order-hold discretization (matrix exponential of
the stacked [[A, B], [0, 0]] block), zero initial state.  Signal norms are
trapezoidal; gain ratios are measured over integer numbers of steady-state
periods after a settle window sized from the spectral abscissa.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, StepTooCoarse, UnstableSystem
from .lti import StateSpace, is_hurwitz, spectral_abscissa

__all__ = [
    "SampledSignal",
    "rectified_cosine_input",
    "simulate",
    "lp_norm",
    "empirical_gain",
    "default_settle_periods",
    "delay_demo",
    "DelayDemoResult",
    "write_trajectory_csv",
]


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled vector signal; values has shape (samples, channels)."""

    values: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not np.all(np.isfinite(values)):
            raise ValueError("signal contains non-finite samples")
        object.__setattr__(self, "values", values)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_samples)

    def window(self, t_start: float, t_end: float) -> "SampledSignal":
        i0 = int(round((t_start - self.t0) / self.dt))
        i1 = int(round((t_end - self.t0) / self.dt))
        i0 = max(i0, 0)
        i1 = min(i1, self.n_samples)
        return SampledSignal(self.values[i0:i1], self.dt, self.t0 + i0 * self.dt)


def rectified_cosine_input(
    v: np.ndarray, omega: float, t_end: float, dt: float
) -> SampledSignal:
    """Channel-wise rectified cosine |v_i| max(2 cos(w t + theta_i), 0).

    theta_i is the phase of v_i; a real unit scalar v reduces to the plain
    max(2 cos(w t), 0).  Requires at least 1000 samples per period.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if dt > 2.0 * math.pi / (1000.0 * omega):
        raise StepTooCoarse(f"dt={dt} too coarse for omega={omega} (need >= 1000 samples/period)")
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    theta = np.angle(v)
    mags = np.abs(v)
    t = np.arange(0.0, t_end + 0.5 * dt, dt)
    phases = omega * t[:, None] + theta[None, :]
    vals = mags[None, :] * np.maximum(2.0 * np.cos(phases), 0.0)
    return SampledSignal(vals, dt)


def simulate(sys: StateSpace, w: SampledSignal) -> SampledSignal:
    """Output samples of ``sys`` driven by ``w`` from zero initial state."""
    if w.n_channels != sys.n_w:
        raise DimensionMismatch(f"input has {w.n_channels} channels, system expects {sys.n_w}")
    n = sys.n
    if n == 0:
        return SampledSignal(w.values @ sys.D.T, w.dt, w.t0)
    blk = np.zeros((n + sys.n_w, n + sys.n_w))
    blk[:n, :n] = sys.A
    blk[:n, n:] = sys.B
    E = scipy.linalg.expm(blk * w.dt)
    Ad, Bd = E[:n, :n], E[:n, n:]
    x = np.zeros(n)
    out = np.empty((w.n_samples, sys.n_z))
    for k in range(w.n_samples):
        wk = w.values[k]
        out[k] = sys.C @ x + sys.D @ wk
        x = Ad @ x + Bd @ wk
    return SampledSignal(out, w.dt, w.t0)


def lp_norm(sig: SampledSignal, p) -> float:
    """Trapezoidal L_p norm of the sampled signal (sup norm for p = inf)."""
    if p == math.inf or p == "inf":
        return float(np.abs(sig.values).max())
    p = float(p)
    if p not in (1.0, 2.0):
        raise ValueError("p must be 1, 2 or inf")
    density = np.sum(np.abs(sig.values) ** p, axis=1)
    return float(np.trapezoid(density, dx=sig.dt) ** (1.0 / p))


def mean_square(sig: SampledSignal) -> float:
    """Time-average of |w(t)|_2^2 over the sampled window."""
    density = np.sum(sig.values**2, axis=1)
    span = (sig.n_samples - 1) * sig.dt
    return float(np.trapezoid(density, dx=sig.dt) / span)


def default_settle_periods(sys: StateSpace, omega: float, decay: float = 1e-6) -> int:
    """Periods of 2*pi/omega needed for transients to decay below ``decay``."""
    alpha = spectral_abscissa(sys.A)
    if alpha >= 0:
        raise UnstableSystem("settle window undefined for unstable systems")
    if math.isinf(alpha):
        return 1
    period = 2.0 * math.pi / omega
    return max(1, int(math.ceil(math.log(1.0 / decay) / (-alpha * period))))


def empirical_gain(
    sys: StateSpace,
    omega: float,
    v: np.ndarray,
    settle_periods: int | None = None,
    measure_periods: int = 4,
    dt: float | None = None,
) -> float:
    """Measured RMS output/input ratio under the rectified-cosine input.

    Simulates the channel-phased rectified cosine at frequency ``omega``,
    discards ``settle_periods`` periods of transient (default: enough for
    exp(alpha t) < 1e-6), and returns the ratio of output to input RMS over
    ``measure_periods`` whole periods.  The result is an empirical lower
    estimate of the nonnegative-input L2 gain.
    """
    if not is_hurwitz(sys.A):
        raise UnstableSystem("empirical gain requires a stable system")
    period = 2.0 * math.pi / omega
    if settle_periods is None:
        settle_periods = default_settle_periods(sys, omega)
    alpha = spectral_abscissa(sys.A)
    if alpha > -math.inf and math.exp(alpha * settle_periods * period) > 1e-6 * 1.0000001:
        raise ValueError("settle_periods too short for the slowest mode")
    if dt is None:
        dt = period / 2000.0
    steps_per_period = int(round(period / dt))
    dt = period / steps_per_period
    total = (settle_periods + measure_periods) * period
    w = rectified_cosine_input(v, omega, total, dt)
    z = simulate(sys, w)
    k0 = settle_periods * steps_per_period
    k1 = k0 + measure_periods * steps_per_period + 1  # inclusive end: whole periods
    wm = SampledSignal(w.values[k0:k1], dt, k0 * dt)
    zm = SampledSignal(z.values[k0:k1], dt, k0 * dt)
    return math.sqrt(mean_square(zm) / mean_square(wm))


@dataclass(frozen=True)
class DelayDemoResult:
    ratio: float
    achieved_norm: float
    achieved_plus_norm: float


def _delay_apply(w: np.ndarray, shift: int) -> np.ndarray:
    """z(t) = w(t) - w(t - L) with w = 0 for t < 0, exact on the grid."""
    z = w.copy()
    z[shift:] -= w[:-shift]
    return z


def delay_demo(delay: float, p, dt: float | None = None, horizon: float | None = None) -> DelayDemoResult:
    """Worst-case gain ratios of the pure difference-with-delay operator.

    Applies z(t) = w(t) - w(t - L) to sampled test signals and reports the
    measured p-gain for a signed worst-case input, for a nonnegative
    worst-case input, and their ratio.  The ratio approaches 1 at p = 1,
    1/sqrt(2) at p = 2, and 1/2 at p = inf.
    """
    if delay <= 0:
        raise ValueError("delay must be positive")
    if dt is None:
        dt = delay / 2000.0
    if dt > delay / 1000.0:
        raise StepTooCoarse(f"dt={dt} too coarse for delay={delay} (need dt <= delay/1000)")
    shift = max(1, int(round(delay / dt)))
    dt = delay / shift
    if horizon is None:
        horizon = 10.0 * delay
    if horizon < 4.0 * delay:
        raise ValueError("horizon must cover at least 4 delay lengths")
    n = int(round(horizon / dt))
    t = dt * np.arange(n)
    is_inf = p == math.inf or p == "inf"

    if is_inf or float(p) == 2.0:
        period = 2.0 * delay
        square = np.where((t % period) < delay, 1.0, -1.0)
        z_sq = _delay_apply(square, shift)
        if is_inf:
            pulse = (t < delay).astype(float)
            z_pulse = _delay_apply(pulse, shift)
            signed = float(np.abs(z_sq).max() / np.abs(square).max())
            plus = float(np.abs(z_pulse).max() / np.abs(pulse).max())
        else:
            rect = np.maximum(2.0 * np.cos(math.pi * t / delay), 0.0)
            z_rect = _delay_apply(rect, shift)
            lo = int(round(2.0 * delay / dt))
            hi = lo + int(round(((n - lo) // (2 * shift)) * 2.0 * delay / dt))
            signed = math.sqrt(np.mean(z_sq[lo:hi] ** 2) / np.mean(square[lo:hi] ** 2))
            plus = math.sqrt(np.mean(z_rect[lo:hi] ** 2) / np.mean(rect[lo:hi] ** 2))
    elif float(p) == 1.0:
        width = max(shift // 100, 1)
        pulse = np.zeros(n)
        pulse[:width] = 1.0
        pair = pulse.copy()
        pair[shift : shift + width] -= 1.0
        z_pair = _delay_apply(pair, shift)
        z_pulse = _delay_apply(pulse, shift)
        signed = float(np.abs(z_pair).sum() / np.abs(pair).sum())
        plus = float(np.abs(z_pulse).sum() / np.abs(pulse).sum())
    else:
        raise ValueError("p must be 1, 2 or inf")
    return DelayDemoResult(plus / signed, signed, plus)


def write_trajectory_csv(path, w: SampledSignal, z: SampledSignal) -> None:
    """CSV dump with columns t, w_1..w_nw, z_1..z_nz."""
    if w.n_samples != z.n_samples:
        raise DimensionMismatch("input/output sample counts differ")
    header = ["t"]
    header += [f"w{i+1}" for i in range(w.n_channels)]
    header += [f"z{i+1}" for i in range(z.n_channels)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, tk in enumerate(w.times):
            row = [repr(float(tk))]
            row += [repr(float(x)) for x in w.values[k]]
            row += [repr(float(x)) for x in z.values[k]]
            writer.writerow(row)
