"""L2 induced norm (H-infinity norm) and peak classification.

The norm is computed by bisection on gamma with the standard Hamiltonian
test: for gamma > sigma_max(D), sigma_max(G(jw)) crosses gamma at some
frequency iff the associated 2n x 2n Hamiltonian matrix has eigenvalues on
the imaginary axis.  Candidate peak frequencies are read off the imaginary
parts of near-axis eigenvalues at the last failing bisection step and
polished by golden-section maximization of sigma_max(G(jw)).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SingularDGamma, UnstableSystem
from .lti import PeakInfo, PeakKind, StateSpace, freq_response, is_hurwitz

__all__ = ["hinf_norm", "max_singular", "l2_norm"]

# Boundary peaks are declared when the w=0 / w=inf gain reaches this fraction
# of the global peak; downstream lower-bound construction branches on it.
_CLASSIFY_RTOL = 1e-6
_IMAG_AXIS_RTOL = 1e-8
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _phase_normalize(v: np.ndarray) -> np.ndarray:
    """Make the largest-modulus entry real positive (ties: lowest index)."""
    mags = np.abs(v)
    i = int(np.argmax(mags >= mags.max() * (1.0 - 1e-12)))
    pivot = v[i]
    if abs(pivot) == 0.0:
        return v
    w = v * (np.conj(pivot) / abs(pivot))
    if np.abs(w.imag).max() < 1e-14 * max(1.0, np.abs(w.real).max()):
        w = w.real + 0j
    return w


def max_singular(sys: StateSpace, omega: float) -> tuple[float, np.ndarray]:
    """sigma_max of G(jw) and its unit right singular vector.

    ``omega`` may be 0.0 (returns data of the real matrix G(0)), a finite
    frequency, or ``math.inf`` (the feedthrough D).  The vector's phase is
    normalized deterministically; it is returned real at the boundaries.
    """
    G = freq_response(sys, omega)
    if omega == 0.0 or math.isinf(omega):
        G = G.real
    _, s, Vh = np.linalg.svd(G)
    v = _phase_normalize(Vh[0].conj())
    if omega == 0.0 or math.isinf(omega):
        v = v.real
    return float(s[0]), v


def _sigma(sys: StateSpace, omega: float) -> float:
    return float(np.linalg.svd(freq_response(sys, omega), compute_uv=False)[0])


def _hamiltonian(sys: StateSpace, gamma: float) -> np.ndarray:
    nw, nz = sys.n_w, sys.n_z
    R = sys.D.T @ sys.D - gamma * gamma * np.eye(nw)
    S = sys.D @ sys.D.T - gamma * gamma * np.eye(nz)
    try:
        Ri = np.linalg.inv(R)
        Si = np.linalg.inv(S)
    except np.linalg.LinAlgError as exc:
        raise SingularDGamma(f"gamma={gamma} hit a singular value of D") from exc
    A0 = sys.A - sys.B @ Ri @ sys.D.T @ sys.C
    return np.block([
        [A0, -gamma * sys.B @ Ri @ sys.B.T],
        [gamma * sys.C.T @ Si @ sys.C, -A0.T],
    ])


def _crossing_frequencies(sys: StateSpace, gamma: float):
    """Imaginary parts of near-axis Hamiltonian eigenvalues (None if free)."""
    H = _hamiltonian(sys, gamma)
    ev = np.linalg.eigvals(H)
    thr = _IMAG_AXIS_RTOL * max(1.0, float(np.linalg.norm(H, "fro")))
    near = ev[np.abs(ev.real) <= thr]
    if near.size == 0:
        return None
    ws = np.unique(np.abs(near.imag))
    return ws[ws > 0.0]


def _golden_max(sys: StateSpace, lo: float, hi: float, rel_width: float = 1e-9):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = _sigma(sys, c), _sigma(sys, d)
    while b - a > rel_width * b:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _sigma(sys, c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _sigma(sys, d)
    w = 0.5 * (a + b)
    return w, _sigma(sys, w)


def hinf_norm(sys: StateSpace, rel_tol: float = 1e-6) -> PeakInfo:
    """Peak gain of a stable system over all frequencies.

    Returns a :class:`PeakInfo` whose ``gain`` is sigma_max evaluated at the
    classified peak; the true supremum exceeds it by at most ``rel_tol``
    relatively.  ``rel_tol`` must lie in (0, 1e-2].
    """
    if not (0.0 < rel_tol <= 1e-2):
        raise ValueError("rel_tol must be in (0, 1e-2]")
    if not is_hurwitz(sys.A):
        raise UnstableSystem("H-infinity norm requires a Hurwitz A")

    g_inf, v_inf = max_singular(sys, math.inf)
    g_zero, v_zero = max_singular(sys, 0.0)

    if sys.n == 0:
        return PeakInfo(PeakKind.AT_ZERO, 0.0, g_zero, v_zero)

    g_lo = max(g_inf * (1.0 + 1e-9), g_zero * (1.0 - 1e-12), 1e-14)
    g_hi = max(1.0, 1.01 * g_inf, 1.01 * g_zero)
    for _ in range(80):
        if _crossing_frequencies(sys, g_hi) is None:
            break
        g_hi *= 2.0
    else:
        raise SingularDGamma("bisection failed to bracket the peak gain")

    crossings = None
    while g_hi - g_lo > rel_tol * g_hi + 1e-14:
        mid = 0.5 * (g_lo + g_hi)
        ws = _crossing_frequencies(sys, mid)
        if ws is None or ws.size == 0:
            g_hi = mid
        else:
            g_lo = mid
            crossings = ws

    # Evaluate candidates: crossings plus midpoints of adjacent crossing pairs,
    # then polish the incumbent between its nearest enclosing crossings.
    best_w, best_g = 0.0, g_zero
    ties: list[float] = []
    if crossings is not None and crossings.size:
        cands = list(crossings)
        cands += [0.5 * (a + b) for a, b in zip(crossings[:-1], crossings[1:])]
        cands += [math.sqrt(a * b) for a, b in zip(crossings[:-1], crossings[1:])]
        vals = [(w, _sigma(sys, w)) for w in cands]
        w0, g0 = max(vals, key=lambda t: t[1])
        below = crossings[crossings < w0]
        above = crossings[crossings > w0]
        lo = float(below.max()) if below.size else w0 * 0.5
        hi = float(above.min()) if above.size else w0 * 2.0
        if hi <= lo:
            lo, hi = w0 * 0.9, w0 * 1.1
        w_ref, g_ref = _golden_max(sys, lo, hi)
        if g_ref > g0:
            w0, g0 = w_ref, g_ref
        if g0 > best_g:
            best_w, best_g = w0, g0
        ties = sorted(w for w, g in vals if g >= (1.0 - _CLASSIFY_RTOL) * g0 and w != w0)

    peak_gain = max(best_g, g_zero, g_inf)
    if g_zero >= (1.0 - _CLASSIFY_RTOL) * peak_gain:
        return PeakInfo(PeakKind.AT_ZERO, 0.0, g_zero, v_zero)
    if g_inf >= (1.0 - _CLASSIFY_RTOL) * peak_gain:
        return PeakInfo(PeakKind.AT_INFINITY, math.inf, g_inf, v_inf)
    _, v = max_singular(sys, best_w)
    return PeakInfo(PeakKind.AT_FINITE, best_w, best_g, v, other_peaks=tuple(ties))


def l2_norm(sys: StateSpace, rel_tol: float = 1e-6) -> float:
    """Convenience scalar: ``hinf_norm(sys, rel_tol).gain``."""
    return hinf_norm(sys, rel_tol).gain
