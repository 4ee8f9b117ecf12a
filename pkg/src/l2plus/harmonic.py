"""Lower bounds on the nonnegative-input L2 gain from harmonic test signals.

A rectified cosine max(2 cos(w t + theta), 0) is the cheapest nonnegative
signal in the mean-square sense among unit-fundamental harmonic signals; its
Fourier coefficients are

    a_0 = 2/pi,   a_1 = 1,   a_{2p} = (4/pi) (-1)^(p+1) / ((2p+1)(2p-1)),

with vanishing odd coefficients beyond the fundamental.  Driving each input
channel with such a signal, phased by the peak right singular vector of the
transfer matrix, and measuring the steady-state output RMS yields a valid
lower bound for every fundamental frequency w and truncation order N:

    h_N(w) = sqrt( 2 a_0^2 |G(0) v0|^2 + |G(jw) v1|^2
                   + sum_m a_m^2 |G(jmw) vm|^2 ) / sqrt(2),

where the per-harmonic directions vm depend on where the peak gain of G is
attained.  The supremum over w is non-decreasing in N and always at least
(1/sqrt 2) times the L2 norm.  Evaluation is done directly per frequency
(one resolvent solve per harmonic) instead of building a stacked system,
which would need complex coefficients for multi-input systems.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import cvxpy as cp
import numpy as np

from .errors import NumericalFailure, TooManyColumns, UnstableSystem, ZeroMatrix
from .hinf import hinf_norm
from .lti import PeakInfo, PeakKind, StateSpace, freq_response, is_hurwitz
from .sdp import ConicProblem, SolverOptions, solve_conic

__all__ = [
    "HarmonicCoefficients",
    "HarmonicDirections",
    "GridOptions",
    "fourier_coeffs",
    "parseval_check",
    "harmonic_directions",
    "lower_bound",
    "lower_bound_sequence",
    "lower_bound_curve",
    "matrix_lower_bound",
    "matrix_bruteforce",
    "min_energy_qp",
    "uniform_gain_ratio",
    "write_curve_csv",
    "write_table_csv",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class HarmonicCoefficients:
    """Fourier coefficients of the rectified cosine up to order N.

    ``a0`` is the DC coefficient 2/pi; ``a[k]`` holds the coefficient of
    cos((k+2) t), zero for odd orders.  The fundamental coefficient is 1.
    """

    order: int
    a0: float
    a: np.ndarray

    def weight(self, m: int) -> float:
        """Coefficient of cos(m t); m = 0 returns a0."""
        if m == 0:
            return self.a0
        if m == 1:
            return 1.0
        return float(self.a[m - 2])


def fourier_coeffs(order: int) -> HarmonicCoefficients:
    """Rectified-cosine Fourier coefficients through ``order`` harmonics."""
    if order < 1:
        raise ValueError("order must be >= 1")
    a = np.zeros(max(order - 1, 0))
    for m in range(2, order + 1):
        if m % 2 == 0:
            p = m // 2
            a[m - 2] = (4.0 / math.pi) * (-1.0) ** (p + 1) / ((2 * p + 1) * (2 * p - 1))
    a.setflags(write=False)
    return HarmonicCoefficients(order, 2.0 / math.pi, a)


def parseval_check(order: int) -> float:
    """Partial energy sum 2 a0^2 + 1 + sum a_m^2; approaches 2 from below."""
    c = fourier_coeffs(order)
    return 2.0 * c.a0**2 + 1.0 + float(np.sum(c.a**2))


@dataclass(frozen=True)
class HarmonicDirections:
    """Per-harmonic input directions derived from a peak singular vector.

    ``vs[m]`` multiplies the m-th harmonic; |vs[m]_i| = |v_i| for all m.
    Peak at finite w: vs[m]_i = |v_i| exp(j m theta_i).  Peak at w = 0 (real
    v, sign fixed so the nonnegative part dominates): v for odd m, |v| for
    even m.  Peak at w = inf: vs[m] = v for all m.
    """

    v: np.ndarray
    vs: np.ndarray


def harmonic_directions(peak: PeakInfo, order: int) -> HarmonicDirections:
    if order < 1:
        raise ValueError("order must be >= 1")
    v = np.asarray(peak.v)
    if peak.kind is PeakKind.AT_FINITE:
        theta = np.angle(v.astype(complex))
        mags = np.abs(v)
        vs = np.array([mags * np.exp(1j * m * theta) for m in range(order + 1)])
    elif peak.kind is PeakKind.AT_ZERO:
        v = v.real.copy()
        if np.linalg.norm(np.maximum(v, 0.0)) < np.linalg.norm(np.maximum(-v, 0.0)):
            v = -v
        vabs = np.abs(v)
        vs = np.array([(v if m % 2 else vabs) for m in range(order + 1)]).astype(complex)
        v = v.astype(complex)
    else:
        v = v.real.astype(complex)
        vs = np.array([v for _ in range(order + 1)])
    vs.setflags(write=False)
    return HarmonicDirections(v, vs)


@dataclass(frozen=True)
class GridOptions:
    """Log-spaced frequency grid around the system's peak scale."""

    points_per_decade: int = 200
    decades_below: float = 3.0
    decades_above: float = 3.0
    refine_rel_width: float = 1e-6


def _omega_scale(sys: StateSpace, peak: PeakInfo) -> float:
    if peak.kind is PeakKind.AT_FINITE and peak.omega > 0:
        return peak.omega
    if sys.n:
        mags = np.abs(np.linalg.eigvals(sys.A))
        mags = mags[mags > 0]
        if mags.size:
            return float(np.exp(np.mean(np.log(mags))))
    return 1.0


def _active_orders(coeffs: HarmonicCoefficients):
    """Harmonic orders with nonzero coefficients (1 and the even ones)."""
    return [1] + [m for m in range(2, coeffs.order + 1) if coeffs.weight(m) != 0.0]


def _gain_sq_at(sys: StateSpace, direction: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """|G(jw) d|^2 for a fixed direction over many frequencies, batched."""
    omegas = np.asarray(omegas, dtype=float)
    if sys.n == 0:
        val = float(np.sum(np.abs(sys.D @ direction) ** 2))
        return np.full(omegas.shape, val)
    rhs = (sys.B @ direction)[:, None]
    M = 1j * omegas[:, None, None] * np.eye(sys.n) - sys.A
    X = np.linalg.solve(M, np.broadcast_to(rhs, (omegas.shape[0], sys.n, 1)))
    out = (sys.C @ X)[:, :, 0] + sys.D @ direction
    return np.sum(np.abs(out) ** 2, axis=1)


class _Objective:
    """Shared evaluator of h_N over frequencies for all prefix orders."""

    def __init__(self, sys: StateSpace, dirs: HarmonicDirections, coeffs: HarmonicCoefficients):
        self.sys = sys
        self.dirs = dirs
        self.coeffs = coeffs
        self.orders = _active_orders(coeffs)
        G0 = freq_response(sys, 0.0).real
        self.const = 2.0 * coeffs.a0**2 * float(np.sum(np.abs(G0 @ dirs.vs[0]) ** 2))
        self._g0 = G0

    def term_table(self, omegas: np.ndarray) -> np.ndarray:
        """(len(omegas), len(orders)) array of a_m^2 |G(jmw) vm|^2."""
        cols = []
        for m in self.orders:
            w = self.coeffs.weight(m)
            cols.append(w * w * _gain_sq_at(self.sys, self.dirs.vs[m], m * np.asarray(omegas)))
        return np.stack(cols, axis=1)

    def value(self, omega: float, order: int) -> float:
        total = self.const
        for m in self.orders:
            if m > order:
                break
            w = self.coeffs.weight(m)
            total += w * w * _gain_sq_at(self.sys, self.dirs.vs[m], np.array([m * omega]))[0]
        return math.sqrt(total / 2.0)

    def limit_zero(self, order: int) -> float:
        total = self.const
        for m in self.orders:
            if m > order:
                break
            w = self.coeffs.weight(m)
            total += w * w * float(np.sum(np.abs(self._g0 @ self.dirs.vs[m]) ** 2))
        return math.sqrt(total / 2.0)

    def limit_inf(self, order: int) -> float:
        total = self.const
        for m in self.orders:
            if m > order:
                break
            w = self.coeffs.weight(m)
            total += w * w * float(np.sum(np.abs(self.sys.D @ self.dirs.vs[m]) ** 2))
        return math.sqrt(total / 2.0)


def _golden_refine(fun, lo: float, hi: float, rel_width: float):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > rel_width * b:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    w = 0.5 * (a + b)
    return w, fun(w)


def _prepare(sys, peak, order, grid):
    if not is_hurwitz(sys.A):
        raise UnstableSystem("harmonic lower bound requires a stable system")
    if peak is None:
        peak = hinf_norm(sys)
    grid = grid or GridOptions()
    coeffs = fourier_coeffs(order)
    dirs = harmonic_directions(peak, order)
    obj = _Objective(sys, dirs, coeffs)
    scale = _omega_scale(sys, peak)
    n_pts = max(2, int(round(grid.points_per_decade * (grid.decades_below + grid.decades_above))))
    omegas = np.logspace(
        math.log10(scale) - grid.decades_below,
        math.log10(scale) + grid.decades_above,
        n_pts,
    )
    return peak, grid, obj, omegas


def lower_bound(
    sys: StateSpace,
    order: int,
    grid: GridOptions | None = None,
    peak: PeakInfo | None = None,
) -> tuple[float, float]:
    """Best harmonic lower bound of order ``order``; returns (value, omega).

    ``omega`` is the maximizing fundamental frequency; 0.0 or ``math.inf``
    indicate that the analytic limit value at that boundary was best.  Any
    frequency yields a valid bound, so grid coarseness only weakens (never
    invalidates) the result.
    """
    peak, grid, obj, omegas = _prepare(sys, peak, order, grid)
    seq = _sequence_from(obj, omegas, [order], grid.refine_rel_width)
    return seq[0][1], seq[0][2]


def lower_bound_sequence(
    sys: StateSpace,
    max_order: int,
    grid: GridOptions | None = None,
    peak: PeakInfo | None = None,
) -> list[tuple[int, float, float]]:
    """(order, bound, omega) on a doubling schedule 1, 2, 4, ..., max_order.

    The bound is non-decreasing in the order: each order's candidate set
    includes the previous maximizer.
    """
    orders = []
    k = 1
    while k < max_order:
        orders.append(k)
        k *= 2
    orders.append(max_order)
    peak, grid, obj, omegas = _prepare(sys, peak, max_order, grid)
    return _sequence_from(obj, omegas, orders, grid.refine_rel_width)


def _sequence_from(obj: _Objective, omegas, orders, rel_width):
    table = obj.term_table(omegas)
    results = []
    prev_val, prev_w = -1.0, None
    for order in orders:
        cols = [k for k, m in enumerate(obj.orders) if m <= order]
        h = np.sqrt((obj.const + table[:, cols].sum(axis=1)) / 2.0)
        k = int(np.argmax(h))
        best_w, best_val = float(omegas[k]), float(h[k])
        lo = omegas[max(k - 1, 0)]
        hi = omegas[min(k + 1, len(omegas) - 1)]
        if hi > lo:
            w_ref, v_ref = _golden_refine(lambda w: obj.value(w, order), lo, hi, rel_width)
            if v_ref > best_val:
                best_w, best_val = w_ref, v_ref
        if prev_w not in (None, 0.0, math.inf):
            v_prev = obj.value(prev_w, order)
            if v_prev > best_val:
                best_w, best_val = prev_w, v_prev
        lim0 = obj.limit_zero(order)
        if lim0 > best_val:
            best_w, best_val = 0.0, lim0
        liminf = obj.limit_inf(order)
        if liminf > best_val:
            best_w, best_val = math.inf, liminf
        best_val = max(best_val, prev_val)
        results.append((order, best_val, best_w))
        prev_val, prev_w = best_val, best_w
    return results


def lower_bound_curve(
    sys: StateSpace,
    order: int,
    grid: GridOptions | None = None,
    peak: PeakInfo | None = None,
):
    """(omegas, h_N(omegas)) arrays for plotting/CSV emission."""
    peak, grid, obj, omegas = _prepare(sys, peak, order, grid)
    h = np.sqrt((obj.const + obj.term_table(omegas).sum(axis=1)) / 2.0)
    return omegas, h


def uniform_gain_ratio(p: float) -> float:
    """Universal floor of gain-plus over gain: 2^((1-p)/p), or 1/2 at p=inf."""
    if math.isinf(p):
        return 0.5
    if p < 1:
        raise ValueError("p must be >= 1 or inf")
    return 2.0 ** ((1.0 - p) / p)


def matrix_lower_bound(M: np.ndarray) -> float:
    """Certified lower bound on max |M x|_2 over nonnegative unit vectors x.

    Uses the dominant right singular vector v with its sign fixed so the
    nonnegative part dominates: the bound is the larger of
    sqrt((|M|_2^2 + |M |v||_2^2) / 2) and |M v_+|_2 / |v_+|_2.  For
    entrywise nonnegative M both reduce to the spectral norm.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    s, v = _top_right_singular(M)
    if s <= 0.0 or not np.isfinite(s):
        raise ZeroMatrix("matrix is zero (or non-finite)")
    if np.linalg.norm(np.maximum(v, 0.0)) < np.linalg.norm(np.maximum(-v, 0.0)):
        v = -v
    vabs = np.abs(v)
    vplus = np.maximum(v, 0.0)
    bound1 = math.sqrt((s * s + float(np.sum((M @ vabs) ** 2))) / 2.0)
    bound2 = float(np.linalg.norm(M @ vplus) / np.linalg.norm(vplus))
    return max(bound1, bound2)


def _top_right_singular(M: np.ndarray):
    _, s, Vh = np.linalg.svd(M)
    return float(s[0]), Vh[0]


def matrix_bruteforce(
    M: np.ndarray,
    n_random_starts: int = 100,
    seed: int = 0,
    max_iter: int = 500,
) -> float:
    """Multi-start projected gradient ascent for max |M x|_2, x >= 0, |x| = 1.

    Every iterate is feasible, so the returned value is always a valid
    lower bound on the true maximum; at the supported sizes (<= 6 columns)
    it is expected to attain it.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    ncol = M.shape[1]
    if ncol > 6:
        raise TooManyColumns(f"brute-force oracle supports <= 6 columns, got {ncol}")
    s, v = _top_right_singular(M)
    if s <= 0.0:
        raise ZeroMatrix("matrix is zero")
    if np.linalg.norm(np.maximum(v, 0.0)) < np.linalg.norm(np.maximum(-v, 0.0)):
        v = -v
    Q = M.T @ M
    qnorm = float(np.linalg.norm(Q, 2))

    def project(x):
        x = np.maximum(x, 0.0)
        nrm = np.linalg.norm(x)
        return x / nrm if nrm > 0 else None

    starts = [np.eye(ncol)[i] for i in range(ncol)]
    for cand in (np.abs(v), np.maximum(v, 0.0)):
        p = project(cand)
        if p is not None:
            starts.append(p)
    rng = np.random.default_rng(seed)
    for _ in range(n_random_starts):
        starts.append(project(rng.random(ncol) + 1e-12))

    best = 0.0
    for x in starts:
        fx = float(x @ Q @ x)
        step = 1.0 / max(qnorm, 1e-300)
        for _ in range(max_iter):
            g = Q @ x
            improved = False
            while step > 1e-18:
                y = project(x + step * g)
                if y is None:
                    break
                fy = float(y @ Q @ y)
                if fy > fx + 1e-15 * max(1.0, fx):
                    x, fx = y, fy
                    step *= 1.3
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
        best = max(best, fx)
    return math.sqrt(best)


def min_energy_qp(
    order: int,
    grid_points: int = 2001,
    opts: SolverOptions | None = None,
) -> tuple[float, np.ndarray]:
    """Least weighted coefficient energy of a nonnegative cosine polynomial.

    Minimizes 2 a0^2 + 1 + sum_{m=2..order} a_m^2 subject to
    a0 + cos t + sum a_m cos(m t) >= 0 sampled on a uniform grid over
    [0, pi] (cosines are even, so half the period suffices).  Sampling can
    only relax the nonnegativity constraint, so the optimum is a lower
    bound on the exact semi-infinite value.  Returns (value, coefficients)
    with coefficients ordered [a0, 1, a2, ..., a_order].
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    if grid_points < 100:
        raise ValueError("grid_points must be >= 100")
    ts = np.linspace(0.0, math.pi, grid_points)
    a0 = cp.Variable(name="a0")
    am = cp.Variable(order - 1, name="am")
    cosmat = np.stack([np.cos(m * ts) for m in range(2, order + 1)], axis=1)
    w = a0 + np.cos(ts) + cosmat @ am
    problem = ConicProblem(
        objective=2.0 * cp.square(a0) + 1.0 + cp.sum_squares(am),
        variables={"a0": (a0, "scalar"), "am": (am, "vector")},
        constraints=[w >= 0],
        description=f"sampled nonneg cosine QP order={order} grid={grid_points}",
    )
    sol = solve_conic(problem, opts)
    if not sol.status.ok:
        raise NumericalFailure(f"QP solve failed: {sol.status} ({sol.solver_stats})")
    coeffs = np.concatenate(([float(sol.values["a0"][0]), 1.0], sol.values["am"]))
    return sol.objective, coeffs


def write_curve_csv(path, omegas, values, header=("omega", "bound")) -> None:
    """Write an (omega, h(omega)) curve as CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for w, v in zip(omegas, values):
            writer.writerow([repr(float(w)), repr(float(v))])


def write_table_csv(path, rows, header) -> None:
    """Write an iterable of numeric rows as CSV with full float precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) if isinstance(x, (int, float)) else str(x) for x in row])
