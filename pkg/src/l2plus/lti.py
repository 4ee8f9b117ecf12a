"""State-space systems: validation, stability/positivity checks, frequency response.

Systems are continuous-time LTI,

    dx/dt = A x + B w,    z = C x + D w,

with ``n`` states, ``n_w`` inputs and ``n_z`` outputs.  ``n = 0`` encodes a
static system ``z = D w``; all operations accept it.  Instances are immutable
(arrays are frozen), so they can be shared across threads freely.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonFiniteEntry, SingularResolvent, UnstableSystem

__all__ = [
    "StateSpace",
    "PeakKind",
    "PeakInfo",
    "is_hurwitz",
    "is_metzler",
    "is_internally_positive",
    "is_externally_positive_sampled",
    "spectral_abscissa",
    "freq_response",
    "freq_response_many",
    "subtract",
    "system_from_dict",
    "system_to_dict",
    "load_system",
]


def _as_matrix(M, rows, cols, name):
    arr = np.asarray(M, dtype=float)
    if arr.size == 0:
        arr = np.zeros((rows, cols))
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a 2-D matrix, got ndim={arr.ndim}")
    return arr


@dataclass(frozen=True)
class StateSpace:
    """Validated immutable state-space realization (A, B, C, D).

    Raises :class:`DimensionMismatch` or :class:`NonFiniteEntry` on
    construction if the matrices are inconsistent, so any existing instance
    is already checked.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    name: str | None = None

    def __post_init__(self):
        D = np.atleast_2d(np.asarray(self.D, dtype=float))
        nz, nw = D.shape
        if nz < 1 or nw < 1:
            raise DimensionMismatch("D must be at least 1x1")
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = np.zeros((0, 0))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        B = _as_matrix(self.B, n, nw, "B")
        C = _as_matrix(self.C, nz, n, "C")
        if B.shape != (n, nw):
            raise DimensionMismatch(f"B shape {B.shape} incompatible with (n, n_w)=({n}, {nw})")
        if C.shape != (nz, n):
            raise DimensionMismatch(f"C shape {C.shape} incompatible with (n_z, n)=({nz}, {n})")
        for arr, label in ((A, "A"), (B, "B"), (C, "C"), (D, "D")):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteEntry(f"{label} contains NaN or Inf")
        for arr in (A, B, C, D):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def n_w(self) -> int:
        return self.D.shape[1]

    @property
    def n_z(self) -> int:
        return self.D.shape[0]

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"StateSpace{tag}(n={self.n}, n_w={self.n_w}, n_z={self.n_z})"


class PeakKind(enum.Enum):
    """Where the largest singular value of G(jw) is attained."""

    AT_ZERO = "at_zero"
    AT_FINITE = "at_finite"
    AT_INFINITY = "at_infinity"


@dataclass(frozen=True)
class PeakInfo:
    """Peak gain of a stable system and the maximizing input direction.

    Attributes:
        kind: peak location class (w=0, finite w>0, or the w->inf limit).
        omega: peak frequency in rad/s (0.0, the finite peak, or math.inf).
        gain: sigma_max of G at the peak frequency (the L2 induced norm).
        v: unit right singular vector at the peak; real for AT_ZERO and
           AT_INFINITY, normalized so its largest-modulus entry is real
           positive (ties broken by lowest index).
        other_peaks: further frequencies whose gain ties the global peak
           within tolerance (smallest maximizer is reported as ``omega``).
    """

    kind: PeakKind
    omega: float
    gain: float
    v: np.ndarray
    other_peaks: tuple[float, ...] = field(default=())


def spectral_abscissa(A: np.ndarray) -> float:
    """Largest real part among the eigenvalues of A (-inf for 0x0 A)."""
    A = np.asarray(A, dtype=float)
    if A.shape[0] == 0:
        return -math.inf
    return float(np.linalg.eigvals(A).real.max())


def is_hurwitz(A: np.ndarray) -> bool:
    """True iff every eigenvalue of the square matrix A has Re < 0."""
    return spectral_abscissa(A) < 0.0


def is_metzler(A: np.ndarray) -> bool:
    """True iff all off-diagonal entries of the square matrix A are >= 0."""
    A = np.asarray(A, dtype=float)
    if A.shape[0] == 0:
        return True
    off = A - np.diag(np.diag(A))
    return bool(np.all(off >= 0.0))


def is_internally_positive(sys: StateSpace) -> bool:
    """True iff A is Metzler and B, C, D are entrywise nonnegative."""
    return (
        is_metzler(sys.A)
        and bool(np.all(sys.B >= 0.0))
        and bool(np.all(sys.C >= 0.0))
        and bool(np.all(sys.D >= 0.0))
    )


def is_externally_positive_sampled(
    sys: StateSpace, horizon: float = 50.0, step: float = 0.01, tol: float = 1e-9
) -> bool:
    """Sampled check for a nonnegative impulse response.

    Requires D >= 0 and C exp(A t) B >= -tol on the grid t = 0, step, ...,
    horizon.  This is numerical evidence, not a certificate: sign changes
    between samples or beyond the horizon are not observed.  The tolerance
    absorbs matrix-exponential roundoff on responses that touch zero.
    """
    if horizon <= 0 or step <= 0:
        raise ValueError("horizon and step must be positive")
    if not is_hurwitz(sys.A):
        raise UnstableSystem("external positivity check requires a stable system")
    if not np.all(sys.D >= 0.0):
        return False
    if sys.n == 0:
        return True
    E = scipy.linalg.expm(sys.A * step)
    X = sys.B.copy()
    for _ in range(int(math.ceil(horizon / step)) + 1):
        if np.min(sys.C @ X) < -tol:
            return False
        X = E @ X
    return True


def freq_response(sys: StateSpace, omega: float) -> np.ndarray:
    """Transfer matrix G(jw) = C (jwI - A)^-1 B + D (D alone for n = 0)."""
    if sys.n == 0 or math.isinf(omega):
        return sys.D.astype(complex)
    try:
        X = np.linalg.solve(1j * omega * np.eye(sys.n) - sys.A, sys.B)
    except np.linalg.LinAlgError as exc:
        raise SingularResolvent(f"resolvent singular at omega={omega}") from exc
    return sys.C @ X + sys.D


def freq_response_many(sys: StateSpace, omegas: np.ndarray) -> np.ndarray:
    """G(jw) for a vector of frequencies, batched; returns (k, n_z, n_w)."""
    omegas = np.asarray(omegas, dtype=float)
    k = omegas.shape[0]
    if sys.n == 0:
        return np.broadcast_to(sys.D.astype(complex), (k, sys.n_z, sys.n_w)).copy()
    M = 1j * omegas[:, None, None] * np.eye(sys.n) - sys.A
    X = np.linalg.solve(M, np.broadcast_to(sys.B, (k, sys.n, sys.n_w)))
    return sys.C @ X + sys.D


def subtract(sys1: StateSpace, sys2: StateSpace) -> StateSpace:
    """Block-diagonal realization of the error system G1 - G2."""
    if (sys1.n_w, sys1.n_z) != (sys2.n_w, sys2.n_z):
        raise DimensionMismatch(
            f"incompatible I/O sizes: ({sys1.n_w},{sys1.n_z}) vs ({sys2.n_w},{sys2.n_z})"
        )
    n1, n2 = sys1.n, sys2.n
    A = np.block([
        [sys1.A, np.zeros((n1, n2))],
        [np.zeros((n2, n1)), sys2.A],
    ]) if n1 + n2 else np.zeros((0, 0))
    B = np.vstack([sys1.B, sys2.B])
    C = np.hstack([sys1.C, -sys2.C])
    D = sys1.D - sys2.D
    name = None
    if sys1.name and sys2.name:
        name = f"{sys1.name}-{sys2.name}"
    return StateSpace(A, B, C, D, name=name)


def system_from_dict(data: dict) -> StateSpace:
    """Build a system from the JSON-schema dict {name?, A, B, C, D}."""
    try:
        return StateSpace(
            data["A"], data["B"], data["C"], data["D"], name=data.get("name")
        )
    except KeyError as exc:
        raise DimensionMismatch(f"missing matrix key {exc}") from exc


def system_to_dict(sys: StateSpace) -> dict:
    """Inverse of :func:`system_from_dict`; n = 0 blocks become []."""
    out = {}
    if sys.name is not None:
        out["name"] = sys.name
    out["A"] = sys.A.tolist()
    out["B"] = sys.B.tolist() if sys.n else []
    out["C"] = sys.C.tolist() if sys.n else []
    out["D"] = sys.D.tolist()
    return out


def load_system(path) -> StateSpace:
    """Read a system JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return system_from_dict(json.load(fh))
