"""Internally positive low-pass filter banks and system augmentation.

The filter state matrix is a Jordan-style upper bidiagonal block with a
single negative pole ``alpha`` repeated ``degree`` times, Kronecker-expanded
over the input channels; only the last block row of the input matrix is
nonzero.  Appending the filter states to a system G yields the augmented
system whose trailing ``(n_p + n_w)`` signal block (filter state, input)
stays nonnegative whenever the input does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidAlpha, NegativeDegree
from .lti import StateSpace

__all__ = ["PositiveFilter", "AugmentedSystem", "build_filter", "augment"]


@dataclass(frozen=True)
class PositiveFilter:
    """Filter matrices (A_p, B_p); degree 0 means no filter (empty blocks)."""

    alpha: float
    degree: int
    n_w: int
    A_p: np.ndarray
    B_p: np.ndarray

    @property
    def n_p(self) -> int:
        return self.A_p.shape[0]


@dataclass(frozen=True)
class AugmentedSystem:
    """Block-diagonal join of a system with a positive filter.

    A_a = diag(A, A_p), B_a = [B; B_p], C_a = [C 0], D_a = D.  The sizes
    (n, n_p, n_w) identify the trailing nonnegative signal block used by the
    copositive multiplier.
    """

    A_a: np.ndarray
    B_a: np.ndarray
    C_a: np.ndarray
    D_a: np.ndarray
    n: int
    n_p: int
    n_w: int

    @property
    def n_z(self) -> int:
        return self.C_a.shape[0]


def build_filter(alpha: float, degree: int, n_w: int) -> PositiveFilter:
    """Construct the degree-``degree`` positive filter for ``n_w`` channels."""
    if alpha >= 0.0:
        raise InvalidAlpha(f"filter pole must be negative, got {alpha}")
    if degree < 0 or int(degree) != degree:
        raise NegativeDegree(f"degree must be a nonnegative integer, got {degree}")
    if n_w < 1:
        raise DimensionMismatch("n_w must be >= 1")
    degree = int(degree)
    if degree == 0:
        return PositiveFilter(alpha, 0, n_w, np.zeros((0, 0)), np.zeros((0, n_w)))
    J = alpha * np.eye(degree) + np.diag(np.ones(degree - 1), 1)
    E = np.zeros((degree, 1))
    E[-1, 0] = 1.0
    A_p = np.kron(J, np.eye(n_w))
    B_p = np.kron(E, np.eye(n_w))
    A_p.setflags(write=False)
    B_p.setflags(write=False)
    return PositiveFilter(alpha, degree, n_w, A_p, B_p)


def augment(sys: StateSpace, filt: PositiveFilter) -> AugmentedSystem:
    """Append filter states to ``sys``; degree 0 returns the system as-is."""
    if filt.n_w != sys.n_w:
        raise DimensionMismatch(
            f"filter built for n_w={filt.n_w}, system has n_w={sys.n_w}"
        )
    n, n_p = sys.n, filt.n_p
    if n_p == 0:
        A_a, B_a, C_a = sys.A, sys.B, sys.C
    else:
        A_a = np.block([
            [sys.A, np.zeros((n, n_p))],
            [np.zeros((n_p, n)), filt.A_p],
        ])
        B_a = np.vstack([sys.B, filt.B_p])
        C_a = np.hstack([sys.C, np.zeros((sys.n_z, n_p))])
    return AugmentedSystem(A_a, B_a, C_a, sys.D, n, n_p, sys.n_w)


def filter_as_system(filt: PositiveFilter) -> StateSpace:
    """Filter as a standalone system with output z_p = (x_p, w)."""
    n_p, n_w = filt.n_p, filt.n_w
    C = np.vstack([np.eye(n_p), np.zeros((n_w, n_p))])
    D = np.vstack([np.zeros((n_p, n_w)), np.eye(n_w)])
    return StateSpace(filt.A_p, filt.B_p, C, D)
