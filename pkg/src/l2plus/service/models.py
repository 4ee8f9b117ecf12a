"""Pydantic request/response models for the HTTP service.

The wire format is JSON-safe: non-finite floats are mapped to ``null``
(``omega = null`` means the w -> inf limit; a ``gamma = null`` sweep cell
failed, see its status).
"""

from __future__ import annotations

import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..lti import StateSpace, system_from_dict

__all__ = [
    "SystemModel",
    "HinfRequest",
    "HinfResponse",
    "PeakModel",
    "CertifyRequest",
    "CertifyResponse",
    "DiffRequest",
    "UpperRequest",
    "UpperResponse",
    "UpperCell",
    "LowerRequest",
    "LowerResponse",
    "LowerRow",
    "MatrixRequest",
    "MatrixResponse",
    "UniformDemoRequest",
    "UniformDemoResponse",
    "PositivityRequest",
    "PositivityResponse",
    "finite_or_none",
]


def finite_or_none(x) -> Optional[float]:
    x = float(x)
    return x if math.isfinite(x) else None


class SystemModel(BaseModel):
    """State-space matrices in row-major lists; empty arrays encode n = 0."""

    name: Optional[str] = None
    A: list[list[float]] = Field(default_factory=list)
    B: list[list[float]] = Field(default_factory=list)
    C: list[list[float]] = Field(default_factory=list)
    D: list[list[float]]

    def to_state_space(self) -> StateSpace:
        return system_from_dict(self.model_dump())

    @classmethod
    def from_state_space(cls, sys: StateSpace) -> "SystemModel":
        return cls(
            name=sys.name,
            A=np.asarray(sys.A).tolist(),
            B=np.asarray(sys.B).tolist() if sys.n else [],
            C=np.asarray(sys.C).tolist() if sys.n else [],
            D=np.asarray(sys.D).tolist(),
        )


class PeakModel(BaseModel):
    kind: str
    omega: Optional[float]
    gain: float
    v_re: list[float]
    v_im: list[float]
    other_peaks: list[float] = Field(default_factory=list)


class HinfRequest(BaseModel):
    system: SystemModel
    rel_tol: float = 1e-6


class HinfResponse(BaseModel):
    l2_norm: float
    peak: PeakModel


class BoundOptions(BaseModel):
    alphas: list[float] = Field(default_factory=lambda: [-0.8, -1.0, -1.2])
    max_degree: int = 15
    max_harmonics: int = 200
    solver_tol: float = 1e-8
    grid_per_decade: int = 200
    seed: int = 0


class CertifyRequest(BaseModel):
    system: SystemModel
    options: BoundOptions = Field(default_factory=BoundOptions)


class DiffRequest(BaseModel):
    system1: SystemModel
    system2: SystemModel
    options: BoundOptions = Field(default_factory=BoundOptions)


class UpperCell(BaseModel):
    alpha: float
    degree: int
    gamma: Optional[float]
    status: str
    objective_gap: Optional[float]


class LowerRow(BaseModel):
    order: int
    bound: float
    omega: Optional[float]


class CertifyResponse(BaseModel):
    schema_version: int
    system_name: Optional[str]
    n: int
    n_w: int
    n_z: int
    l2_norm: float
    peak: PeakModel
    upper_bounds: list[UpperCell]
    lower_bounds: list[LowerRow]
    best_upper: Optional[float]
    best_upper_alpha: Optional[float]
    best_upper_degree: Optional[int]
    best_lower: float
    best_lower_order: Optional[int]
    relative_gap: Optional[float]
    uniform_floor: float
    exceeds_uniform_floor: bool


class UpperRequest(BaseModel):
    system: SystemModel
    options: BoundOptions = Field(default_factory=BoundOptions)


class UpperResponse(BaseModel):
    l2_norm: float
    upper_bounds: list[UpperCell]
    best_upper: Optional[float]


class LowerRequest(BaseModel):
    system: SystemModel
    options: BoundOptions = Field(default_factory=BoundOptions)


class LowerResponse(BaseModel):
    l2_norm: float
    peak: PeakModel
    lower_bounds: list[LowerRow]
    best_lower: float
    uniform_floor: float


class MatrixRequest(BaseModel):
    matrix: list[list[float]]
    bruteforce: bool = True
    seed: int = 0


class MatrixResponse(BaseModel):
    sigma_max: float
    lower_bound: float
    bruteforce: Optional[float]


class UniformDemoRequest(BaseModel):
    p: Literal["1", "2", "inf"] = "2"
    delay: float = 1.0
    dt: Optional[float] = None
    horizon: Optional[float] = None


class UniformDemoResponse(BaseModel):
    p: str
    delay: float
    ratio: float
    achieved_norm: float
    achieved_plus_norm: float
    expected_ratio: float


class PositivityRequest(BaseModel):
    system: SystemModel
    horizon: float = 50.0
    step: float = 0.01


class PositivityResponse(BaseModel):
    stable: bool
    metzler: bool
    internally_positive: bool
    externally_positive_sampled: Optional[bool]
