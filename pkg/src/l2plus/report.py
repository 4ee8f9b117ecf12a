"""Bound certification pipeline and machine-readable reports.

``certify`` runs the full upper-bound sweep and harmonic lower-bound
sequence for a system and assembles a :class:`BoundsReport`.  Reports are
deterministic for fixed inputs and options; JSON serialization uses
17-significant-digit floats so repeat runs are byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .harmonic import GridOptions, lower_bound_sequence, uniform_gain_ratio
from .hinf import hinf_norm
from .lti import PeakInfo, StateSpace
from .sdp import SolverOptions, UpperBoundResult, best_upper, sweep

__all__ = ["CertifyOptions", "BoundsReport", "certify", "report_to_json"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CertifyOptions:
    """Defaults reproduce the bundled six-state example end to end."""

    alphas: tuple = (-0.8, -1.0, -1.2)
    max_degree: int = 15
    max_harmonics: int = 200
    solver: SolverOptions = field(default_factory=SolverOptions)
    grid: GridOptions = field(default_factory=GridOptions)
    hinf_rel_tol: float = 1e-6


@dataclass(frozen=True)
class BoundsReport:
    """Certified two-sided bounds for one system.

    ``relative_gap`` = (best_upper - best_lower) / best_upper;
    ``uniform_floor`` is the universal (1/sqrt 2) * l2_norm lower bound that
    ``best_lower`` must dominate.
    """

    system_name: str | None
    dims: tuple[int, int, int]
    l2_norm: float
    peak: PeakInfo
    upper_bounds: tuple[UpperBoundResult, ...]
    lower_bounds: tuple[tuple[int, float, float], ...]
    best_upper: float
    best_upper_cell: tuple[float, int] | None
    best_lower: float
    best_lower_order: int | None
    relative_gap: float
    uniform_floor: float

    def to_dict(self) -> dict:
        peak = {
            "kind": self.peak.kind.value,
            "omega": self.peak.omega,
            "gain": self.peak.gain,
            "v_re": [float(x) for x in np.asarray(self.peak.v).real],
            "v_im": [float(x) for x in np.asarray(self.peak.v).imag],
            "other_peaks": list(self.peak.other_peaks),
        }
        return {
            "schema": SCHEMA_VERSION,
            "system_name": self.system_name,
            "n": self.dims[0],
            "n_w": self.dims[1],
            "n_z": self.dims[2],
            "l2_norm": self.l2_norm,
            "peak": peak,
            "upper_bounds": [
                {
                    "alpha": r.alpha,
                    "degree": r.degree,
                    "gamma": r.gamma,
                    "status": r.status.value,
                    "objective_gap": r.objective_gap,
                }
                for r in self.upper_bounds
            ],
            "lower_bounds": [
                {"order": order, "bound": bound, "omega": omega}
                for order, bound, omega in self.lower_bounds
            ],
            "best_upper": self.best_upper,
            "best_upper_alpha": self.best_upper_cell[0] if self.best_upper_cell else None,
            "best_upper_degree": self.best_upper_cell[1] if self.best_upper_cell else None,
            "best_lower": self.best_lower,
            "best_lower_order": self.best_lower_order,
            "relative_gap": self.relative_gap,
            "uniform_floor": self.uniform_floor,
            "exceeds_uniform_floor": bool(self.best_lower >= self.uniform_floor - 1e-6),
        }


def certify(sys: StateSpace, opts: CertifyOptions | None = None) -> BoundsReport:
    """Two-sided certification of the nonnegative-input L2 gain of ``sys``."""
    opts = opts or CertifyOptions()
    peak = hinf_norm(sys, opts.hinf_rel_tol)
    uppers = tuple(
        sweep(sys, opts.alphas, opts.max_degree, opts.solver, l2_hint=peak.gain)
    )
    lowers = tuple(
        lower_bound_sequence(sys, opts.max_harmonics, opts.grid, peak=peak)
    )
    top = best_upper(uppers)
    bu = top.gamma if top else math.nan
    cell = (top.alpha, top.degree) if top else None
    order, bl, _ = max(lowers, key=lambda row: row[1])
    gap = (bu - bl) / bu if top and bu > 0 else math.nan
    return BoundsReport(
        system_name=sys.name,
        dims=(sys.n, sys.n_w, sys.n_z),
        l2_norm=peak.gain,
        peak=peak,
        upper_bounds=uppers,
        lower_bounds=lowers,
        best_upper=bu,
        best_upper_cell=cell,
        best_lower=bl,
        best_lower_order=order,
        relative_gap=gap,
        uniform_floor=uniform_gain_ratio(2.0) * peak.gain,
    )


def _format_scalar(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    return json.dumps(x)


def _write_json(obj, out, indent: int) -> None:
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, val) in enumerate(obj.items()):
            out.append(pad + "  " + json.dumps(str(key)) + ": ")
            _write_json(val, out, indent + 2)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, val in enumerate(obj):
            out.append(pad + "  ")
            _write_json(val, out, indent + 2)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_format_scalar(obj))


def report_to_json(report: BoundsReport | dict) -> str:
    """Deterministic JSON text with 17-significant-digit floats.

    Non-finite floats (possible in failed sweep cells) are encoded as the
    strings "nan", "inf", "-inf".
    """
    data = report.to_dict() if isinstance(report, BoundsReport) else report
    out: list[str] = []
    _write_json(data, out, 0)
    return "".join(out) + "\n"
