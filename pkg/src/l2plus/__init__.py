"""Certified bounds on induced gains of stable LTI systems under nonnegative inputs.

Core entry points:

- :func:`l2plus.hinf.hinf_norm` -- L2 induced norm and peak classification.
- :func:`l2plus.sdp.upper_bound` / :func:`l2plus.sdp.sweep` -- copositive
  multiplier SDP upper bounds on the nonnegative-input gain.
- :func:`l2plus.harmonic.lower_bound_sequence` -- harmonic lower bounds.
- :func:`l2plus.report.certify` -- two-sided certification report.
- ``l2plus.service.app:app`` -- FastAPI service; ``l2plus.cli:main`` -- CLI.
"""

__version__ = "0.1.0"

from .errors import L2PlusError
from .lti import PeakInfo, PeakKind, StateSpace, load_system, subtract
from .hinf import hinf_norm, l2_norm, max_singular
from .filters import AugmentedSystem, PositiveFilter, augment, build_filter
from .sdp import SolverOptions, UpperBoundResult, sweep, upper_bound
from .harmonic import (
    GridOptions,
    fourier_coeffs,
    lower_bound,
    lower_bound_sequence,
    matrix_bruteforce,
    matrix_lower_bound,
    min_energy_qp,
    parseval_check,
    uniform_gain_ratio,
)
from .simulate import SampledSignal, delay_demo, empirical_gain, lp_norm, simulate
from .report import BoundsReport, CertifyOptions, certify, report_to_json

__all__ = [
    "__version__",
    "L2PlusError",
    "StateSpace",
    "PeakInfo",
    "PeakKind",
    "load_system",
    "subtract",
    "hinf_norm",
    "l2_norm",
    "max_singular",
    "PositiveFilter",
    "AugmentedSystem",
    "build_filter",
    "augment",
    "SolverOptions",
    "UpperBoundResult",
    "upper_bound",
    "sweep",
    "GridOptions",
    "fourier_coeffs",
    "parseval_check",
    "lower_bound",
    "lower_bound_sequence",
    "matrix_lower_bound",
    "matrix_bruteforce",
    "min_energy_qp",
    "uniform_gain_ratio",
    "SampledSignal",
    "simulate",
    "lp_norm",
    "empirical_gain",
    "delay_demo",
    "BoundsReport",
    "CertifyOptions",
    "certify",
    "report_to_json",
]
