"""Request handlers shared by the HTTP app and the command-line client.

Each handler converts a request model into core-library calls and packs the
result into the matching response model, raising library exceptions
unchanged; transport-level error mapping happens in the callers.
"""

from __future__ import annotations

import math

import numpy as np

from .. import harmonic, lti, report
from ..hinf import hinf_norm
from ..sdp import SolverOptions, best_upper, sweep
from ..simulate import delay_demo
from . import models as m

__all__ = [
    "handle_hinf",
    "handle_certify",
    "handle_diff",
    "handle_upper",
    "handle_lower",
    "handle_matrix",
    "handle_uniform_demo",
    "handle_positivity",
]


def _peak_model(peak: lti.PeakInfo) -> m.PeakModel:
    v = np.asarray(peak.v)
    return m.PeakModel(
        kind=peak.kind.value,
        omega=m.finite_or_none(peak.omega),
        gain=peak.gain,
        v_re=[float(x) for x in v.real],
        v_im=[float(x) for x in v.imag],
        other_peaks=[float(w) for w in peak.other_peaks],
    )


def _certify_options(opt: m.BoundOptions) -> report.CertifyOptions:
    return report.CertifyOptions(
        alphas=tuple(opt.alphas),
        max_degree=opt.max_degree,
        max_harmonics=opt.max_harmonics,
        solver=SolverOptions(abs_tol=opt.solver_tol, rel_tol=opt.solver_tol),
        grid=harmonic.GridOptions(points_per_decade=opt.grid_per_decade),
    )


def _certify_response(rep: report.BoundsReport) -> m.CertifyResponse:
    return m.CertifyResponse(
        schema_version=report.SCHEMA_VERSION,
        system_name=rep.system_name,
        n=rep.dims[0],
        n_w=rep.dims[1],
        n_z=rep.dims[2],
        l2_norm=rep.l2_norm,
        peak=_peak_model(rep.peak),
        upper_bounds=[
            m.UpperCell(
                alpha=r.alpha,
                degree=r.degree,
                gamma=m.finite_or_none(r.gamma),
                status=r.status.value,
                objective_gap=m.finite_or_none(r.objective_gap),
            )
            for r in rep.upper_bounds
        ],
        lower_bounds=[
            m.LowerRow(order=o, bound=b, omega=m.finite_or_none(w))
            for o, b, w in rep.lower_bounds
        ],
        best_upper=m.finite_or_none(rep.best_upper),
        best_upper_alpha=rep.best_upper_cell[0] if rep.best_upper_cell else None,
        best_upper_degree=rep.best_upper_cell[1] if rep.best_upper_cell else None,
        best_lower=rep.best_lower,
        best_lower_order=rep.best_lower_order,
        relative_gap=m.finite_or_none(rep.relative_gap),
        uniform_floor=rep.uniform_floor,
        exceeds_uniform_floor=bool(rep.best_lower >= rep.uniform_floor - 1e-6),
    )


def handle_hinf(req: m.HinfRequest) -> m.HinfResponse:
    peak = hinf_norm(req.system.to_state_space(), req.rel_tol)
    return m.HinfResponse(l2_norm=peak.gain, peak=_peak_model(peak))


def handle_certify(req: m.CertifyRequest) -> m.CertifyResponse:
    rep = report.certify(req.system.to_state_space(), _certify_options(req.options))
    return _certify_response(rep)


def handle_diff(req: m.DiffRequest) -> m.CertifyResponse:
    err = lti.subtract(req.system1.to_state_space(), req.system2.to_state_space())
    rep = report.certify(err, _certify_options(req.options))
    return _certify_response(rep)


def handle_upper(req: m.UpperRequest) -> m.UpperResponse:
    sys = req.system.to_state_space()
    peak = hinf_norm(sys)
    opts = SolverOptions(abs_tol=req.options.solver_tol, rel_tol=req.options.solver_tol)
    results = sweep(sys, req.options.alphas, req.options.max_degree, opts, l2_hint=peak.gain)
    top = best_upper(results)
    return m.UpperResponse(
        l2_norm=peak.gain,
        upper_bounds=[
            m.UpperCell(
                alpha=r.alpha,
                degree=r.degree,
                gamma=m.finite_or_none(r.gamma),
                status=r.status.value,
                objective_gap=m.finite_or_none(r.objective_gap),
            )
            for r in results
        ],
        best_upper=top.gamma if top else None,
    )


def handle_lower(req: m.LowerRequest) -> m.LowerResponse:
    sys = req.system.to_state_space()
    peak = hinf_norm(sys)
    grid = harmonic.GridOptions(points_per_decade=req.options.grid_per_decade)
    rows = harmonic.lower_bound_sequence(sys, req.options.max_harmonics, grid, peak=peak)
    return m.LowerResponse(
        l2_norm=peak.gain,
        peak=_peak_model(peak),
        lower_bounds=[m.LowerRow(order=o, bound=b, omega=m.finite_or_none(w)) for o, b, w in rows],
        best_lower=max(b for _, b, _ in rows),
        uniform_floor=harmonic.uniform_gain_ratio(2.0) * peak.gain,
    )


def handle_matrix(req: m.MatrixRequest) -> m.MatrixResponse:
    M = np.asarray(req.matrix, dtype=float)
    sigma = float(np.linalg.svd(np.atleast_2d(M), compute_uv=False)[0])
    lower = harmonic.matrix_lower_bound(M)
    brute = harmonic.matrix_bruteforce(M, seed=req.seed) if req.bruteforce else None
    return m.MatrixResponse(sigma_max=sigma, lower_bound=lower, bruteforce=brute)


def handle_uniform_demo(req: m.UniformDemoRequest) -> m.UniformDemoResponse:
    p = math.inf if req.p == "inf" else float(req.p)
    result = delay_demo(req.delay, p, dt=req.dt, horizon=req.horizon)
    return m.UniformDemoResponse(
        p=req.p,
        delay=req.delay,
        ratio=result.ratio,
        achieved_norm=result.achieved_norm,
        achieved_plus_norm=result.achieved_plus_norm,
        expected_ratio=harmonic.uniform_gain_ratio(p),
    )


def handle_positivity(req: m.PositivityRequest) -> m.PositivityResponse:
    sys = req.system.to_state_space()
    stable = lti.is_hurwitz(sys.A)
    ext = (
        lti.is_externally_positive_sampled(sys, req.horizon, req.step)
        if stable
        else None
    )
    return m.PositivityResponse(
        stable=stable,
        metzler=lti.is_metzler(sys.A),
        internally_positive=lti.is_internally_positive(sys),
        externally_positive_sampled=ext,
    )
