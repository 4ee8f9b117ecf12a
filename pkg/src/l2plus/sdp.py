"""Copositive-multiplier SDP upper bounds on the nonnegative-input L2 gain.

The dissipation inequality is a single negative-semidefinite constraint of
size (n + n_p + n_w),

    [ P A_a + A_a' P + C_a' C_a   P B_a + C_a' D_a ]
    [ B_a' P + D_a' C_a           D_a' D_a - t I   ]  +  Sel (S + M) Sel'  <= 0,

where the multiplier S + M (S positive semidefinite, M entrywise nonnegative
symmetric) acts on the trailing (filter state, input) block through the
selector Sel, and t stands for gamma^2.  Minimizing t directly keeps the
problem affine, one solve per (alpha, degree) cell.  The feasible set with
S = M = 0 is the classical bounded-real inequality, so the optimum never
exceeds the L2 norm; the multiplier can only push it down.

Problems are modeled with cvxpy and solved with any installed conic backend
supporting PSD and nonnegative cones (CLARABEL by default).  Returned
certificates are always re-checked by plugging them back into the inequality;
see :func:`certificate_residuals`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import cvxpy as cp
import numpy as np

from .errors import UnstableSystem
from .filters import AugmentedSystem, augment, build_filter
from .hinf import hinf_norm
from .lti import StateSpace, is_hurwitz

__all__ = [
    "SolverOptions",
    "SolverStatus",
    "ConicProblem",
    "ConicSolution",
    "UpperBoundResult",
    "assemble_lmi",
    "solve_conic",
    "upper_bound",
    "sweep",
    "certificate_residuals",
    "dump_problem",
]


@dataclass(frozen=True)
class SolverOptions:
    """Conic backend configuration.

    On a solver error the solve is retried once with tolerances loosened to
    ``retry_tol`` before giving up.
    """

    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_iters: int = 200
    solver: str = "CLARABEL"
    retry_tol: float = 1e-6


class SolverStatus(enum.Enum):
    OPTIMAL = "optimal"
    NEAR_OPTIMAL = "near_optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_FAILURE = "numerical_failure"

    @property
    def ok(self) -> bool:
        return self in (SolverStatus.OPTIMAL, SolverStatus.NEAR_OPTIMAL)


@dataclass
class ConicProblem:
    """Declarative conic program: linear-or-quadratic objective, affine
    constraints over matrix/vector/scalar variables.

    ``variables`` maps a name to ``(cvxpy_variable, kind)`` with kind one of
    ``free_symmetric``, ``psd``, ``nonneg_symmetric``, ``scalar``,
    ``vector``; cone memberships are carried explicitly in ``constraints``
    so that solutions can be verified post hoc.
    """

    objective: cp.expressions.expression.Expression
    variables: dict
    constraints: list
    description: str = ""


@dataclass
class ConicSolution:
    status: SolverStatus
    objective: float
    values: dict
    solver_stats: dict = field(default_factory=dict)


_STATUS_MAP = {
    cp.OPTIMAL: SolverStatus.OPTIMAL,
    cp.OPTIMAL_INACCURATE: SolverStatus.NEAR_OPTIMAL,
    cp.INFEASIBLE: SolverStatus.INFEASIBLE,
    cp.INFEASIBLE_INACCURATE: SolverStatus.INFEASIBLE,
}


def _solver_kwargs(opts: SolverOptions, abs_tol: float, rel_tol: float) -> dict:
    if opts.solver.upper() == "CLARABEL":
        return {
            "tol_gap_abs": abs_tol,
            "tol_gap_rel": rel_tol,
            "tol_feas": abs_tol,
        }
    if opts.solver.upper() == "SCS":
        return {"eps": max(abs_tol, rel_tol), "max_iters": max(opts.max_iters, 2500)}
    return {}


def solve_conic(problem: ConicProblem, opts: SolverOptions | None = None) -> ConicSolution:
    """Solve a :class:`ConicProblem`, retrying once with loosened tolerances."""
    opts = opts or SolverOptions()
    prob = cp.Problem(cp.Minimize(problem.objective), problem.constraints)

    def attempt(abs_tol, rel_tol):
        try:
            prob.solve(solver=opts.solver, **_solver_kwargs(opts, abs_tol, rel_tol))
        except (cp.error.SolverError, ValueError) as exc:
            return SolverStatus.NUMERICAL_FAILURE, str(exc)
        return _STATUS_MAP.get(prob.status, SolverStatus.NUMERICAL_FAILURE), prob.status

    status, raw = attempt(opts.abs_tol, opts.rel_tol)
    if status is SolverStatus.NUMERICAL_FAILURE:
        status, raw = attempt(opts.retry_tol, opts.retry_tol)

    values = {}
    if status.ok:
        for name, (var, _) in problem.variables.items():
            values[name] = np.atleast_1d(np.asarray(var.value, dtype=float)) if var.value is not None else None
    objective = float(prob.value) if status.ok and prob.value is not None else math.nan
    stats = {"raw_status": raw}
    if prob.solver_stats is not None:
        stats["solve_time"] = prob.solver_stats.solve_time
        stats["num_iters"] = prob.solver_stats.num_iters
    return ConicSolution(status, objective, values, stats)


def assemble_lmi(aug: AugmentedSystem, scale: float = 1.0) -> ConicProblem:
    """Build the multiplier-augmented dissipation LMI as a conic program.

    ``scale`` multiplies C_a and D_a before forming the quadratic output
    terms (conditioning aid; the optimal t scales by ``scale**2``).
    Variables: ``P`` free symmetric of size n + n_p, ``S`` (PSD) and ``M``
    (nonnegative symmetric) of size n_p + n_w, and the scalar ``t``.
    """
    n, n_p, n_w = aug.n, aug.n_p, aug.n_w
    Aa, Ba = aug.A_a, aug.B_a
    Ca, Da = aug.C_a * scale, aug.D_a * scale
    m = n_p + n_w

    S = cp.Variable((m, m), symmetric=True, name="S")
    M = cp.Variable((m, m), symmetric=True, name="M")
    t = cp.Variable(name="t")
    variables = {"S": (S, "psd"), "M": (M, "nonneg_symmetric"), "t": (t, "scalar")}

    if n + n_p > 0:
        P = cp.Variable((n + n_p, n + n_p), symmetric=True, name="P")
        variables = {"P": (P, "free_symmetric"), **variables}
        off = P @ Ba + Ca.T @ Da
        block = cp.bmat([
            [P @ Aa + Aa.T @ P + Ca.T @ Ca, off],
            [off.T, Da.T @ Da - t * np.eye(n_w)],
        ])
    else:
        block = Da.T @ Da - t * np.eye(n_w)
    sel = np.vstack([np.zeros((n, m)), np.eye(m)])
    constraints = [
        block + sel @ (S + M) @ sel.T << 0,
        S >> 0,
        M >= 0,
        t >= 0,
    ]
    return ConicProblem(
        objective=t,
        variables=variables,
        constraints=constraints,
        description=f"multiplier LMI n={n} n_p={n_p} n_w={n_w} scale={scale!r}",
    )


@dataclass(frozen=True)
class UpperBoundResult:
    """One (alpha, degree) cell of the upper-bound computation.

    ``gamma`` is sqrt of the optimal t, de-scaled; ``objective_gap`` is the
    worst feasibility residual of the returned certificate (max LMI
    eigenvalue, S eigenvalue deficit, M entry deficit), measured in the
    conditioning-scaled frame the solver certified, so it is comparable to
    the solver tolerances regardless of the system's norm.  ``certificate``
    holds the de-scaled (P, S, M, t); residuals of the unscaled inequality
    are exactly ``objective_gap / scale**2``.
    """

    alpha: float
    degree: int
    gamma: float
    status: SolverStatus
    objective_gap: float = math.nan
    certificate: dict | None = None
    scale: float = 1.0


def certificate_residuals(aug: AugmentedSystem, certificate: dict) -> dict:
    """Feasibility residuals of a (P, S, M, t) certificate in the unscaled LMI.

    Returns ``lmi_max_eig`` (should be <= solver tolerance), ``s_min_eig``
    and ``m_min_entry`` (should be >= -tolerance).
    """
    P, S, M, t = (certificate[k] for k in ("P", "S", "M", "t"))
    n, m = aug.n, aug.n_p + aug.n_w
    tail = aug.D_a.T @ aug.D_a - float(t) * np.eye(aug.n_w)
    if aug.n + aug.n_p > 0:
        off = P @ aug.B_a + aug.C_a.T @ aug.D_a
        F = np.block([
            [P @ aug.A_a + aug.A_a.T @ P + aug.C_a.T @ aug.C_a, off],
            [off.T, tail],
        ])
    else:
        F = tail
    sel = np.vstack([np.zeros((n, m)), np.eye(m)])
    F = F + sel @ (S + M) @ sel.T
    return {
        "lmi_max_eig": float(np.linalg.eigvalsh(F).max()),
        "s_min_eig": float(np.linalg.eigvalsh(S).min()),
        "m_min_entry": float(M.min()),
    }


def upper_bound(
    sys: StateSpace,
    alpha: float,
    degree: int,
    opts: SolverOptions | None = None,
    l2_hint: float | None = None,
) -> UpperBoundResult:
    """Multiplier SDP upper bound for one filter configuration.

    ``degree = 0`` gives the filter-free bound (independent of ``alpha``).
    ``l2_hint`` skips the internal L2-norm solve used for scaling.
    """
    if not is_hurwitz(sys.A):
        raise UnstableSystem("upper bound requires a stable system")
    opts = opts or SolverOptions()
    l2 = l2_hint if l2_hint is not None else hinf_norm(sys).gain
    scale = 1.0 / max(1.0, l2)
    aug = augment(sys, build_filter(alpha, degree, sys.n_w))
    problem = assemble_lmi(aug, scale=scale)
    sol = solve_conic(problem, opts)
    if not sol.status.ok:
        return UpperBoundResult(alpha, degree, math.nan, sol.status)
    inv2 = 1.0 / (scale * scale)
    n_tot = aug.n + aug.n_p
    cert = {
        "P": sol.values["P"] * inv2 if n_tot else np.zeros((0, 0)),
        "S": sol.values["S"] * inv2,
        "M": sol.values["M"] * inv2,
        "t": float(sol.values["t"][0]) * inv2,
    }
    res = certificate_residuals(aug, cert)
    gap = max(res["lmi_max_eig"], -res["s_min_eig"], -res["m_min_entry"], 0.0)
    gamma = math.sqrt(max(cert["t"], 0.0))
    return UpperBoundResult(
        alpha, degree, gamma, sol.status, gap * scale * scale, cert, scale
    )


def sweep(
    sys: StateSpace,
    alphas,
    max_degree: int,
    opts: SolverOptions | None = None,
    l2_hint: float | None = None,
) -> list[UpperBoundResult]:
    """Upper bounds for every (alpha, degree) with degree in 0..max_degree.

    The degree-0 cell is solved once and replicated across alphas (it does
    not depend on the filter pole).  Failed cells are carried in the result
    list with their failure status; per-alpha slices are monotone
    non-increasing in the degree up to solver accuracy.
    """
    opts = opts or SolverOptions()
    l2 = l2_hint if l2_hint is not None else hinf_norm(sys).gain
    results: list[UpperBoundResult] = []
    base = None
    for alpha in alphas:
        for degree in range(0, max_degree + 1):
            if degree == 0:
                if base is None:
                    base = upper_bound(sys, alpha, 0, opts, l2_hint=l2)
                results.append(replace(base, alpha=alpha))
            else:
                results.append(upper_bound(sys, alpha, degree, opts, l2_hint=l2))
    return results


def best_upper(results) -> UpperBoundResult | None:
    """Cell with the least gamma among successful solves (None if all failed)."""
    ok = [r for r in results if r.status.ok and math.isfinite(r.gamma)]
    return min(ok, key=lambda r: r.gamma) if ok else None


def _basis_matrices(var, kind):
    """Yield (entry-label, value-array) basis elements spanning the variable."""
    if kind == "scalar":
        yield "", np.array(1.0)
        return
    shape = var.shape
    if kind == "vector" or len(shape) == 1:
        for i in range(shape[0]):
            e = np.zeros(shape)
            e[i] = 1.0
            yield f"[{i}]", e
        return
    d = shape[0]
    for i in range(d):
        for j in range(i, d):
            e = np.zeros((d, d))
            e[i, j] = 1.0
            e[j, i] = 1.0
            yield f"[{i},{j}]", e


def dump_problem(problem: ConicProblem, path) -> None:
    """Write the affine constraint data as plain-text sparse triplets.

    One line per nonzero coefficient: ``constraint-index row col
    variable-id coefficient``; constants use variable-id ``const``.
    Constraints are emitted in solver-normal form, stated in each header
    line: ``type=PSD`` rows assert expr >= 0 (negative-semidefinite inputs
    appear negated), ``type=Inequality`` rows assert expr <= 0,
    ``type=Equality`` rows assert expr == 0.  Intended for cross-checking
    assembled problems against external solvers; cost grows with (number of
    scalar variables) x (constraint evaluation), so use on moderate sizes.
    """
    saved = {name: var.value for name, (var, _) in problem.variables.items()}
    try:
        for var, _ in problem.variables.values():
            var.value = np.zeros(var.shape) if var.shape else 0.0
        lines = [f"# {problem.description}".rstrip()]
        for name, (var, kind) in problem.variables.items():
            lines.append(f"# variable {name} kind={kind} shape={var.shape}")
        consts = []
        for ci, con in enumerate(problem.constraints):
            expr = con.args[0] if len(con.args) == 1 else con.args[0] - con.args[1]
            consts.append(np.atleast_2d(np.asarray(expr.value, dtype=float)))
            lines.append(f"# constraint {ci} type={type(con).__name__} shape={expr.shape}")

        def emit(ci, mat, label):
            rows, cols = np.nonzero(np.abs(mat) > 0)
            for r, c in zip(rows, cols):
                if mat.shape[0] == mat.shape[1] and c < r and np.isclose(mat[c, r], mat[r, c]):
                    continue
                lines.append(f"{ci} {r} {c} {label} {float(mat[r, c])!r}")

        for ci, c0 in enumerate(consts):
            emit(ci, c0, "const")
        for name, (var, kind) in problem.variables.items():
            for suffix, basis in _basis_matrices(var, kind):
                var.value = basis if basis.shape == var.shape else float(basis)
                for ci, con in enumerate(problem.constraints):
                    expr = con.args[0] if len(con.args) == 1 else con.args[0] - con.args[1]
                    coef = np.atleast_2d(np.asarray(expr.value, dtype=float)) - consts[ci]
                    emit(ci, coef, f"{name}{suffix}")
                var.value = np.zeros(var.shape) if var.shape else 0.0
    finally:
        for name, (var, _) in problem.variables.items():
            var.value = saved[name]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
