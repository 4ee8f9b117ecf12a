"""Command-line client for the bound-computation service.

Every subcommand builds the same request model the HTTP API accepts and
either dispatches it in-process (default) or POSTs it to a running service
(``--server http://host:port``).  Exit codes: 0 success, 2 parse/input
error, 3 unstable system, 4 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    DimensionMismatch,
    InfeasibleProblem,
    L2PlusError,
    NonFiniteEntry,
    NumericalFailure,
    ParseError,
    UnstableSystem,
)
from .harmonic import write_table_csv
from .report import report_to_json
from .service import handlers
from .service import models as m

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSTABLE = 3
EXIT_SOLVER = 4

_PARSE_KINDS = {"ParseError", "DimensionMismatch", "NonFiniteEntry", "ValueError", "ValidationError"}
_UNSTABLE_KINDS = {"UnstableSystem"}
_SOLVER_KINDS = {"NumericalFailure", "InfeasibleProblem"}

_ENDPOINTS = {
    "hinf": ("/hinf", handlers.handle_hinf, m.HinfResponse),
    "certify": ("/certify", handlers.handle_certify, m.CertifyResponse),
    "diff": ("/diff", handlers.handle_diff, m.CertifyResponse),
    "upper": ("/upper", handlers.handle_upper, m.UpperResponse),
    "lower": ("/lower", handlers.handle_lower, m.LowerResponse),
    "matrix": ("/matrix", handlers.handle_matrix, m.MatrixResponse),
    "uniform-demo": ("/uniform-demo", handlers.handle_uniform_demo, m.UniformDemoResponse),
    "positivity": ("/positivity", handlers.handle_positivity, m.PositivityResponse),
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _exit_code_for(kind: str) -> int:
    if kind in _UNSTABLE_KINDS:
        return EXIT_UNSTABLE
    if kind in _SOLVER_KINDS:
        return EXIT_SOLVER
    return EXIT_PARSE


def dispatch(command: str, request, server: str | None):
    """Run a request locally or against a remote service."""
    path, handler, response_cls = _ENDPOINTS[command]
    if server is None:
        try:
            return handler(request)
        except (ParseError, DimensionMismatch, NonFiniteEntry, ValueError) as exc:
            raise CliError(EXIT_PARSE, str(exc))
        except UnstableSystem as exc:
            raise CliError(EXIT_UNSTABLE, str(exc))
        except (NumericalFailure, InfeasibleProblem) as exc:
            raise CliError(EXIT_SOLVER, str(exc))
        except L2PlusError as exc:
            raise CliError(EXIT_PARSE, str(exc))
    import httpx

    try:
        reply = httpx.post(server.rstrip("/") + path, json=request.model_dump(), timeout=None)
    except httpx.HTTPError as exc:
        raise CliError(EXIT_SOLVER, f"service unreachable: {exc}")
    if reply.status_code != 200:
        try:
            detail = reply.json().get("detail", {})
        except json.JSONDecodeError:
            detail = {}
        kind = detail.get("kind", "") if isinstance(detail, dict) else ""
        message = detail.get("message", reply.text) if isinstance(detail, dict) else str(detail)
        raise CliError(_exit_code_for(kind), f"{kind or reply.status_code}: {message}")
    return response_cls.model_validate(reply.json())


def _load_system_model(path: str) -> m.SystemModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"invalid JSON in {path}: {exc}")
    if not isinstance(data, dict) or "D" not in data:
        raise CliError(EXIT_PARSE, f"{path}: expected an object with A, B, C, D")
    try:
        return m.SystemModel.model_validate(data)
    except Exception as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}")


def _options_from(args) -> m.BoundOptions:
    alphas = [float(tok) for tok in args.alpha.split(",") if tok.strip()]
    return m.BoundOptions(
        alphas=alphas,
        max_degree=args.max_degree,
        max_harmonics=args.max_harmonics,
        solver_tol=args.solver_tol,
        grid_per_decade=args.grid_per_decade,
        seed=args.seed,
    )


def _write_out(args, response) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report_to_json(response.model_dump()))


def _fmt(x, digits=4):
    if x is None:
        return "-"
    return f"{x:.{digits}f}"


def _print_certify(resp: m.CertifyResponse) -> None:
    name = resp.system_name or "system"
    print(f"{name} (n={resp.n}, n_w={resp.n_w}, n_z={resp.n_z})")
    omega = "inf" if resp.peak.omega is None else _fmt(resp.peak.omega)
    print(f"  l2 norm        {_fmt(resp.l2_norm)}  (peak {resp.peak.kind} @ omega={omega})")
    cell = ""
    if resp.best_upper_alpha is not None:
        cell = f"  (alpha={resp.best_upper_alpha:g}, N={resp.best_upper_degree})"
    print(f"  best upper     {_fmt(resp.best_upper)}{cell}")
    print(f"  best lower     {_fmt(resp.best_lower)}  (order {resp.best_lower_order})")
    print(f"  uniform floor  {_fmt(resp.uniform_floor)}")
    gap = "-" if resp.relative_gap is None else f"{100 * resp.relative_gap:.2f}%"
    print(f"  relative gap   {gap}")


def _certify_csv(path, resp: m.CertifyResponse) -> None:
    rows = [
        ("upper", r.alpha, r.degree, r.gamma if r.gamma is not None else float("nan"), r.status)
        for r in resp.upper_bounds
    ]
    rows += [
        ("lower", "", r.order, r.bound, "" if r.omega is None else r.omega)
        for r in resp.lower_bounds
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        import csv as _csv

        writer = _csv.writer(fh)
        writer.writerow(["table", "alpha", "degree_or_order", "value", "status_or_omega"])
        writer.writerows(rows)


def _run_command(args) -> int:
    cmd = args.command
    if cmd == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    if cmd == "hinf":
        request = m.HinfRequest(system=_load_system_model(args.system), rel_tol=args.rel_tol)
        resp = dispatch(cmd, request, args.server)
        omega = "inf" if resp.peak.omega is None else _fmt(resp.peak.omega)
        print(f"l2_norm = {_fmt(resp.l2_norm)} @ omega* = {omega} ({resp.peak.kind})")
        _write_out(args, resp)
    elif cmd in ("certify", "diff"):
        options = _options_from(args)
        if cmd == "certify":
            request = m.CertifyRequest(system=_load_system_model(args.system), options=options)
        else:
            request = m.DiffRequest(
                system1=_load_system_model(args.system1),
                system2=_load_system_model(args.system2),
                options=options,
            )
        resp = dispatch(cmd, request, args.server)
        _print_certify(resp)
        _write_out(args, resp)
        if args.csv:
            _certify_csv(args.csv, resp)
        if resp.best_upper is None:
            return EXIT_SOLVER
    elif cmd == "upper":
        request = m.UpperRequest(system=_load_system_model(args.system), options=_options_from(args))
        resp = dispatch(cmd, request, args.server)
        for r in resp.upper_bounds:
            print(f"alpha={r.alpha:g} N={r.degree}: gamma={_fmt(r.gamma)} [{r.status}]")
        print(f"best upper = {_fmt(resp.best_upper)} (l2 norm {_fmt(resp.l2_norm)})")
        _write_out(args, resp)
        if args.csv:
            write_table_csv(
                args.csv,
                [
                    (r.alpha, r.degree, r.gamma if r.gamma is not None else float("nan"))
                    for r in resp.upper_bounds
                ],
                ("alpha", "degree", "gamma"),
            )
        if resp.best_upper is None:
            return EXIT_SOLVER
    elif cmd == "lower":
        request = m.LowerRequest(system=_load_system_model(args.system), options=_options_from(args))
        resp = dispatch(cmd, request, args.server)
        for r in resp.lower_bounds:
            omega = "inf" if r.omega is None else f"{r.omega:.6g}"
            print(f"N={r.order}: bound={_fmt(r.bound)} @ omega={omega}")
        print(f"best lower = {_fmt(resp.best_lower)} (uniform floor {_fmt(resp.uniform_floor)})")
        _write_out(args, resp)
        if args.csv:
            write_table_csv(
                args.csv,
                [
                    (r.order, r.bound, r.omega if r.omega is not None else float("inf"))
                    for r in resp.lower_bounds
                ],
                ("order", "bound", "omega"),
            )
    elif cmd == "matrix":
        request = m.MatrixRequest(
            matrix=_parse_matrix(args.matrix), bruteforce=not args.no_bruteforce, seed=args.seed
        )
        resp = dispatch(cmd, request, args.server)
        brute = "-" if resp.bruteforce is None else _fmt(resp.bruteforce, 6)
        print(
            f"sigma_max = {_fmt(resp.sigma_max, 6)}  lower_bound = {_fmt(resp.lower_bound, 6)}"
            f"  bruteforce = {brute}"
        )
        _write_out(args, resp)
    elif cmd == "uniform-demo":
        request = m.UniformDemoRequest(p=args.p, delay=args.delay, dt=args.dt, horizon=args.horizon)
        resp = dispatch(cmd, request, args.server)
        print(
            f"p={resp.p} delay={resp.delay:g}: ratio = {resp.ratio:.4f} "
            f"(expected {resp.expected_ratio:.4f}; signed gain {resp.achieved_norm:.4f}, "
            f"nonnegative gain {resp.achieved_plus_norm:.4f})"
        )
        _write_out(args, resp)
    elif cmd == "positivity":
        request = m.PositivityRequest(
            system=_load_system_model(args.system), horizon=args.horizon, step=args.step
        )
        resp = dispatch(cmd, request, args.server)
        ext = "unknown (unstable)" if resp.externally_positive_sampled is None else str(
            resp.externally_positive_sampled
        ).lower()
        print(f"stable: {str(resp.stable).lower()}")
        print(f"metzler A: {str(resp.metzler).lower()}")
        print(f"internally positive: {str(resp.internally_positive).lower()}")
        print(f"externally positive (sampled): {ext}")
        _write_out(args, resp)
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(EXIT_PARSE, f"unknown command {cmd}")
    return EXIT_OK


def _parse_matrix(text: str):
    import os

    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            data = data.get("matrix", data.get("M"))
        return data
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"matrix must be a file path or inline JSON: {exc}")


def _add_bound_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", default="-0.8,-1.0,-1.2", help="comma-separated filter poles")
    p.add_argument("--max-degree", type=int, default=15, help="largest filter degree")
    p.add_argument("--max-harmonics", type=int, default=200, help="lower-bound truncation order")
    p.add_argument("--solver-tol", type=float, default=1e-8)
    p.add_argument("--grid-per-decade", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="write result tables as CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l2plus",
        description="Bounds on induced gains of LTI systems under nonnegative inputs",
    )
    parser.add_argument("--server", default=None, help="base URL of a running l2plus service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hinf", help="L2 norm and peak frequency")
    p.add_argument("system", help="system JSON file")
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--out", default=None)

    p = sub.add_parser("certify", help="two-sided gain-plus certification")
    p.add_argument("system")
    _add_bound_flags(p)
    p.add_argument("--out", default=None, help="write the full JSON report")

    p = sub.add_parser("upper", help="multiplier SDP upper bounds only")
    p.add_argument("system")
    _add_bound_flags(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("lower", help="harmonic lower bounds only")
    p.add_argument("system")
    _add_bound_flags(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("diff", help="certify the error system G1 - G2")
    p.add_argument("system1")
    p.add_argument("system2")
    _add_bound_flags(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("matrix", help="static-gain bounds for a matrix")
    p.add_argument("matrix", help="JSON file or inline JSON, e.g. '[[1,-1]]'")
    p.add_argument("--no-bruteforce", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("uniform-demo", help="delay-system worst-case gain ratios")
    p.add_argument("--p", choices=("1", "2", "inf"), default="2")
    p.add_argument("--delay", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("positivity", help="positivity checks for a system")
    p.add_argument("system")
    p.add_argument("--horizon", type=float, default=50.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run_command(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
