"""FastAPI application exposing the bound computations as a JSON service.

Run with ``l2plus serve`` or ``uvicorn l2plus.service.app:app``.  Requests
are stateless and idempotent; long sweeps run synchronously, so size request
options to your HTTP timeout.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import (
    DimensionMismatch,
    InfeasibleProblem,
    L2PlusError,
    NonFiniteEntry,
    NumericalFailure,
    ParseError,
    UnstableSystem,
)
from . import handlers
from . import models as m

app = FastAPI(
    title="l2plus",
    version=__version__,
    description="Certified bounds on induced gains of LTI systems under nonnegative inputs.",
)

_BAD_REQUEST = (ParseError, DimensionMismatch, NonFiniteEntry, ValueError)
_UNPROCESSABLE = (UnstableSystem,)
_SOLVER = (NumericalFailure, InfeasibleProblem)


def _run(handler, request):
    try:
        return handler(request)
    except _BAD_REQUEST as exc:
        raise HTTPException(400, detail={"kind": type(exc).__name__, "message": str(exc)})
    except _UNPROCESSABLE as exc:
        raise HTTPException(422, detail={"kind": type(exc).__name__, "message": str(exc)})
    except _SOLVER as exc:
        raise HTTPException(502, detail={"kind": type(exc).__name__, "message": str(exc)})
    except L2PlusError as exc:
        raise HTTPException(422, detail={"kind": type(exc).__name__, "message": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/hinf", response_model=m.HinfResponse)
def hinf(request: m.HinfRequest):
    return _run(handlers.handle_hinf, request)


@app.post("/certify", response_model=m.CertifyResponse)
def certify(request: m.CertifyRequest):
    return _run(handlers.handle_certify, request)


@app.post("/diff", response_model=m.CertifyResponse)
def diff(request: m.DiffRequest):
    return _run(handlers.handle_diff, request)


@app.post("/upper", response_model=m.UpperResponse)
def upper(request: m.UpperRequest):
    return _run(handlers.handle_upper, request)


@app.post("/lower", response_model=m.LowerResponse)
def lower(request: m.LowerRequest):
    return _run(handlers.handle_lower, request)


@app.post("/matrix", response_model=m.MatrixResponse)
def matrix(request: m.MatrixRequest):
    return _run(handlers.handle_matrix, request)


@app.post("/uniform-demo", response_model=m.UniformDemoResponse)
def uniform_demo(request: m.UniformDemoRequest):
    return _run(handlers.handle_uniform_demo, request)


@app.post("/positivity", response_model=m.PositivityResponse)
def positivity(request: m.PositivityRequest):
    return _run(handlers.handle_positivity, request)
