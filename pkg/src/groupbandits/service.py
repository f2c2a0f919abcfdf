"""HTTP service exposing the library: instance generation, gap reports,
single algorithm runs, sweeps, and bound calculators.

The service is stateless — instances travel inside request bodies — so the
command-line client can talk to an in-process app or a remote server
interchangeably. Group indices are 1-based in responses; arrays keep their
natural positional order.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .baselines import run_age, run_ge, run_tel, run_unis
from .bounds import (eecb_upper_bound, gpsi_lower_bound, lbgi_lower_bound,
                     te_upper_bound)
from .core import gpsi_gaps, lbgi_gaps
from .environment import (RngStream, gen_hard_gpsi, gen_random_gpsi,
                          gen_random_lbgi, instance_from_dict, instance_to_dict)
from .errors import (DimensionMismatchError, GenerationBudgetError,
                     NonUniqueOptimumError, RoundBudgetError)
from .gpsi import DEFAULT_MAX_ROUNDS, run_te
from .harness import ExperimentConfig, records_to_csv, run_sweep
from .lbgi import run_eecb

app = FastAPI(title="groupbandits", version=__version__)


class GenerateRequest(BaseModel):
    generator: str                       # random-gpsi | random-lbgi | hard-gpsi
    n_groups: int = Field(ge=1)
    n_arms: int = Field(ge=1)
    n_dims: int = Field(ge=1)
    seed: int = 0
    epsilon: float = 0.05
    pareto_count: int = 1
    weights: Optional[list] = None
    delta_min: float = 0.05
    a_values: Optional[list] = None      # hard-instance efficiency levels
    label: Optional[str] = None


class GapsRequest(BaseModel):
    instance: dict
    epsilon: Optional[float] = None      # Pareto report when set
    weights: Optional[list] = None       # linear report when set


class RunRequest(BaseModel):
    instance: dict
    algorithm: str                       # te | age | ge | unis | eecb | tel
    delta: float = 0.1
    epsilon: float = 0.05
    weights: Optional[list] = None
    beta_scale: float = 1.0
    seed: int = 0
    stream: int = 0
    max_rounds: int = DEFAULT_MAX_ROUNDS
    trace: bool = False


class SweepRequest(BaseModel):
    config: dict
    include_records: bool = True


class BoundsRequest(BaseModel):
    instance: dict
    kind: str                            # te-upper | gpsi-lower | eecb-upper | lbgi-lower
    delta: float = 0.1
    epsilon: float = 0.05
    weights: Optional[list] = None
    constant: float = 1.0
    refined: bool = False


def _json_safe(x):
    """Recursively convert numpy containers and non-finite floats for JSON."""
    if isinstance(x, np.ndarray):
        return _json_safe(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return _json_safe(float(x))
    if isinstance(x, float):
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_json_safe(v) for v in items]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _one_based(groups) -> list:
    return sorted(int(g) + 1 for g in groups)


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError):
    kind = type(exc).__name__
    return JSONResponse(status_code=422, content={"error": kind, "message": str(exc)})


@app.exception_handler(GenerationBudgetError)
async def _generation_error(request: Request, exc: GenerationBudgetError):
    return JSONResponse(status_code=409, content={
        "error": "GenerationBudgetError", "message": str(exc),
        "attempts": exc.attempts, "diagnostics": _json_safe(exc.diagnostics)})


@app.exception_handler(RoundBudgetError)
async def _budget_error(request: Request, exc: RoundBudgetError):
    return JSONResponse(status_code=409, content={
        "error": "RoundBudgetError", "message": str(exc)})


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/instances/generate")
def generate(req: GenerateRequest):
    rng = RngStream(req.seed, 0)
    label_kw = {"label": req.label} if req.label is not None else {}
    if req.generator == "random-gpsi":
        inst = gen_random_gpsi(req.n_groups, req.n_arms, req.n_dims,
                               req.pareto_count, req.epsilon, rng, **label_kw)
    elif req.generator == "random-lbgi":
        if req.weights is None:
            raise DimensionMismatchError("random-lbgi requires weights")
        inst = gen_random_lbgi(req.n_groups, req.n_arms, req.n_dims,
                               np.asarray(req.weights, dtype=float),
                               req.delta_min, rng, **label_kw)
    elif req.generator == "hard-gpsi":
        a_kw = {"a_params": tuple(req.a_values)} if req.a_values is not None else {}
        inst = gen_hard_gpsi(req.n_groups, req.n_arms, req.n_dims, req.epsilon,
                             rng=rng, **a_kw, **label_kw)
    else:
        raise ValueError(f"unknown generator: {req.generator!r}")
    return {"instance": instance_to_dict(inst)}


@app.post("/gaps")
def gaps(req: GapsRequest):
    inst = instance_from_dict(req.instance)
    if req.weights is not None:
        report = lbgi_gaps(inst.tensor, np.asarray(req.weights, dtype=float))
        return {"problem": "linear", "best_group": report.best_group + 1,
                "group_gaps": _json_safe(report.group_gaps),
                "arm_alphas": _json_safe(report.arm_alphas),
                "arm_gaps": _json_safe(report.arm_gaps),
                "refined_arm_gaps": _json_safe(report.refined_arm_gaps)}
    epsilon = req.epsilon if req.epsilon is not None else 0.05
    report = gpsi_gaps(inst.tensor, epsilon)
    return {"problem": "pareto", "epsilon": epsilon,
            "pareto_set": _one_based(report.pareto),
            "group_gaps": _json_safe(report.group_gaps),
            "plus_gaps": {str(int(k) + 1): _json_safe(v)
                          for k, v in report.plus_gaps.items()},
            "minus_gaps": {str(int(k) + 1): _json_safe(v)
                           for k, v in report.minus_gaps.items()},
            "arm_gaps": _json_safe(report.arm_gaps),
            "effective_gaps": _json_safe(report.effective_gaps)}


_GPSI_RUNNERS = {"te": run_te, "age": run_age, "ge": run_ge}


@app.post("/run")
def run(req: RunRequest):
    inst = instance_from_dict(req.instance)
    rng = RngStream(req.seed, req.stream)
    algo = req.algorithm
    if algo in _GPSI_RUNNERS:
        res = _GPSI_RUNNERS[algo](inst, req.delta, req.epsilon, req.beta_scale,
                                  rng, req.max_rounds, trace=req.trace)
        recommended = _one_based(res.recommended)
    elif algo == "unis":
        res = run_unis(inst, req.delta, req.epsilon, rng)
        recommended = _one_based(res.recommended)
    elif algo in ("eecb", "tel"):
        if req.weights is None:
            raise DimensionMismatchError(f"{algo} requires weights")
        w = np.asarray(req.weights, dtype=float)
        if algo == "eecb":
            res = run_eecb(inst, w, req.delta, req.beta_scale, rng,
                           req.max_rounds, trace=req.trace)
        else:
            res = run_tel(inst, w, req.delta, req.beta_scale, rng,
                          req.max_rounds, trace=req.trace)
        recommended = [res.recommended + 1]
    else:
        raise ValueError(f"unknown algorithm: {algo!r}")
    out = {"algorithm": algo, "recommended": recommended,
           "total_pulls": int(res.total_pulls), "rounds": int(res.rounds),
           "per_arm_pulls": _json_safe(res.per_arm_pulls),
           "efficiency_estimates": _json_safe(res.efficiency_estimates)}
    if req.trace:
        out["trace"] = _json_safe(res.trace)
    return out


@app.post("/sweep")
def sweep(req: SweepRequest):
    config = ExperimentConfig.from_dict(req.config)
    records, summary = run_sweep(config)
    out = {"summary": summary, "csv": records_to_csv(records)}
    if req.include_records:
        out["records"] = [_json_safe(r.__dict__) for r in records]
    return out


@app.post("/bounds")
def bounds(req: BoundsRequest):
    inst = instance_from_dict(req.instance)
    t = inst.tensor
    if req.kind == "te-upper":
        report = te_upper_bound(t, req.epsilon, req.delta, req.constant)
    elif req.kind == "gpsi-lower":
        report = gpsi_lower_bound(t, req.epsilon, req.delta)
    elif req.kind in ("eecb-upper", "lbgi-lower"):
        if req.weights is None:
            raise DimensionMismatchError(f"{req.kind} requires weights")
        w = np.asarray(req.weights, dtype=float)
        if req.kind == "eecb-upper":
            report = eecb_upper_bound(t, w, req.delta, req.constant, req.refined)
        else:
            report = lbgi_lower_bound(t, w, req.delta)
    else:
        raise ValueError(f"unknown bound kind: {req.kind!r}")
    out = _json_safe(report.as_dict())
    out["group_terms"] = {str(int(k) + 1): v
                          for k, v in out["group_terms"].items()}
    out["kind"] = req.kind
    return out
