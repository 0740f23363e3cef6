"""Multi-start quasi-Newton maximisation of the cut fraction.

Each start runs a bounded L-BFGS-B ascent with central-difference
gradients; the reported best is re-evaluated through the engine so the
returned value always matches the returned parameters.  Runs are
deterministic given (seed, config); ties go to the lowest start index.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .engine import ParamSet, cut_fraction, sharing_for
from .errors import SpecError
from .graphs import AdditiveProductSpec


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 50
    gamma_box: tuple = (0.0, np.pi / 2)
    beta_box: tuple = (0.0, np.pi / 2)
    tol: float = 1e-8
    maxiter: int = 500
    fd_step: float = 1e-6
    seed: int = 0
    warm_start: ParamSet | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.starts < 1:
            raise SpecError("starts must be >= 1")
        if self.gamma_box[0] >= self.gamma_box[1] and self.gamma_box != (0.0, 0.0):
            raise SpecError("empty gamma box")


@dataclass
class OptimizeResult:
    params: ParamSet
    value: float
    log: list = field(default_factory=list)


def _objective(graph, p, sharing, n_classes, engine):
    def fun(x):
        ps = ParamSet.from_vector(x, p, n_classes, sharing)
        return cut_fraction(graph, p, ps, engine=engine)

    return fun


def _ascend(fun, x0, bounds, cfg):
    h = cfg.fd_step

    def neg(x):
        return -fun(x)

    def jac(x):
        g = np.empty_like(x)
        for i in range(len(x)):
            e = np.zeros_like(x)
            e[i] = h
            g[i] = (neg(x + e) - neg(x - e)) / (2 * h)
        return g

    res = minimize(
        neg,
        x0,
        method="L-BFGS-B",
        jac=jac,
        bounds=bounds,
        options={"maxiter": cfg.maxiter, "ftol": cfg.tol, "gtol": 1e-9},
    )
    return res.x, float(fun(res.x)), int(res.nit)


def _run_start(args):
    graph, p, sharing, n_classes, engine, x0, cfg = args
    fun = _objective(graph, p, sharing, n_classes, engine)
    dim_g = p * n_classes
    bounds = [cfg.gamma_box] * dim_g + [cfg.beta_box] * p
    x, v, nit = _ascend(fun, np.asarray(x0), bounds, cfg)
    return x, v, nit


def warm_start_params(params):
    """Extend a depth-p optimum to a depth-(p+1) starting point by linear
    extrapolation of the last two layers (duplication when p = 1)."""
    g, b = params.gammas, params.betas
    if params.p == 1:
        g_new, b_new = g[-1], b[-1]
    else:
        g_new = 2 * g[-1] - g[-2]
        b_new = 2 * b[-1] - b[-2]
    return ParamSet(
        gammas=np.vstack([g, g_new]),
        betas=np.append(b, b_new),
        sharing=params.sharing,
    )


def _seed_points(cfg, p, n_classes, rng):
    dim_g = p * n_classes
    lo = np.array([cfg.gamma_box[0]] * dim_g + [cfg.beta_box[0]] * p)
    hi = np.array([cfg.gamma_box[1]] * dim_g + [cfg.beta_box[1]] * p)
    points = [lo + (hi - lo) * rng.random(dim_g + p) for _ in range(cfg.starts)]
    if cfg.warm_start is not None:
        ws = cfg.warm_start
        if ws.p == p - 1:
            extrapolated = warm_start_params(ws)
            identity = ParamSet(
                gammas=np.vstack([ws.gammas, np.zeros((1, ws.n_classes))]),
                betas=np.append(ws.betas, 0.0),
                sharing=ws.sharing,
            )
            extra = [extrapolated.as_vector(), identity.as_vector()]
        elif ws.p == p:
            extra = [ws.as_vector()]
        else:
            raise SpecError(f"warm start depth {ws.p} does not fit p={p}")
        points.extend(np.clip(x, lo, hi) for x in extra)
    return points


def optimize(graph, p, mode="ma", config=None):
    """Maximise the cut fraction over (gammas, betas).

    ``graph`` is an :class:`AdditiveProductSpec` (iterative engine) or a
    tiling family name (contraction engine); ``mode`` is "qaoa" or "ma".
    """
    cfg = config or OptimizerConfig()
    sharing, n_classes = sharing_for(graph, mode)
    engine = "iterative" if isinstance(graph, AdditiveProductSpec) else "oracle"
    rng = np.random.default_rng(cfg.seed)
    points = _seed_points(cfg, p, n_classes, rng)
    jobs = [(graph, p, sharing, n_classes, engine, x0, cfg) for x0 in points]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_start, jobs))
    else:
        results = [_run_start(j) for j in jobs]
    log = []
    best = None
    for i, ((x, v, nit), x0) in enumerate(zip(results, points)):
        log.append(
            {"start": i, "iterations": nit, "value": v, "params": list(x)}
        )
        if best is None or v > best[1]:
            best = (x, v, i)
    x, v, _ = best
    params = ParamSet.from_vector(x, p, n_classes, sharing)
    # report the re-evaluated objective so value and params always agree
    value = cut_fraction(graph, p, params, engine=engine)
    return OptimizeResult(params=params, value=value, log=log)
