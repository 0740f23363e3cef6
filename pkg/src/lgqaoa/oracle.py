"""Exact, assumption-free <Z_L Z_R> oracles on finite lightcone subgraphs.

Two independent routes: a layer-by-layer statevector simulation of the
circuit restricted to the subgraph, and a configuration-basis sum evaluated
by vertex elimination.  They agree to machine precision on any subgraph and
validate the iterative engine; the contraction route is also the production
evaluator for tiling graphs, whose lightcones exceed no structural
assumption of the additive-product recursion.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._kernels import get_backend
from .contraction import contract, elimination_order
from .engine import (
    EngineContext,
    f_table,
    gamma_vector,
    phase_matrix,
    z0_signs,
)
from .errors import NonRealResult, TooLarge
from .graphs import (
    build_lightcone,
    enumerate_edge_orbits,
    lightcone_fingerprint,
    lightcones_match,
)

STATEVECTOR_CAP = 26


def _edge_sign(n, u, v):
    idx = np.arange(1 << n)
    su = 1 - 2 * ((idx >> u) & 1)
    sv = 1 - 2 * ((idx >> v) & 1)
    return (su * sv).astype(np.int8)


@lru_cache(maxsize=8)
def _popcount(n):
    idx = np.arange(1 << n, dtype=np.uint64)
    out = np.zeros(1 << n, dtype=np.int32)
    for q in range(n):
        out += ((idx >> np.uint64(q)) & np.uint64(1)).astype(np.int32)
    return out


def _apply_mixer(state, beta, n):
    # e^{-i beta sum X} = H^n diag(e^{-i beta (n - 2 popcount)}) H^n / 2^n
    fwht = get_backend().fwht
    fwht(state, n)
    state *= np.exp(-1j * beta * (n - 2 * _popcount(n))) / (1 << n)
    fwht(state, n)
    return state


@lru_cache(maxsize=8)
def _class_signs(sub, sharing):
    """Accumulated ZZ sign of every edge, grouped by sharing class."""
    n = sub.n_vertices
    out = {}
    for u, v, cat in sub.edges:
        k = sharing[cat]
        out[k] = out.get(k, 0) + _edge_sign(n, u, v).astype(np.int32)
    return out


def statevector_expectation(sub, params, cap=STATEVECTOR_CAP):
    """Simulate the restricted circuit on 2^n amplitudes and read off
    <Z_L Z_R> for the root edge (vertices 0 and 1)."""
    n = sub.n_vertices
    if n > cap:
        raise TooLarge(f"{n} qubits exceeds the statevector cap {cap}")
    p = params.p
    class_signs = _class_signs(sub, params.sharing)
    state = np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)
    for i in range(p):
        phase = 0.0
        for k, signs in class_signs.items():
            phase = phase + params.gammas[i, k] * signs
        state *= np.exp(1j * phase)
        _apply_mixer(state, params.betas[i], n)
    prob = np.abs(state) ** 2
    return float(np.sum(prob * _edge_sign(n, 0, 1)))


def _vertex_tensors(sub, params):
    f = f_table(params.betas)
    s0 = z0_signs(params.p)
    pmats = {}
    tensors = []
    for i in range(sub.n_vertices):
        w = f * s0 if i < 2 else f
        tensors.append(((i,), w))
    for u, v, cat in sub.edges:
        k = params.sharing[cat]
        if k not in pmats:
            pmats[k] = phase_matrix(gamma_vector(params.gammas[:, k], params.p))
        tensors.append(((u, v), pmats[k]))
    return tensors


def contraction_expectation(sub, params, order=None, budget_entries=1 << 26):
    """Configuration-basis sum for <Z_L Z_R>, eliminated vertex by vertex."""
    val = contract(
        _vertex_tensors(sub, params), order=order, budget_entries=budget_entries
    )
    if abs(val.imag) > 1e-6:
        raise NonRealResult(f"imaginary residue {val.imag:.3e}")
    return min(1.0, max(-1.0, val.real))


def subgraph_elimination_order(sub):
    """Min-degree (min-fill tie break) vertex ordering with its width."""
    adj = {i: set() for i in range(sub.n_vertices)}
    for u, v, _ in sub.edges:
        adj[u].add(v)
        adj[v].add(u)
    return elimination_order(adj)


def _dedupe_orbit_lightcones(pairs, class_of_category):
    """Group (orbit, lightcone) pairs with matching rooted structure,
    summing their weights.  Fingerprints are verified exactly."""
    groups = []
    for orbit, sub in pairs:
        fp = lightcone_fingerprint(sub, class_of_category)
        for g in groups:
            if g["fp"] == fp and lightcones_match(g["sub"], sub, class_of_category):
                g["weight"] += orbit.weight
                break
        else:
            groups.append({"fp": fp, "sub": sub, "weight": orbit.weight})
    return [(g["weight"], g["sub"]) for g in groups]


def spec_orbit_zz(
    spec,
    p,
    params,
    method="contraction",
    dedupe=True,
    cap=STATEVECTOR_CAP,
    budget_entries=1 << 26,
):
    """(weight, <ZZ>) per distinct orbit lightcone of an additive product."""
    pairs = [
        (orbit, build_lightcone(spec, orbit, p))
        for orbit in enumerate_edge_orbits(spec)
    ]
    return _evaluate_pairs(pairs, params, method, dedupe, cap, budget_entries)


def tiling_orbit_zz(
    family,
    p,
    params,
    method="contraction",
    dedupe=False,
    cap=STATEVECTOR_CAP,
    budget_entries=1 << 26,
):
    """(weight, <ZZ>) per edge type of a tiling family."""
    from .tilings import tiling_orbits_and_lightcones

    pairs = tiling_orbits_and_lightcones(family, p)
    return _evaluate_pairs(pairs, params, method, dedupe, cap, budget_entries)


def _evaluate_pairs(pairs, params, method, dedupe, cap, budget_entries):
    if dedupe:
        weighted = _dedupe_orbit_lightcones(
            pairs, class_of_category=lambda c: params.sharing[c]
        )
    else:
        weighted = [(orbit.weight, sub) for orbit, sub in pairs]
    out = []
    for weight, sub in weighted:
        if method == "statevector":
            zz = statevector_expectation(sub, params, cap=cap)
        else:
            zz = contraction_expectation(sub, params, budget_entries=budget_entries)
        out.append((weight, zz))
    return out


def max_engine_oracle_gap(spec, p, draws, seed, mode="ma", cap=STATEVECTOR_CAP):
    """Largest |iterative - oracle| discrepancy over random parameter draws,
    checking both oracle routes on every orbit lightcone.

    Orbits with identical class-labelled lightcones share one oracle value
    (the engine is still evaluated per orbit, so the check covers them all).
    """
    from .engine import ParamSet, sharing_for

    rng = np.random.default_rng(seed)
    sharing, m = sharing_for(spec, mode)
    orbits = enumerate_edge_orbits(spec)
    cones = [build_lightcone(spec, o, p) for o in orbits]
    class_of = lambda c: sharing[c]
    group_of = []
    reps = []
    for sub in cones:
        fp = lightcone_fingerprint(sub, class_of)
        for gi, (rfp, rsub) in enumerate(reps):
            if rfp == fp and lightcones_match(rsub, sub, class_of):
                group_of.append(gi)
                break
        else:
            group_of.append(len(reps))
            reps.append((fp, sub))
    worst = 0.0
    for _ in range(draws):
        params = ParamSet(
            gammas=rng.uniform(0, 2 * np.pi, size=(p, m)),
            betas=rng.uniform(0, 2 * np.pi, size=p),
            sharing=sharing,
        )
        ctx = EngineContext(spec, p, params)
        zz_oracle = []
        for _, sub in reps:
            zz_c = contraction_expectation(sub, params)
            if sub.n_vertices <= cap:
                zz_s = statevector_expectation(sub, params, cap=cap)
                worst = max(worst, abs(zz_c - zz_s))
            zz_oracle.append(zz_c)
        for orbit, gi in zip(orbits, group_of):
            worst = max(worst, abs(ctx.edge_zz(orbit) - zz_oracle[gi]))
    return worst
