"""Classical k-local MaxCut baselines evaluated by lightcone Monte Carlo.

A k-local algorithm's cut probability on one edge orbit depends only on the
radius-k neighbourhood of the edge, so sampling on a finite lightcone gives
the exact infinite-graph expectation without boundary bias.  Two families
are implemented: the synchronous threshold dynamics (flip a spin when at
least tau of its neighbours agree with it) and the Gaussian sign-sum
algorithm of Barak and Marwaha in four coefficient variants.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from ._kernels import get_backend
from .errors import BadRange, RadiusTooSmall, SpecError
from .graphs import AdditiveProductSpec, LocalSubgraph, build_lightcone, enumerate_edge_orbits
from .oracle import _dedupe_orbit_lightcones

_SPIN_BATCH = 1 << 14
_GAUSS_BATCH = 1 << 15


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int

    def __str__(self):
        return f"{self.value:.4f} +- {self.stderr:.4f} (n={self.samples})"


@dataclass(frozen=True)
class ThresholdConfig:
    thresholds: tuple
    samples: int = 10**6
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(int(t) for t in self.thresholds))
        if len(self.thresholds) < 1 or self.samples < 1:
            raise SpecError("need at least one round and one sample")

    @property
    def steps(self):
        return len(self.thresholds)


BM_SCHEMES = ("para1", "para2", "para3", "para4")


@dataclass(frozen=True)
class BMConfig:
    k: int
    scheme: str = "para1"
    neighbor_class: int = 0  # which incident-edge class picks v for para3/4
    samples: int = 10**7
    seed: int = 0
    D: int | None = None  # para1 branching constant; default: endpoint degree
    para2_literal: bool = False  # normalize by the distance-k shell only

    def __post_init__(self):
        if self.k < 1:
            raise SpecError("k must be >= 1")
        if self.scheme not in BM_SCHEMES:
            raise SpecError(f"scheme must be one of {BM_SCHEMES}")
        if self.D is not None and self.D < 2:
            raise SpecError("para1 needs D >= 2")


def _binom_estimate(hits, samples):
    p = hits / samples
    return Estimate(p, math.sqrt(max(p * (1 - p), 0.0) / samples), samples)


def lightcone_arrays(sub):
    """CSR adjacency plus distance array, ready for the sampling kernels."""
    n = sub.n_vertices
    adj = sub.adjacency()
    indptr = np.zeros(n + 1, dtype=np.int32)
    for i, nbrs in enumerate(adj):
        indptr[i + 1] = indptr[i] + len(nbrs)
    indices = np.fromiter(
        (w for nbrs in adj for w in nbrs), dtype=np.int32, count=indptr[-1]
    )
    dist = np.asarray(sub.dist, dtype=np.int32)
    return indptr, indices, dist


# ---------------------------------------------------------------------------
# threshold algorithm


def threshold_cut_probability(sub, cfg, backend="auto"):
    """Probability that the root edge is cut after the threshold rounds.

    Round i updates only vertices at distance <= steps - i from the root
    edge; those updates are exact because everything a vertex can still
    influence through the remaining rounds lies inside the lightcone.
    """
    if sub.radius < cfg.steps:
        raise RadiusTooSmall(f"radius {sub.radius} < steps {cfg.steps}")
    kern = get_backend(backend)
    indptr, indices, dist = lightcone_arrays(sub)
    taus = np.asarray(cfg.thresholds, dtype=np.int32)
    rng = np.random.default_rng(cfg.seed)
    n = sub.n_vertices
    cut = 0
    done = 0
    while done < cfg.samples:
        b = min(_SPIN_BATCH, cfg.samples - done)
        spins = (2 * rng.integers(0, 2, size=(b, n), dtype=np.int8) - 1).astype(
            np.int8
        )
        cut += kern.threshold_rounds(spins, indptr, indices, dist, taus)
        done += b
    return _binom_estimate(cut, cfg.samples)


def threshold_analytic(d, tau):
    """Exact 1-step cut fraction on a d-regular triangle-free graph:
    1/2 + 4^(1-d) C(d-1, tau-1) sum_{i=d-tau+1}^{tau-1} C(d-1, i)."""
    if d < 2 or tau < d / 2 or tau > d:
        raise BadRange(f"need d >= 2 and d/2 <= tau <= d, got d={d}, tau={tau}")
    acc = sum(math.comb(d - 1, i) for i in range(d - tau + 1, tau))
    return Fraction(1, 2) + Fraction(math.comb(d - 1, tau - 1) * acc, 4 ** (d - 1))


def regular_tree_lightcone(d, radius):
    """Synthetic radius-r neighbourhood of an edge in the infinite d-regular
    tree; used to cross-check the Monte Carlo against the closed form."""
    edges = [(0, 1, 0)]
    dist = [0, 0]
    frontier = [0, 1]
    nxt = 2
    for r in range(1, radius + 1):
        new = []
        for u in frontier:
            for _ in range(d - 1):
                edges.append((u, nxt, 0))
                dist.append(r)
                new.append(nxt)
                nxt += 1
        frontier = new
    return LocalSubgraph(
        radius=radius,
        edges=tuple(edges),
        dist=tuple(dist),
        keys=tuple(range(nxt)),
        root_category=0,
    )


@dataclass
class ThresholdSearch:
    best: tuple
    estimate: Estimate
    ties: list  # candidates within one combined standard error of the best
    table: dict  # candidate -> Estimate


def optimal_thresholds(graph, steps, samples=None, seed=0, floor=1, backend="auto"):
    """Brute-force search over per-round thresholds in [floor, d]^steps.

    d is the largest degree seen in the lightcones.  Ties are reported for
    every candidate whose estimate is within one combined standard error of
    the best.
    """
    if samples is None:
        samples = 10**5 if steps >= 3 else 10**6
    cones = orbit_lightcones(graph, steps)
    d = max(max(sub.degrees()) for _, sub in cones)
    table = {}
    for ci, cand in enumerate(itertools.product(range(floor, d + 1), repeat=steps)):
        value = 0.0
        var = 0.0
        for oi, (weight, sub) in enumerate(cones):
            cfg = ThresholdConfig(
                thresholds=cand,
                samples=samples,
                seed=int(np.random.SeedSequence([seed, ci, oi]).generate_state(1)[0]),
            )
            est = threshold_cut_probability(sub, cfg, backend=backend)
            value += float(weight) * est.value
            var += float(weight) ** 2 * est.stderr**2
        table[cand] = Estimate(value, math.sqrt(var), samples)
    best = max(table, key=lambda c: (table[c].value, [-t for t in c]))
    ties = [
        c
        for c in table
        if c != best
        and table[best].value - table[c].value <= table[best].stderr + table[c].stderr
    ]
    return ThresholdSearch(best=best, estimate=table[best], ties=sorted(ties), table=table)


# ---------------------------------------------------------------------------
# Barak-Marwaha variants


def _bfs_from(adj, src, n):
    dist = np.full(n, -1, dtype=np.int32)
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def bm_coefficients(sub, cfg, endpoint, class_of_category=None):
    """Per-vertex weights of the Gaussian sign sum for one root endpoint.

    Vertex w at distance d <= k from the endpoint u contributes
    (-1)^d coef(d) Y_w where coef depends on the scheme:

    * para1: (D-1)^(-d/2) with the original branching constant,
    * para2: |{w': d(w',u)=d}|^(-1/2) (per-shell; the literal variant
      divides by the distance-k shell size throughout),
    * para3: |{w': d(w',u)=d, closer to u than to a chosen neighbour v}|^(-1/2),
    * para4: as para3 with "not farther" in place of "closer".
    """
    class_of = class_of_category or (lambda c: c)
    n = sub.n_vertices
    adj = sub.adjacency()
    du = _bfs_from(adj, endpoint, n)
    k = cfg.k
    if sub.radius < k + 1 and cfg.scheme in ("para3", "para4"):
        raise RadiusTooSmall("para3/para4 need lightcone radius >= k+1")
    if sub.radius < k:
        raise RadiusTooSmall(f"lightcone radius {sub.radius} < k={k}")
    if cfg.scheme == "para1":
        D = cfg.D if cfg.D is not None else len(adj[endpoint])
        if D < 2:
            raise BadRange("para1 needs degree >= 2")
        coef = [(D - 1) ** (-0.5 * d) for d in range(k + 1)]
    elif cfg.scheme == "para2":
        shell = np.bincount(du[du >= 0], minlength=k + 1)
        if cfg.para2_literal:
            coef = [shell[k] ** -0.5] * (k + 1)
        else:
            coef = [shell[d] ** -0.5 for d in range(k + 1)]
    else:
        # pick the comparison neighbour v of this endpoint by edge class;
        # the root partner is preferred when its edge class matches
        partner = 1 - endpoint
        v_choice = None
        cands = []
        for i, j, cat in sub.edges:
            if endpoint in (i, j):
                other = j if i == endpoint else i
                if class_of(cat) == cfg.neighbor_class:
                    cands.append(other)
        if not cands:
            raise SpecError(
                f"endpoint {endpoint} has no incident edge of class "
                f"{cfg.neighbor_class}"
            )
        v_choice = partner if partner in cands else min(cands)
        dv = _bfs_from(adj, v_choice, n)
        coef = []
        for d in range(k + 1):
            if cfg.scheme == "para3":
                members = (du == d) & (du < dv)
            else:
                members = (du == d) & (du <= dv)
            size = int(members.sum())
            if size == 0:
                raise BadRange(
                    f"{cfg.scheme} normalisation set empty at distance {d}"
                )
            coef.append(size**-0.5)
    weights = np.zeros(n)
    for w in range(n):
        d = du[w]
        if 0 <= d <= k:
            weights[w] = (-1) ** d * coef[d]
    return weights


def bm_cut_probability(sub, cfg, class_of_category=None):
    """Monte Carlo estimate of Pr[sgn sum_u != sgn sum_v] for the root edge."""
    c0 = bm_coefficients(sub, cfg, 0, class_of_category)
    c1 = bm_coefficients(sub, cfg, 1, class_of_category)
    return _bm_sample(np.stack([c0, c1], axis=1), cfg.samples, cfg.seed)


def _bm_sample(coefs, samples, seed):
    rng = np.random.default_rng(seed)
    n = coefs.shape[0]
    hits = 0
    done = 0
    while done < samples:
        b = min(_GAUSS_BATCH, samples - done)
        y = rng.standard_normal((b, n))
        x = y @ coefs
        hits += int(np.count_nonzero((x[:, 0] >= 0) != (x[:, 1] >= 0)))
        done += b
    return _binom_estimate(hits, samples)


# ---------------------------------------------------------------------------
# aggregation over edge orbits


def class_map_for(graph):
    from .tilings import TILING_FAMILIES

    if isinstance(graph, AdditiveProductSpec):
        return lambda c: graph.class_of(c)
    if graph in TILING_FAMILIES:
        return lambda c: c
    raise SpecError(f"not a spec or tiling family: {graph!r}")


def n_classes_for(graph):
    from .tilings import TILING_N_CLASSES

    if isinstance(graph, AdditiveProductSpec):
        return graph.n_classes
    return TILING_N_CLASSES


def orbit_lightcones(graph, radius, dedupe=True):
    """(weight, lightcone) pairs at the given radius, merged over orbits
    with identical class-labelled neighbourhoods."""
    from .tilings import TILING_FAMILIES, tiling_orbits_and_lightcones

    if isinstance(graph, AdditiveProductSpec):
        pairs = [
            (o, build_lightcone(graph, o, radius)) for o in enumerate_edge_orbits(graph)
        ]
    elif graph in TILING_FAMILIES:
        pairs = tiling_orbits_and_lightcones(graph, radius)
    else:
        raise SpecError(f"not a spec or tiling family: {graph!r}")
    if not dedupe:
        return [(o.weight, sub) for o, sub in pairs]
    return _dedupe_orbit_lightcones(pairs, class_map_for(graph))


def classical_cut_fraction(graph, algorithm, cfg, backend="auto"):
    """Orbit-weighted cut fraction of a classical baseline.

    ``algorithm`` is "threshold" or "bm"; standard errors combine in
    quadrature across orbits.
    """
    if algorithm == "threshold":
        radius = cfg.steps
    elif algorithm == "bm":
        radius = cfg.k + 1
    else:
        raise SpecError(f"unknown algorithm {algorithm!r}")
    cones = orbit_lightcones(graph, radius)
    class_of = class_map_for(graph)
    value = 0.0
    var = 0.0
    for oi, (weight, sub) in enumerate(cones):
        sub_cfg = replace(
            cfg, seed=int(np.random.SeedSequence([cfg.seed, oi]).generate_state(1)[0])
        )
        if algorithm == "threshold":
            est = threshold_cut_probability(sub, sub_cfg, backend=backend)
        else:
            est = bm_cut_probability(sub, sub_cfg, class_of_category=class_of)
        value += float(weight) * est.value
        var += float(weight) ** 2 * est.stderr**2
    return Estimate(value, math.sqrt(var), cfg.samples)
