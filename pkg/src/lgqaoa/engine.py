"""Iterative cut-fraction evaluation on additive product graphs.

Per-vertex configurations over the 2p+1 inserted basis layers are
bit-packed: component order is (a_1, ..., a_p, a_0, a_{-p}, ..., a_{-1}),
bit i of the packed integer is component i, and a set bit means -1.  The
a_0 component therefore always lives at bit p.  The per-layer mixer
amplitudes collapse into one table f over configurations, cost phases into
one table per edge category, and the expectation of each edge orbit is a
small tensor contraction over one atom copy whose vertices carry the
aggregated contribution of their successor copies (the G tables).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contraction import contract
from .errors import DepthOverflow, NonRealResult, SpecError
from .graphs import AdditiveProductSpec, enumerate_edge_orbits

IM_TOL = 1e-6  # raise NonRealResult above this imaginary residue


def n_configs(p):
    return 1 << (2 * p + 1)


@lru_cache(maxsize=32)
def component_signs(p):
    """(2^(2p+1), 2p+1) array of +-1; column i is component i."""
    T = n_configs(p)
    z = np.arange(T)[:, None]
    bits = (z >> np.arange(2 * p + 1)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def z0_signs(p):
    """Sign of the central a_0 component per configuration."""
    return component_signs(p)[:, p].astype(np.float64)


def f_table(betas):
    """Mixer amplitude product per configuration; sums to 1 over configs."""
    betas = np.asarray(betas, dtype=np.float64)
    p = len(betas)
    s = component_signs(p)
    thetas = np.concatenate([betas, -betas[::-1]])
    vals = np.full(n_configs(p), 0.5, dtype=np.complex128)
    for t, th in enumerate(thetas):
        eq = s[:, t] == s[:, t + 1]
        vals *= np.where(eq, np.cos(th), 1j * np.sin(th))
    return vals


def gamma_vector(gammas, p):
    """(g_1..g_p, 0, -g_p..-g_1) matching the configuration component order."""
    g = np.asarray(gammas, dtype=np.float64)
    if g.shape != (p,):
        raise SpecError(f"need {p} gamma angles, got shape {g.shape}")
    return np.concatenate([g, [0.0], -g[::-1]])


def phase_table(gvec):
    """exp(-i Gamma . z) per configuration; the phase of an edge (z1, z2)
    is this table at index z1 XOR z2."""
    gvec = np.asarray(gvec, dtype=np.float64)
    p = (len(gvec) - 1) // 2
    return np.exp(-1j * (component_signs(p).astype(np.float64) @ gvec))


def phase_matrix(gvec):
    pt = phase_table(gvec)
    idx = np.bitwise_xor.outer(np.arange(len(pt)), np.arange(len(pt)))
    return pt[idx]


@dataclass(frozen=True)
class ParamSet:
    """Angles for one evaluation: per-layer gammas by sharing class, one
    beta per layer, and the category -> class assignment.

    ``gammas`` has shape (p, n_classes); plain QAOA is the single-class
    case.  The flat vector layout (used by the optimizer, the CLI and the
    published parameter tables) is layer-major gammas followed by betas.
    """

    gammas: np.ndarray
    betas: np.ndarray
    sharing: tuple

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.gammas, dtype=np.float64))
        b = np.asarray(self.betas, dtype=np.float64)
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "sharing", tuple(int(c) for c in self.sharing))
        if g.ndim != 2 or b.ndim != 1 or g.shape[0] != b.shape[0]:
            raise SpecError("gammas must be (p, classes) and betas length p")
        if not (np.isfinite(g).all() and np.isfinite(b).all()):
            raise SpecError("angles must be finite")
        if any(not 0 <= c < g.shape[1] for c in self.sharing):
            raise SpecError("sharing assigns a class outside the gamma matrix")

    @property
    def p(self):
        return len(self.betas)

    @property
    def n_classes(self):
        return self.gammas.shape[1]

    @property
    def is_qaoa(self):
        return self.n_classes == 1

    def gamma_for_category(self, category):
        return self.gammas[:, self.sharing[category]]

    def as_vector(self):
        return np.concatenate([self.gammas.reshape(-1), self.betas])

    @classmethod
    def from_vector(cls, x, p, n_classes, sharing):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (p * n_classes + p,):
            raise SpecError(
                f"expected {p * n_classes + p} angles for p={p}, "
                f"{n_classes} classes; got {x.shape[0]}"
            )
        return cls(
            gammas=x[: p * n_classes].reshape(p, n_classes),
            betas=x[p * n_classes :],
            sharing=sharing,
        )

    @classmethod
    def qaoa(cls, gammas, betas, n_categories):
        g = np.asarray(gammas, dtype=np.float64).reshape(-1, 1)
        return cls(gammas=g, betas=betas, sharing=(0,) * n_categories)

    @classmethod
    def for_spec(cls, spec, gammas, betas, mode="ma"):
        """Build a ParamSet whose sharing follows the spec's classes
        (mode "ma") or ties everything (mode "qaoa")."""
        if mode == "qaoa":
            return cls.qaoa(gammas, betas, spec.n_categories)
        sharing = tuple(spec.class_of(c) for c in range(spec.n_categories))
        g = np.asarray(gammas, dtype=np.float64).reshape(-1, spec.n_classes)
        return cls(gammas=g, betas=betas, sharing=sharing)

    def to_dict(self):
        return {
            "gammas": self.gammas.tolist(),
            "betas": self.betas.tolist(),
            "sharing": list(self.sharing),
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            gammas=np.asarray(doc["gammas"], dtype=np.float64),
            betas=doc["betas"],
            sharing=tuple(doc["sharing"]),
        )


def sharing_for(graph, mode):
    """Category -> class map and class count for a spec or tiling in the
    given mode ("qaoa" or "ma")."""
    from .tilings import TILING_FAMILIES, TILING_N_CLASSES

    if isinstance(graph, AdditiveProductSpec):
        n_cat = graph.n_categories
        if mode == "qaoa":
            return (0,) * n_cat, 1
        return tuple(graph.class_of(c) for c in range(n_cat)), graph.n_classes
    if graph in TILING_FAMILIES:
        if mode == "qaoa":
            return (0,) * TILING_N_CLASSES, 1
        return tuple(range(TILING_N_CLASSES)), TILING_N_CLASSES
    raise SpecError(f"not a spec or tiling family: {graph!r}")


class EngineContext:
    """Caches for one (spec, p, params) evaluation: the f table, per
    category phase matrices, and memoized G tables."""

    def __init__(self, spec, p, params, memoize=True, budget_entries=1 << 26):
        if params.p != p:
            raise SpecError(f"params are depth {params.p}, requested p={p}")
        if len(params.sharing) != spec.n_categories:
            raise SpecError("sharing does not cover every atom category")
        self.spec = spec
        self.p = p
        self.params = params
        self.memoize = memoize
        self.budget = budget_entries
        self.f = f_table(params.betas)
        self.s0 = z0_signs(p)
        self.pmat = {
            c: phase_matrix(gamma_vector(params.gamma_for_category(c), p))
            for c in range(spec.n_categories)
        }
        self.atom_dist = {c: spec.atoms[c].distances() for c in range(spec.n_categories)}
        self._memo = {}

    def vertex_weight(self, category, label, budget_m):
        """f(z) times the G tables of every successor copy at this vertex."""
        w = self.f
        for c2 in self.spec.categories_at(label):
            if c2 != category and budget_m > 0:
                w = w * self.g_table(c2, label, budget_m)
        return w

    def g_table(self, category, a, m):
        """Aggregated contribution of the depth-m copy of ``category``
        attached at atom vertex ``a``, as a table over a's configuration."""
        if m > self.p:
            raise DepthOverflow(f"depth {m} exceeds p={self.p}")
        if m == 0:
            return np.ones(n_configs(self.p), dtype=np.complex128)
        key = (category, a, m)
        if self.memoize and key in self._memo:
            return self._memo[key]
        dist = self.atom_dist[category][a]
        in_range = {k for k, d in dist.items() if d <= m}
        tensors = []
        for k in sorted(in_range - {a}):
            tensors.append(((k,), self.vertex_weight(category, k, m - dist[k])))
        for u, v in self.spec.atoms[category].edges:
            if u in in_range and v in in_range:
                tensors.append(((u, v), self.pmat[category]))
        out = contract(tensors, free=(a,), budget_entries=self.budget)
        if self.memoize:
            self._memo[key] = out
        return out

    def edge_zz(self, orbit):
        """<Z_L Z_R> for the orbit's representative edge."""
        cat = orbit.category
        a, b = orbit.edge
        dist = self.atom_dist[cat]
        mind = {
            k: min(dist[a][k], dist[b][k])
            for k in self.spec.atoms[cat].vertices
            if min(dist[a][k], dist[b][k]) <= self.p
        }
        tensors = []
        for k in sorted(mind):
            w = self.vertex_weight(cat, k, self.p - mind[k])
            if k == a or k == b:
                w = w * self.s0
            tensors.append(((k,), w))
        for u, v in self.spec.atoms[cat].edges:
            if u in mind and v in mind:
                tensors.append(((u, v), self.pmat[cat]))
        val = contract(tensors, budget_entries=self.budget)
        if abs(val.imag) > IM_TOL:
            raise NonRealResult(f"imaginary residue {val.imag:.3e} on {orbit}")
        return min(1.0, max(-1.0, val.real))

    def export_g_tables(self):
        """Snapshot of the memoized G tables, for debugging dumps."""
        return {
            f"G[cat={c},vertex={a},m={m}]": [[z.real, z.imag] for z in tab]
            for (c, a, m), tab in sorted(self._memo.items())
        }


def compute_G(spec, category, a, m, params, memoize=True):
    """Single G table; see :class:`EngineContext` for batch evaluation."""
    ctx = EngineContext(spec, params.p, params, memoize=memoize)
    return ctx.g_table(category, a, m)


def edge_expectation(spec, orbit, p, params, memoize=True, _ctx=None):
    """The orbit's contribution to the cut fraction: minus <Z_L Z_R>,
    clamped to [-1, 1]."""
    ctx = _ctx or EngineContext(spec, p, params, memoize=memoize)
    return -ctx.edge_zz(orbit)


def cut_fraction(graph, p, params, engine="iterative", memoize=True, **oracle_kw):
    """Expected cut fraction: 1/2 + 1/2 * sum of weighted orbit
    expectations.

    ``graph`` is an :class:`AdditiveProductSpec` (engines "iterative" or
    "oracle") or a tiling family name (engine "oracle" only).
    """
    from .tilings import TILING_FAMILIES

    if isinstance(graph, AdditiveProductSpec):
        if engine == "iterative":
            ctx = EngineContext(graph, p, params, memoize=memoize)
            total = 0.0
            for orbit in enumerate_edge_orbits(graph):
                total += float(orbit.weight) * (-ctx.edge_zz(orbit))
            return 0.5 + 0.5 * total
        if engine == "oracle":
            from .oracle import spec_orbit_zz

            pairs = spec_orbit_zz(graph, p, params, **oracle_kw)
            return 0.5 - 0.5 * sum(float(w) * zz for w, zz in pairs)
        raise SpecError(f"unknown engine {engine!r}")
    if graph in TILING_FAMILIES:
        if engine == "iterative":
            raise SpecError("tiling graphs require the oracle engine")
        from .oracle import tiling_orbit_zz

        pairs = tiling_orbit_zz(graph, p, params, **oracle_kw)
        return 0.5 - 0.5 * sum(float(w) * zz for w, zz in pairs)
    raise SpecError(f"not a spec or tiling family: {graph!r}")
