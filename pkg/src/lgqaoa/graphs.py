"""Additive product graphs: atoms, vertex addresses, edge orbits, lightcones.

An additive product graph is generated by a list of atom graphs on a shared
vertex set ``[n]``.  Vertices of the (typically infinite) product are
alternating address strings ``v1 C1 v2 C2 ... vk``; every vertex lies in one
copy of each atom containing its last label, and copies meet only at shared
vertices, so the product is a tree of atom copies.  Everything here is pure
and deterministic: the same spec always produces the same addresses,
orbits and lightcones.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .errors import (
    BadAtom,
    DisconnectedSum,
    DuplicateEdge,
    InvalidAddress,
    SpecError,
)

# A vertex address is a tuple (v1, C1, v2, C2, ..., vk): ints alternating
# vertex label / atom category, always of odd length.
Address = tuple


def _normalize_edges(edges):
    out = []
    seen = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise BadAtom(f"self loop ({u},{v})")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {key}")
        seen.add(key)
        out.append(key)
    return tuple(sorted(out))


@dataclass(frozen=True)
class AtomGraph:
    """One generator atom: a category id and its edge set over ``[n]``.

    Only the "underlined" atom matters downstream: the subgraph left after
    removing isolated vertices.  It must be nonempty and connected.
    """

    atom_id: int
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", _normalize_edges(self.edges))

    @property
    def vertices(self):
        """Underlined vertex set (labels that touch at least one edge)."""
        return frozenset(v for e in self.edges for v in e)

    def adjacency(self):
        adj = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ws)) for v, ws in adj.items()}

    def distances(self):
        """All-pairs BFS distances within the underlined atom."""
        adj = self.adjacency()
        dist = {}
        for s in self.vertices:
            d = {s: 0}
            frontier = [s]
            while frontier:
                nxt = []
                for u in frontier:
                    for w in adj[u]:
                        if w not in d:
                            d[w] = d[u] + 1
                            nxt.append(w)
                frontier = nxt
            dist[s] = d
        return dist

    def validate(self):
        if not self.edges:
            raise BadAtom(f"atom {self.atom_id} has no edges")
        # connectivity of the underlined atom
        verts = self.vertices
        adj = self.adjacency()
        seen = {next(iter(sorted(verts)))}
        stack = list(seen)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != verts:
            raise BadAtom(f"atom {self.atom_id} is disconnected")
        return self


@dataclass(frozen=True)
class AdditiveProductSpec:
    """Atoms on a common vertex set plus a parameter-sharing partition.

    ``classes`` partitions the atom category ids into groups that share one
    gamma vector in the multi-angle ansatz; it defaults to singletons.
    """

    n: int
    atoms: tuple
    classes: tuple = ()

    def __post_init__(self):
        if not self.classes:
            object.__setattr__(
                self, "classes", tuple((c,) for c in range(len(self.atoms)))
            )
        object.__setattr__(
            self, "classes", tuple(tuple(sorted(g)) for g in self.classes)
        )

    @property
    def n_categories(self):
        return len(self.atoms)

    @property
    def n_classes(self):
        return len(self.classes)

    def class_of(self, category):
        for k, group in enumerate(self.classes):
            if category in group:
                return k
        raise SpecError(f"category {category} not covered by classes")

    def categories_at(self, label):
        """Categories whose underlined atom contains the given label."""
        return tuple(
            a.atom_id for a in self.atoms if label in a.vertices
        )


def make_spec(n, atom_edge_lists, classes=None):
    atoms = tuple(
        AtomGraph(atom_id=i, edges=edges) for i, edges in enumerate(atom_edge_lists)
    )
    spec = AdditiveProductSpec(n=n, atoms=atoms, classes=tuple(classes or ()))
    return validate_spec(spec)


def validate_spec(spec):
    """Check all spec invariants and return the spec unchanged."""
    for atom in spec.atoms:
        atom.validate()
        for u, v in atom.edges:
            if not (0 <= u < spec.n and 0 <= v < spec.n):
                raise BadAtom(
                    f"atom {atom.atom_id} edge ({u},{v}) outside [0,{spec.n})"
                )
    # the sum graph (union of all atom edges) must be connected
    union = nx.Graph()
    union.add_nodes_from(range(spec.n))
    for atom in spec.atoms:
        union.add_edges_from(atom.edges)
    if spec.n and not nx.is_connected(union):
        raise DisconnectedSum("union of atom edge sets is disconnected")
    covered = sorted(c for group in spec.classes for c in group)
    if covered != list(range(spec.n_categories)):
        raise SpecError("classes must partition the atom category ids")
    return spec


# ---------------------------------------------------------------------------
# vertex addresses


def check_address(spec, addr):
    if len(addr) % 2 != 1:
        raise InvalidAddress(f"address length must be odd: {addr!r}")
    for i in range(0, len(addr), 2):
        v = addr[i]
        if not 0 <= v < spec.n:
            raise InvalidAddress(f"vertex {v} outside [0,{spec.n})")
    for i in range(1, len(addr), 2):
        c = addr[i]
        if not 0 <= c < spec.n_categories:
            raise InvalidAddress(f"category {c} out of range")
        verts = spec.atoms[c].vertices
        if addr[i - 1] not in verts or addr[i + 1] not in verts:
            raise InvalidAddress(f"step {addr[i - 1]}-{c}-{addr[i + 1]} leaves atom")
        if addr[i - 1] == addr[i + 1]:
            raise InvalidAddress("consecutive vertex labels must differ")
        if i >= 3 and addr[i] == addr[i - 2]:
            raise InvalidAddress("consecutive categories must differ")
    return addr


def neighbors(spec, addr):
    """All product-graph neighbors of an address, tagged with edge category.

    For each category C containing the last label u, the address lies in
    exactly one copy of atom C.  If the address was created through C the
    copy is its sibling set (one sibling may coincide with the parent
    prefix); otherwise the copy hangs forward off this vertex.
    """
    check_address(spec, addr)
    label = addr[-1]
    out = []
    for c in spec.categories_at(label):
        atom = spec.atoms[c]
        adj = atom.adjacency()[label]
        if len(addr) >= 3 and addr[-2] == c:
            prefix = addr[:-2]
            attach = prefix[-1]
            for w in adj:
                if w == attach:
                    out.append((prefix, c))
                else:
                    out.append((prefix + (c, w), c))
        else:
            for w in adj:
                out.append((addr + (c, w), c))
    return out


# ---------------------------------------------------------------------------
# edge orbits and lightcones


@dataclass(frozen=True)
class EdgeOrbit:
    """One equivalence class of product edges: an atom edge with its
    proportion of all edges."""

    category: int
    edge: tuple
    weight: Fraction


def enumerate_edge_orbits(spec):
    """One orbit per underlined-atom edge, each with weight 1/total."""
    total = sum(len(a.edges) for a in spec.atoms)
    return [
        EdgeOrbit(category=a.atom_id, edge=e, weight=Fraction(1, total))
        for a in spec.atoms
        for e in a.edges
    ]


@dataclass(frozen=True)
class LocalSubgraph:
    """Induced ball of a given radius around a distinguished root edge.

    Vertices are re-indexed 0..n-1 with the root edge always at (0, 1).
    ``dist[i]`` is the graph distance from vertex i to the root edge and
    ``keys[i]`` is the originating address (or tiling vertex key).
    """

    radius: int
    edges: tuple  # (i, j, category) with i < j
    dist: tuple
    keys: tuple
    root_category: int

    @property
    def n_vertices(self):
        return len(self.keys)

    def adjacency(self):
        adj = [[] for _ in range(self.n_vertices)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return [tuple(sorted(a)) for a in adj]

    def degrees(self):
        deg = [0] * self.n_vertices
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def to_networkx(self):
        g = nx.Graph()
        for i in range(self.n_vertices):
            g.add_node(i, dist=self.dist[i])
        for i, j, c in self.edges:
            g.add_edge(i, j, category=c)
        return g


def _ball_from_roots(neighbor_fn, root_a, root_b, radius, root_category):
    """Generic BFS ball builder used by both spec and tiling lightcones."""
    dist = {root_a: 0, root_b: 0}
    order = [root_a, root_b]
    frontier = [root_a, root_b]
    for d in range(1, radius + 1):
        nxt = []
        for u in frontier:
            for w, _ in neighbor_fn(u):
                if w not in dist:
                    dist[w] = d
                    nxt.append(w)
        nxt.sort()
        order.extend(nxt)
        frontier = nxt
    index = {k: i for i, k in enumerate(order)}
    edges = set()
    for u in order:
        iu = index[u]
        for w, cat in neighbor_fn(u):
            if w in index:
                iw = index[w]
                if iu < iw:
                    edges.add((iu, iw, cat))
                else:
                    edges.add((iw, iu, cat))
    return LocalSubgraph(
        radius=radius,
        edges=tuple(sorted(edges)),
        dist=tuple(dist[k] for k in order),
        keys=tuple(order),
        root_category=root_category,
    )


def build_lightcone(spec, orbit, p, root_vertex=None):
    """Induced radius-p ball around a representative edge of the orbit.

    ``root_vertex`` picks the base vertex v1 of the address system; any
    choice yields an isomorphic subgraph.
    """
    if p < 0:
        raise SpecError("radius must be >= 0")
    a, b = orbit.edge
    if root_vertex is None:
        root_vertex = a
    if root_vertex == a:
        root_a = (a,)
        root_b = (a, orbit.category, b)
    else:
        # reach the representative edge from an arbitrary base vertex by
        # BFS over addresses until some copy of the orbit edge appears
        root_a, root_b = _find_edge_from(spec, orbit, root_vertex)
    return _ball_from_roots(
        lambda addr: neighbors(spec, addr), root_a, root_b, p, orbit.category
    )


def _find_edge_from(spec, orbit, base):
    a, b = orbit.edge
    c = orbit.category
    seen = {(base,)}
    queue = [(base,)]
    while queue:
        addr = queue.pop(0)
        for w_addr, cat in neighbors(spec, addr):
            if cat == c:
                la, lb = addr[-1], w_addr[-1]
                if (la, lb) in ((a, b), (b, a)):
                    return addr, w_addr
            if w_addr not in seen and len(w_addr) < 4 * spec.n + 9:
                seen.add(w_addr)
                queue.append(w_addr)
    raise SpecError(f"orbit edge {orbit.edge} unreachable from {base}")


# ---------------------------------------------------------------------------
# isomorphism helpers


def lightcone_fingerprint(sub, class_of_category=None):
    """Hash of the rooted, category-labelled subgraph.

    Isomorphic lightcones (with an isomorphism preserving distance to the
    root edge and edge labels) always collide; use :func:`lightcones_match`
    to confirm exactly.
    """
    g = sub.to_networkx()
    if class_of_category is not None:
        for _, _, d in g.edges(data=True):
            d["category"] = class_of_category(d["category"])
    for i in g.nodes:
        g.nodes[i]["dist"] = str(g.nodes[i]["dist"])
    for _, _, d in g.edges(data=True):
        d["category"] = str(d["category"])
    return nx.weisfeiler_lehman_graph_hash(
        g, node_attr="dist", edge_attr="category", iterations=4
    )


def lightcones_match(sub1, sub2, class_of_category=None):
    """Exact isomorphism check preserving root distance and edge labels."""
    g1, g2 = sub1.to_networkx(), sub2.to_networkx()
    if class_of_category is not None:
        for g in (g1, g2):
            for _, _, d in g.edges(data=True):
                d["category"] = class_of_category(d["category"])
    return nx.is_isomorphic(
        g1,
        g2,
        node_match=lambda a, b: a["dist"] == b["dist"],
        edge_match=lambda a, b: a["category"] == b["category"],
    )


def symmetry_classes(spec, max_brute_n=8):
    """Suggest a parameter-sharing partition from spec symmetries.

    Categories are grouped when some relabelling of the common vertex set
    maps the atom list onto itself carrying one category to the other.  If
    everything would collapse into a single class the singleton partition
    is returned instead (tying all categories is never useful: it is plain
    QAOA).  Callers may always override.
    """
    c = spec.n_categories
    if c == 1:
        return ((0,),)
    if spec.n > max_brute_n:
        return tuple((i,) for i in range(c))
    edge_sets = [frozenset(a.edges) for a in spec.atoms]
    multiset = sorted(edge_sets, key=sorted)
    parent = list(range(c))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in itertools.permutations(range(spec.n)):
        mapped = [
            frozenset(
                (min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in a.edges
            )
            for a in spec.atoms
        ]
        if sorted(mapped, key=sorted) != multiset:
            continue
        for i in range(c):
            for j in range(c):
                if mapped[i] == edge_sets[j]:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[ri] = rj
    groups = {}
    for i in range(c):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(tuple(sorted(g)) for g in sorted(groups.values()))
    if len(classes) == 1:
        return tuple((i,) for i in range(c))
    return classes


# ---------------------------------------------------------------------------
# built-in specs and the JSON interface

_TRIANGLE = ((0, 1), (1, 2), (0, 2))
_SQUARE = ((0, 1), (1, 2), (2, 3), (0, 3))


def _k34_atoms():
    left, right = (0, 1, 2), (3, 4, 5, 6)
    return tuple(((u, v),) for u in left for v in right)


_BUILTINS = {
    "fig-a": dict(
        n=3,
        atoms=(_TRIANGLE, ((0, 1),), ((1, 2),), ((0, 2),)),
        classes=((0,), (1, 2, 3)),
    ),
    "fig-b": dict(n=4, atoms=(_SQUARE, _SQUARE), classes=((0,), (1,))),
    "fig-c": dict(
        n=6,
        atoms=(
            _TRIANGLE,
            ((3, 4), (4, 5), (3, 5)),
            ((0, 3),),
            ((1, 4),),
            ((2, 5),),
        ),
        classes=((0, 1), (2, 3, 4)),
    ),
    "k34-tree": dict(n=7, atoms=_k34_atoms(), classes=None),
}

BUILTIN_SPEC_NAMES = tuple(_BUILTINS)


def builtin_spec(name):
    try:
        kw = _BUILTINS[name]
    except KeyError:
        raise SpecError(f"unknown built-in spec {name!r}") from None
    return make_spec(kw["n"], kw["atoms"], kw["classes"])


def spec_from_dict(doc):
    """Load a spec from the JSON document format
    ``{"n": int, "atoms": [[[u,v],...],...], "classes": [[...],...]?}``."""
    try:
        n = int(doc["n"])
        atoms = [tuple(map(tuple, a)) for a in doc["atoms"]]
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed graph spec document: {exc}") from exc
    classes = doc.get("classes")
    if classes is not None:
        classes = tuple(tuple(int(c) for c in g) for g in classes)
    return make_spec(n, atoms, classes)


def load_spec(path):
    with open(path) as fh:
        return spec_from_dict(json.load(fh))


def spec_to_dict(spec):
    return {
        "n": spec.n,
        "atoms": [[list(e) for e in a.edges] for a in spec.atoms],
        "classes": [list(g) for g in spec.classes],
    }
