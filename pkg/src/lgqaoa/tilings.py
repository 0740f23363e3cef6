"""Tiling grid graphs: the pentagon-hexagon and tri-square-hex families.

Both tilings have exactly two edge types, distinguished by the pair of faces
sharing the edge.  The pentagon-hexagon family (every pentagon surrounded by
five hexagons, every hexagon by three pentagons and three hexagons,
alternating) closes up into a finite 60-vertex polyhedral graph, so every
lightcone on it is automatically boundary free.  The tri-square-hex family
(vertex figure triangle-square-hexagon-square) is an infinite planar tiling;
it is generated as a hexagonal patch of integer lattice cells, grown until
the requested lightcones sit entirely in the interior.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import networkx as nx
import numpy as np

from .errors import PatchTooSmall, SpecError
from .graphs import EdgeOrbit, _ball_from_roots

PENT_HEX = "tiling-5-6"
TRI_SQUARE_HEX = "tiling-3-4-6"
TILING_FAMILIES = (PENT_HEX, TRI_SQUARE_HEX)

# category ids per family, in the order (hexagon-neighbour type first)
#   tiling-5-6:   0 = pentagon/hexagon edge, 1 = hexagon/hexagon edge
#   tiling-3-4-6: 0 = hexagon/square edge,   1 = triangle/square edge
TILING_N_CLASSES = 2

_REGULAR_DEGREE = {PENT_HEX: 3, TRI_SQUARE_HEX: 4}


def _icosahedron_rotation():
    """Neighbour lists of the icosahedron in cyclic order around each vertex."""
    phi = (1 + 5**0.5) / 2
    coords = []
    for a in (1.0, -1.0):
        for b in (phi, -phi):
            coords += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    coords = np.array(coords)
    d2 = ((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1)
    nbrs = {i: [j for j in range(12) if abs(d2[i, j] - 4.0) < 1e-9] for i in range(12)}
    rings = {}
    for v in range(12):
        axis = coords[v] / np.linalg.norm(coords[v])
        ref = np.array([1.0, 0.0, 0.0])
        if abs(ref @ axis) > 0.9:
            ref = np.array([0.0, 1.0, 0.0])
        e1 = ref - (ref @ axis) * axis
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(axis, e1)
        ang = []
        for w in nbrs[v]:
            u = coords[w] - coords[v]
            ang.append(np.arctan2(u @ e2, u @ e1))
        rings[v] = [w for _, w in sorted(zip(ang, nbrs[v]))]
    return rings


@lru_cache(maxsize=None)
def _pent_hex_graph():
    """Truncate the icosahedron: one pentagon per vertex, vertices become
    half-edges.  Pentagon edges are category 0, truncated edges category 1."""
    rings = _icosahedron_rotation()
    g = nx.Graph()
    for v, ring in rings.items():
        for k in range(5):
            g.add_edge((v, ring[k]), (v, ring[(k + 1) % 5]), category=0)
    for v, ring in rings.items():
        for w in ring:
            if v < w:
                g.add_edge((v, w), (w, v), category=1)
    return g


# neighbour directions of the triangular lattice of hexagon centres,
# counter-clockwise; corner k of a hexagon sits between directions k and k+1
_DIRS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


@lru_cache(maxsize=None)
def _tri_square_hex_patch(R):
    """Hexagonal patch of the tri-square-hex tiling with lattice radius R.

    Vertices are (i, j, k): corner k of the hexagon centred at lattice point
    (i, j).  Hexagon edges (category 0) border squares; the squares between
    adjacent hexagons contribute two side edges each (category 1) which
    border triangles.
    """
    g = nx.Graph()
    pts = [
        (i, j)
        for i in range(-R, R + 1)
        for j in range(-R, R + 1)
        if max(abs(i), abs(j), abs(i + j)) <= R
    ]
    ptset = set(pts)
    for i, j in pts:
        for k in range(6):
            g.add_edge((i, j, k), (i, j, (k + 1) % 6), category=0)
        for m in range(3):
            di, dj = _DIRS[m]
            if (i + di, j + dj) in ptset:
                o = (i + di, j + dj)
                g.add_edge((i, j, m), (*o, (m + 2) % 6), category=1)
                g.add_edge((i, j, (m + 5) % 6), (*o, (m + 3) % 6), category=1)
    return g


def _check_family(family):
    if family not in TILING_FAMILIES:
        raise SpecError(f"unknown tiling family {family!r}")


def _root_edges(family):
    if family == PENT_HEX:
        g = _pent_hex_graph()
        roots = []
        for cat in (0, 1):
            e = min(
                ((u, v) for u, v, d in g.edges(data=True) if d["category"] == cat),
                key=str,
            )
            roots.append(e)
        return roots
    return [((0, 0, 0), (0, 0, 1)), ((0, 0, 0), (1, 0, 2))]


def _graph_for(family, radius):
    if family == PENT_HEX:
        return _pent_hex_graph()
    return _tri_square_hex_patch(radius + 3)


def tiling_edge_weights(family):
    """Exact edge-type proportions, from incidence counts at interior
    vertices (every vertex sees the same local pattern)."""
    _check_family(family)
    g = _graph_for(family, 1)
    full = _REGULAR_DEGREE[family]
    counts = [0, 0]
    for v in g.nodes:
        if g.degree(v) == full:
            for _, _, c in g.edges(v, data="category"):
                counts[c] += 1
    total = sum(counts)
    return (Fraction(counts[0], total), Fraction(counts[1], total))


def tiling_orbits_and_lightcones(family, p, _max_radius=64):
    """One (orbit, lightcone) pair per edge type, boundary free at radius p."""
    _check_family(family)
    if p < 0:
        raise SpecError("radius must be >= 0")
    weights = tiling_edge_weights(family)
    full = _REGULAR_DEGREE[family]
    radius = p
    while True:
        g = _graph_for(family, radius)
        out = []
        ok = True
        for cat, root in enumerate(_root_edges(family)):
            def nbr(u):
                return [(w, g[u][w]["category"]) for w in sorted(g[u], key=str)]

            sub = _ball_from_roots(nbr, root[0], root[1], p, cat)
            if any(g.degree(k) != full for k in sub.keys):
                ok = False
                break
            out.append((EdgeOrbit(category=cat, edge=root, weight=weights[cat]), sub))
        if ok:
            return out
        radius += 2
        if radius > _max_radius:
            raise PatchTooSmall(
                f"patch radius cap {_max_radius} reached for {family} at p={p}"
            )
