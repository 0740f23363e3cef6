"""Bucket elimination over per-vertex tables and pairwise factors.

A "tensor" here is a pair ``(vars, array)`` where ``vars`` names the graph
vertices the axes correspond to; all axes have the same length (the number
of per-vertex configurations).  Variables are eliminated one at a time by
multiplying together every tensor that mentions the variable and summing it
out, in min-degree order with min-fill tie breaking.
"""

from __future__ import annotations

import string

import numpy as np

from .errors import WidthOverflow

_LETTERS = string.ascii_letters


def elimination_order(adjacency, pinned=()):
    """Greedy min-degree ordering (ties: min fill-in, then label).

    ``adjacency`` maps vertex -> iterable of neighbours; ``pinned`` vertices
    are never eliminated.  Returns ``(order, width)`` where width is the
    largest neighbourhood met while eliminating.
    """
    adj = {v: set(ws) - {v} for v, ws in adjacency.items()}
    for v, ws in list(adj.items()):
        for w in ws:
            adj.setdefault(w, set()).add(v)
    pinned = set(pinned)
    remaining = set(adj) - pinned
    order = []
    width = 0
    while remaining:
        best = None
        for v in sorted(remaining, key=str):
            nbrs = adj[v] & (remaining | pinned)
            deg = len(nbrs)
            fill = sum(
                1
                for a in nbrs
                for b in nbrs
                if str(a) < str(b) and b not in adj[a]
            )
            key = (deg, fill, str(v))
            if best is None or key < best[0]:
                best = (key, v, nbrs)
        _, v, nbrs = best
        order.append(v)
        width = max(width, len(nbrs))
        for a in nbrs:
            for b in nbrs:
                if a != b:
                    adj[a].add(b)
            adj[a].discard(v)
        remaining.discard(v)
    return order, width


def contract(tensors, free=(), order=None, budget_entries=1 << 26):
    """Multiply all tensors and sum out every variable not in ``free``.

    Returns a complex scalar when ``free`` is empty, otherwise an ndarray
    whose axes follow the order of ``free``.  Raises
    :class:`~lgqaoa.errors.WidthOverflow` when an intermediate would exceed
    ``budget_entries`` entries.
    """
    free = tuple(free)
    pool = []
    scalar = np.complex128(1.0)
    for vars_, arr in tensors:
        vars_ = tuple(vars_)
        arr = np.asarray(arr, dtype=np.complex128)
        if arr.ndim != len(vars_):
            raise ValueError("tensor rank does not match its variable list")
        if vars_:
            pool.append((vars_, arr))
        else:
            scalar = scalar * arr
    if order is None:
        adj = {}
        for vars_, _ in pool:
            for v in vars_:
                adj.setdefault(v, set()).update(w for w in vars_ if w != v)
        order, _ = elimination_order(adj, pinned=free)
    for v in order:
        group = [t for t in pool if v in t[0]]
        if not group:
            continue
        pool = [t for t in pool if v not in t[0]]
        out_vars = []
        for vars_, _ in group:
            for w in vars_:
                if w != v and w not in out_vars:
                    out_vars.append(w)
        size = group[0][1].shape[0] if group[0][1].ndim else 1
        if size ** len(out_vars) > budget_entries:
            raise WidthOverflow(
                f"eliminating {v!r} needs {size}^{len(out_vars)} entries "
                f"(budget {budget_entries})"
            )
        sym = {v: _LETTERS[0]}
        for i, w in enumerate(out_vars):
            sym[w] = _LETTERS[i + 1]
        subs = ",".join("".join(sym[w] for w in vars_) for vars_, _ in group)
        target = "".join(sym[w] for w in out_vars)
        res = np.einsum(subs + "->" + target, *[a for _, a in group], optimize=True)
        if out_vars:
            pool.append((tuple(out_vars), res))
        else:
            scalar = scalar * res
    if not free:
        if pool:
            raise ValueError(f"uneliminated variables remain: {[t[0] for t in pool]}")
        return complex(scalar)
    # combine what is left into one array over the free variables
    sym = {w: _LETTERS[i] for i, w in enumerate(free)}
    subs = ",".join("".join(sym[w] for w in vars_) for vars_, _ in pool)
    target = "".join(sym[w] for w in free)
    if not pool:
        raise ValueError("no tensors mention the free variables")
    res = np.einsum(subs + "->" + target, *[a for _, a in pool], optimize=True)
    return res * scalar
