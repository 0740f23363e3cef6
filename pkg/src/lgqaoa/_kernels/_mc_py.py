"""Pure-numpy fallbacks for the compiled kernels.

Both implementations are bit-for-bit equivalent to the Cython versions in
``_mc.pyx``: the threshold dynamics uses the same synchronous update rule on
the same integer spins, and the transform applies the same butterflies, so
a fixed seed gives identical results on either backend.
"""

from __future__ import annotations

import numpy as np


def fwht(a, n):
    """In-place unnormalized fast Walsh-Hadamard transform of length 2^n."""
    for q in range(n):
        view = a.reshape(-1, 2, 1 << q)
        top = view[:, 0, :] + view[:, 1, :]
        bot = view[:, 0, :] - view[:, 1, :]
        view[:, 0, :] = top
        view[:, 1, :] = bot
    return a


def threshold_rounds(spins, indptr, indices, dist, taus):
    """Synchronous threshold dynamics on a batch of spin assignments.

    ``spins`` is (batch, n) int8 in {-1,+1}, modified in place.  At round i
    (1-based) only vertices with dist <= steps - i are updated; a vertex
    flips when at least taus[i-1] of its neighbours share its spin.
    Returns the number of rows whose root edge (vertices 0, 1) ends cut.
    """
    steps = len(taus)
    n = spins.shape[1]
    deg = (indptr[1:] - indptr[:-1]).astype(np.int32)
    # dense +-1 adjacency; lightcones are small so the matmul wins
    adj = np.zeros((n, n), dtype=np.float32)
    for u in range(n):
        adj[u, indices[indptr[u] : indptr[u + 1]]] = 1.0
    for i in range(1, steps + 1):
        active = np.asarray(dist) <= steps - i
        s = spins.astype(np.float32)
        agree = (deg[None, :] + s * (s @ adj)) * 0.5
        flip = active[None, :] & (agree >= taus[i - 1])
        np.negative(spins, where=flip, out=spins)
    return int(np.count_nonzero(spins[:, 0] != spins[:, 1]))
