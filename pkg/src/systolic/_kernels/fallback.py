"""Pure-Python shortest-path kernel, used when the compiled one is absent.

Same contract as the Cython implementation in ``_dijkstra.pyx``: Dijkstra on
a rectangular index box with a fixed stencil of index offsets.  Edge weight
between nodes a and b reached via offset k is

    steps[k] * 0.5 * (fbox[a] + fbox[b]),

the physical step length times the average conformal factor at the
endpoints.  Exploration stops once the target is settled or every frontier
node exceeds ``cutoff``.
"""

from heapq import heappop, heappush

import numpy as np


def dijkstra_box(fbox, offsets, steps, src, dst, cutoff=np.inf):
    """Shortest weighted path from flat node src to dst on the box grid.

    Parameters
    ----------
    fbox : (NI, NJ) float array
        Conformal-factor sample at each box node.
    offsets : (K, 2) int array
        Index steps (di, dj) of the stencil.
    steps : (K,) float array
        Physical length of each stencil step.
    src, dst : int
        Flat node ids (i * NJ + j).
    cutoff : float
        Nodes farther than this are not expanded.

    Returns
    -------
    dist : float
        Path length, or inf if dst is beyond cutoff or unreachable.
    parent : (NI*NJ,) int32 array
        Predecessor of each reached node (-1 where unreached).
    """
    ni, nj = fbox.shape
    n = ni * nj
    fflat = np.ascontiguousarray(fbox, dtype=float).ravel()
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int32)
    offs = [(int(di), int(dj)) for di, dj in offsets]
    w = [float(s) for s in steps]
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, a = heappop(heap)
        if d > dist[a]:
            continue
        if a == dst:
            return d, parent
        if d > cutoff:
            break
        ai, aj = divmod(a, nj)
        fa = fflat[a]
        for k, (di, dj) in enumerate(offs):
            bi = ai + di
            bj = aj + dj
            if bi < 0 or bi >= ni or bj < 0 or bj >= nj:
                continue
            b = bi * nj + bj
            nd = d + w[k] * 0.5 * (fa + fflat[b])
            if nd < dist[b]:
                dist[b] = nd
                parent[b] = a
                heappush(heap, (nd, b))
    return np.inf, parent
