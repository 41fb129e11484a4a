"""Exact minimisation of the rank over supersets of a base set.

The rank ``c*|X| - sum(w_e for e inside X)`` is submodular, so minimising it
over ``X ⊇ base`` is a maximum-closure problem solved by one min cut.  All
quantities are integers (ranks measured in units of 1/c).
"""
from __future__ import annotations

from collections import deque

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def rank_units(c, edges, mask):
    """Rank of ``mask`` in units of 1/c; ``edges`` is a list of (weight, mask)."""
    total = c * bin(mask).count("1")
    for w, em in edges:
        if em & mask == em:
            total -= w
    return total


def min_superset(c, edges, universe, base):
    """Return ``(value, witness)`` minimising the rank over base ⊆ X ⊆ universe.

    ``witness`` is the inclusion-least minimiser (minimisers form a lattice).
    Edges not contained in ``universe`` are ignored.
    """
    value, least, _ = min_superset_bounds(c, edges, universe, base)
    return value, least


def min_superset_bounds(c, edges, universe, base):
    """Like :func:`min_superset` but also return the greatest minimiser."""
    base &= universe
    const = rank_units(c, [(w, m) for w, m in edges if m & ~base == 0], base)
    live = [(w, m & ~base) for w, m in edges if m & ~universe == 0 and m & ~base]
    if not live:
        return const, base, base

    # nodes: 0 = source, 1 = sink, then one per live edge, then one per touched vertex;
    # arcs are emitted row by row so the CSR arrays can be filled directly
    verts = sorted({v for _, rest in live for v in _bits(rest)})
    ne = len(live)
    vnode = {v: 2 + ne + j for j, v in enumerate(verts)}
    n = 2 + ne + len(verts)
    total = sum(w for w, _ in live)
    big = total + 1
    heads, caps = [], []
    indptr = [0, ne, ne]
    for i, (w, _) in enumerate(live):
        heads.append(2 + i)
        caps.append(w)
    for _, rest in live:
        targets = sorted(vnode[v] for v in _bits(rest))
        heads.extend(targets)
        caps.extend([big] * len(targets))
        indptr.append(len(heads))
    for _ in verts:
        heads.append(1)
        caps.append(c)
        indptr.append(len(heads))
    cap = csr_matrix((np.array(caps, dtype=np.int32), np.array(heads, dtype=np.int32),
                      np.array(indptr, dtype=np.int32)), shape=(n, n))
    res = maximum_flow(cap, 0, 1)
    cut = int(res.flow_value)
    fl = res.flow.tocsr()
    flow = {}
    for u in range(n):
        for j in range(fl.indptr[u], fl.indptr[u + 1]):
            if fl.data[j] > 0:
                flow[(u, int(fl.indices[j]))] = int(fl.data[j])

    # residual arcs: forward with spare capacity, backward along positive flow
    succ = [[] for _ in range(n)]
    for u in range(n):
        for j in range(indptr[u], indptr[u + 1]):
            v = heads[j]
            f = flow.get((u, v), 0)
            if caps[j] - f > 0:
                succ[u].append(v)
            if f > 0:
                succ[v].append(u)
    seen = _reach(succ, 0)
    pred = [[] for _ in range(n)]
    for u in range(n):
        for v in succ[u]:
            pred[v].append(u)
    # nodes that can still reach the sink lie outside every maximal closure
    reach_t = _reach(pred, 1)

    least = greatest = base
    for v in verts:
        node = vnode[v]
        if node in seen:
            least |= 1 << v
        if node not in reach_t:
            greatest |= 1 << v
    # closure gain = total - cut
    return const - (total - cut), least, greatest


def _reach(adj, start):
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def min_superset_bruteforce(c, edges, universe, base):
    """Reference enumeration for :func:`min_superset` (exponential)."""
    base &= universe
    free = [1 << v for v in _bits(universe & ~base)]
    best = None
    winners = []
    for k in range(1 << len(free)):
        m = base
        for j, bit in enumerate(free):
            if k >> j & 1:
                m |= bit
        val = rank_units(c, edges, m)
        if best is None or val < best:
            best, winners = val, [m]
        elif val == best:
            winners.append(m)
    least = winners[0]
    for m in winners[1:]:
        least &= m
    return best, least
