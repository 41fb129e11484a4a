"""Shapes of essential minimal pairs over a base of ``n`` vertices.

A shape fixes ``m`` new vertices and a multiset of hyperedges, each made of a
nonempty set of new vertices plus some number of *slots* to be filled by
distinct base vertices.  Whether (A, A+N) is an essential minimal pair with
drop −1/c depends on the base only through its size:

* the total rank of the new part is exactly −1 (units of 1/c);
* every proper nonempty set of new vertices has relative rank ≥ 0;
* every base vertex fills at least one slot.

Edges inside the base are irrelevant, so one shape serves every base of the
same size.  The search enumerates shapes in a fixed order; for bases too large
for the search, a path family handles any binary relation whose denominator
equals c.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import BudgetExhausted
from .structures import Signature


@dataclass(frozen=True)
class Shape:
    m: int
    # (relation, new-vertex indices, slot count, multiplicity)
    parts: tuple

    @property
    def slots(self) -> int:
        return sum(s * mult for _, _, s, mult in self.parts)


def _check_proper(c, m, chosen, sig):
    for sub in range(1, (1 << m) - 1):
        val = c * bin(sub).count("1")
        for rel, P, _, mult in chosen:
            pm = 0
            for i in P:
                pm |= 1 << i
            if pm & ~sub == 0:
                val -= sig.weight(rel) * mult
        if val < 0:
            return False
    return True


def _types(sig: Signature, m: int):
    out = []
    for r in sig.relations:
        for size in range(1, min(r.arity, m) + 1):
            for P in combinations(range(m), size):
                out.append((r.name, P, r.arity - size))
    # group by the largest new vertex so prefix checks can run early
    out.sort(key=lambda t: (max(t[1]), len(t[1]), t[1], t[0]))
    return out


def search_shapes(sig: Signature, n: int, m: int, deadline: float | None = None, stats=None):
    """Yield every shape with ``m`` new vertices realisable over ``n`` base vertices."""
    c = sig.c
    types = _types(sig, m)
    full = (1 << m) - 1
    wmin = min(sig.weight(r.name) for r in sig.relations)
    max_slots = max(r.arity for r in sig.relations) - 1
    if (c * m + 1) // wmin * max_slots < n:
        return
    # index of the last type whose new part has max vertex j
    last_of = {}
    for idx, (_, P, _) in enumerate(types):
        last_of[max(P)] = idx
    block_end = {idx: j for j, idx in last_of.items()}

    # per-type multiplicity caps and the slots still obtainable after each index
    caps = []
    for rel, P, slots in types:
        w = sig.weight(rel)
        if slots == 0:
            cap = 1
        elif slots > n:
            cap = 0
        else:
            cap = comb(n, slots)
            if len(P) < m:
                cap = min(cap, c * len(P) // w)
        caps.append(cap)
    slot_suffix = [0] * (len(types) + 1)
    for idx in range(len(types) - 1, -1, -1):
        slot_suffix[idx] = slot_suffix[idx + 1] + types[idx][2] * caps[idx]

    chosen = []

    def prefix_ok(j):
        # every proper subset whose max element is j
        for sub in range(1 << j, 1 << (j + 1)):
            if sub == full:
                continue
            val = c * bin(sub).count("1")
            for rel, P, _, mult in chosen:
                pm = 0
                for i in P:
                    pm |= 1 << i
                if pm & ~sub == 0:
                    val -= sig.weight(rel) * mult
            if val < 0:
                return False
        return True

    def rec(idx, total, have):
        if have + min(slot_suffix[idx], (total + 1) // wmin * max_slots) < n:
            return
        if stats is not None:
            stats["nodes"] = stats.get("nodes", 0) + 1
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExhausted("time bound reached during shape search", stats)
        if idx == len(types):
            if total == -1:
                shape = Shape(m, tuple(chosen))
                if shape.slots >= n:
                    yield shape
            return
        rel, P, slots = types[idx]
        w = sig.weight(rel)
        cap = min(caps[idx], (total + 1) // w)
        for mult in range(cap, -1, -1):
            if mult:
                chosen.append((rel, P, slots, mult))
            ok = True
            if idx in block_end:
                ok = prefix_ok(block_end[idx])
            if ok:
                yield from rec(idx + 1, total - w * mult, have + slots * mult)
            if mult:
                chosen.pop()

    yield from rec(0, c * m, 0)


def path_shape(sig: Signature, n: int) -> Shape | None:
    """Path x1…xm with base attachments spread evenly (binary relation, q = c).

    With u_j = p·(attachments among x1..xj) − (q−p)·j the proper-interval
    constraints become u_j ∈ [1, p] for 0 < j < m and u_m = p + 1.
    """
    for r in sig.relations:
        if r.arity != 2 or r.alpha.denominator != sig.c:
            continue
        p, q = r.alpha.numerator, r.alpha.denominator
        m = 1
        while True:
            if (q * m + 1) % p == 0:
                total = (p + 1 + (q - p) * m) // p
                if total >= n:
                    break
            m += 1
        us = [0]
        for j in range(1, m):
            res = (-(q - p) * j) % p
            us.append(res if res else p)
        us.append(p + 1)
        att = [(us[j] - us[j - 1] + q - p) // p for j in range(1, m + 1)]
        if max(att) > n:
            continue
        parts = [(r.name, (i, i + 1), 0, 1) for i in range(m - 1)]
        parts += [(r.name, (i,), 1, a) for i, a in enumerate(att) if a]
        return Shape(m, tuple(parts))
    return None


def assign_slots(shape: Shape, base: list[str], new: list[str]):
    """Fill slots with base vertices; returns {relation: [edge, ...]} or None."""
    n = len(base)
    edges = {}
    seen = set()
    ptr = 0
    covered = set()
    for rel, P, slots, mult in shape.parts:
        core = [new[i] for i in P]
        for _ in range(mult):
            for _attempt in range(max(n, 1)):
                pick = [base[(ptr + t) % n] for t in range(slots)] if slots else []
                key = (rel, frozenset(core + pick))
                if key not in seen:
                    break
                ptr += 1
            else:
                return None
            seen.add(key)
            covered.update(pick)
            ptr += slots
            edges.setdefault(rel, []).append(core + pick)
    if len(covered) != n:
        return None
    return edges


_found: dict = {}


def find_shape(sig: Signature, n: int, search_vertices: int, deadline: float | None = None,
               stats=None) -> Shape:
    """First shape in canonical order for a base of ``n`` vertices."""
    if stats is None:
        stats = {}
    key = (sig, n, search_vertices)
    if key in _found:
        return _found[key]
    shape = _find_shape(sig, n, search_vertices, deadline, stats)
    _found[key] = shape
    return shape


def _find_shape(sig, n, search_vertices, deadline, stats):
    path = path_shape(sig, n)
    limit = search_vertices if path is None else min(search_vertices, path.m - 1)
    for m in range(1, limit + 1):
        for shape in search_shapes(sig, n, m, deadline, stats):
            if assign_slots(shape, [str(i) for i in range(n)], [f"x{i}" for i in range(m)]) is not None:
                return shape
    if path is not None:
        return path
    stats["search_vertices"] = search_vertices
    raise BudgetExhausted(f"no essential gadget found for a base of {n} vertices", stats)
