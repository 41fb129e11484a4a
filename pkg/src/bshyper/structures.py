"""Finite symmetric irreflexive hypergraph structures and the rank δ.

A structure stores every hyperedge as a frozenset of vertex ids, so symmetry
is structural.  Vertex ids are strings ordered lexicographically; bit ``i`` of
an internal mask stands for ``vertices[i]``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from . import _minimize
from .errors import (
    ArityMismatch,
    BaseNotInduced,
    NotDisjointOverBase,
    RepeatedVertexInEdge,
    SignatureError,
    SignatureMismatch,
    UnknownVertex,
)


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    alpha: Fraction


class Signature:
    """Finite relational language with rational weights in (0, 1)."""

    def __init__(self, relations: Iterable[Relation]):
        rels = []
        seen = set()
        for r in relations:
            alpha = Fraction(r.alpha)
            if not isinstance(r.arity, int) or r.arity < 2:
                raise SignatureError(f"relation {r.name!r}: arity must be >= 2")
            if not 0 < alpha < 1:
                raise SignatureError(f"relation {r.name!r}: alpha must lie in (0, 1)")
            if r.name in seen:
                raise SignatureError(f"duplicate relation {r.name!r}")
            seen.add(r.name)
            rels.append(Relation(r.name, r.arity, alpha))
        if not rels:
            raise SignatureError("signature needs at least one relation")
        self.relations = tuple(rels)
        self._by_name = {r.name: r for r in rels}
        self.c = math.lcm(*(r.alpha.denominator for r in rels))

    @classmethod
    def parse(cls, specs: Iterable[str]) -> "Signature":
        """Build from strings ``NAME=p/q`` (binary) or ``NAME:arity=p/q``."""
        rels = []
        for spec in specs:
            try:
                lhs, rhs = spec.split("=", 1)
                name, _, arity = lhs.partition(":")
                rels.append(Relation(name.strip(), int(arity) if arity else 2, Fraction(rhs.strip())))
            except (ValueError, ZeroDivisionError) as exc:
                raise SignatureError(f"cannot parse relation spec {spec!r}") from exc
        return cls(rels)

    def relation(self, name: str) -> Relation:
        try:
            return self._by_name[name]
        except KeyError:
            raise SignatureError(f"unknown relation {name!r}") from None

    def weight(self, name: str) -> int:
        """α(E) measured in units of 1/c."""
        a = self._by_name[name].alpha
        return a.numerator * (self.c // a.denominator)

    def __eq__(self, other):
        return isinstance(other, Signature) and self.relations == other.relations

    def __hash__(self):
        return hash(self.relations)

    def __repr__(self):
        body = ", ".join(f"{r.name}:{r.arity}={r.alpha}" for r in self.relations)
        return f"Signature({body})"


class FiniteStructure:
    """Immutable finite L-structure.

    ``edges`` maps each relation name to a frozenset of hyperedges; each
    hyperedge is a frozenset of exactly ``arity`` distinct vertex ids.
    """

    __slots__ = ("signature", "vertices", "edges", "_index", "_emasks", "_hash")

    def __init__(self, signature: Signature, vertices: Iterable[str],
                 edges: Mapping[str, Iterable[Iterable[str]]] | None = None):
        verts = sorted(set(vertices))
        vset = set(verts)
        norm = {}
        for r in signature.relations:
            norm[r.name] = set()
        for name, hyperedges in (edges or {}).items():
            rel = signature.relation(name)
            bucket = norm[name]
            for raw in hyperedges:
                raw = list(raw)
                e = frozenset(raw)
                if len(e) != len(raw):
                    raise RepeatedVertexInEdge(f"{name} edge {raw} repeats a vertex")
                if len(e) != rel.arity:
                    raise ArityMismatch(f"{name} edge {raw} has size {len(e)}, arity is {rel.arity}")
                missing = e - vset
                if missing:
                    raise UnknownVertex(f"{name} edge {raw} uses unknown vertices {sorted(missing)}")
                if e in bucket:
                    warnings.warn(f"duplicate {name} edge {sorted(e)} dropped", stacklevel=2)
                bucket.add(e)
        self.signature = signature
        self.vertices = tuple(verts)
        self.edges = {k: frozenset(v) for k, v in norm.items()}
        self._index = {v: i for i, v in enumerate(verts)}
        em = []
        for r in signature.relations:
            w = signature.weight(r.name)
            for e in sorted(self.edges[r.name], key=sorted):
                m = 0
                for v in e:
                    m |= 1 << self._index[v]
                em.append((w, m))
        self._emasks = em
        self._hash = None

    # -- basic protocol -------------------------------------------------
    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return (isinstance(other, FiniteStructure) and self.signature == other.signature
                and self.vertices == other.vertices and self.edges == other.edges)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.signature, self.vertices,
                               tuple(sorted((k, frozenset(v)) for k, v in self.edges.items()))))
        return self._hash

    def __repr__(self):
        n = sum(len(v) for v in self.edges.values())
        return f"<FiniteStructure |V|={len(self.vertices)} |E|={n}>"

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.vertices)) - 1

    def edge_count(self, name: str | None = None) -> int:
        if name is None:
            return sum(len(v) for v in self.edges.values())
        return len(self.edges[name])

    def sorted_edges(self, name: str) -> list[list[str]]:
        return sorted(sorted(e) for e in self.edges[name])

    # -- mask helpers ---------------------------------------------------
    def mask(self, vs: Iterable[str]) -> int:
        m = 0
        for v in vs:
            try:
                m |= 1 << self._index[v]
            except KeyError:
                raise UnknownVertex(f"vertex {v!r} not in structure") from None
        return m

    def names(self, mask: int) -> frozenset:
        return frozenset(v for i, v in enumerate(self.vertices) if mask >> i & 1)

    def delta_units(self, mask: int) -> int:
        """c·δ of the induced substructure on ``mask``."""
        return _minimize.rank_units(self.signature.c, self._emasks, mask)

    def min_superset(self, base: int, universe: int | None = None) -> tuple[int, int]:
        """(c·min δ, least minimiser) over base ⊆ X ⊆ universe."""
        if universe is None:
            universe = self.full_mask
        return _minimize.min_superset(self.signature.c, self._emasks, universe, base)

    def min_superset_bounds(self, base: int, universe: int | None = None) -> tuple[int, int, int]:
        """(c·min δ, least minimiser, greatest minimiser) over base ⊆ X ⊆ universe."""
        if universe is None:
            universe = self.full_mask
        return _minimize.min_superset_bounds(self.signature.c, self._emasks, universe, base)

    def units(self, value: int) -> Fraction:
        return Fraction(value, self.signature.c)

    def neighbours(self, v: str) -> frozenset:
        out = set()
        for es in self.edges.values():
            for e in es:
                if v in e:
                    out |= e
        out.discard(v)
        return frozenset(out)


# ----------------------------------------------------------------------
# operations


def empty(signature: Signature) -> FiniteStructure:
    return FiniteStructure(signature, ())


def points(signature: Signature, names: Iterable[str]) -> FiniteStructure:
    """Structure on ``names`` with no relations."""
    return FiniteStructure(signature, names)


def validate_structure(raw: Mapping, signature: Signature | None = None) -> FiniteStructure:
    """Build a structure from a plain description.

    ``raw`` holds ``vertices`` and ``edges`` (relation name to list of vertex
    lists) and, unless ``signature`` is given, a ``signature`` entry in the
    canonical JSON layout.
    """
    if signature is None:
        from .io import signature_from_json
        signature = signature_from_json(raw["signature"])
    verts = [str(v) for v in raw.get("vertices", [])]
    edges = {k: [[str(x) for x in e] for e in es] for k, es in (raw.get("edges") or {}).items()}
    return FiniteStructure(signature, verts, edges)


def delta(S: FiniteStructure) -> Fraction:
    """|A| − Σ α(E)·N_E(A), exactly."""
    return S.units(S.delta_units(S.full_mask))


def delta_of(S: FiniteStructure, V: Iterable[str]) -> Fraction:
    """δ of the induced substructure on ``V`` without building it."""
    return S.units(S.delta_units(S.mask(V)))


def delta_rel(Z: FiniteStructure, B: Iterable[str], A: Iterable[str]) -> Fraction:
    """δ(B/A) = δ(A∪B) − δ(A) inside ``Z``."""
    a = Z.mask(A)
    b = Z.mask(B)
    return Z.units(Z.delta_units(a | b) - Z.delta_units(a))


def induced(S: FiniteStructure, V: Iterable[str]) -> FiniteStructure:
    V = frozenset(V)
    S.mask(V)  # raises UnknownVertex
    edges = {k: [e for e in es if e <= V] for k, es in S.edges.items()}
    return FiniteStructure(S.signature, V, edges)


def is_in_Kalpha(S: FiniteStructure) -> bool:
    """True iff every induced substructure has δ ≥ 0."""
    value, _ = S.min_superset(0)
    return value >= 0


def is_induced_in(A: FiniteStructure, B: FiniteStructure) -> bool:
    if A.signature != B.signature or not A.vertex_set <= B.vertex_set:
        return False
    return induced(B, A.vertices) == A


def free_join(parts: list[FiniteStructure], A: FiniteStructure) -> FiniteStructure:
    """Free join of ``parts`` over ``A``: union with no additional relations."""
    if not parts:
        return A
    sig = A.signature
    base = A.vertex_set
    for p in parts:
        if p.signature != sig:
            raise SignatureMismatch("free join over different signatures")
        if not is_induced_in(A, p):
            raise BaseNotInduced("base is not an induced substructure of every part")
    for p, q in combinations(parts, 2):
        if p.vertex_set & q.vertex_set != base:
            raise NotDisjointOverBase("parts overlap outside the base")
    verts = set()
    edges = {r.name: set() for r in sig.relations}
    for p in parts:
        verts |= p.vertex_set
        for k, es in p.edges.items():
            edges[k] |= es
    return FiniteStructure(sig, verts, edges)


def disjoint_union(parts: list[FiniteStructure]) -> FiniteStructure:
    """Free join over the empty structure."""
    if not parts:
        raise ValueError("need at least one part")
    return free_join(parts, empty(parts[0].signature))


def rename(S: FiniteStructure, mapping: Mapping[str, str]) -> FiniteStructure:
    """Apply an injective renaming; vertices absent from ``mapping`` keep their id."""
    f = {v: mapping.get(v, v) for v in S.vertices}
    if len(set(f.values())) != len(f):
        raise ValueError("renaming is not injective")
    edges = {k: [[f[x] for x in e] for e in es] for k, es in S.edges.items()}
    return FiniteStructure(S.signature, f.values(), edges)


def fresh_names(taken: Iterable[str], count: int, prefix: str = "v") -> list[str]:
    """``count`` ids ``prefix<i>`` not in ``taken``, zero padded for stable sorting."""
    taken = set(taken)
    out = []
    i = 0
    while len(out) < count:
        name = f"{prefix}{i:04d}"
        if name not in taken:
            out.append(name)
        i += 1
    return out


def add_edges(S: FiniteStructure, new_vertices: Iterable[str],
              new_edges: Mapping[str, Iterable[Iterable[str]]]) -> FiniteStructure:
    verts = list(S.vertices) + list(new_vertices)
    edges = {k: set(v) for k, v in S.edges.items()}
    for k, es in new_edges.items():
        edges.setdefault(k, set()).update(frozenset(e) for e in es)
    return FiniteStructure(S.signature, verts, edges)


# ----------------------------------------------------------------------
# isomorphism


def _degree_profile(S: FiniteStructure, v: str) -> tuple:
    return tuple(sum(1 for e in S.edges[r.name] if v in e) for r in S.signature.relations)


def _consistent(S1, S2, f, v, w):
    """Does mapping v→w agree with f on all hyperedges inside dom(f)∪{v}?"""
    dom = set(f) | {v}
    for r in S1.signature.relations:
        name = r.name
        for e in S1.edges[name]:
            if v in e and e <= dom:
                img = frozenset(w if x == v else f[x] for x in e)
                if img not in S2.edges[name]:
                    return False
        rng = set(f.values()) | {w}
        inv = {b: a for a, b in f.items()}
        inv[w] = v
        for e in S2.edges[name]:
            if w in e and e <= rng:
                pre = frozenset(inv[x] for x in e)
                if pre not in S1.edges[name]:
                    return False
    return True


def iso_check(S1: FiniteStructure, S2: FiniteStructure,
              fixed: Mapping[str, str] | None = None) -> dict | None:
    """An isomorphism S1 → S2 extending ``fixed``, or None.

    Plain backtracking with degree-profile pruning; intended for small inputs.
    """
    if S1.signature != S2.signature:
        raise SignatureMismatch("structures over different signatures")
    fixed = dict(fixed or {})
    if len(set(fixed.values())) != len(fixed):
        raise ValueError("fixed map is not injective")
    S1.mask(fixed.keys())
    S2.mask(fixed.values())
    if len(S1) != len(S2):
        return None
    for r in S1.signature.relations:
        if len(S1.edges[r.name]) != len(S2.edges[r.name]):
            return None
    prof1 = {v: _degree_profile(S1, v) for v in S1.vertices}
    prof2 = {v: _degree_profile(S2, v) for v in S2.vertices}
    if sorted(prof1.values()) != sorted(prof2.values()):
        return None
    f = {}
    for v, w in sorted(fixed.items()):
        if prof1[v] != prof2[w] or not _consistent(S1, S2, f, v, w):
            return None
        f[v] = w
    order = [v for v in S1.vertices if v not in f]
    # most constrained first: high degree, then name
    order.sort(key=lambda v: (-sum(prof1[v]), v))
    return _extend_iso(S1, S2, f, order, 0, prof1, prof2)


def _extend_iso(S1, S2, f, order, i, prof1, prof2):
    if i == len(order):
        return dict(f)
    v = order[i]
    used = set(f.values())
    for w in S2.vertices:
        if w in used or prof2[w] != prof1[v]:
            continue
        if _consistent(S1, S2, f, v, w):
            f[v] = w
            res = _extend_iso(S1, S2, f, order, i + 1, prof1, prof2)
            if res is not None:
                return res
            del f[v]
    return None
