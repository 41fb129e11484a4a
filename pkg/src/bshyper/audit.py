"""Exhaustive reference oracles and seeded property suites.

The oracles enumerate subsets directly from the definitions and share no
code with the min-cut routines they are compared against.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .errors import OracleBoundExceeded, UnknownSuite
from .rank import StrongCertificate, d_value, icl, is_strong
from .structures import (
    FiniteStructure,
    Relation,
    Signature,
    delta_of,
    delta_rel,
    free_join,
    induced,
    is_in_Kalpha,
)

ORACLE_BOUND = 12
ALPHAS = (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(3, 5))


# ----------------------------------------------------------------------
# oracles


def _table(Z: FiniteStructure) -> list[Fraction]:
    """δ of every vertex subset of Z, indexed by bitmask."""
    n = len(Z.vertices)
    edges = [(Fraction(r.alpha), Z.mask(e)) for r in Z.signature.relations for e in Z.edges[r.name]]
    out = []
    for m in range(1 << n):
        val = Fraction(bin(m).count("1"))
        for w, em in edges:
            if em & m == em:
                val -= w
        out.append(val)
    return out


def _supersets(base: int, free: list[int]):
    for k in range(1 << len(free)):
        m = base
        for j, bit in enumerate(free):
            if k >> j & 1:
                m |= bit
        yield m


def oracle_strong(Z: FiniteStructure, A: Iterable[str], bound: int = ORACLE_BOUND) -> StrongCertificate:
    """A ≤ Z by enumerating every A ⊆ A′ ⊆ Z."""
    a = Z.mask(A)
    free = [1 << i for i in range(len(Z.vertices)) if not a >> i & 1]
    if len(free) > bound:
        raise OracleBoundExceeded(f"{len(free)} vertices outside the base (bound {bound})")
    base_val = delta_of(Z, Z.names(a))
    best, witness = base_val, None
    for m in _supersets(a, free):
        val = delta_of(Z, Z.names(m))
        if val < best or (val == best and witness is not None and bin(m).count("1") < bin(witness).count("1")):
            best, witness = val, m
    if witness is None:
        return StrongCertificate(True, Z.names(a), None, base_val, None)
    return StrongCertificate(False, Z.names(a), Z.names(witness), base_val, best)


def oracle_icl(Z: FiniteStructure, X: Iterable[str], bound: int = ORACLE_BOUND) -> frozenset:
    """Smallest strong superset of X, by size-ordered enumeration."""
    if len(Z.vertices) > bound:
        raise OracleBoundExceeded(f"structure has {len(Z.vertices)} vertices (bound {bound})")
    X = frozenset(X)
    Z.mask(X)
    table = _table(Z)
    rest = [v for v in Z.vertices if v not in X]
    full = Z.full_mask
    for size in range(len(rest) + 1):
        for extra in combinations(rest, size):
            y = Z.mask(X | set(extra))
            if all(table[m] >= table[y] for m in range(full + 1) if m & y == y):
                return X | frozenset(extra)
    return frozenset(Z.vertices)


def oracle_d(Z: FiniteStructure, A: Iterable[str], bound: int = ORACLE_BOUND) -> Fraction:
    """min δ(A′) over A ⊆ A′ ⊆ Z, by enumeration."""
    a = Z.mask(A)
    free = [1 << i for i in range(len(Z.vertices)) if not a >> i & 1]
    if len(free) > bound:
        raise OracleBoundExceeded(f"{len(free)} vertices outside the base (bound {bound})")
    return min(delta_of(Z, Z.names(m)) for m in _supersets(a, free))


def minimal_pairs(Z: FiniteStructure) -> list[tuple[int, int]]:
    """Every minimal pair (A, B) of subsets of Z, as bitmasks, straight from the definition."""
    if len(Z.vertices) > ORACLE_BOUND:
        raise OracleBoundExceeded("structure too large for minimal pair enumeration")
    table = _table(Z)
    full = Z.full_mask
    out = []
    for a in range(full + 1):
        for b in range(full + 1):
            if b & a != a or b == a or table[b] >= table[a]:
                continue
            rest = b & ~a
            ok = True
            sub = (rest - 1) & rest
            while True:
                if table[a | sub] < table[a]:
                    ok = False
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            if ok:
                out.append((a, b))
    return out


def is_closed(Z: FiniteStructure, X: Iterable[str], pairs=None) -> bool:
    """X closed in Z: every minimal pair based inside X stays inside X."""
    x = Z.mask(X)
    for a, b in pairs if pairs is not None else minimal_pairs(Z):
        if a & ~x == 0 and b & ~x:
            return False
    return True


def flatness_check(Z: FiniteStructure, family: list[Iterable[str]]) -> Fraction:
    """Σ over s ⊆ I of (−1)^|s| d(E_s), with E_∅ the union and d taken in Z."""
    sets = [frozenset(E) for E in family]
    for E in sets:
        Z.mask(E)
    total = Fraction(0)
    n = len(sets)
    for k in range(1 << n):
        if k == 0:
            E = frozenset().union(*sets)
        else:
            members = [sets[i] for i in range(n) if k >> i & 1]
            E = frozenset.intersection(*members)
        sign = -1 if bin(k).count("1") % 2 else 1
        total += sign * d_value(Z, E)
    return total


# ----------------------------------------------------------------------
# random structures


def random_signature(rng: random.Random, hyper: bool = False) -> Signature:
    rels = [Relation("E", 2, rng.choice(ALPHAS))]
    if hyper:
        rels.append(Relation("R", 3, rng.choice(ALPHAS)))
    return Signature(rels)


def random_structure(rng: random.Random, sig: Signature, names: list[str], p: float,
                     keep: FiniteStructure | None = None) -> FiniteStructure:
    """Random hyperedges on ``names``; with ``keep`` only edges leaving it are new."""
    inner = set(keep.vertices) if keep is not None else set()
    edges = {}
    for r in sig.relations:
        out = [list(e) for e in keep.edges[r.name]] if keep is not None else []
        for e in combinations(names, r.arity):
            if set(e) <= inner:
                continue
            if rng.random() < p:
                out.append(list(e))
        edges[r.name] = out
    return FiniteStructure(sig, names, edges)


def repair(S: FiniteStructure, protect: Iterable[str] = ()) -> FiniteStructure:
    """Delete edges until S ∈ K_α.

    Each pass takes the least subset of negative rank and drops its last edge
    (in sorted order) that is not inside ``protect``.
    """
    protect = frozenset(protect)
    while True:
        val, X = S.min_superset(0)
        if val >= 0:
            return S
        inside = S.names(X)
        victim = None
        for r in S.signature.relations:
            for e in S.sorted_edges(r.name):
                if set(e) <= inside and not set(e) <= protect:
                    victim = (r.name, frozenset(e))
        if victim is None:
            raise ValueError("cannot repair without touching the protected part")
        edges = {k: [e for e in es if (k, e) != victim] for k, es in S.edges.items()}
        S = FiniteStructure(S.signature, S.vertices, edges)


def random_kalpha(rng: random.Random, sig: Signature, n: int, p: float | None = None,
                  prefix: str = "v") -> FiniteStructure:
    if p is None:
        p = rng.choice((0.2, 0.4, 0.6, 0.8))
    names = [f"{prefix}{i}" for i in range(n)]
    return repair(random_structure(rng, sig, names, p))


def random_subset(rng: random.Random, vs: Iterable[str]) -> frozenset:
    return frozenset(v for v in vs if rng.random() < 0.5)


# ----------------------------------------------------------------------
# suites


@dataclass
class SuiteReport:
    name: str
    cases: int
    seed: int
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"suite": self.name, "cases": self.cases, "seed": self.seed,
                "failures": self.failures}


def _case_rng(seed: int, i: int) -> random.Random:
    return random.Random(seed * 1_000_003 + i)


def _fail(report, i, detail, **structures):
    from .io import structure_to_json
    report.failures.append({"case": i, "detail": detail,
                            **{k: structure_to_json(v) if isinstance(v, FiniteStructure) else sorted(v)
                               for k, v in structures.items()}})


def _suite_amalgamation(i, rng, report):
    sig = random_signature(rng, hyper=rng.random() < 0.25)
    B = random_kalpha(rng, sig, rng.randint(1, 6), prefix="b")
    A = icl(B, random_subset(rng, B.vertices))
    base = induced(B, A)
    extra = [f"c{j}" for j in range(rng.randint(0, 4))]
    C = random_structure(rng, sig, list(A) + extra, rng.choice((0.2, 0.5)), keep=base)
    C = repair(C, protect=A)
    D = free_join([B, C], base)
    if not is_in_Kalpha(D):
        _fail(report, i, "free join left K_alpha", B=B, C=C, A=A)
    elif not is_strong(D, C.vertices).verdict:
        _fail(report, i, "C not strong in the free join", B=B, C=C, A=A)


def _suite_rank_identities(i, rng, report):
    sig = random_signature(rng, hyper=rng.random() < 0.25)
    Z = random_kalpha(rng, sig, rng.randint(1, 8))
    A, B = random_subset(rng, Z.vertices), random_subset(rng, Z.vertices)
    # item 1: monotonicity in the base
    if not delta_rel(Z, B, A & B) >= delta_rel(Z, B, A) == delta_rel(Z, A | B, A):
        _fail(report, i, "relative rank not monotone in the base", Z=Z, A=A, B=B)
        return
    # item 1, free part: B and C freely joined over A
    AB = induced(Z, A | B)
    extra = [f"w{j}" for j in range(rng.randint(1, 3))]
    AC = repair(random_structure(rng, sig, sorted(A) + extra, 0.4, keep=induced(Z, A)), protect=A)
    F = free_join([AB, AC], induced(Z, A))
    if delta_rel(F, B, A | set(extra)) != delta_rel(F, B, A):
        _fail(report, i, "free join changed relative rank", Z=Z, A=A, B=B)
        return
    # item 2: additivity over a free join, and strongness of the join
    parts = [AB, AC]
    total = sum(delta_rel(P, P.vertex_set, A) for P in parts)
    if delta_rel(F, F.vertex_set, A) != total:
        _fail(report, i, "free join not additive", Z=Z, A=A, B=B)
        return
    if all(is_strong(P, A).verdict for P in parts) and not is_strong(F, A).verdict:
        _fail(report, i, "base strong in parts but not in join", Z=Z, A=A, B=B)
        return
    # item 3: chain rule
    blocks = [random_subset(rng, Z.vertices) for _ in range(rng.randint(1, 4))]
    lhs = delta_rel(Z, frozenset().union(*blocks), A)
    rhs = Fraction(0)
    acc = set(A)
    for blk in blocks:
        rhs += delta_rel(Z, blk, acc)
        acc |= blk
    if lhs != rhs:
        _fail(report, i, "chain rule fails", Z=Z, A=A, B=B)


def _suite_closed_strong(i, rng, report):
    sig = random_signature(rng, hyper=rng.random() < 0.25)
    Z = random_kalpha(rng, sig, rng.randint(1, 7))
    pairs = minimal_pairs(Z)
    for x in range(Z.full_mask + 1):
        X = Z.names(x)
        if is_strong(Z, X).verdict != is_closed(Z, X, pairs):
            _fail(report, i, "strong and closed disagree", Z=Z, X=X)
            return


def _suite_flatness(i, rng, report):
    sig = random_signature(rng, hyper=rng.random() < 0.25)
    Z = random_kalpha(rng, sig, rng.randint(1, 8))
    family = [icl(Z, random_subset(rng, Z.vertices)) for _ in range(rng.randint(1, 4))]
    val = flatness_check(Z, family)
    if val > 0:
        _fail(report, i, f"flatness sum {val} > 0", Z=Z)


def _suite_oracle_equivalence(i, rng, report):
    sig = random_signature(rng, hyper=rng.random() < 0.25)
    Z = random_kalpha(rng, sig, rng.randint(0, 8))
    X = random_subset(rng, Z.vertices)
    if is_strong(Z, X).verdict != oracle_strong(Z, X).verdict:
        _fail(report, i, "is_strong differs from oracle", Z=Z, X=X)
    elif icl(Z, X) != oracle_icl(Z, X):
        _fail(report, i, "icl differs from oracle", Z=Z, X=X)
    elif d_value(Z, X) != oracle_d(Z, X):
        _fail(report, i, "d differs from oracle", Z=Z, X=X)


SUITES = {
    "amalgamation": _suite_amalgamation,
    "rank-identities": _suite_rank_identities,
    "closed-strong": _suite_closed_strong,
    "flatness": _suite_flatness,
    "oracle-equivalence": _suite_oracle_equivalence,
}


def run_property_suite(name: str, cases: int, seed: int = 0) -> SuiteReport:
    """Run ``cases`` seeded random instances of a named invariant."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    check = SUITES[name]
    report = SuiteReport(name, cases, seed)
    start = time.monotonic()
    for i in range(cases):
        check(i, _case_rng(seed, i), report)
    report.elapsed = time.monotonic() - start
    return report
