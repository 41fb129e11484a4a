"""Strong substructures, minimal pairs, intrinsic closure, d, dim and nuggets.

Every predicate returns a certificate that can be re-checked independently.
Minimisation over supersets runs through an exact min-cut; the exhaustive
references live in :mod:`bshyper.audit`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import (
    BaseNotStrong,
    BaseRankNotPositive,
    BaseNotInduced,
    EmptyBody,
    NotNested,
    OracleBoundExceeded,
)
from .structures import FiniteStructure, delta, is_in_Kalpha, is_induced_in

EXHAUSTIVE_BOUND = 16


@dataclass(frozen=True)
class StrongCertificate:
    verdict: bool
    base: frozenset
    witness: frozenset | None = None
    base_delta: Fraction | None = None
    witness_delta: Fraction | None = None

    kind = "strong"

    def __bool__(self):
        return self.verdict


@dataclass(frozen=True)
class MinimalPairCertificate:
    verdict: bool
    base: frozenset
    body: frozenset
    drop: Fraction
    essential: bool = False
    reason: str = ""
    # per removed body vertex x: min δ(C) − δ(A) over A ⊆ C ⊆ B∖{x}
    intermediate_slack: tuple = ()
    # per base vertex a: δ(D∖{a} / A∖{a})
    base_slack: tuple = ()
    witness: frozenset | None = None

    kind = "minimal_pair"

    def __bool__(self):
        return self.verdict


@dataclass(frozen=True)
class NuggetCertificate:
    verdict: bool
    base: frozenset
    body: frozenset
    level: Fraction
    k: int | None
    witness: frozenset | None = None

    kind = "nugget"

    def __bool__(self):
        return self.verdict


def _mask(Z: FiniteStructure, A: Iterable[str]) -> int:
    return Z.mask(A)


def is_strong(Z: FiniteStructure, A: Iterable[str]) -> StrongCertificate:
    """A ≤ Z: no C with A ⊆ C ⊆ Z has δ(C) < δ(A)."""
    a = _mask(Z, A)
    base_val = Z.delta_units(a)
    best, witness = Z.min_superset(a)
    if best < base_val:
        return StrongCertificate(False, Z.names(a), Z.names(witness),
                                 Z.units(base_val), Z.units(best))
    return StrongCertificate(True, Z.names(a), None, Z.units(base_val), None)


def is_minimal_pair(Z: FiniteStructure, A: Iterable[str], B: Iterable[str]) -> MinimalPairCertificate:
    """(A, B) minimal pair: A ≤ C for every A ⊆ C ⊊ B but δ(B) < δ(A).

    Every proper intermediate lies inside some B∖{x}, so one minimisation per
    body vertex decides the first clause.
    """
    a, b = _mask(Z, A), _mask(Z, B)
    if a & ~b:
        raise NotNested("base is not contained in body")
    da, db = Z.delta_units(a), Z.delta_units(b)
    drop = Z.units(db - da)
    if a == b:
        return MinimalPairCertificate(False, Z.names(a), Z.names(b), drop, reason="body equals base")
    slack = []
    for i in range(len(Z.vertices)):
        bit = 1 << i
        if not (b & ~a) & bit:
            continue
        val, wit = Z.min_superset(a, b & ~bit)
        slack.append((Z.vertices[i], Z.units(val - da)))
        if val < da:
            return MinimalPairCertificate(False, Z.names(a), Z.names(b), drop,
                                          reason="proper intermediate below base",
                                          intermediate_slack=tuple(slack), witness=Z.names(wit))
    if db >= da:
        return MinimalPairCertificate(False, Z.names(a), Z.names(b), drop,
                                      reason="base is strong in body",
                                      intermediate_slack=tuple(slack))
    return MinimalPairCertificate(True, Z.names(a), Z.names(b), drop, intermediate_slack=tuple(slack))


def is_essential_minimal_pair(B: FiniteStructure, D: FiniteStructure) -> MinimalPairCertificate:
    """(B, D) minimal pair with δ(D′/D′∩B) ≥ 0 for every D′ ⊊ D.

    Given the minimal-pair clause, the only further subsets that can dip below
    zero drop a base vertex while keeping all new ones, and among those the
    single-vertex deletions are extremal; so |B| rank evaluations decide it.
    """
    if not is_induced_in(B, D):
        raise BaseNotInduced("base is not an induced substructure")
    if delta(B) <= 0:
        raise BaseRankNotPositive(f"δ(base) = {delta(B)} is not positive")
    cert = is_minimal_pair(D, B.vertices, D.vertices)
    if not cert.verdict:
        return cert
    full = D.full_mask
    bmask = D.mask(B.vertices)
    slack = []
    for v in B.vertices:
        bit = D.mask([v])
        s = (D.delta_units(full & ~bit) - D.delta_units(bmask & ~bit))
        slack.append((v, D.units(s)))
        if s < 0:
            return MinimalPairCertificate(False, cert.base, cert.body, cert.drop, essential=False,
                                          reason="deleting a base vertex leaves negative relative rank",
                                          intermediate_slack=cert.intermediate_slack,
                                          base_slack=tuple(slack),
                                          witness=D.names(full & ~bit))
    if not is_in_Kalpha(D):
        return MinimalPairCertificate(False, cert.base, cert.body, cert.drop,
                                      reason="extension leaves K_alpha",
                                      intermediate_slack=cert.intermediate_slack, base_slack=tuple(slack))
    return MinimalPairCertificate(True, cert.base, cert.body, cert.drop, essential=True,
                                  intermediate_slack=cert.intermediate_slack, base_slack=tuple(slack))


def _find_minimal_drop(Z: FiniteStructure, y: int) -> int | None:
    """Body of a minimal pair over ``y``, or None when ``y`` is strong."""
    dy = Z.delta_units(y)
    val, body = Z.min_superset(y)
    if val >= dy:
        return None
    while True:
        for i in range(len(Z.vertices)):
            bit = 1 << i
            if not (body & ~y) & bit:
                continue
            v2, w2 = Z.min_superset(y, body & ~bit)
            if v2 < dy:
                body = w2
                break
        else:
            return body


def icl(Z: FiniteStructure, X: Iterable[str]) -> frozenset:
    """Smallest closed superset of X in Z, by absorbing minimal-pair bodies."""
    y = _mask(Z, X)
    while True:
        body = _find_minimal_drop(Z, y)
        if body is None:
            return Z.names(y)
        y = body


def icl_mincut(Z: FiniteStructure, X: Iterable[str]) -> frozenset:
    """Least minimiser of δ over supersets of X; equals :func:`icl`."""
    _, w = Z.min_superset(_mask(Z, X))
    return Z.names(w)


def d_value(Z: FiniteStructure, A: Iterable[str]) -> Fraction:
    """min δ(A′) over A ⊆ A′ ⊆ Z."""
    val, _ = Z.min_superset(_mask(Z, A))
    return Z.units(val)


def d_via_icl(Z: FiniteStructure, A: Iterable[str]) -> Fraction:
    return Z.units(Z.delta_units(Z.mask(icl(Z, A))))


def d_rel(Z: FiniteStructure, B: Iterable[str], X: Iterable[str]) -> Fraction:
    """d(B/X) = d(BX) − d(X) within Z."""
    B, X = set(B), set(X)
    return d_value(Z, B | X) - d_value(Z, X)


def dim_rel(M: FiniteStructure, A: Iterable[str] = ()) -> Fraction:
    """max δ(B/A) over A ≤ B ≤ M; for finite M it is δ(M/A)."""
    A = list(A)
    if not is_strong(M, A).verdict:
        raise BaseNotStrong("base is not strong in the structure")
    a = M.mask(A)
    return M.units(M.delta_units(M.full_mask) - M.delta_units(a))


def is_nugget(D: FiniteStructure, A: Iterable[str]) -> NuggetCertificate:
    """Is B = D∖A a k/c-nugget over A?  Exhaustive over proper sub-bodies."""
    a = _mask(D, A)
    body = D.full_mask & ~a
    if a == D.full_mask or not body:
        raise EmptyBody("body D∖A is empty")
    bits = [1 << i for i in range(len(D.vertices)) if body >> i & 1]
    if len(bits) > EXHAUSTIVE_BOUND:
        raise OracleBoundExceeded(f"body has {len(bits)} vertices (bound {EXHAUSTIVE_BOUND})")
    da = D.delta_units(a)
    level = D.delta_units(a | body) - da
    lv = D.units(level)
    k = level if level >= 0 else None
    for pick in range(1, (1 << len(bits)) - 1):
        m = a
        for j, bit in enumerate(bits):
            if pick >> j & 1:
                m |= bit
        if D.delta_units(m) - da <= level:
            return NuggetCertificate(False, D.names(a), D.names(body), lv, k, D.names(m & ~a))
    if level < 0:
        return NuggetCertificate(False, D.names(a), D.names(body), lv, None)
    return NuggetCertificate(True, D.names(a), D.names(body), lv, k)
