"""Constructive gadgets, each returned with claims that re-verify on the output.

Essential minimal pairs come from :mod:`bshyper.gadgets`.  Everything else is
assembled from free joins and chains of drop −1/c steps.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .errors import (
    BaseNotStrong,
    BaseRankNotPositive,
    BudgetExhausted,
    CertificationFailed,
    NegativeTarget,
    NotANugget,
    NotInKalpha,
    PreconditionRankOrder,
    RankTooLow,
    BaseNotInduced,
)
from .gadgets import assign_slots, find_shape
from .rank import is_essential_minimal_pair, is_minimal_pair, is_nugget, is_strong
from .structures import (
    FiniteStructure,
    add_edges,
    delta,
    delta_of,
    free_join,
    fresh_names,
    induced,
    is_in_Kalpha,
    is_induced_in,
    rename,
)


@dataclass(frozen=True)
class SearchBudget:
    max_new_vertices: int = 256
    max_new_edges: int = 4096
    # recorded for reproducibility; the search order is already canonical
    seed: int = 0
    time_ms: int = 120_000
    # largest gadget searched exhaustively before falling back to the path family
    search_vertices: int = 6
    # "auto" caps attach gadgets to the whole stage while it has at most this many vertices
    proof_max_vertices: int = 24

    def __post_init__(self):
        for name in ("max_new_vertices", "max_new_edges", "time_ms", "search_vertices",
                     "proof_max_vertices"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def deadline(self) -> float:
        return time.monotonic() + self.time_ms / 1000

    def to_json(self):
        return {"max_new_vertices": self.max_new_vertices, "max_new_edges": self.max_new_edges,
                "seed": self.seed, "time_ms": self.time_ms,
                "search_vertices": self.search_vertices,
                "proof_max_vertices": self.proof_max_vertices}


@dataclass(frozen=True)
class Claim:
    """One checkable statement about the output structure.

    kinds: ``strong`` / ``not_strong`` (base inside ``within``),
    ``essential_minimal_pair`` and ``minimal_pair`` (base, body; ``value`` is
    the drop), ``rank`` (δ(body/base) == value), ``in_kalpha`` (``within``).
    """
    label: str
    kind: str
    base: frozenset = frozenset()
    body: frozenset = frozenset()
    within: frozenset | None = None
    value: Fraction | None = None
    verdict: bool = False
    certificate: object = None

    def to_json(self):
        from .io import rational, to_jsonable
        out = {"label": self.label, "kind": self.kind, "verdict": self.verdict,
               "base": sorted(self.base)}
        if self.kind in ("essential_minimal_pair", "minimal_pair", "rank"):
            out["body"] = sorted(self.body)
        if self.within is not None:
            out["within"] = sorted(self.within)
        if self.value is not None:
            out["value"] = rational(self.value)
        if self.certificate is not None:
            out["certificate"] = to_jsonable(self.certificate)["certificate"]
        return out


def check_claim(output: FiniteStructure, claim: Claim) -> bool:
    """Recompute ``claim`` from scratch against ``output``."""
    within = output if claim.within is None else induced(output, claim.within)
    kind = claim.kind
    if kind == "strong":
        return is_strong(within, claim.base).verdict
    if kind == "not_strong":
        return not is_strong(within, claim.base).verdict
    if kind == "in_kalpha":
        return is_in_Kalpha(within)
    if kind == "rank":
        return delta_of(output, claim.base | claim.body) - delta_of(output, claim.base) == claim.value
    if kind == "essential_minimal_pair":
        cert = is_essential_minimal_pair(induced(output, claim.base), induced(output, claim.body))
        return cert.verdict and cert.drop == claim.value
    if kind == "minimal_pair":
        cert = is_minimal_pair(induced(output, claim.body), claim.base, claim.body)
        return cert.verdict and cert.drop == claim.value
    raise ValueError(f"unknown claim kind {kind!r}")


@dataclass
class GadgetResult:
    output: FiniteStructure
    embeddings: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    derivation: list = field(default_factory=list)

    def verify(self) -> list[tuple[str, bool]]:
        return [(c.label, check_claim(self.output, c)) for c in self.certificates]

    def to_json(self):
        from .io import structure_to_json
        return {
            "output": structure_to_json(self.output),
            "embeddings": {k: dict(sorted(v.items())) for k, v in sorted(self.embeddings.items())},
            "certificates": [c.to_json() for c in self.certificates],
            "derivation": self.derivation,
        }


# ----------------------------------------------------------------------
# claim helpers


def _strong_claim(label, Z: FiniteStructure, base, within=None) -> Claim:
    inner = Z if within is None else induced(Z, within)
    cert = is_strong(inner, base)
    return Claim(label, "strong", frozenset(base), within=None if within is None else frozenset(within),
                 verdict=cert.verdict, certificate=cert)


def _rank_claim(label, Z: FiniteStructure, body, base, value) -> Claim:
    base, body = frozenset(base), frozenset(body)
    got = delta_of(Z, base | body) - delta_of(Z, base)
    return Claim(label, "rank", base, body, value=Fraction(value), verdict=got == value)


def _kalpha_claim(label, Z: FiniteStructure) -> Claim:
    return Claim(label, "in_kalpha", verdict=is_in_Kalpha(Z))


def _require(claims: Iterable[Claim], what: str):
    bad = [c.label for c in claims if not c.verdict]
    if bad:
        raise CertificationFailed(f"{what}: failed claims {bad}")


def _identity(vs) -> dict:
    return {v: v for v in sorted(vs)}


# ----------------------------------------------------------------------
# essential minimal pairs


def _essential_extension(A: FiniteStructure, budget: SearchBudget, deadline: float,
                         taken: Iterable[str], prefix: str = "x"):
    """New vertices and edges making (A, A+new) an essential minimal pair with drop −1/c."""
    stats = {}
    shape = find_shape(A.signature, len(A), budget.search_vertices, deadline, stats)
    n_edges = sum(mult for *_, mult in shape.parts)
    if shape.m > budget.max_new_vertices or n_edges > budget.max_new_edges:
        raise BudgetExhausted(
            f"gadget needs {shape.m} vertices and {n_edges} edges, beyond the budget",
            {**stats, "needed_vertices": shape.m, "needed_edges": n_edges})
    new = fresh_names(set(taken) | A.vertex_set, shape.m, prefix)
    edges = assign_slots(shape, list(A.vertices), new)
    if edges is None:
        raise BudgetExhausted("shape could not be wired onto the base", stats)
    return new, edges, shape


def synth_essential_minpair(A: FiniteStructure, budget: SearchBudget | None = None) -> GadgetResult:
    """D ⊇ A with (A, D) an essential minimal pair and δ(D/A) = −1/c."""
    budget = budget or SearchBudget()
    if not is_in_Kalpha(A):
        raise NotInKalpha("base is not in K_alpha")
    if A.delta_units(A.full_mask) <= 0:
        raise BaseRankNotPositive(f"δ(base) = {delta(A)} is not positive")
    new, edges, shape = _essential_extension(A, budget, budget.deadline(), ())
    D = add_edges(A, new, edges)
    drop = Fraction(-1, A.signature.c)
    cert = is_essential_minimal_pair(A, D)
    claims = [
        Claim("(A, D) essential minimal pair", "essential_minimal_pair", A.vertex_set, D.vertex_set,
              value=drop, verdict=cert.verdict and cert.drop == drop, certificate=cert),
        _kalpha_claim("D in K_alpha", D),
    ]
    _require(claims, "essential minimal pair")
    derivation = [{"step": "attach_gadget", "base_size": len(A), "new": sorted(new),
                   "shape_vertices": shape.m}]
    return GadgetResult(D, {"A": _identity(A.vertices)}, claims, derivation)


# ----------------------------------------------------------------------
# caps


def _strong_subsets(B: FiniteStructure, bound_units: int) -> list[frozenset]:
    out = []
    for r in range(len(B) + 1):
        for A in combinations(B.vertices, r):
            a = B.mask(A)
            if B.delta_units(a) <= bound_units and is_strong(B, A).verdict:
                out.append(frozenset(A))
    return out


def _compact_base(D: FiniteStructure, preserve: list[frozenset]) -> list[str]:
    """Small S ⊆ D with S ⊄ T_A for every preserved A.

    T_A is the greatest set X ⊇ A with δ(X) = δ(A).  A gadget attached to such
    an S cannot pull any preserved A below its rank.
    """
    chosen = 0
    for A in preserve:
        _, _, greatest = D.min_superset_bounds(D.mask(A))
        if chosen & ~greatest:
            continue
        outside = D.full_mask & ~greatest
        if not outside:
            raise CertificationFailed("a preserved set already has the stage's rank")
        chosen |= outside & -outside
    return sorted(D.names(chosen))


def cap_to_dim(B: FiniteStructure, k: int, budget: SearchBudget | None = None,
               recipe: str = "auto", preserve: Iterable[Iterable[str]] | None = None) -> GadgetResult:
    """D ⊇ B with δ(D) = k/c keeping every small-rank strong A ⊆ B strong.

    B is joined with k+1 free points, then the rank is lowered one unit at a
    time by attaching essential gadgets.  ``recipe`` picks the gadget base:
    ``proof`` uses the whole current stage, ``compact`` a few vertices chosen
    so the preserved sets stay strong, ``auto`` switches from the first to the
    second once the stage exceeds ``budget.proof_max_vertices``.
    """
    budget = budget or SearchBudget()
    if k < 0:
        raise NegativeTarget(f"target dimension k = {k} is negative")
    if recipe not in ("auto", "proof", "compact"):
        raise ValueError(f"unknown recipe {recipe!r}")
    if not is_in_Kalpha(B):
        raise NotInKalpha("structure is not in K_alpha")
    sig = B.signature
    c = sig.c
    deadline = budget.deadline()

    if preserve is None:
        preserve = _strong_subsets(B, k) if len(B) <= 12 else [frozenset()]
    preserve = sorted({frozenset(A) for A in preserve} | {frozenset()}, key=lambda s: (len(s), sorted(s)))
    for A in preserve:
        if not A <= B.vertex_set:
            raise BaseNotInduced("preserved set is not inside the structure")

    pts = fresh_names(B.vertices, k + 1, "p")
    D = add_edges(B, pts, {})
    derivation = [{"step": "free_points", "points": pts}]
    steps = D.delta_units(D.full_mask) - k
    drop = Fraction(-1, c)
    claims = []
    for i in range(steps):
        proof = recipe == "proof" or (recipe == "auto" and len(D) <= budget.proof_max_vertices)
        if proof:
            base = D
        else:
            base = induced(D, _compact_base(D, preserve))
        new, edges, shape = _essential_extension(base, budget, deadline, D.vertices)
        nxt = add_edges(D, new, edges)
        label = f"step {i + 1}"
        if proof:
            cert = is_essential_minimal_pair(D, nxt)
            kind = "essential_minimal_pair"
        else:
            cert = is_minimal_pair(nxt, D.vertices, nxt.vertices)
            kind = "minimal_pair"
        claims.append(Claim(f"{label}: {kind.replace('_', ' ')}", kind, D.vertex_set, nxt.vertex_set,
                            value=drop, verdict=cert.verdict and cert.drop == drop, certificate=cert))
        derivation.append({"step": "attach_gadget", "index": i + 1, "base": sorted(base.vertices),
                           "new": sorted(new), "recipe": "proof" if proof else "compact"})
        D = nxt

    claims.append(_kalpha_claim("D in K_alpha", D))
    claims.append(_rank_claim("delta(D) = k/c", D, D.vertex_set, (), Fraction(k, c)))
    for A in preserve:
        claims.append(_strong_claim(f"{{{','.join(sorted(A))}}} strong in D", D, A))
    _require(claims, "cap")
    return GadgetResult(D, {"B": _identity(B.vertices)}, claims, derivation)


def raise_by_one(A: FiniteStructure, budget: SearchBudget | None = None) -> GadgetResult:
    """B ⊇ A with A ≤ B and δ(B/A) = 1/c: cap A plus one point at δ(A) + 1/c."""
    if not is_in_Kalpha(A):
        raise NotInKalpha("structure is not in K_alpha")
    pt = fresh_names(A.vertices, 1, "q")
    star = add_edges(A, pt, {})
    k = A.delta_units(A.full_mask) + 1
    res = cap_to_dim(star, k, budget, preserve=[(), A.vertices])
    B = res.output
    claims = res.certificates + [
        _strong_claim("A strong in B", B, A.vertices),
        _rank_claim("delta(B/A) = 1/c", B, B.vertex_set, A.vertex_set, Fraction(1, A.signature.c)),
    ]
    _require(claims, "raise")
    derivation = [{"step": "free_points", "points": pt}] + res.derivation
    return GadgetResult(B, {"A": _identity(A.vertices)}, claims, derivation)


# ----------------------------------------------------------------------
# configurations built from caps


def _check_base(A: FiniteStructure, B: FiniteStructure, name: str):
    if not is_induced_in(A, B):
        raise BaseNotInduced(f"A is not an induced substructure of {name}")
    if not is_strong(B, A.vertices).verdict:
        raise BaseNotStrong(f"A is not strong in {name}")


def _rel_units(A: FiniteStructure, B: FiniteStructure) -> int:
    return B.delta_units(B.full_mask) - B.delta_units(B.mask(A.vertices))


def amalgam_cap(A: FiniteStructure, B: FiniteStructure, C: FiniteStructure,
                budget: SearchBudget | None = None) -> GadgetResult:
    """H ⊇ B ⊕_A C with A, B, C ≤ H and δ(H/C) = 0."""
    for S, name in ((B, "B"), (C, "C")):
        if not is_in_Kalpha(S):
            raise NotInKalpha(f"{name} is not in K_alpha")
        _check_base(A, S, name)
    rb, rc = _rel_units(A, B), _rel_units(A, C)
    if rc < rb:
        raise PreconditionRankOrder(f"δ(C/A) = {C.units(rc)} < δ(B/A) = {B.units(rb)}")
    D = free_join([B, C], A)
    k = C.delta_units(C.full_mask)
    res = cap_to_dim(D, k, budget, preserve=[(), A.vertices, B.vertices, C.vertices])
    H = res.output
    claims = res.certificates + [
        _rank_claim("delta(H/C) = 0", H, H.vertex_set, C.vertex_set, 0),
    ]
    if rb == rc:
        claims.append(_rank_claim("delta(H/B) = 0", H, H.vertex_set, B.vertex_set, 0))
    _require(claims, "amalgam cap")
    emb = {"A": _identity(A.vertices), "B": _identity(B.vertices), "C": _identity(C.vertices)}
    derivation = [{"step": "free_join", "over": sorted(A.vertices)}] + res.derivation
    return GadgetResult(H, emb, claims, derivation)


def nonorth_config(A: FiniteStructure, AB: FiniteStructure, AC: FiniteStructure,
                   budget: SearchBudget | None = None) -> GadgetResult:
    """G ⊇ D = AB ⊕_A AC with δ(G/D) = −1/c and A, AB, AC ≤ G."""
    c = A.signature.c
    for S, name in ((AB, "AB"), (AC, "AC")):
        if not is_in_Kalpha(S):
            raise NotInKalpha(f"{name} is not in K_alpha")
        _check_base(A, S, name)
        if _rel_units(A, S) != 1:
            raise PreconditionRankOrder(f"δ({name}/A) = {S.units(_rel_units(A, S))}, expected 1/{c}")
    D = free_join([AB, AC], A)
    k = D.delta_units(D.full_mask) - 1
    res = cap_to_dim(D, k, budget, preserve=[(), A.vertices, AB.vertices, AC.vertices])
    G = res.output
    claims = res.certificates + [
        _rank_claim("delta(G/D) = -1/c", G, G.vertex_set, D.vertex_set, Fraction(-1, c)),
    ]
    _require(claims, "non-orthogonality configuration")
    emb = {"A": _identity(A.vertices), "AB": _identity(AB.vertices), "AC": _identity(AC.vertices)}
    derivation = [{"step": "free_join", "over": sorted(A.vertices)}] + res.derivation
    return GadgetResult(G, emb, claims, derivation)


def tagged_copy(S: FiniteStructure, fixed: Iterable[str], tag: str, avoid: Iterable[str] = ()):
    """Copy of ``S`` with every vertex outside ``fixed`` renamed ``v + tag``.

    The tag is lengthened with ``_`` until the copy misses ``avoid``.
    """
    fixed = set(fixed)
    avoid = set(avoid) | fixed
    while True:
        mapping = {v: v + tag for v in S.vertices if v not in fixed}
        if not set(mapping.values()) & avoid:
            return rename(S, mapping), mapping
        tag = "_" + tag


def preweight_config(A: FiniteStructure, AB: FiniteStructure,
                     budget: SearchBudget | None = None) -> GadgetResult:
    """G = G₁ ⊕_{AB} G₂ where (ABCᵢ, Gᵢ) are essential minimal pairs.

    C₁, C₂ are tagged copies of a 1/c raise over A.  Certified: G ∈ K_α;
    A, AB, AC₁, AC₂, AC₁C₂ ≤ G; F₁F₂ ⋠ G; δ(G/F₁F₂) = −2/c.
    """
    budget = budget or SearchBudget()
    sig = A.signature
    c = sig.c
    if not is_induced_in(A, AB):
        raise BaseNotInduced("A is not an induced substructure of AB")
    if not is_in_Kalpha(AB):
        raise NotInKalpha("AB is not in K_alpha")
    nug = is_nugget(AB, A.vertices)
    if not nug.verdict:
        raise NotANugget("B is not a nugget over A")
    if nug.level < Fraction(2, c):
        raise RankTooLow(f"δ(B/A) = {nug.level} < 2/{c}")

    raised = raise_by_one(A, budget).output
    AC1, m1 = tagged_copy(raised, A.vertices, "_1", AB.vertices)
    AC2, m2 = tagged_copy(raised, A.vertices, "_2", set(AB.vertices) | AC1.vertex_set)
    F1 = free_join([AB, AC1], A)
    F2 = free_join([AB, AC2], A)
    deadline = budget.deadline()
    taken = F1.vertex_set | F2.vertex_set
    new1, e1, _ = _essential_extension(F1, budget, deadline, taken, "g")
    G1 = add_edges(F1, new1, e1)
    new2, e2, _ = _essential_extension(F2, budget, deadline, taken | set(new1), "g")
    G2 = add_edges(F2, new2, e2)
    G = free_join([G1, G2], AB)

    drop = Fraction(-1, c)
    claims = []
    for i, (F, Gi) in enumerate(((F1, G1), (F2, G2)), 1):
        cert = is_essential_minimal_pair(F, Gi)
        claims.append(Claim(f"(F{i}, G{i}) essential minimal pair", "essential_minimal_pair",
                            F.vertex_set, Gi.vertex_set, value=drop,
                            verdict=cert.verdict and cert.drop == drop, certificate=cert))
    F12 = F1.vertex_set | F2.vertex_set
    claims += [
        _kalpha_claim("G in K_alpha", G),
        _strong_claim("A strong in G", G, A.vertices),
        _strong_claim("AB strong in G", G, AB.vertices),
        _strong_claim("AC1 strong in G", G, AC1.vertices),
        _strong_claim("AC2 strong in G", G, AC2.vertices),
        _strong_claim("AC1C2 strong in G", G, AC1.vertex_set | AC2.vertex_set),
    ]
    cert = is_strong(G, F12)
    claims.append(Claim("F1F2 not strong in G", "not_strong", frozenset(F12),
                        verdict=not cert.verdict, certificate=cert))
    claims.append(_rank_claim("delta(G/F1F2) = -2/c", G, G.vertex_set, F12, Fraction(-2, c)))
    _require(claims, "pre-weight configuration")

    emb = {"A": _identity(A.vertices), "AB": _identity(AB.vertices),
           "AC1": {v: m1.get(v, v) for v in raised.vertices},
           "AC2": {v: m2.get(v, v) for v in raised.vertices}}
    derivation = [
        {"step": "raise", "over": sorted(A.vertices), "size": len(raised)},
        {"step": "copies", "tags": ["_1", "_2"]},
        {"step": "attach_gadget", "base": "F1", "new": sorted(new1)},
        {"step": "attach_gadget", "base": "F2", "new": sorted(new2)},
        {"step": "free_join", "over": sorted(AB.vertices)},
    ]
    return GadgetResult(G, emb, claims, derivation)
