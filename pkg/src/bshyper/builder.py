"""Finite stages of the generic structures and their extension-axiom audit.

Templates are pairs A ≤ B with |B| ≤ s, up to isomorphism of pairs.  A task
is a template together with an embedding of A onto a strong subset of the
stage; it is met when the embedding extends to B with strong image.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .errors import BudgetExhausted
from .rank import icl, is_strong
from .structures import (
    FiniteStructure,
    Signature,
    delta,
    empty,
    free_join,
    fresh_names,
    induced,
    is_in_Kalpha,
    rename,
)
from .synthesis import SearchBudget, cap_to_dim


# ----------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class ExtensionTemplate:
    index: int
    A: FiniteStructure
    B: FiniteStructure

    def to_json(self):
        from .io import structure_to_json
        return {"index": self.index, "A": list(self.A.vertices), "B": structure_to_json(self.B)}


def _pair_key(sig: Signature, n: int, edges, a: int):
    """Least relabelling of (B on 0..n-1, A = first ``a`` positions)."""
    best = None
    for left in permutations(range(a)):
        for right in permutations(range(a, n)):
            perm = left + right
            key = tuple(sorted((name, tuple(sorted(perm[i] for i in e))) for name, e in edges))
            if best is None or key < best:
                best = key
    return best


def catalog_extensions(sig: Signature, s: int) -> list[ExtensionTemplate]:
    """All pairs A ⊊ B with A ≤ B ∈ K_α and |B| ≤ s, one per isomorphism class."""
    out = {}
    for n in range(1, s + 1):
        slots = [(r.name, e) for r in sig.relations for e in combinations(range(n), r.arity)]
        names = [f"t{i}" for i in range(n)]
        for pick in range(1 << len(slots)):
            chosen = [slots[j] for j in range(len(slots)) if pick >> j & 1]
            edges = {}
            for name, e in chosen:
                edges.setdefault(name, []).append([names[i] for i in e])
            B = FiniteStructure(sig, names, edges)
            if not is_in_Kalpha(B):
                continue
            for a in range(n):
                for A in combinations(range(n), a):
                    if not is_strong(B, [names[i] for i in A]).verdict:
                        continue
                    order = list(A) + [i for i in range(n) if i not in A]
                    pos = {v: p for p, v in enumerate(order)}
                    moved = [(name, tuple(pos[i] for i in e)) for name, e in chosen]
                    key = (n, a, _pair_key(sig, n, moved, a))
                    out.setdefault(key, None)
    templates = []
    for idx, key in enumerate(sorted(out)):
        n, a, edges = key
        names = [f"a{i}" for i in range(a)] + [f"b{i}" for i in range(n - a)]
        raw = {}
        for name, e in edges:
            raw.setdefault(name, []).append([names[i] for i in e])
        B = FiniteStructure(sig, names, raw)
        templates.append(ExtensionTemplate(idx, induced(B, names[:a]), B))
    return templates


# ----------------------------------------------------------------------
# embeddings with strong image


class _Stage:
    """A structure with incidence lists and a cache of strongness verdicts."""

    def __init__(self, M: FiniteStructure):
        self.M = M
        self.inc = {v: [] for v in M.vertices}
        for name, es in M.edges.items():
            for e in es:
                for v in e:
                    self.inc[v].append((name, e))
        self._strong = {}

    def strong(self, vs) -> bool:
        m = self.M.mask(vs)
        hit = self._strong.get(m)
        if hit is None:
            val, _ = self.M.min_superset(m)
            hit = self._strong[m] = val >= self.M.delta_units(m)
        return hit


def _consistent(P: FiniteStructure, pinc, stage: _Stage, f: dict, inv: dict, v: str, w: str) -> bool:
    for name, e in pinc[v]:
        if all(x == v or x in f for x in e):
            img = frozenset(w if x == v else f[x] for x in e)
            if img not in stage.M.edges[name]:
                return False
    for name, e in stage.inc[w]:
        if all(y == w or y in inv for y in e):
            pre = frozenset(v if y == w else inv[y] for y in e)
            if pre not in P.edges[name]:
                return False
    return True


def embeddings(P: FiniteStructure, stage: _Stage, fixed: dict | None = None):
    """Yield embeddings of P into the stage that extend ``fixed`` and have strong image."""
    f = dict(fixed or {})
    inv = {w: v for v, w in f.items()}
    pinc = {v: [] for v in P.vertices}
    for name, es in P.edges.items():
        for e in es:
            for v in e:
                pinc[v].append((name, e))
    order = []
    placed = set(f)
    rest = [v for v in P.vertices if v not in placed]
    # vertices tied to already placed ones first, so candidates come from incidence lists
    while rest:
        rest.sort(key=lambda v: (-sum(1 for _, e in pinc[v] if e & placed), v))
        v = rest.pop(0)
        order.append(v)
        placed.add(v)
    M = stage.M

    def candidates(v):
        for name, e in pinc[v]:
            anchor = next((x for x in e if x in f), None)
            if anchor is not None:
                seen = set()
                for name2, e2 in stage.inc[f[anchor]]:
                    if name2 == name:
                        for w in sorted(e2):
                            if w not in seen:
                                seen.add(w)
                                yield w
                return
        yield from M.vertices

    def rec(i):
        if i == len(order):
            if stage.strong(f.values()):
                yield dict(f)
            return
        v = order[i]
        for w in candidates(v):
            if w in inv or not _consistent(P, pinc, stage, f, inv, v, w):
                continue
            f[v] = w
            inv[w] = v
            yield from rec(i + 1)
            del f[v]
            del inv[w]

    if not all(_consistent_fixed(P, pinc, stage, f)):
        return
    yield from rec(0)


def _consistent_fixed(P, pinc, stage, f):
    g, inv = {}, {}
    for v in sorted(f):
        yield _consistent(P, pinc, stage, g, inv, v, f[v])
        g[v] = f[v]
        inv[f[v]] = v


# ----------------------------------------------------------------------
# audit


@dataclass
class AuditReport:
    bound: int
    tasks: list = field(default_factory=list)

    @property
    def unmet(self) -> list:
        return [t for t in self.tasks if not t["satisfied"] and t["realizable"]]

    @property
    def out_of_dimension(self) -> list:
        return [t for t in self.tasks if not t["satisfied"] and not t["realizable"]]

    @property
    def satisfied(self) -> list:
        return [t for t in self.tasks if t["satisfied"]]

    def to_json(self):
        return {"bound": self.bound, "total": len(self.tasks), "satisfied": len(self.satisfied),
                "unmet": len(self.unmet), "out_of_dimension": len(self.out_of_dimension),
                "tasks": self.tasks}


def iter_tasks(M: FiniteStructure, s: int, k: int | None = None,
               catalog: list[ExtensionTemplate] | None = None):
    """Yield one record per (template, strong anchor) in canonical order."""
    if catalog is None:
        catalog = catalog_extensions(M.signature, s)
    stage = _Stage(M)
    top = M.delta_units(M.full_mask)
    for t in catalog:
        if len(t.B) > s:
            continue
        rank_b = t.B.delta_units(t.B.full_mask)
        realizable = k is None or rank_b <= k
        for anchor in embeddings(t.A, stage):
            # a strong subset never has larger rank than the whole stage
            witness = None if rank_b > top else next(embeddings(t.B, stage, anchor), None)
            yield {
                "template": t.index,
                "anchor": dict(sorted(anchor.items())),
                "satisfied": witness is not None,
                "realizable": realizable,
                "witness": None if witness is None else dict(sorted(witness.items())),
            }


def audit_extension_axioms(M: FiniteStructure, s: int, k: int | None = None,
                           catalog: list[ExtensionTemplate] | None = None) -> AuditReport:
    """Check every catalog task at bound ``s`` against M.

    With ``k`` given (fixed dimension k/c) a template whose B has rank above
    k/c can have no strong copy in a stage of rank k/c; such tasks are listed
    as out of dimension instead of unmet.
    """
    return AuditReport(s, list(iter_tasks(M, s, k, catalog)))


# ----------------------------------------------------------------------
# builder


@dataclass(frozen=True)
class BuildConfig:
    signature: Signature
    mode: str = "full"            # "full" or "fixed"
    k: int | None = None          # dimension target in units of 1/c (fixed mode)
    rounds: int = 10
    s: int = 2
    seed: int = 0
    budget: SearchBudget = field(default_factory=SearchBudget)
    # tasks realized per round; 0 means every task unmet at the start of the round
    tasks_per_round: int = 0
    # record satisfied/unmet counts for every stage (a full audit per round)
    audit_stages: bool = True
    # audit the last stage after the final round
    final_audit: bool = True

    def __post_init__(self):
        if self.mode not in ("full", "fixed"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        if self.s < 1:
            raise ValueError("extension bound s must be at least 1")
        if self.mode == "fixed" and (self.k is None or self.k < 0):
            raise ValueError("fixed mode needs k >= 0")
        if self.tasks_per_round < 0:
            raise ValueError("tasks_per_round must be non-negative")

    def to_json(self):
        from .io import signature_to_json
        return {"signature": signature_to_json(self.signature), "mode": self.mode, "k": self.k,
                "rounds": self.rounds, "s": self.s, "seed": self.seed,
                "tasks_per_round": self.tasks_per_round, "audit_stages": self.audit_stages,
                "final_audit": self.final_audit, "budget": self.budget.to_json()}


@dataclass
class BuildTrace:
    config: BuildConfig
    stages: list = field(default_factory=list)
    info: list = field(default_factory=list)
    fixpoint: bool = False

    def to_json(self):
        from .io import rational, structure_to_json
        out = []
        for M, info in zip(self.stages, self.info):
            out.append({"structure": structure_to_json(M), "delta": rational(delta(M)), **info})
        return {"config": self.config.to_json(), "fixpoint": self.fixpoint, "stages": out}


def _grow_to_dim(M: FiniteStructure, X, k: int) -> frozenset:
    """Strong C ⊇ X in M with δ(C) = k/c, absorbing vertices in index order."""
    C = icl(M, X)
    for v in M.vertices:
        if M.delta_units(M.mask(C)) >= k:
            break
        if v not in C:
            C = icl(M, C | {v})
    return C


def _template_copy(t: ExtensionTemplate, anchor: dict, M: FiniteStructure):
    """B of the template placed over ``anchor`` with fresh vertices outside M."""
    rest = [v for v in t.B.vertices if v not in anchor]
    new = fresh_names(M.vertices, len(rest), "v")
    mapping = {**anchor, **dict(zip(rest, new))}
    return rename(t.B, mapping), new


def _realize_full(M, t, anchor):
    Bp, new = _template_copy(t, anchor, M)
    return free_join([M, Bp], induced(M, anchor.values())), {"new": new}


def _realize_fixed(M, t, anchor, k, budget):
    Bp, new = _template_copy(t, anchor, M)
    image = list(anchor.values())
    C = _grow_to_dim(M, image, k)
    Cs = induced(M, C)
    D = free_join([Bp, Cs], induced(M, image))
    res = cap_to_dim(D, k, budget, preserve=[(), image, C, Bp.vertices])
    G = res.output
    extra = [v for v in G.vertices if v not in D.vertex_set]
    fresh = fresh_names(set(M.vertices) | D.vertex_set, len(extra), "v")
    G = rename(G, dict(zip(extra, fresh)))
    return free_join([M, G], Cs), {"new": new, "closure": sorted(C), "cap_vertices": len(fresh)}


def build_generic(config: BuildConfig) -> BuildTrace:
    """Round-based chain M₀ ≤ M₁ ≤ … realizing unmet extension tasks in canonical order.

    A ``BudgetExhausted`` raised by a cap carries the partial trace as ``.trace``.
    """
    sig = config.signature
    fixed = config.mode == "fixed"
    k = config.k if fixed else None
    catalog = catalog_extensions(sig, config.s)
    trace = BuildTrace(config)
    if fixed:
        M = cap_to_dim(empty(sig), k, config.budget).output
    else:
        M = empty(sig)
    trace.stages.append(M)
    trace.info.append({"strong_over_previous": True, "derivation": []})

    def close_stage(report):
        trace.info[-1].update({"satisfied": len(report.satisfied), "unmet": len(report.unmet),
                               "out_of_dimension": len(report.out_of_dimension)})

    def pending():
        limit = config.tasks_per_round
        out = []
        for task in iter_tasks(M, config.s, k, catalog):
            if not task["satisfied"] and task["realizable"]:
                out.append(task)
                if limit and len(out) == limit:
                    break
        return out

    for _ in range(config.rounds):
        if config.audit_stages:
            report = audit_extension_axioms(M, config.s, k, catalog)
            close_stage(report)
            todo = report.unmet[:config.tasks_per_round or None]
        else:
            todo = pending()
        if not todo:
            trace.fixpoint = True
            if not config.audit_stages:
                close_stage(audit_extension_axioms(M, config.s, k, catalog))
            return trace
        prev = M
        log = []
        for task in todo:
            t = catalog[task["template"]]
            anchor = task["anchor"]
            if next(embeddings(t.B, _Stage(M), anchor), None) is not None:
                continue
            try:
                if fixed:
                    M, note = _realize_fixed(M, t, anchor, k, config.budget)
                else:
                    M, note = _realize_full(M, t, anchor)
            except BudgetExhausted as exc:
                exc.trace = trace
                raise
            log.append({"template": t.index, "anchor": anchor, **note})
        trace.stages.append(M)
        trace.info.append({"strong_over_previous": is_strong(M, prev.vertices).verdict,
                           "derivation": log})
    if config.final_audit:
        report = audit_extension_axioms(M, config.s, k, catalog)
        close_stage(report)
        trace.fixpoint = not report.unmet
    else:
        trace.fixpoint = not pending()
    return trace


# ----------------------------------------------------------------------
# back and forth


@dataclass
class BackAndForth:
    mapping: dict
    steps: int
    obstruction: dict | None = None

    def to_json(self):
        return {"mapping": dict(sorted(self.mapping.items())), "steps": self.steps,
                "obstruction": self.obstruction}


def back_and_forth(M: FiniteStructure, N: FiniteStructure, steps: int) -> BackAndForth:
    """Finite run of the back-and-forth between two structures of equal rank.

    Seed: a strong A ⊆ M with δ(A) = δ(M) sent to a strong copy in N.  Each
    step absorbs the least unmatched vertex on one side (alternating) into
    its closure and extends the map strongly.
    """
    from .io import rational
    dm, dn = delta(M), delta(N)
    if dm != dn:
        return BackAndForth({}, 0, {"kind": "dimension mismatch", "delta_M": rational(dm),
                                    "delta_N": rational(dn)})
    if M == N:
        return BackAndForth({v: v for v in M.vertices}, 0)
    sm, sn = _Stage(M), _Stage(N)
    A = _grow_to_dim(M, (), M.delta_units(M.full_mask))
    f = next(embeddings(induced(M, A), sn), None)
    if f is None:
        return BackAndForth({}, 0, {"kind": "no strong copy of seed", "seed": sorted(A)})
    done = 0
    for i in range(steps):
        forth = i % 2 == 0
        src, dst, g = (M, sn, f) if forth else (N, sm, {w: v for v, w in f.items()})
        left = [v for v in src.vertices if v not in g]
        if not left:
            other = [v for v in dst.M.vertices if v not in g.values()]
            if not other:
                break
            continue
        B = icl(src, set(g) | {left[0]})
        h = next(embeddings(induced(src, B), dst, g), None)
        if h is None:
            return BackAndForth(dict(f), done, {"kind": "no strong extension",
                                                "side": "forth" if forth else "back",
                                                "vertex": left[0], "closure": sorted(B)})
        f = h if forth else {w: v for v, w in h.items()}
        done += 1
    return BackAndForth(dict(f), done)
