"""``bsh`` command line front end.

Every command writes canonical JSON (stdout or ``-o``).  Exit status: 0 on
success, 1 when a check command returns a false verdict, 2 on errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import io
from .audit import SUITES, run_property_suite
from .builder import BuildConfig, audit_extension_axioms, back_and_forth, build_generic
from .errors import BshError
from .rank import (
    d_rel,
    d_value,
    dim_rel,
    icl,
    is_essential_minimal_pair,
    is_minimal_pair,
    is_nugget,
    is_strong,
)
from .structures import FiniteStructure, Relation, Signature, delta, delta_rel, induced
from .synthesis import (
    SearchBudget,
    amalgam_cap,
    cap_to_dim,
    nonorth_config,
    preweight_config,
    raise_by_one,
    synth_essential_minpair,
)


class UsageError(BshError):
    pass


def _vertex_set(text: str | None) -> list[str]:
    if not text:
        return []
    return [v.strip() for v in text.split(",") if v.strip()]


def _signature(args) -> Signature:
    if not args.alpha:
        raise UsageError("a signature is needed: pass --alpha NAME=p/q (NAME:arity=p/q)")
    return Signature.parse(args.alpha)


def _reweight(S: FiniteStructure, specs: list[str] | None) -> FiniteStructure:
    """Apply ``--alpha`` overrides to the relations of a loaded structure."""
    if not specs:
        return S
    new = {r.name: r.alpha for r in Signature.parse(specs).relations}
    for name in new:
        S.signature.relation(name)
    sig = Signature(Relation(r.name, r.arity, new.get(r.name, r.alpha)) for r in S.signature.relations)
    return FiniteStructure(sig, S.vertices, {k: [list(e) for e in v] for k, v in S.edges.items()})


def _load(path: str, args) -> FiniteStructure:
    return _reweight(io.load_structure(path), args.alpha)


def _budget(args) -> SearchBudget:
    return SearchBudget(max_new_vertices=args.max_new_vertices, max_new_edges=args.max_new_edges,
                        seed=args.seed, time_ms=args.time_ms, search_vertices=args.search_vertices,
                        proof_max_vertices=args.proof_max_vertices)


def _emit(args, obj) -> None:
    text = io.dumps(obj)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# commands; each returns (json object, exit status)


def cmd_rank(args):
    Z = _load(args.input, args)
    if args.sub is None and args.over is None:
        return {"delta": delta(Z)}, 0
    B = _vertex_set(args.sub) if args.sub is not None else Z.vertices
    if args.over is None:
        return {"delta": delta_rel(Z, B, ())}, 0
    return {"delta": delta_rel(Z, B, _vertex_set(args.over))}, 0


def cmd_strong(args):
    Z = _load(args.input, args)
    cert = is_strong(Z, _vertex_set(args.sub))
    return cert, 0 if cert.verdict else 1


def cmd_icl(args):
    Z = _load(args.input, args)
    return {"icl": icl(Z, _vertex_set(args.sub))}, 0


def cmd_d(args):
    Z = _load(args.input, args)
    B = _vertex_set(args.sub)
    if args.over is None:
        return {"d": d_value(Z, B)}, 0
    return {"d": d_rel(Z, B, _vertex_set(args.over))}, 0


def cmd_dim(args):
    Z = _load(args.input, args)
    return {"dim": dim_rel(Z, _vertex_set(args.over))}, 0


def cmd_minpair(args):
    Z = _load(args.input, args)
    if args.action == "synth":
        return synth_essential_minpair(Z, _budget(args)), 0
    if args.base is None or args.body is None:
        raise UsageError("minpair check needs --base and --body")
    A, B = _vertex_set(args.base), _vertex_set(args.body)
    if args.essential:
        cert = is_essential_minimal_pair(induced(Z, A), induced(Z, B))
    else:
        cert = is_minimal_pair(Z, A, B)
    return cert, 0 if cert.verdict else 1


def cmd_nugget(args):
    Z = _load(args.input, args)
    cert = is_nugget(Z, _vertex_set(args.base))
    return cert, 0 if cert.verdict else 1


def cmd_cap(args):
    B = _load(args.input, args)
    return cap_to_dim(B, args.dim, _budget(args), recipe=args.recipe), 0


def cmd_raise(args):
    return raise_by_one(_load(args.input, args), _budget(args)), 0


def cmd_amalgam(args):
    A, B, C = (_load(p, args) for p in (args.a, args.b, args.c))
    return amalgam_cap(A, B, C, _budget(args)), 0


def cmd_nonorth(args):
    A, AB, AC = (_load(p, args) for p in (args.a, args.ab, args.ac))
    return nonorth_config(A, AB, AC, _budget(args)), 0


def cmd_preweight(args):
    A, AB = _load(args.a, args), _load(args.ab, args)
    return preweight_config(A, AB, _budget(args)), 0


def cmd_generic(args):
    try:
        config = BuildConfig(_signature(args), mode=args.mode, k=args.dim, rounds=args.rounds,
                             s=args.max_ext, seed=args.seed, budget=_budget(args),
                             tasks_per_round=args.tasks_per_round,
                             audit_stages=not args.no_stage_audit,
                             final_audit=not args.no_final_audit)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return build_generic(config), 0


def cmd_audit_ext(args):
    M = _load(args.input, args)
    report = audit_extension_axioms(M, args.max_ext, args.dim)
    return report, 0 if not report.unmet else 1


def cmd_bnf(args):
    M, N = _load(args.left, args), _load(args.right, args)
    result = back_and_forth(M, N, args.steps)
    return result, 0 if result.obstruction is None else 1


def cmd_verify(args):
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    reports = [run_property_suite(n, args.cases, args.seed) for n in names]
    ok = all(r.ok for r in reports)
    return {"ok": ok, "suites": reports}, 0 if ok else 1


def _dot_id(v: str) -> str:
    return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(S: FiniteStructure) -> str:
    """Graphviz text.  Binary edges are plain edges; higher arity hyperedges
    become a small factor node joined to each member (layout only)."""
    lines = ["graph bsh {"]
    for v in S.vertices:
        lines.append(f"  {_dot_id(v)};")
    for r in S.signature.relations:
        for i, e in enumerate(S.sorted_edges(r.name)):
            label = f"{r.name}={r.alpha}"
            if len(e) == 2:
                lines.append(f"  {_dot_id(e[0])} -- {_dot_id(e[1])} [label={_dot_id(label)}];")
            else:
                f = _dot_id(f"{r.name}#{i}")
                lines.append(f"  {f} [shape=point, xlabel={_dot_id(label)}];")
                for v in e:
                    lines.append(f"  {f} -- {_dot_id(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export(args):
    S = _load(args.input, args)
    if args.format == "dot":
        return to_dot(S), 0
    return S, 0


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", action="append", metavar="NAME=p/q",
                        help="relation weight; repeat per relation (NAME:arity=p/q for hyperedges)")
    common.add_argument("-o", "--output", help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None,
                        help="worker count (results are identical for every value)")

    budget = argparse.ArgumentParser(add_help=False)
    d = SearchBudget()
    budget.add_argument("--max-new-vertices", type=int, default=d.max_new_vertices)
    budget.add_argument("--max-new-edges", type=int, default=d.max_new_edges)
    budget.add_argument("--time-ms", type=int, default=d.time_ms)
    budget.add_argument("--search-vertices", type=int, default=d.search_vertices)
    budget.add_argument("--proof-max-vertices", type=int, default=d.proof_max_vertices)

    p = argparse.ArgumentParser(prog="bsh", description="Predimension calculus for weighted hypergraphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, parents=(common,)):
        sp = sub.add_parser(name, parents=list(parents), help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("rank", cmd_rank, "δ of the structure, of a subset, or relative to a base")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--sub")
    sp.add_argument("--over")

    sp = add("strong", cmd_strong, "is the subset strong in the structure")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--sub", default="")

    sp = add("icl", cmd_icl, "intrinsic closure of a subset")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--sub", default="")

    sp = add("d", cmd_d, "d of a subset, or d(B/X) with --over")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--sub", default="")
    sp.add_argument("--over")

    sp = add("dim", cmd_dim, "dimension of the structure over a strong base")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--over", default="")

    sp = add("minpair", cmd_minpair, "check or synthesise minimal pairs", (common, budget))
    sp.add_argument("action", choices=["check", "synth"])
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--base")
    sp.add_argument("--body")
    sp.add_argument("--essential", action="store_true", help="check essentiality as well")

    sp = add("nugget", cmd_nugget, "is the structure a nugget over the base")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--base", default="")

    sp = add("cap", cmd_cap, "extend to a structure of rank k/c", (common, budget))
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--dim", type=int, required=True, help="target k in units of 1/c")
    sp.add_argument("--recipe", choices=["auto", "proof", "compact"], default="auto")

    sp = add("raise", cmd_raise, "strong extension of rank one unit higher", (common, budget))
    sp.add_argument("-i", "--input", required=True)

    sp = add("amalgam", cmd_amalgam, "capped amalgam over A ≤ B, A ≤ C", (common, budget))
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--c", required=True)

    sp = add("nonorth", cmd_nonorth, "non-orthogonality configuration", (common, budget))
    sp.add_argument("--a", required=True)
    sp.add_argument("--ab", required=True)
    sp.add_argument("--ac", required=True)

    sp = add("preweight", cmd_preweight, "pre-weight configuration over a nugget", (common, budget))
    sp.add_argument("--a", required=True)
    sp.add_argument("--ab", required=True)

    sp = add("generic", cmd_generic, "round-based generic builder", (common, budget))
    sp.add_argument("--mode", choices=["full", "fixed"], default="full")
    sp.add_argument("--dim", type=int, help="k for fixed mode (rank k/c)")
    sp.add_argument("--rounds", type=int, default=10)
    sp.add_argument("--max-ext", type=int, default=2, help="extension bound s")
    sp.add_argument("--tasks-per-round", type=int, default=0, help="0 means all unmet tasks")
    sp.add_argument("--no-stage-audit", action="store_true")
    sp.add_argument("--no-final-audit", action="store_true")

    sp = add("audit-ext", cmd_audit_ext, "audit extension tasks of a finite stage")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--max-ext", type=int, default=2)
    sp.add_argument("--dim", type=int, help="treat the stage as fixed rank k/c")

    sp = add("bnf", cmd_bnf, "bounded back-and-forth between two structures")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--steps", type=int, default=10)

    sp = add("verify", cmd_verify, "seeded property suites")
    sp.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    sp.add_argument("--cases", type=int, default=100)

    sp = add("export", cmd_export, "canonical JSON or DOT")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--format", choices=["json", "dot"], default="json")
    return p


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("BSH_THREADS")
    return int(env) if env else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if _threads(args) < 1:
            raise UsageError("--threads must be at least 1")
        obj, status = args.func(args)
        if isinstance(obj, str):
            if args.output:
                Path(args.output).write_text(obj, encoding="utf-8", newline="\n")
            else:
                sys.stdout.write(obj)
        else:
            _emit(args, obj)
        return status
    except (BshError, ValueError, OSError) as exc:
        print(f"bsh {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
