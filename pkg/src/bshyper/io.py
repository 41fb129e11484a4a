"""Canonical JSON encoding.

Layout: 2-space indent, UTF-8, LF newline at end, vertices and hyperedges
sorted lexicographically, rationals as ``{"num": .., "den": ..}``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import StructureError
from .structures import FiniteStructure, Relation, Signature


def rational(x) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def rational_from_json(obj) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def signature_to_json(sig: Signature) -> dict:
    return {"relations": [{"name": r.name, "arity": r.arity, "alpha": rational(r.alpha)}
                          for r in sig.relations]}


def signature_from_json(obj) -> Signature:
    try:
        return Signature(Relation(r["name"], int(r["arity"]), rational_from_json(r["alpha"]))
                         for r in obj["relations"])
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed signature: {exc}") from exc


def structure_to_json(S: FiniteStructure) -> dict:
    return {
        "signature": signature_to_json(S.signature),
        "vertices": list(S.vertices),
        "edges": {r.name: S.sorted_edges(r.name) for r in S.signature.relations},
    }


def structure_from_json(obj) -> FiniteStructure:
    from .structures import validate_structure
    if not isinstance(obj, dict) or "vertices" not in obj or "signature" not in obj:
        raise StructureError("structure JSON needs 'signature' and 'vertices'")
    return validate_structure(obj)


def vertex_list(vs) -> list:
    return sorted(vs)


def to_jsonable(obj: Any) -> Any:
    """Convert library values (certificates, rationals, sets) to JSON data."""
    from .rank import MinimalPairCertificate, NuggetCertificate, StrongCertificate

    if isinstance(obj, FiniteStructure):
        return structure_to_json(obj)
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, StrongCertificate):
        return {"certificate": {
            "kind": "strong", "verdict": obj.verdict, "base": sorted(obj.base),
            "witness": None if obj.witness is None else sorted(obj.witness),
            "base_delta": to_jsonable(obj.base_delta),
            "witness_delta": to_jsonable(obj.witness_delta)}}
    if isinstance(obj, MinimalPairCertificate):
        return {"certificate": {
            "kind": "essential_minimal_pair" if obj.essential else "minimal_pair",
            "verdict": obj.verdict, "base": sorted(obj.base), "body": sorted(obj.body),
            "witness": None if obj.witness is None else sorted(obj.witness),
            "drop": rational(obj.drop), "essential": obj.essential, "reason": obj.reason,
            "intermediate_slack": [[v, rational(s)] for v, s in obj.intermediate_slack],
            "base_slack": [[v, rational(s)] for v, s in obj.base_slack]}}
    if isinstance(obj, NuggetCertificate):
        return {"certificate": {
            "kind": "nugget", "verdict": obj.verdict, "base": sorted(obj.base),
            "body": sorted(obj.body), "level": rational(obj.level), "k": obj.k,
            "witness": None if obj.witness is None else sorted(obj.witness)}}
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def write(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8", newline="\n")


def load_structure(path: str | Path) -> FiniteStructure:
    return structure_from_json(json.loads(Path(path).read_text(encoding="utf-8")))
