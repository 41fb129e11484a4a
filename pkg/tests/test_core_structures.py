import json
import warnings
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bshyper import io
from bshyper.errors import (
    ArityMismatch,
    BaseNotInduced,
    NotDisjointOverBase,
    RepeatedVertexInEdge,
    SignatureMismatch,
    UnknownVertex,
)
from bshyper.structures import (
    FiniteStructure,
    Signature,
    delta,
    delta_of,
    delta_rel,
    empty,
    free_join,
    induced,
    is_in_Kalpha,
    iso_check,
    rename,
    validate_structure,
)
from conftest import complete, graph, sig, star3, triangle
from strategies import structure_and_subset, structures


def test_empty_has_rank_zero():
    assert delta(empty(sig())) == 0


def test_triangle_rank():
    assert delta(triangle()) == F(3, 2)


def test_star_relative_rank():
    assert delta_rel(star3(), {"x"}, {"a", "b", "d"}) == F(-1, 2)


def test_path_free_join_relative_rank():
    Z = graph("abc", ["ba", "ac"])
    assert delta_rel(Z, {"b"}, {"a", "c"}) == F(1, 2) == delta_rel(Z, {"b"}, {"a"})


def test_kalpha_membership():
    assert not is_in_Kalpha(complete(6))
    assert delta(complete(6)) == F(-3, 2)
    assert is_in_Kalpha(triangle())


def test_hyperedge_rank():
    s = Signature.parse(["R:3=1/3"])
    S = FiniteStructure(s, "abc", {"R": [["a", "b", "c"]]})
    assert delta(S) == F(8, 3)


def test_validation_errors():
    with pytest.raises(RepeatedVertexInEdge):
        graph("ab", ["aa"])
    with pytest.raises(UnknownVertex):
        graph("ab", ["ac"])
    s = Signature.parse(["R:3=1/3"])
    with pytest.raises(ArityMismatch):
        FiniteStructure(s, "ab", {"R": [["a", "b"]]})


def test_duplicate_edge_dropped_with_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        S = validate_structure({"vertices": ["a", "b"], "edges": {"E": [["a", "b"], ["b", "a"]]}}, sig())
    assert S.edge_count() == 1
    assert caught


def test_induced_unknown_vertex():
    with pytest.raises(UnknownVertex):
        induced(triangle(), {"z"})


def test_free_join_path():
    B1, B2 = graph("ab", ["ab"]), graph("ac", ["ac"])
    A = graph("a")
    Z = free_join([B1, B2], A)
    assert Z == graph("abc", ["ab", "ac"])
    assert delta(Z) == 2 == delta(A) + delta_rel(Z, "b", "a") + delta_rel(Z, "c", "a")


def test_free_join_errors():
    with pytest.raises(NotDisjointOverBase):
        free_join([graph("ab"), graph("ab")], graph("a"))
    with pytest.raises(BaseNotInduced):
        free_join([graph("ab", ["ab"])], graph("ab"))
    with pytest.raises(SignatureMismatch):
        free_join([graph("ab", alpha="1/3")], graph("a"))


def test_iso_fixed_centre_to_leaf_absent():
    assert iso_check(star3(), star3(), {"x": "a"}) is None
    assert iso_check(star3(), star3(), {"a": "b"}) is not None


def test_iso_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        iso_check(triangle(), triangle("1/3"))


def _delta_brute(S):
    out = F(len(S.vertices))
    for r in S.signature.relations:
        out -= r.alpha * len(S.edges[r.name])
    return out


@given(structures())
def test_delta_matches_formula(S):
    assert delta(S) == _delta_brute(S)


@given(structures())
def test_kalpha_matches_enumeration(S):
    expect = all(delta_of(S, V) >= 0 for k in range(len(S) + 1) for V in combinations(S.vertices, k))
    assert is_in_Kalpha(S) == expect


@given(structure_and_subset(kalpha=False))
def test_induced_delta_agrees(case):
    S, V = case
    assert delta(induced(S, V)) == delta_of(S, V)


@given(structures())
def test_json_round_trip(S):
    text = io.dumps(S)
    assert io.structure_from_json(json.loads(text)) == S
    assert io.dumps(io.structure_from_json(json.loads(text))) == text


@given(structures(), st.randoms(use_true_random=False))
def test_rename_is_isomorphism(S, rnd):
    names = [f"w{i}" for i in range(len(S))]
    rnd.shuffle(names)
    T = rename(S, dict(zip(S.vertices, names)))
    assert delta(T) == delta(S)
    f = iso_check(S, T)
    assert f is not None
    assert rename(S, f) == T


@settings(max_examples=50)
@given(structure_and_subset(kalpha=False), structure_and_subset(kalpha=False))
def test_free_join_additive(c1, c2):
    (S1, V1), (S2, _) = c1, c2
    if S1.signature != S2.signature:
        return
    A = induced(S1, V1)
    T = rename(S2, {v: f"t{v}" for v in S2.vertices})
    T = FiniteStructure(T.signature, list(T.vertices) + list(A.vertices),
                        {k: list(T.edges[k]) + list(A.edges[k]) for k in T.edges})
    Z = free_join([S1, T], A)
    assert delta_rel(Z, Z.vertex_set, V1) == (
        delta_rel(S1, S1.vertex_set, V1) + delta_rel(T, T.vertex_set, V1))
