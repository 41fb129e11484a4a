from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bshyper import _minimize
from bshyper.errors import BaseNotStrong, BaseRankNotPositive, EmptyBody, NotNested, UnknownVertex
from bshyper.rank import (
    d_rel,
    d_value,
    d_via_icl,
    dim_rel,
    icl,
    icl_mincut,
    is_essential_minimal_pair,
    is_minimal_pair,
    is_nugget,
    is_strong,
)
from bshyper.structures import delta, delta_of, induced
from conftest import complete, graph, star3
from strategies import structure_and_subset


def test_empty_base_strong():
    assert is_strong(star3(), ()).verdict


def test_star_base_not_strong():
    cert = is_strong(star3(), "abd")
    assert not cert.verdict
    assert cert.witness == frozenset("abdx")
    assert (cert.base_delta, cert.witness_delta) == (3, F(5, 2))


def test_edge_endpoint_strong():
    assert is_strong(graph("ab", ["ab"]), "a").verdict


def test_unknown_vertex():
    with pytest.raises(UnknownVertex):
        is_strong(star3(), "q")


def test_star_is_minimal_pair():
    cert = is_minimal_pair(star3(), "abd", "abdx")
    assert cert.verdict and cert.drop == F(-1, 2)


def test_edge_not_minimal_pair():
    assert not is_minimal_pair(graph("ab", ["ab"]), "a", "ab").verdict


def test_minimal_pair_not_nested():
    with pytest.raises(NotNested):
        is_minimal_pair(star3(), "ab", "bd")


def test_star_is_essential():
    S = star3()
    assert is_essential_minimal_pair(induced(S, "abd"), S).verdict


def test_strong_extension_not_essential():
    E = graph("ab", ["ab"])
    assert not is_essential_minimal_pair(induced(E, "a"), E).verdict


def test_essential_needs_positive_base():
    with pytest.raises(BaseRankNotPositive):
        is_essential_minimal_pair(graph(""), graph("a"))


def test_icl_examples():
    assert icl(star3(), "a") == frozenset("a")
    assert icl(star3(), "abd") == frozenset("abdx")


def test_d_examples():
    assert d_value(star3(), "abd") == F(5, 2)
    assert d_value(star3(), "a") == 1
    assert d_rel(star3(), "x", "abd") == 0


def test_dim_examples():
    assert dim_rel(star3()) == F(5, 2)
    with pytest.raises(BaseNotStrong):
        dim_rel(star3(), "abd")


def test_nugget_examples():
    one = is_nugget(graph("b"), ())
    assert one.verdict and one.level == 1
    assert not is_nugget(graph(["b1", "b2"]), ()).verdict
    k5 = is_nugget(complete(5, drop=1), ())
    assert k5.verdict and k5.level == F(1, 2)
    with pytest.raises(EmptyBody):
        is_nugget(graph("a"), "a")


def _strong_brute(Z, A):
    base = delta_of(Z, A)
    rest = [v for v in Z.vertices if v not in A]
    for m in range(1 << len(rest)):
        extra = {v for i, v in enumerate(rest) if m >> i & 1}
        if delta_of(Z, set(A) | extra) < base:
            return False
    return True


@given(structure_and_subset(max_n=6, kalpha=False))
def test_strong_matches_enumeration(case):
    Z, A = case
    assert is_strong(Z, A).verdict == _strong_brute(Z, A)


@given(structure_and_subset(max_n=6))
def test_icl_routes_agree(case):
    Z, X = case
    C = icl(Z, X)
    assert C == icl_mincut(Z, X)
    assert X <= C and is_strong(Z, C).verdict
    assert icl(Z, C) == C


@given(structure_and_subset(max_n=6))
def test_d_routes_agree(case):
    Z, X = case
    assert d_value(Z, X) == d_via_icl(Z, X) <= delta_of(Z, X)


@given(structure_and_subset(max_n=6))
def test_strong_certificate_witness(case):
    Z, A = case
    cert = is_strong(Z, A)
    if not cert.verdict:
        assert A <= cert.witness and delta_of(Z, cert.witness) < delta_of(Z, A)


@settings(max_examples=200)
@given(structure_and_subset(max_n=7, kalpha=False))
def test_min_cut_matches_brute_force(case):
    Z, X = case
    base = Z.mask(X)
    val, least, greatest = Z.min_superset_bounds(base)
    bval, bleast = _minimize.min_superset_bruteforce(Z.signature.c, Z._emasks, Z.full_mask, base)
    assert (val, least) == (bval, bleast)
    assert Z.delta_units(greatest) == val and greatest & least == least


@given(structure_and_subset(max_n=6))
def test_minimal_pair_has_all_intermediates_strong(case):
    Z, A = case
    B = frozenset(Z.vertices)
    cert = is_minimal_pair(Z, A, B) if A != B else None
    if cert is not None and cert.verdict:
        assert delta_of(Z, B) < delta_of(Z, A)
        for v in B - A:
            assert is_strong(induced(Z, B - {v}), A).verdict
