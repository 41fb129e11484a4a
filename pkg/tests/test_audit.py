import random
from fractions import Fraction as F

import pytest
from hypothesis import given

from bshyper.audit import (
    SUITES,
    flatness_check,
    is_closed,
    minimal_pairs,
    oracle_d,
    oracle_icl,
    oracle_strong,
    random_kalpha,
    random_signature,
    run_property_suite,
)
from bshyper.errors import OracleBoundExceeded, UnknownSuite, UnknownVertex
from bshyper.rank import d_value, icl, is_strong
from bshyper.structures import is_in_Kalpha
from conftest import graph, star3
from strategies import structure_and_subset


def test_oracle_strong_star():
    cert = oracle_strong(star3(), "abd")
    assert not cert.verdict and cert.witness == frozenset("abdx")
    assert oracle_strong(star3(), ()).verdict


def test_oracle_icl_star():
    assert oracle_icl(star3(), "a") == frozenset("a")
    assert oracle_icl(star3(), "abd") == frozenset("abdx")


def test_oracle_bound():
    with pytest.raises(OracleBoundExceeded):
        oracle_strong(graph([f"v{i}" for i in range(5)]), (), bound=3)


def test_star_minimal_pairs():
    S = star3()
    pairs = {(S.names(a), S.names(b)) for a, b in minimal_pairs(S)}
    assert (frozenset("abd"), frozenset("abdx")) in pairs
    assert not is_closed(S, "abd", minimal_pairs(S))
    assert is_closed(S, "ax")


def test_flatness_examples():
    assert flatness_check(star3(), [{"a"}, {"b"}]) == 0
    assert flatness_check(star3(), [{"a", "x"}, {"b", "x"}]) == 0
    with pytest.raises(UnknownVertex):
        flatness_check(star3(), [{"q"}])


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_property_suite("nope", 1)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_small(name):
    r = run_property_suite(name, 60, seed=3)
    assert r.ok, r.failures[:1]


def test_suite_reports_are_deterministic():
    a = run_property_suite("flatness", 20, seed=11).to_json()
    b = run_property_suite("flatness", 20, seed=11).to_json()
    assert a == b


def test_random_kalpha_is_member():
    rng = random.Random(5)
    for _ in range(50):
        assert is_in_Kalpha(random_kalpha(rng, random_signature(rng, True), rng.randint(0, 7)))


@given(structure_and_subset(max_n=6))
def test_oracles_agree_with_library(case):
    Z, X = case
    assert oracle_strong(Z, X).verdict == is_strong(Z, X).verdict
    assert oracle_icl(Z, X) == icl(Z, X)
    assert oracle_d(Z, X) == d_value(Z, X)


@given(structure_and_subset(max_n=6))
def test_closed_iff_strong(case):
    Z, X = case
    assert is_closed(Z, X) == is_strong(Z, X).verdict


@given(structure_and_subset(max_n=6), structure_and_subset(max_n=6))
def test_flatness_two_closed_sets(c1, c2):
    Z, X = c1
    Y = frozenset(v for v in c2[1] if v in Z.vertex_set)
    assert flatness_check(Z, [icl(Z, X), icl(Z, Y)]) <= 0
