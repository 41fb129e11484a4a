from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings

from bshyper.audit import oracle_strong
from bshyper.errors import (
    BaseRankNotPositive,
    NegativeTarget,
    NotANugget,
    NotInKalpha,
    PreconditionRankOrder,
    RankTooLow,
)
from bshyper.rank import is_essential_minimal_pair, is_strong
from bshyper.structures import delta, delta_rel, induced, is_in_Kalpha, iso_check
from bshyper.synthesis import (
    Claim,
    SearchBudget,
    amalgam_cap,
    cap_to_dim,
    check_claim,
    nonorth_config,
    preweight_config,
    raise_by_one,
    synth_essential_minpair,
)
from conftest import complete, graph, star3
from strategies import structures


def _all_verified(result):
    checks = result.verify()
    assert checks and all(ok for _, ok in checks), checks


def test_three_points_give_star():
    r = synth_essential_minpair(graph("abd"))
    _all_verified(r)
    assert iso_check(r.output, star3(), {"a": "a", "b": "b", "d": "d"}) is not None
    assert delta_rel(r.output, r.output.vertex_set, "abd") == F(-1, 2)


def test_empty_base_rejected():
    with pytest.raises(BaseRankNotPositive):
        synth_essential_minpair(graph(""))


def test_base_outside_kalpha_rejected():
    with pytest.raises(NotInKalpha):
        synth_essential_minpair(complete(6))


def test_hand_built_two_thirds_gadget():
    D = graph("axyz", ["xy", "yz", "xz", "xa", "ya"], "2/3")
    assert delta(D) == F(2, 3)
    cert = is_essential_minimal_pair(induced(D, "a"), D)
    assert cert.verdict and cert.drop == F(-1, 3)


def test_two_thirds_single_vertex_synth():
    r = synth_essential_minpair(graph("a", alpha="2/3"))
    _all_verified(r)
    assert delta_rel(r.output, r.output.vertex_set, "a") == F(-1, 3)


def test_cap_point_to_zero():
    r = cap_to_dim(graph("a"), 0)
    _all_verified(r)
    assert delta(r.output) == 0 and is_strong(r.output, ()).verdict


def test_cap_empty_to_half_uses_three_steps():
    r = cap_to_dim(graph(""), 1, recipe="proof")
    _all_verified(r)
    assert delta(r.output) == F(1, 2)
    steps = [s for s in r.derivation if s["step"] == "attach_gadget"]
    points = [s for s in r.derivation if s["step"] == "free_points"]
    assert len(steps) == 3 and len(points[0]["points"]) == 2


def test_cap_negative_target():
    with pytest.raises(NegativeTarget):
        cap_to_dim(graph("a"), -1)


@pytest.mark.parametrize("recipe", ["auto", "compact"])
def test_cap_preserves_strong_subsets(recipe):
    B = graph("abc", ["ab"])
    r = cap_to_dim(B, 2, recipe=recipe)
    _all_verified(r)
    assert delta(r.output) == 1
    for k in range(4):
        for A in combinations("abc", k):
            if is_strong(B, A).verdict and delta(induced(B, A)) <= 1:
                assert oracle_strong(r.output, A, bound=20).verdict if len(r.output) <= 20 else \
                    is_strong(r.output, A).verdict


def test_raise_examples():
    r = raise_by_one(graph(""))
    _all_verified(r)
    assert delta(r.output) == F(1, 2)
    r = raise_by_one(graph("a"))
    _all_verified(r)
    assert delta(r.output) == F(3, 2) and is_strong(r.output, "a").verdict


def test_amalgam_two_points():
    r = amalgam_cap(graph(""), graph("b"), graph("c"))
    _all_verified(r)
    H = r.output
    assert delta(H) == 1
    assert is_strong(H, "b").verdict and is_strong(H, "c").verdict


def test_amalgam_point_and_pair():
    r = amalgam_cap(graph(""), graph("b"), graph(["c1", "c2"]))
    _all_verified(r)
    assert delta(r.output) == 2
    assert delta_rel(r.output, r.output.vertex_set, ["c1", "c2"]) == 0


def test_amalgam_rank_order():
    with pytest.raises(PreconditionRankOrder):
        amalgam_cap(graph(""), graph(["b1", "b2"]), graph("c"))


@pytest.mark.parametrize("alpha", ["1/2", "2/3"])
def test_nonorth(alpha):
    AB = raise_by_one(graph("", alpha=alpha)).output
    AC = raise_by_one(graph("", alpha=alpha)).output
    from bshyper.structures import rename
    AC = rename(AC, {v: "c_" + v for v in AC.vertices})
    r = nonorth_config(graph("", alpha=alpha), AB, AC)
    _all_verified(r)
    c = r.output.signature.c
    D = AB.vertex_set | AC.vertex_set
    assert delta_rel(r.output, r.output.vertex_set, D) == F(-1, c)


def test_nonorth_precondition():
    with pytest.raises(PreconditionRankOrder):
        nonorth_config(graph(""), graph("b"), graph("c"))


def test_preweight_half():
    r = preweight_config(graph(""), graph("b"))
    _all_verified(r)
    kinds = [c.kind for c in r.certificates]
    assert kinds.count("strong") == 5 and kinds.count("not_strong") == 1
    assert is_in_Kalpha(r.output)


def test_preweight_rank_too_low():
    with pytest.raises(RankTooLow):
        preweight_config(graph(""), complete(5, drop=1))


def test_preweight_needs_nugget():
    with pytest.raises(NotANugget):
        preweight_config(graph(""), graph(["b1", "b2"]))


def test_check_claim_rejects_false_claim():
    S = star3()
    assert not check_claim(S, Claim("bad", "strong", frozenset("abd")))
    assert check_claim(S, Claim("ok", "not_strong", frozenset("abd")))


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(max_new_vertices=-1)


@settings(max_examples=30, deadline=None)
@given(structures(max_n=4, kalpha=True))
def test_synth_certifies_on_random_bases(A):
    if delta(A) <= 0:
        return
    r = synth_essential_minpair(A)
    _all_verified(r)
    cert = is_essential_minimal_pair(A, r.output)
    assert cert.verdict and cert.drop == F(-1, A.signature.c)


def test_proof_recipe_reports_budget():
    from bshyper.errors import BudgetExhausted
    with pytest.raises(BudgetExhausted):
        cap_to_dim(graph("abc", ["ab"]), 2, recipe="proof")
