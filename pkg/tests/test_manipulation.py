"""Rules, manipulation witnesses, and strategy-proofness certification."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchlab.core import OUTSIDE, Matching, Profile, man, men, woman, women
from matchlab.da import RuleId, da_matching
from matchlab.domains import PreferenceDomain, all_preferences
from matchlab.errors import BudgetExceededError, PreconditionError
from matchlab.manipulation import (
    DEFAULT_EVAL_BUDGET,
    EXHAUSTIVE_PROFILE_BUDGET,
    ManipulationWitness,
    MatchingRule,
    find_manipulation,
    find_manipulation_sampled,
    is_group_strategy_proof,
    is_strategy_proof,
    is_strategy_proof_sampled,
    iter_manipulations,
    mpda_rule,
    planned_evaluations,
    validate_witness,
    welfare_shift,
    wpda_rule,
)

from conftest import pref, random_profile

M1, M2 = man(0), man(1)
W1, W2 = woman(0), woman(1)


# --- rules -------------------------------------------------------------------


def test_rule_apply_matches_da(p1):
    rule = mpda_rule()
    assert rule.apply(p1) == da_matching(RuleId.MPDA, p1)
    assert rule(p1) == rule.apply(p1)
    assert rule.name == "mpda"
    assert rule.stable


def test_rule_assignment_cached(p1):
    rule = mpda_rule()
    key = (p1.men_prefs, p1.women_prefs)
    rule.apply(p1)
    assert key in rule._cache
    assert rule.assignment(*key) is rule._cache[key]


def test_rule_from_table_rejects_unknown_profile(p1, p2):
    table = {(p1.men_prefs, p1.women_prefs): (0, 1)}
    rule = MatchingRule.from_table(table, name="tiny", stable=True)
    assert rule.apply(p1).pairs == ((M1, W1), (M2, W2))
    with pytest.raises(PreconditionError):
        rule.apply(p2)


def test_rule_from_profile_function(p1):
    def empty(profile):
        return Matching(profile.p, profile.q, [])

    rule = MatchingRule.from_profile_function(empty, name="empty", stable=False)
    assert rule.apply(p1).is_empty
    assert not rule.stable


# --- single witness searches -------------------------------------------------


def test_mpda_manipulable_by_w1_on_full_domain(p1):
    # the canonical first witness: w1 drops m1 below the outside option
    rule = mpda_rule()
    full = PreferenceDomain.full(2, 2)
    wit = find_manipulation(rule, full, p1, max_coalition=1)
    assert wit is not None
    assert wit.coalition == (W1,)
    assert wit.misreports == ((W1, pref(W1, M2, OUTSIDE, M1)),)
    assert wit.outcome_before.pairs == ((M1, W1), (M2, W2))
    assert wit.outcome_after.pairs == ((M1, W2), (M2, W1))
    validate_witness(rule, wit, domain=full)


def test_wpda_manipulable_by_m1_on_full_domain(p1):
    # mirror image: m1 truncates, turning the crossed outcome straight
    rule = wpda_rule()
    full = PreferenceDomain.full(2, 2)
    wit = find_manipulation(rule, full, p1, max_coalition=1)
    assert wit is not None
    assert wit.coalition == (M1,)
    assert wit.misreports == ((M1, pref(M1, W1, OUTSIDE, W2)),)
    assert wit.outcome_before.pairs == ((M1, W2), (M2, W1))
    assert wit.outcome_after.pairs == ((M1, W1), (M2, W2))
    validate_witness(rule, wit, domain=full)


def test_singleton_domain_has_no_manipulation(p1):
    dom = PreferenceDomain.from_profile(p1)
    assert find_manipulation(mpda_rule(), dom, p1, max_coalition=2) is None
    assert is_strategy_proof(mpda_rule(), dom)
    assert is_group_strategy_proof(mpda_rule(), dom)


def test_base_profile_must_be_admissible(p1, p2):
    dom = PreferenceDomain.from_profile(p1)
    with pytest.raises(PreconditionError):
        find_manipulation(mpda_rule(), dom, p2, max_coalition=1)


def test_witness_scan_order_is_deterministic(p1):
    rule = mpda_rule()
    full = PreferenceDomain.full(2, 2)
    first = [find_manipulation(rule, full, p1, max_coalition=2) for _ in range(3)]
    assert first[0] == first[1] == first[2]


def test_iter_manipulations_yields_distinct_valid_witnesses(p1):
    rule = mpda_rule()
    full = PreferenceDomain.full(2, 2)
    seen = []
    for wit in iter_manipulations(rule, full, p1, max_coalition=1):
        validate_witness(rule, wit, domain=full)
        seen.append(wit)
    assert len(seen) == len(set(seen))
    assert any(w.coalition == (W1,) for w in seen)
    # men cannot gain by misreporting when they propose
    assert all(all(a.side.prefix == "w" for a in w.coalition) for w in seen)


def test_coalition_pool_restricts_search(p1):
    rule = mpda_rule()
    full = PreferenceDomain.full(2, 2)
    assert find_manipulation(rule, full, p1, max_coalition=2, coalition_pool=(M1, M2)) is None
    wit = find_manipulation(rule, full, p1, max_coalition=1, coalition_pool=(W1,))
    assert wit is not None and wit.coalition == (W1,)


# --- observed manipulations track the receiving side --------------------------


def _crafted_manipulable_3x3():
    # the 2x2 rotation embedded in a 3x3 market; m3 and w3 top each other
    ms, ws = men(3), women(3)
    return Profile(
        [
            pref(ms[0], ws[0], ws[1], ws[2], OUTSIDE),
            pref(ms[1], ws[1], ws[0], ws[2], OUTSIDE),
            pref(ms[2], ws[2], ws[0], ws[1], OUTSIDE),
            pref(ws[0], ms[1], ms[0], ms[2], OUTSIDE),
            pref(ws[1], ms[0], ms[1], ms[2], OUTSIDE),
            pref(ws[2], ms[2], ms[0], ms[1], OUTSIDE),
        ]
    )


def test_all_mpda_witnesses_are_women_coalitions_3x3():
    rule = mpda_rule()
    full = PreferenceDomain.full(3, 3)
    rng = random.Random(7)
    bases = [_crafted_manipulable_3x3()] + [random_profile(rng, 3, 3) for _ in range(40)]
    found = 0
    for base in bases:
        for wit in iter_manipulations(rule, full, base, max_coalition=2):
            assert all(a.side.prefix == "w" for a in wit.coalition)
            found += 1
    assert found >= 48  # the crafted base alone carries 48 witnesses


# --- budget arithmetic ---------------------------------------------------------


def test_planned_evaluations_arithmetic():
    assert planned_evaluations([3, 4], 1) == 7
    assert planned_evaluations([3, 4], 2) == 7 + 12
    assert planned_evaluations([2, 2, 2], 3) == 6 + 12 + 8
    assert planned_evaluations([], 5) == 0


def test_budget_exceeded_carries_planned_count(p1):
    full = PreferenceDomain.full(2, 2)
    with pytest.raises(BudgetExceededError) as err:
        find_manipulation(mpda_rule(), full, p1, max_coalition=2, budget=10)
    # four agents, five alternatives each: 4*5 singles + 6*25 pairs
    assert err.value.count == 4 * 5 + 6 * 25
    assert "(required 170)" in str(err.value)


def test_default_budget_allows_small_markets(p1):
    full = PreferenceDomain.full(2, 2)
    assert planned_evaluations([5, 5, 5, 5], 4) < DEFAULT_EVAL_BUDGET
    assert find_manipulation(mpda_rule(), full, p1, max_coalition=4) is not None


def test_exhaustive_certification_profile_budget():
    full = PreferenceDomain.full(3, 3)
    assert full.profile_count == 24 ** 6
    assert full.profile_count > EXHAUSTIVE_PROFILE_BUDGET
    with pytest.raises(BudgetExceededError):
        is_strategy_proof(mpda_rule(), full)


# --- certification -------------------------------------------------------------


def test_full_2x2_mpda_not_strategy_proof():
    full = PreferenceDomain.full(2, 2)
    check = is_strategy_proof(mpda_rule(), full)
    assert not check
    assert check.witness is not None
    validate_witness(mpda_rule(), check.witness, domain=full)


def test_restricted_domain_mpda_strategy_proof():
    # women limited to the two full rankings cannot gain by swapping them
    men_rk = [p.ranking for p in all_preferences(M1, 2)]
    women_rk = [(M1, M2, OUTSIDE), (M2, M1, OUTSIDE)]
    dom = PreferenceDomain.anonymous(2, 2, men_rk, women_rk)
    assert is_strategy_proof(mpda_rule(), dom)
    assert is_group_strategy_proof(mpda_rule(), dom)


def test_sampled_certification_finds_witness_on_dense_domain(p1):
    # men pinned to their true reports, women free: a third of the bases
    # leave some woman below her top, so sampling finds a deviation fast
    dense = PreferenceDomain(
        {
            M1: [p1[M1]],
            M2: [p1[M2]],
            W1: all_preferences(W1, 2),
            W2: all_preferences(W2, 2),
        }
    )
    check = is_strategy_proof_sampled(mpda_rule(), dense, n_bases=80, deviations_per_base=20, seed=5)
    assert not check
    validate_witness(mpda_rule(), check.witness, domain=dense)


def test_sampled_certification_stays_clean_on_sp_domain():
    men_rk = [p.ranking for p in all_preferences(M1, 2)]
    women_rk = [(M1, M2, OUTSIDE), (M2, M1, OUTSIDE)]
    dom = PreferenceDomain.anonymous(2, 2, men_rk, women_rk)
    assert is_strategy_proof_sampled(mpda_rule(), dom, n_bases=80, deviations_per_base=20, seed=5)


def test_sampled_search_collects_validated_witnesses(p1):
    full = PreferenceDomain.full(2, 2)
    rng = random.Random(11)
    hits = find_manipulation_sampled(
        mpda_rule(), full, p1, trials=500, rng=rng, max_coalition=2, collect=True
    )
    assert hits
    for wit in hits:
        validate_witness(mpda_rule(), wit, domain=full)


# --- witness validation rejects broken claims -----------------------------------


def _w1_witness(p1):
    full = PreferenceDomain.full(2, 2)
    return find_manipulation(mpda_rule(), full, p1, max_coalition=1), full


def test_validate_rejects_wrong_outcome(p1):
    wit, full = _w1_witness(p1)
    broken = ManipulationWitness(
        rule_name=wit.rule_name,
        base=wit.base,
        coalition=wit.coalition,
        misreports=wit.misreports,
        outcome_before=wit.outcome_after,  # swapped on purpose
        outcome_after=wit.outcome_before,
    )
    with pytest.raises(PreconditionError):
        validate_witness(mpda_rule(), broken, domain=full)


def test_validate_rejects_non_improving_member(p1):
    full = PreferenceDomain.full(2, 2)
    # m2 reports truthfully alongside w1 but gains nothing
    base_wit = find_manipulation(mpda_rule(), full, p1, max_coalition=1)
    padded = ManipulationWitness(
        rule_name=base_wit.rule_name,
        base=p1,
        coalition=(M2, W1),
        misreports=((M2, p1[M2]),) + base_wit.misreports,
        outcome_before=base_wit.outcome_before,
        outcome_after=base_wit.outcome_after,
    )
    with pytest.raises(PreconditionError, match="strictly"):
        validate_witness(mpda_rule(), padded, domain=full)


def test_validate_rejects_all_truthful_reports(p1):
    wit = ManipulationWitness(
        rule_name="mpda",
        base=p1,
        coalition=(W1,),
        misreports=((W1, p1[W1]),),
        outcome_before=da_matching(RuleId.MPDA, p1),
        outcome_after=da_matching(RuleId.MPDA, p1),
    )
    with pytest.raises(PreconditionError, match="differ"):
        validate_witness(mpda_rule(), wit)


def test_validate_rejects_inadmissible_misreport(p1):
    wit, _ = _w1_witness(p1)
    tiny = PreferenceDomain.from_profile(p1)
    with pytest.raises(PreconditionError, match="admissible"):
        validate_witness(mpda_rule(), wit, domain=tiny)


def test_validate_rejects_empty_or_duplicated_coalition(p1):
    wit, full = _w1_witness(p1)
    with pytest.raises(PreconditionError):
        validate_witness(
            mpda_rule(),
            ManipulationWitness(wit.rule_name, p1, (), (), wit.outcome_before, wit.outcome_before),
            domain=full,
        )
    with pytest.raises(PreconditionError):
        validate_witness(
            mpda_rule(),
            ManipulationWitness(
                wit.rule_name, p1, (W1, W1), wit.misreports * 2, wit.outcome_before, wit.outcome_after
            ),
            domain=full,
        )


def test_validate_rejects_owner_mismatch(p1):
    wit, full = _w1_witness(p1)
    with pytest.raises(PreconditionError):
        validate_witness(
            mpda_rule(),
            ManipulationWitness(
                wit.rule_name,
                p1,
                (W2,),
                ((W2, wit.misreports[0][1]),),  # preference owned by w1
                wit.outcome_before,
                wit.outcome_after,
            ),
            domain=full,
        )


# --- welfare shift --------------------------------------------------------------


def test_welfare_shift_on_canonical_witness(p1):
    rule = mpda_rule()
    full = PreferenceDomain.full(2, 2)
    wit = find_manipulation(rule, full, p1, max_coalition=1)
    shift = welfare_shift(rule, p1, wit)
    assert shift.men_weakly_worse
    assert shift.women_weakly_better
    assert shift.unmatched_preserved
    assert shift.direction_of(W1) == "better"
    assert shift.direction_of(M1) == "worse"
    assert shift.direction_of(M2) == "worse"
    assert shift.direction_of(W2) == "better"


def test_welfare_shift_requires_matching_base(p1, p2):
    rule = mpda_rule()
    full = PreferenceDomain.full(2, 2)
    wit = find_manipulation(rule, full, p1, max_coalition=1)
    with pytest.raises(PreconditionError):
        welfare_shift(rule, p2, wit)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10 ** 9))
def test_any_mpda_witness_shifts_welfare_toward_women(seed):
    rng = random.Random(seed)
    base = random_profile(rng, 2, 2)
    full = PreferenceDomain.full(2, 2)
    rule = mpda_rule()
    wit = find_manipulation(rule, full, base, max_coalition=2)
    if wit is None:
        return
    shift = welfare_shift(rule, base, wit)
    assert shift.men_weakly_worse
    assert shift.women_weakly_better
    assert shift.unmatched_preserved
