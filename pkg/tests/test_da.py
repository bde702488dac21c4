import random

import pytest

from conftest import M1, M2, W1, W2, pref, random_profile
from matchlab.core import OUTSIDE, Matching, Profile, Side, is_stable, stable_set
from matchlab.da import (
    DaTrace,
    RuleId,
    da_matching,
    proposer_optimality_check,
    replay_trace,
    run_da,
)


def test_mpda_example(p1, mu):
    outcome, trace = run_da(RuleId.MPDA, p1)
    assert outcome == mu
    assert trace.final == mu


def test_wpda_example(p1, mu_tilde):
    outcome, _ = run_da(RuleId.WPDA, p1)
    assert outcome == mu_tilde


def test_everyone_prefers_outside():
    profile = Profile(
        [
            pref(M1, OUTSIDE, W1, W2),
            pref(M2, OUTSIDE, W1, W2),
            pref(W1, OUTSIDE, M1, M2),
            pref(W2, OUTSIDE, M1, M2),
        ]
    )
    outcome, trace = run_da(RuleId.MPDA, profile)
    assert outcome.is_empty
    assert len(trace.steps) == 1
    assert trace.steps[0].proposals == ()


def test_rejection_chain_trace(p3):
    # at p3, m1 is unacceptable to w1: his opener is rejected outright
    outcome, trace = run_da(RuleId.MPDA, p3)
    assert outcome == Matching(2, 2, [(M1, W2), (M2, W1)])
    first = trace.steps[0]
    assert (M1, W1) in first.proposals
    assert (M1, W1) in first.rejections


def test_trace_step_numbers_and_replay(p1, p3):
    for rule in RuleId:
        for profile in (p1, p3):
            outcome, trace = run_da(rule, profile)
            assert [s.number for s in trace.steps] == list(range(1, len(trace.steps) + 1))
            assert replay_trace(trace, profile.p, profile.q) == outcome


def _proposal_discipline(trace: DaTrace) -> bool:
    """A proposer reappears only after being rejected in the step before."""
    last_rejected = None
    for step in trace.steps:
        proposers = [a for a, _ in step.proposals]
        if len(set(proposers)) != len(proposers):
            return False
        if last_rejected is not None:
            if any(a not in last_rejected for a in proposers):
                return False
        last_rejected = {a for a, _ in step.rejections}
    return True


@pytest.mark.parametrize("p,q", [(2, 2), (3, 3), (2, 4), (4, 2), (4, 4)])
def test_da_random_invariants(p, q):
    rng = random.Random(2000 + 10 * p + q)
    for _ in range(120):
        profile = random_profile(rng, p, q)
        mpda, trace_m = run_da(RuleId.MPDA, profile)
        wpda, trace_w = run_da(RuleId.WPDA, profile)
        assert is_stable(mpda, profile)
        assert is_stable(wpda, profile)
        # stable matchings leave the same agents unmatched
        assert frozenset(mpda.unmatched) == frozenset(wpda.unmatched)
        assert replay_trace(trace_m, p, q) == mpda
        assert replay_trace(trace_w, p, q) == wpda
        assert _proposal_discipline(trace_m)
        assert _proposal_discipline(trace_w)
        assert da_matching(RuleId.MPDA, profile) == mpda


@pytest.mark.parametrize("p,q", [(3, 3), (2, 3)])
def test_proposer_optimality_and_receiver_pessimality(p, q):
    rng = random.Random(3000 + p + q)
    for _ in range(80):
        profile = random_profile(rng, p, q)
        sset = stable_set(profile)
        mpda = da_matching(RuleId.MPDA, profile)
        wpda = da_matching(RuleId.WPDA, profile)
        assert mpda in sset
        assert wpda in sset
        for mu in sset:
            for m in profile.men:
                assert profile[m].weakly_prefers(mpda.partner(m), mu.partner(m))
                # proposer-optimal is receiver-pessimal
                assert profile[m].weakly_prefers(mu.partner(m), wpda.partner(m))
            for w in profile.women:
                assert profile[w].weakly_prefers(wpda.partner(w), mu.partner(w))
                assert profile[w].weakly_prefers(mu.partner(w), mpda.partner(w))


def test_proposer_optimality_check_examples(p1):
    assert proposer_optimality_check(RuleId.MPDA, p1)
    assert proposer_optimality_check(RuleId.WPDA, p1)


def test_proposer_optimality_check_seeded_3x3():
    rng = random.Random(42)
    for _ in range(1000):
        profile = random_profile(rng, 3, 3)
        assert proposer_optimality_check(RuleId.MPDA, profile)
