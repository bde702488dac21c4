"""Verification-suite harness behavior: verdicts, determinism, guards."""

import json

import pytest

from matchlab import formats, suites
from matchlab.errors import BudgetExceededError, PreconditionError, UnknownSuiteError
from matchlab.manipulation import mpda_rule, validate_witness
from matchlab.suites import SUITE_IDS, SuiteParams, run_suite

# example2 probes a 200k-profile fixture domain; fewer probes keep the
# default test run quick without changing what is checked
LIGHT = {"example2": SuiteParams(trials=40)}


@pytest.mark.parametrize("suite_id", SUITE_IDS)
def test_suite_passes_at_defaults(suite_id):
    report = run_suite(suite_id, LIGHT.get(suite_id, SuiteParams()))
    assert report.verdict == "pass"
    assert report.counterexample is None
    assert report.suite == suite_id
    assert report.runtime_seconds >= 0.0


def test_catalog_is_complete():
    assert len(SUITE_IDS) == 13
    assert len(set(SUITE_IDS)) == 13


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError):
        run_suite("theorem9", SuiteParams())


def test_modes_by_size():
    assert run_suite("theorem1", SuiteParams()).mode == "exhaustive"
    small_sample = run_suite("theorem1", SuiteParams(men=3, women=3, trials=4))
    assert small_sample.mode == "sampled"
    assert small_sample.trials == 4
    assert run_suite("example1", SuiteParams()).mode == "fixture"


def test_sampled_still_sees_planted_witnesses():
    # even a tiny sampled run passes through bases that carry manipulations,
    # so the coalition-side claim is exercised rather than vacuous
    report = run_suite("theorem1", SuiteParams(men=3, women=3, trials=2))
    assert report.verdict == "pass"
    assert "planted" in report.notes


def test_exhaustive_counts_every_base():
    report = run_suite("prop-unmatched", SuiteParams())
    assert report.trials == 6**4


def test_blocking_lemma_guard():
    with pytest.raises(PreconditionError):
        run_suite("blocking-lemma", SuiteParams(men=1, women=1))


def test_prop4_is_a_2x2_statement():
    with pytest.raises(PreconditionError):
        run_suite("prop4", SuiteParams(men=3, women=3))


def test_budget_guard_raises():
    with pytest.raises(BudgetExceededError):
        run_suite("theorem1", SuiteParams(budget=10))


def test_reports_deterministic():
    first = run_suite("lemma-c2", SuiteParams())
    again = run_suite("lemma-c2", SuiteParams())
    assert first.to_json_dict() == again.to_json_dict()


def test_reports_jobs_invariant():
    serial = run_suite("prop-welfare", SuiteParams()).to_json_dict()
    threaded = run_suite("prop-welfare", SuiteParams(jobs=3)).to_json_dict()
    assert serial["params"].pop("jobs") == 1
    assert threaded["params"].pop("jobs") == 3
    assert serial == threaded


def test_seed_changes_sampled_run():
    base = run_suite("blocking-lemma", SuiteParams(men=3, women=3, trials=20))
    moved = run_suite("blocking-lemma", SuiteParams(men=3, women=3, trials=20, seed=7))
    assert base.verdict == moved.verdict == "pass"
    assert base.params["seed"] != moved.params["seed"]


def test_report_json_shape():
    doc = run_suite("corollary-dubins", SuiteParams()).to_json_dict()
    assert doc["schema"] == "matchlab/1"
    assert doc["kind"] == "suite-report"
    assert set(doc) == {
        "schema", "kind", "suite", "params", "mode", "verdict",
        "counterexample", "trials", "notes",
    }
    json.dumps(doc)  # serializable as-is


def test_runtime_kept_out_of_json_by_default():
    report = run_suite("example1", SuiteParams())
    assert "runtime_seconds" not in report.to_json_dict()
    assert "runtime_seconds" in report.to_json_dict(include_runtime=True)


def test_fail_path_carries_revalidated_witness():
    # an impossible predicate turns every witness into a counterexample; the
    # survey must re-validate it before reporting and embed a reusable record
    outcome = suites._witness_survey(
        SuiteParams(), lambda rule, witness: "flagged for the test"
    )
    assert outcome.verdict == "fail"
    assert outcome.counterexample["reason"] == "flagged for the test"
    witness = formats.witness_from_json(outcome.counterexample["witness"])
    validate_witness(mpda_rule(), witness)


def test_fail_path_in_sampled_mode():
    outcome = suites._witness_survey(
        SuiteParams(men=3, women=3, trials=3), lambda rule, witness: "flagged"
    )
    assert outcome.verdict == "fail"
    assert outcome.mode == "sampled"
    assert formats.witness_from_json(outcome.counterexample["witness"])


def test_lemma_c1_reports_rule_hits():
    report = run_suite("lemma-c1", SuiteParams())
    assert "admitted a rule" in report.notes


def test_theorem3_domain_count_follows_trials():
    report = run_suite("theorem3", SuiteParams(trials=6))
    assert report.trials == 6
    assert report.verdict == "pass"


def test_example2_notes_show_domain_scale():
    report = run_suite("example2", SuiteParams(trials=25))
    assert report.verdict == "pass"
    assert "200000" in report.notes


def test_run_all_suites_covers_catalog():
    reports = suites.run_all_suites(SuiteParams(trials=2))
    assert [r.suite for r in reports] == list(SUITE_IDS)
    assert all(r.verdict == "pass" for r in reports)
