"""JSON encoding and decoding for markets, matchings, domains, and witnesses.

All functions speak plain dicts and lists; file and stream handling stay at
the CLI edge.  Every emitted document carries a schema tag, and docs/format.md
describes the shapes in full.  Parse failures raise FormatError naming the
offending entry.
"""

from __future__ import annotations

import re
from typing import Any, Mapping, Sequence

from .core import (
    OUTSIDE,
    AgentId,
    Matching,
    Outcome,
    Preference,
    Profile,
    Side,
    man,
    men,
    woman,
    women,
)
from .domains import PreferenceDomain, PriorOrdering
from .errors import FormatError, MatchlabError
from .manipulation import ManipulationWitness
from .mto import (
    CollegeId,
    CollegePreference,
    MtoMatching,
    MtoProfile,
    MtoWitness,
    StudentId,
    StudentPreference,
    college,
    is_responsive,
    student,
)

SCHEMA = "matchlab/1"

_AGENT_NAME = re.compile(r"^([mwcs])([1-9][0-9]*)$")


def _require_dict(doc: Any, field: str) -> Mapping:
    if not isinstance(doc, Mapping):
        raise FormatError(field, f"expected an object, got {type(doc).__name__}")
    return doc


def _require_list(value: Any, field: str) -> Sequence:
    if not isinstance(value, (list, tuple)):
        raise FormatError(field, f"expected a list, got {type(value).__name__}")
    return value


def _require_count(doc: Mapping, key: str, label: str | None = None) -> int:
    value = doc.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise FormatError(label or key, "expected a positive integer")
    return value


def _parse_name(token: Any, field: str, prefixes: str) -> tuple[str, int]:
    if not isinstance(token, str):
        raise FormatError(field, f"expected an agent name string, got {token!r}")
    m = _AGENT_NAME.match(token)
    if not m or m.group(1) not in prefixes:
        wanted = " or ".join(f"{c}<k>" for c in prefixes)
        raise FormatError(field, f"bad agent name {token!r}, expected {wanted}")
    return m.group(1), int(m.group(2)) - 1


def _marriage_agent(token: Any, field: str) -> AgentId:
    prefix, idx = _parse_name(token, field, "mw")
    return man(idx) if prefix == "m" else woman(idx)


def _outcome_token(x: Outcome) -> str:
    return "@" if x is OUTSIDE else x.name


def _parse_ranking(tokens: Any, field: str, side: Side) -> tuple[Outcome, ...]:
    """One preference list: names from the given side plus a single '@'."""
    out: list[Outcome] = []
    prefix = side.prefix
    for tok in _require_list(tokens, field):
        if tok == "@":
            out.append(OUTSIDE)
            continue
        got, idx = _parse_name(tok, field, "mwcs")
        if got != prefix:
            raise FormatError(field, f"{tok!r} is not on the expected side ({prefix}<k>)")
        out.append(AgentId(side, idx))
    return tuple(out)


def _wrap(field: str, fn, *args):
    try:
        return fn(*args)
    except MatchlabError as err:
        raise FormatError(field, str(err)) from err


# --- one-to-one markets -------------------------------------------------------


def profile_to_json(profile: Profile) -> dict:
    prefs = {}
    for a in profile.agents:
        prefs[a.name] = [_outcome_token(x) for x in profile[a].ranking]
    return {
        "schema": SCHEMA,
        "kind": "market",
        "men": profile.p,
        "women": profile.q,
        "preferences": prefs,
    }


def profile_from_json(doc: Any) -> Profile:
    doc = _require_dict(doc, "market")
    p = _require_count(doc, "men")
    q = _require_count(doc, "women")
    table = _require_dict(doc.get("preferences"), "preferences")
    expected = [a.name for a in men(p) + women(q)]
    missing = [name for name in expected if name not in table]
    if missing:
        raise FormatError("preferences", f"missing agents: {', '.join(missing)}")
    extra = sorted(set(table) - set(expected))
    if extra:
        raise FormatError("preferences", f"unknown agents: {', '.join(extra)}")
    prefs = []
    for a in men(p) + women(q):
        field = f"preferences.{a.name}"
        ranking = _parse_ranking(table[a.name], field, a.side.opposite)
        prefs.append(_wrap(field, Preference, a, ranking))
    return _wrap("preferences", Profile, prefs)


def matching_to_json(matching: Matching) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "matching",
        "pairs": [[m.name, w.name] for m, w in matching.pairs],
        "unmatched": [a.name for a in matching.unmatched],
    }


def matching_from_json(doc: Any, p: int, q: int) -> Matching:
    doc = _require_dict(doc, "matching")
    pairs = []
    for i, entry in enumerate(_require_list(doc.get("pairs"), "pairs")):
        field = f"pairs[{i}]"
        entry = _require_list(entry, field)
        if len(entry) != 2:
            raise FormatError(field, "expected a [man, woman] pair")
        m = _marriage_agent(entry[0], field)
        w = _marriage_agent(entry[1], field)
        if m.side is not Side.MAN or w.side is not Side.WOMAN:
            raise FormatError(field, "pair must list the man first, then the woman")
        pairs.append((m, w))
    matching = _wrap("pairs", Matching, p, q, pairs)
    stated = {str(tok) for tok in _require_list(doc.get("unmatched", []), "unmatched")}
    actual = {a.name for a in matching.unmatched}
    if stated != actual:
        raise FormatError(
            "unmatched",
            f"listed {sorted(stated)} but the pairs leave {sorted(actual)} unmatched",
        )
    return matching


# --- preference domains -------------------------------------------------------


def domain_to_json(domain: PreferenceDomain) -> dict:
    agents = {}
    for a in domain.agents:
        agents[a.name] = [
            [_outcome_token(x) for x in pref.ranking] for pref in domain.admissible(a)
        ]
    return {"schema": SCHEMA, "kind": "domain", "agents": agents}


def domain_from_json(doc: Any) -> PreferenceDomain:
    doc = _require_dict(doc, "domain")
    table = _require_dict(doc.get("agents"), "agents")
    sets: dict[AgentId, list[Preference]] = {}
    for token in table:
        prefix, idx = _parse_name(token, "agents", "mw")
        a = man(idx) if prefix == "m" else woman(idx)
        field = f"agents.{token}"
        prefs = []
        for entry in _require_list(table[token], field):
            ranking = _parse_ranking(entry, field, a.side.opposite)
            prefs.append(_wrap(field, Preference, a, ranking))
        sets[a] = prefs
    return _wrap("agents", PreferenceDomain, sets)


def orderings_to_json(men_line: PriorOrdering, women_line: PriorOrdering) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "orderings",
        "men": [a.name for a in men_line.order],
        "women": [a.name for a in women_line.order],
    }


def orderings_from_json(doc: Any) -> tuple[PriorOrdering, PriorOrdering]:
    doc = _require_dict(doc, "orderings")
    lines = []
    for field, side in (("men", Side.MAN), ("women", Side.WOMAN)):
        order = []
        for tok in _require_list(doc.get(field), field):
            a = _marriage_agent(tok, field)
            if a.side is not side:
                raise FormatError(field, f"{tok!r} does not belong on the {field} line")
            order.append(a)
        lines.append(_wrap(field, PriorOrdering, side, tuple(order)))
    return lines[0], lines[1]


# --- college admissions markets -------------------------------------------------


def _college_agent(token: Any, field: str) -> CollegeId:
    return college(_parse_name(token, field, "c")[1])


def _student_agent(token: Any, field: str) -> StudentId:
    return student(_parse_name(token, field, "s")[1])


def _subset_from_json(entry: Any, field: str) -> tuple[StudentId, ...]:
    return tuple(_student_agent(tok, field) for tok in _require_list(entry, field))


def _college_pref_to_json(cp: CollegePreference) -> dict:
    return {
        "quota": cp.quota,
        "subset_ranking": [[s.name for s in subset] for subset in cp.ranking],
    }


def _college_pref_from_json(owner: CollegeId, doc: Any, n_students: int, field: str) -> CollegePreference:
    doc = _require_dict(doc, field)
    quota = _require_count(doc, "quota", f"{field}.quota")
    ranking = [
        _subset_from_json(entry, f"{field}.subset_ranking")
        for entry in _require_list(doc.get("subset_ranking"), f"{field}.subset_ranking")
    ]
    cp = _wrap(f"{field}.subset_ranking", CollegePreference, owner, quota, n_students, ranking)
    check = is_responsive(cp)
    if not check:
        raise FormatError(
            f"{field}.subset_ranking", f"ranking is not responsive: {check.detail}"
        )
    return cp


def mto_profile_to_json(profile: MtoProfile) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "college-market",
        "colleges": {
            cp.owner.name: _college_pref_to_json(cp) for cp in profile.college_prefs
        },
        "students": {
            sp.owner.name: [_outcome_token(x) for x in sp.ranking]
            for sp in profile.student_prefs
        },
    }


def _contiguous(indices: list[int], field: str, prefix: str) -> int:
    if sorted(indices) != list(range(len(indices))):
        raise FormatError(field, f"{prefix} names must be {prefix}1..{prefix}{len(indices)} with no gaps")
    return len(indices)


def mto_profile_from_json(doc: Any) -> MtoProfile:
    doc = _require_dict(doc, "college-market")
    colleges_doc = _require_dict(doc.get("colleges"), "colleges")
    students_doc = _require_dict(doc.get("students"), "students")
    c_idx = [_parse_name(tok, "colleges", "c")[1] for tok in colleges_doc]
    s_idx = [_parse_name(tok, "students", "s")[1] for tok in students_doc]
    n_colleges = _contiguous(c_idx, "colleges", "c")
    n_students = _contiguous(s_idx, "students", "s")
    cps = [
        _college_pref_from_json(
            college(i), colleges_doc[college(i).name], n_students, f"colleges.{college(i).name}"
        )
        for i in range(n_colleges)
    ]
    sps = []
    for i in range(n_students):
        field = f"students.{student(i).name}"
        ranking: list = []
        for tok in _require_list(students_doc[student(i).name], field):
            if tok == "@":
                ranking.append(OUTSIDE)
            else:
                ranking.append(_college_agent(tok, field))
        sps.append(_wrap(field, StudentPreference, student(i), tuple(ranking)))
    return _wrap("college-market", MtoProfile, cps, sps)


def mto_matching_to_json(matching: MtoMatching) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "college-matching",
        "quotas": {
            college(i).name: qc for i, qc in enumerate(matching.quotas)
        },
        "assignments": {
            college(i).name: [s.name for s in matching.students_of(college(i))]
            for i in range(len(matching.quotas))
        },
        "unmatched": [s.name for s in matching.unmatched_students],
    }


def mto_matching_from_json(doc: Any) -> MtoMatching:
    doc = _require_dict(doc, "college-matching")
    quotas_doc = _require_dict(doc.get("quotas"), "quotas")
    assign_doc = _require_dict(doc.get("assignments"), "assignments")
    c_idx = [_parse_name(tok, "quotas", "c")[1] for tok in quotas_doc]
    n_colleges = _contiguous(c_idx, "quotas", "c")
    quotas = tuple(
        _require_count(quotas_doc, college(i).name) for i in range(n_colleges)
    )
    seen: list[int] = []
    assignment = []
    for i in range(n_colleges):
        name = college(i).name
        if name not in assign_doc:
            raise FormatError("assignments", f"missing college {name}")
        group = tuple(
            _student_agent(tok, f"assignments.{name}").index
            for tok in _require_list(assign_doc[name], f"assignments.{name}")
        )
        seen.extend(group)
        assignment.append(group)
    unmatched = [
        _student_agent(tok, "unmatched").index
        for tok in _require_list(doc.get("unmatched", []), "unmatched")
    ]
    n_students = _contiguous(seen + unmatched, "assignments", "s")
    return _wrap("assignments", MtoMatching, quotas, n_students, assignment)


# --- manipulation witnesses ------------------------------------------------------


def witness_to_json(witness: ManipulationWitness) -> dict:
    """Self-contained record: base profile, deviation, and both outcomes."""
    return {
        "schema": SCHEMA,
        "kind": "witness",
        "rule": witness.rule_name,
        "base": profile_to_json(witness.base),
        "coalition": [a.name for a in witness.coalition],
        "misreports": {
            a.name: [_outcome_token(x) for x in pref.ranking]
            for a, pref in witness.misreports
        },
        "before": matching_to_json(witness.outcome_before),
        "after": matching_to_json(witness.outcome_after),
    }


def witness_from_json(doc: Any) -> ManipulationWitness:
    doc = _require_dict(doc, "witness")
    rule_name = doc.get("rule")
    if rule_name not in ("mpda", "wpda"):
        raise FormatError("rule", f"unknown rule {rule_name!r}, expected mpda or wpda")
    base = profile_from_json(doc.get("base"))
    coalition = tuple(
        _marriage_agent(tok, "coalition")
        for tok in _require_list(doc.get("coalition"), "coalition")
    )
    reports_doc = _require_dict(doc.get("misreports"), "misreports")
    misreports = []
    for a in coalition:
        if a.name not in reports_doc:
            raise FormatError("misreports", f"missing report for {a.name}")
        field = f"misreports.{a.name}"
        ranking = _parse_ranking(reports_doc[a.name], field, a.side.opposite)
        misreports.append((a, _wrap(field, Preference, a, ranking)))
    return ManipulationWitness(
        rule_name=rule_name,
        base=base,
        coalition=coalition,
        misreports=tuple(misreports),
        outcome_before=matching_from_json(doc.get("before"), base.p, base.q),
        outcome_after=matching_from_json(doc.get("after"), base.p, base.q),
    )


def mto_witness_to_json(witness: MtoWitness) -> dict:
    reports: dict[str, Any] = {}
    for a, pref in witness.misreports:
        if isinstance(a, CollegeId):
            reports[a.name] = _college_pref_to_json(pref)
        else:
            reports[a.name] = [_outcome_token(x) for x in pref.ranking]
    return {
        "schema": SCHEMA,
        "kind": "college-witness",
        "base": mto_profile_to_json(witness.base),
        "coalition": [a.name for a in witness.coalition],
        "misreports": reports,
        "before": mto_matching_to_json(witness.outcome_before),
        "after": mto_matching_to_json(witness.outcome_after),
    }


def mto_witness_from_json(doc: Any) -> MtoWitness:
    doc = _require_dict(doc, "college-witness")
    base = mto_profile_from_json(doc.get("base"))
    n_students = len(base.student_prefs)
    coalition = []
    for tok in _require_list(doc.get("coalition"), "coalition"):
        prefix, idx = _parse_name(tok, "coalition", "cs")
        coalition.append(college(idx) if prefix == "c" else student(idx))
    reports_doc = _require_dict(doc.get("misreports"), "misreports")
    misreports = []
    for a in coalition:
        if a.name not in reports_doc:
            raise FormatError("misreports", f"missing report for {a.name}")
        field = f"misreports.{a.name}"
        entry = reports_doc[a.name]
        if isinstance(a, CollegeId):
            misreports.append((a, _college_pref_from_json(a, entry, n_students, field)))
        else:
            ranking: list = []
            for tok in _require_list(entry, field):
                if tok == "@":
                    ranking.append(OUTSIDE)
                else:
                    ranking.append(_college_agent(tok, field))
            misreports.append((a, _wrap(field, StudentPreference, a, tuple(ranking))))
    return MtoWitness(
        base=base,
        coalition=tuple(coalition),
        misreports=tuple(misreports),
        outcome_before=mto_matching_from_json(doc.get("before")),
        outcome_after=mto_matching_from_json(doc.get("after")),
    )


# --- traces ------------------------------------------------------------------------


def da_step_to_json(step) -> dict:
    """One proposal round as a flat record, for line-oriented trace output."""
    return {
        "step": step.number,
        "proposals": [[a.name, b.name] for a, b in step.proposals],
        # the trace stores (rejected proposer, rejecter); emit rejecter first
        # so both trace dialects read the same way
        "rejections": [[b.name, a.name] for a, b in step.rejections],
        "tentative": {
            "pairs": [[m.name, w.name] for m, w in step.tentative.pairs],
            "unmatched": [a.name for a in step.tentative.unmatched],
        },
    }


def mto_step_to_json(step, n_colleges: int) -> dict:
    return {
        "step": step.number,
        "proposals": [[student(s).name, college(c).name] for s, c in step.proposals],
        "rejections": [[college(c).name, student(s).name] for c, s in step.rejections],
        "tentative": {
            college(c).name: [student(s).name for s in group]
            for c, group in zip(range(n_colleges), step.tentative)
        },
    }


# --- college admissions domains ---------------------------------------------------


def mto_domain_to_json(domain) -> dict:
    from .mto import colleges as _colleges, students as _students

    colleges_doc = {}
    for c in _colleges(domain.n_colleges):
        colleges_doc[c.name] = [_college_pref_to_json(cp) for cp in domain.admissible(c)]
    students_doc = {}
    for s in _students(domain.n_students):
        students_doc[s.name] = [
            [_outcome_token(x) for x in sp.ranking] for sp in domain.admissible(s)
        ]
    return {
        "schema": SCHEMA,
        "kind": "college-domain",
        "colleges": colleges_doc,
        "students": students_doc,
    }


def mto_domain_from_json(doc: Any):
    from .mto import MtoDomain

    doc = _require_dict(doc, "college-domain")
    colleges_doc = _require_dict(doc.get("colleges"), "colleges")
    students_doc = _require_dict(doc.get("students"), "students")
    c_idx = [_parse_name(tok, "colleges", "c")[1] for tok in colleges_doc]
    s_idx = [_parse_name(tok, "students", "s")[1] for tok in students_doc]
    n_colleges = _contiguous(c_idx, "colleges", "c")
    n_students = _contiguous(s_idx, "students", "s")
    sets: dict = {}
    for i in range(n_colleges):
        c = college(i)
        field = f"colleges.{c.name}"
        entries = _require_list(colleges_doc[c.name], field)
        sets[c] = [
            _college_pref_from_json(c, entry, n_students, field) for entry in entries
        ]
    for i in range(n_students):
        s = student(i)
        field = f"students.{s.name}"
        prefs = []
        for entry in _require_list(students_doc[s.name], field):
            ranking: list = []
            for tok in _require_list(entry, field):
                if tok == "@":
                    ranking.append(OUTSIDE)
                else:
                    ranking.append(_college_agent(tok, field))
            prefs.append(_wrap(field, StudentPreference, s, tuple(ranking)))
        sets[s] = prefs
    return _wrap("college-domain", MtoDomain, sets)
