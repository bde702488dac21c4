"""College admissions: many-to-one matching with quota-carrying colleges.

Colleges rank subsets of students up to their quota (the empty set plays
the role of the outside option); students rank colleges. The student
proposing deferred acceptance rule extends naturally once college subset
preferences are responsive, i.e. consistent with a ranking of individual
students. The mixed-coalition search here exists to exhibit what the
one-to-one results rule out: a college and an unmatched student jointly
gaming the rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import OUTSIDE, StrictOrder
from .errors import (
    BudgetExceededError,
    NotResponsiveError,
    PreconditionError,
    UnknownOutcomeError,
    ValidationError,
)
from .manipulation import DEFAULT_EVAL_BUDGET, planned_evaluations

# one-to-one translation imports live at the bottom to keep this header light


@dataclass(frozen=True, order=True)
class CollegeId:
    index: int

    @property
    def name(self) -> str:
        return f"c{self.index + 1}"

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class StudentId:
    index: int

    @property
    def name(self) -> str:
        return f"s{self.index + 1}"

    def __repr__(self) -> str:
        return self.name


MtoAgent = Union[CollegeId, StudentId]


def college(i: int) -> CollegeId:
    return CollegeId(i)


def student(i: int) -> StudentId:
    return StudentId(i)


def colleges(n: int) -> tuple[CollegeId, ...]:
    return tuple(CollegeId(i) for i in range(n))


def students(n: int) -> tuple[StudentId, ...]:
    return tuple(StudentId(i) for i in range(n))


class StudentPreference(StrictOrder):
    """A student's strict ranking of every college plus the outside option."""

    __slots__ = ("owner", "outside_rank", "acceptable_idx", "rank_by_index", "_hash")

    def __init__(self, owner: StudentId, ranking: Sequence):
        super().__init__(ranking)
        if not isinstance(owner, StudentId):
            raise ValidationError(f"owner must be a student, got {owner!r}")
        self.owner = owner
        seen = set()
        out_at = None
        for pos, x in enumerate(self.ranking):
            if x is OUTSIDE:
                out_at = pos
                continue
            if not isinstance(x, CollegeId):
                raise ValidationError(f"ranking of {owner} contains {x!r}")
            seen.add(x.index)
        if out_at is None:
            raise ValidationError(f"ranking of {owner} omits the outside option")
        if seen != set(range(len(seen))) or len(seen) != len(self.ranking) - 1:
            raise ValidationError(f"ranking of {owner} must cover colleges 0..n-1 exactly once")
        self.outside_rank = out_at
        self.acceptable_idx = tuple(x.index for x in self.ranking[:out_at])
        rank_by_index = [0] * len(seen)
        for pos, x in enumerate(self.ranking):
            if x is not OUTSIDE:
                rank_by_index[x.index] = pos
        self.rank_by_index = tuple(rank_by_index)
        self._hash = hash((self.owner, self.ranking))

    @property
    def n_colleges(self) -> int:
        return len(self.ranking) - 1

    def is_acceptable(self, c: CollegeId) -> bool:
        return self.rank_by_index[c.index] < self.outside_rank

    def __eq__(self, other) -> bool:
        if not isinstance(other, StudentPreference):
            return NotImplemented
        return self.owner == other.owner and self.ranking == other.ranking

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = " ".join(repr(x) for x in self.ranking)
        return f"{self.owner.name}: {body}"


def _normalize_subset(subset: Iterable[StudentId]) -> tuple[StudentId, ...]:
    return tuple(sorted(subset))


class CollegePreference(StrictOrder):
    """A college's strict ranking of all student subsets up to its quota.

    Entries are sorted tuples of students; the empty tuple stands for
    admitting nobody and anything ranked below it is unacceptable as a group.
    """

    __slots__ = ("owner", "quota", "n_students", "_hash")

    def __init__(self, owner: CollegeId, quota: int, n_students: int, ranking: Sequence[Iterable[StudentId]]):
        if not isinstance(owner, CollegeId):
            raise ValidationError(f"owner must be a college, got {owner!r}")
        if quota < 1:
            raise ValidationError(f"quota of {owner} must be at least 1, got {quota}")
        normalized = tuple(_normalize_subset(s) for s in ranking)
        super().__init__(normalized)
        expected = set()
        for k in range(quota + 1):
            expected.update(itertools.combinations(students(n_students), k))
        if set(normalized) != expected or len(normalized) != len(expected):
            raise ValidationError(
                f"ranking of {owner} must order every student subset of size <= {quota} exactly once"
            )
        self.owner = owner
        self.quota = quota
        self.n_students = n_students
        self._hash = hash((owner, quota, normalized))

    def rank_of(self, subset: Iterable[StudentId]) -> int:
        try:
            return self._rank[_normalize_subset(subset)]
        except (KeyError, TypeError):
            raise UnknownOutcomeError(f"{subset!r} is not ranked by {self.owner}") from None

    def prefers(self, a: Iterable[StudentId], b: Iterable[StudentId]) -> bool:
        return self.rank_of(a) < self.rank_of(b)

    def weakly_prefers(self, a: Iterable[StudentId], b: Iterable[StudentId]) -> bool:
        return self.rank_of(a) <= self.rank_of(b)

    def is_acceptable(self, s: StudentId) -> bool:
        return self.rank_of((s,)) < self.rank_of(())

    def induced_order(self) -> tuple:
        """Singleton comparisons flattened into a ranking of students and OUTSIDE."""
        items: list[tuple[int, object]] = [(self.rank_of(()), OUTSIDE)]
        for s in students(self.n_students):
            items.append((self.rank_of((s,)), s))
        items.sort(key=lambda t: t[0])
        return tuple(x for _, x in items)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CollegePreference):
            return NotImplemented
        return (
            self.owner == other.owner
            and self.quota == other.quota
            and self.ranking == other.ranking
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        def show(s):
            return "{" + ",".join(x.name for x in s) + "}" if s else "{}"

        return f"{self.owner.name}(q={self.quota}): " + " ".join(show(s) for s in self.ranking)


def is_responsive(cp: CollegePreference):
    """Check subset comparisons against the singleton ranking they should follow.

    Adding an acceptable student to a small set must help, adding an
    unacceptable one must hurt, and swapping a member for an outsider must
    follow the singleton comparison.
    """
    from .domains import PropertyCheck

    all_students = students(cp.n_students)
    empty: tuple[StudentId, ...] = ()
    small = [
        s
        for k in range(cp.quota)
        for s in itertools.combinations(all_students, k)
    ]
    for base in small:
        present = set(base)
        rest = [s for s in all_students if s not in present]
        for s in rest:
            gained = cp.prefers(base + (s,), base) == cp.prefers((s,), empty)
            if not gained:
                return PropertyCheck(False, ("gain", base, s))
        for s, t in itertools.permutations(rest, 2):
            if cp.prefers(base + (s,), base + (t,)) != cp.prefers((s,), (t,)):
                return PropertyCheck(False, ("swap", base, s, t))
    return PropertyCheck(True)


def responsive_extension(
    owner: CollegeId, quota: int, induced: Sequence
) -> CollegePreference:
    """The canonical responsive subset ranking built from a student ranking.

    Subsets compare by their sorted member ranks, padded with the outside
    option's rank up to the quota; this lexicographic rule is one responsive
    completion among many.
    """
    n = sum(1 for x in induced if x is not OUTSIDE)
    rank = {x: pos for pos, x in enumerate(induced)}
    if OUTSIDE not in rank:
        raise ValidationError("induced ranking omits the outside option")
    pad = rank[OUTSIDE]

    def key(subset):
        ranks = sorted(rank[s] for s in subset)
        return tuple(ranks + [pad] * (quota - len(subset)))

    subsets = [
        s
        for k in range(quota + 1)
        for s in itertools.combinations(students(n), k)
    ]
    subsets.sort(key=key)
    return CollegePreference(owner, quota, n, subsets)


class MtoMatching:
    """An assignment of students to colleges within quotas."""

    __slots__ = ("quotas", "n_students", "_students_of", "_college_of")

    def __init__(self, quotas: Sequence[int], n_students: int, assignment: Sequence[Iterable[int]]):
        quotas = tuple(quotas)
        if len(assignment) != len(quotas):
            raise ValidationError(
                f"assignment covers {len(assignment)} colleges, market has {len(quotas)}"
            )
        college_of: list[Optional[int]] = [None] * n_students
        students_of = []
        for ci, group in enumerate(assignment):
            raw = tuple(group)
            idx = tuple(sorted(set(raw)))
            if len(idx) != len(raw):
                raise ValidationError(f"college c{ci + 1} lists a student twice")
            if len(idx) > quotas[ci]:
                raise ValidationError(
                    f"college c{ci + 1} holds {len(idx)} students over quota {quotas[ci]}"
                )
            for si in idx:
                if not 0 <= si < n_students:
                    raise ValidationError(f"student index {si} out of range")
                if college_of[si] is not None:
                    raise ValidationError(f"student s{si + 1} assigned to two colleges")
                college_of[si] = ci
            students_of.append(idx)
        self.quotas = quotas
        self.n_students = n_students
        self._students_of = tuple(students_of)
        self._college_of = tuple(college_of)

    def students_of(self, c: CollegeId) -> tuple[StudentId, ...]:
        return tuple(StudentId(i) for i in self._students_of[c.index])

    def college_of(self, s: StudentId):
        ci = self._college_of[s.index]
        return OUTSIDE if ci is None else CollegeId(ci)

    @property
    def assignment(self) -> tuple[tuple[int, ...], ...]:
        return self._students_of

    @property
    def pairs(self) -> tuple:
        return tuple(
            (CollegeId(ci), tuple(StudentId(si) for si in group))
            for ci, group in enumerate(self._students_of)
        )

    @property
    def unmatched_students(self) -> tuple[StudentId, ...]:
        return tuple(StudentId(i) for i, ci in enumerate(self._college_of) if ci is None)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MtoMatching):
            return NotImplemented
        return (
            self.quotas == other.quotas
            and self.n_students == other.n_students
            and self._students_of == other._students_of
        )

    def __hash__(self) -> int:
        return hash((self.quotas, self.n_students, self._students_of))

    def __repr__(self) -> str:
        parts = [
            f"c{ci + 1}:{{{','.join('s%d' % (si + 1) for si in group)}}}"
            for ci, group in enumerate(self._students_of)
        ]
        solo = [s.name for s in self.unmatched_students]
        if solo:
            parts.append("free:" + ",".join(solo))
        return "MtoMatching[" + " ".join(parts) + "]"


class MtoProfile:
    """One college preference per college, one student preference per student."""

    __slots__ = ("college_prefs", "student_prefs")

    def __init__(self, college_prefs: Sequence[CollegePreference], student_prefs: Sequence[StudentPreference]):
        college_prefs = tuple(college_prefs)
        student_prefs = tuple(student_prefs)
        if not college_prefs or not student_prefs:
            raise ValidationError("need at least one college and one student")
        for i, cp in enumerate(college_prefs):
            if cp.owner.index != i:
                raise ValidationError(f"college preference {i} is owned by {cp.owner}")
            if cp.n_students != len(student_prefs):
                raise ValidationError(
                    f"{cp.owner} ranks subsets of {cp.n_students} students, market has {len(student_prefs)}"
                )
        for i, sp in enumerate(student_prefs):
            if sp.owner.index != i:
                raise ValidationError(f"student preference {i} is owned by {sp.owner}")
            if sp.n_colleges != len(college_prefs):
                raise ValidationError(
                    f"{sp.owner} ranks {sp.n_colleges} colleges, market has {len(college_prefs)}"
                )
        self.college_prefs = college_prefs
        self.student_prefs = student_prefs

    @property
    def n_colleges(self) -> int:
        return len(self.college_prefs)

    @property
    def n_students(self) -> int:
        return len(self.student_prefs)

    @property
    def quotas(self) -> tuple[int, ...]:
        return tuple(cp.quota for cp in self.college_prefs)

    @property
    def agents(self) -> tuple[MtoAgent, ...]:
        return colleges(self.n_colleges) + students(self.n_students)

    def __getitem__(self, agent: MtoAgent):
        if isinstance(agent, CollegeId):
            return self.college_prefs[agent.index]
        if isinstance(agent, StudentId):
            return self.student_prefs[agent.index]
        raise UnknownOutcomeError(f"no preference for {agent!r}")

    def replace(self, updates: Mapping[MtoAgent, object]) -> "MtoProfile":
        cps = list(self.college_prefs)
        sps = list(self.student_prefs)
        for agent, pref in updates.items():
            if isinstance(agent, CollegeId):
                if not isinstance(pref, CollegePreference) or pref.owner != agent:
                    raise ValidationError(f"replacement for {agent} has wrong owner or type")
                cps[agent.index] = pref
            elif isinstance(agent, StudentId):
                if not isinstance(pref, StudentPreference) or pref.owner != agent:
                    raise ValidationError(f"replacement for {agent} has wrong owner or type")
                sps[agent.index] = pref
            else:
                raise UnknownOutcomeError(f"no preference for {agent!r}")
        return MtoProfile(cps, sps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MtoProfile):
            return NotImplemented
        return self.college_prefs == other.college_prefs and self.student_prefs == other.student_prefs

    def __hash__(self) -> int:
        return hash((self.college_prefs, self.student_prefs))


@dataclass(frozen=True)
class MtoStep:
    """One simultaneous proposal round of the student-proposing rule."""

    number: int
    proposals: tuple[tuple[int, int], ...]  # (student, college) index pairs
    rejections: tuple[tuple[int, int], ...]  # (college, student) index pairs
    tentative: tuple[tuple[int, ...], ...]  # held students per college


def require_responsive(profile: MtoProfile) -> None:
    for cp in profile.college_prefs:
        check = is_responsive(cp)
        if not check:
            raise NotResponsiveError(
                f"college {cp.owner} has a non-responsive subset ranking: {check.detail}"
            )


def run_spda(profile: MtoProfile) -> tuple[MtoMatching, tuple[MtoStep, ...]]:
    """Student-proposing deferred acceptance with a full round trace.

    Responsiveness is a precondition: colleges judge applicants by the
    student ranking their subset order induces.
    """
    require_responsive(profile)
    n_c, n_s = profile.n_colleges, profile.n_students
    induced_rank = []
    acceptable = []
    for cp in profile.college_prefs:
        order = cp.induced_order()
        rank = {x: pos for pos, x in enumerate(order)}
        induced_rank.append(rank)
        acceptable.append({s.index for s in students(n_s) if rank[s] < rank[OUTSIDE]})
    options = [profile.student_prefs[i].acceptable_idx for i in range(n_s)]
    pointer = [0] * n_s
    held: list[set[int]] = [set() for _ in range(n_c)]
    held_by: list[Optional[int]] = [None] * n_s
    steps: list[MtoStep] = []
    number = 0
    while True:
        number += 1
        proposals = []
        for si in range(n_s):
            if held_by[si] is None and pointer[si] < len(options[si]):
                proposals.append((si, options[si][pointer[si]]))
        if not proposals and number > 1:
            break
        rejections = []
        touched = set(ci for _, ci in proposals)
        for si, ci in proposals:
            held[ci].add(si)
            held_by[si] = ci
        for ci in touched:
            pool = held[ci]
            quota = profile.college_prefs[ci].quota
            ok = [si for si in pool if si in acceptable[ci]]
            ok.sort(key=lambda si: induced_rank[ci][StudentId(si)])
            keep = set(ok[:quota])
            for si in sorted(pool - keep):
                rejections.append((ci, si))
                held_by[si] = None
                pointer[si] += 1
            held[ci] = keep
        steps.append(
            MtoStep(
                number=number,
                proposals=tuple(sorted(proposals)),
                rejections=tuple(sorted(rejections)),
                tentative=tuple(tuple(sorted(held[ci])) for ci in range(n_c)),
            )
        )
        if not proposals:
            break
    matching = MtoMatching(profile.quotas, n_s, [sorted(held[ci]) for ci in range(n_c)])
    return matching, tuple(steps)


def spda_matching(profile: MtoProfile) -> MtoMatching:
    return run_spda(profile)[0]


def is_individually_rational_mto(profile: MtoProfile, nu: MtoMatching) -> bool:
    for ci, cp in enumerate(profile.college_prefs):
        for si in nu.assignment[ci]:
            if not cp.is_acceptable(StudentId(si)):
                return False
    for si, sp in enumerate(profile.student_prefs):
        c = nu.college_of(StudentId(si))
        if c is not OUTSIDE and not sp.is_acceptable(c):
            return False
    return True


def blocking_pairs_mto(profile: MtoProfile, nu: MtoMatching) -> list[tuple[CollegeId, StudentId]]:
    """Every college-student pair that would defect, in index order."""
    out = []
    for ci, cp in enumerate(profile.college_prefs):
        c = CollegeId(ci)
        group = nu.students_of(c)
        slack = len(group) < cp.quota
        for si, sp in enumerate(profile.student_prefs):
            s = StudentId(si)
            if s in group:
                continue
            if not sp.prefers(c, nu.college_of(s)):
                continue
            if slack and cp.prefers((s,), ()):
                out.append((c, s))
            elif any(cp.prefers((s,), (other,)) for other in group):
                out.append((c, s))
    return out


def is_stable_mto(profile: MtoProfile, nu: MtoMatching) -> bool:
    return is_individually_rational_mto(profile, nu) and not blocking_pairs_mto(profile, nu)


# --- domains and manipulation -------------------------------------------------


class MtoDomain:
    """Admissible preference sets per agent; college entries must be responsive."""

    __slots__ = ("n_colleges", "n_students", "_lists")

    def __init__(self, sets: Mapping[MtoAgent, Iterable]):
        c_idx = sorted(a.index for a in sets if isinstance(a, CollegeId))
        s_idx = sorted(a.index for a in sets if isinstance(a, StudentId))
        if not c_idx or not s_idx:
            raise ValidationError("domain needs colleges and students")
        if c_idx != list(range(len(c_idx))) or s_idx != list(range(len(s_idx))):
            raise ValidationError("domain agent indices must be contiguous from 0")
        self.n_colleges, self.n_students = len(c_idx), len(s_idx)
        lists = {}
        for agent, prefs in sets.items():
            tup = tuple(prefs)
            if not tup:
                raise ValidationError(f"empty admissible set for {agent}")
            for pref in tup:
                if pref.owner != agent:
                    raise ValidationError(f"set for {agent} contains a preference owned by {pref.owner}")
                if isinstance(agent, CollegeId):
                    check = is_responsive(pref)
                    if not check:
                        raise NotResponsiveError(
                            f"admissible set for {agent} contains a non-responsive ranking: {check.detail}"
                        )
                    if pref.n_students != self.n_students:
                        raise ValidationError(f"preference for {agent} sized for {pref.n_students} students")
                else:
                    if pref.n_colleges != self.n_colleges:
                        raise ValidationError(f"preference for {agent} sized for {pref.n_colleges} colleges")
            if len(set(tup)) != len(tup):
                raise ValidationError(f"duplicate preference in the set for {agent}")
            lists[agent] = tup
        self._lists = lists

    @property
    def agents(self) -> tuple[MtoAgent, ...]:
        return colleges(self.n_colleges) + students(self.n_students)

    def admissible(self, agent: MtoAgent) -> tuple:
        try:
            return self._lists[agent]
        except KeyError:
            raise UnknownOutcomeError(f"no such agent {agent!r} in the domain") from None

    @property
    def profile_count(self) -> int:
        total = 1
        for tup in self._lists.values():
            total *= len(tup)
        return total

    def contains(self, profile: MtoProfile) -> bool:
        if profile.n_colleges != self.n_colleges or profile.n_students != self.n_students:
            return False
        return all(profile[a] in self._lists[a] for a in self.agents)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MtoDomain):
            return NotImplemented
        return self._lists == other._lists

    def __repr__(self) -> str:
        sizes = ", ".join(f"{a}:{len(self._lists[a])}" for a in self.agents)
        return f"MtoDomain({self.n_colleges} colleges, {self.n_students} students; {sizes})"

    @classmethod
    def from_profile(cls, profile: MtoProfile) -> "MtoDomain":
        return cls({a: (profile[a],) for a in profile.agents})


@dataclass(frozen=True)
class MtoWitness:
    """A coalition misreport after which every member strictly gains."""

    base: MtoProfile
    coalition: tuple[MtoAgent, ...]
    misreports: tuple[tuple[MtoAgent, object], ...]
    outcome_before: MtoMatching
    outcome_after: MtoMatching

    def deviated_profile(self) -> MtoProfile:
        return self.base.replace(dict(self.misreports))

    def __repr__(self) -> str:
        members = " ".join(a.name for a in self.coalition)
        return f"MtoWitness[{{{members}}} -> {self.outcome_after!r}]"


def _strictly_gains(agent: MtoAgent, base: MtoProfile, before: MtoMatching, after: MtoMatching) -> bool:
    if isinstance(agent, CollegeId):
        cp = base[agent]
        return cp.prefers(after.students_of(agent), before.students_of(agent))
    sp = base[agent]
    return sp.prefers(after.college_of(agent), before.college_of(agent))


def validate_mto_witness(witness: MtoWitness, domain: Optional[MtoDomain] = None) -> None:
    """Re-derive every condition of a mixed-coalition witness."""
    w = witness
    if not w.coalition:
        raise PreconditionError("empty coalition")
    cs = sorted((a for a in w.coalition if isinstance(a, CollegeId)))
    ss = sorted((a for a in w.coalition if isinstance(a, StudentId)))
    if list(w.coalition) != cs + ss or len(set(w.coalition)) != len(w.coalition):
        raise PreconditionError("coalition must list colleges then students, no duplicates")
    reported = dict(w.misreports)
    if set(reported) != set(w.coalition):
        raise PreconditionError("misreports must cover exactly the coalition")
    for agent, pref in reported.items():
        if pref.owner != agent:
            raise PreconditionError(f"misreport for {agent} is owned by {pref.owner}")
        if domain is not None and pref not in domain.admissible(agent):
            raise PreconditionError(f"misreport for {agent} is not admissible")
    if domain is not None and not domain.contains(w.base):
        raise PreconditionError("base profile is not admissible in the domain")
    if all(reported[a] == w.base[a] for a in w.coalition):
        raise PreconditionError("at least one coalition member's report must differ")
    if spda_matching(w.base) != w.outcome_before:
        raise PreconditionError("stored outcome_before does not match the rule")
    if spda_matching(w.deviated_profile()) != w.outcome_after:
        raise PreconditionError("stored outcome_after does not match the rule")
    for agent in w.coalition:
        if not _strictly_gains(agent, w.base, w.outcome_before, w.outcome_after):
            raise PreconditionError(f"{agent} does not strictly improve")


def find_manipulation_mto(
    domain: MtoDomain,
    base: MtoProfile,
    max_coalition: int,
    budget: int = DEFAULT_EVAL_BUDGET,
) -> Optional[MtoWitness]:
    """Coalition scan in canonical order: colleges before students.

    Improvement for a college means a strictly better subset by its true
    ranking; for a student a strictly better college.
    """
    if not domain.contains(base):
        raise PreconditionError("base profile is not admissible in the domain")
    agents = list(domain.agents)
    alternatives = {a: tuple(p for p in domain.admissible(a) if p != base[a]) for a in agents}
    max_coalition = max(1, min(max_coalition, len(agents)))
    planned = planned_evaluations((len(alternatives[a]) for a in agents), max_coalition)
    if planned > budget:
        raise BudgetExceededError(
            f"coalition scan at one base exceeds the evaluation budget of {budget}", planned
        )
    before = spda_matching(base)
    candidates = [a for a in agents if alternatives[a]]
    for size in range(1, max_coalition + 1):
        for coalition in itertools.combinations(candidates, size):
            for reports in itertools.product(*(alternatives[a] for a in coalition)):
                deviated = base.replace(dict(zip(coalition, reports)))
                after = spda_matching(deviated)
                if all(_strictly_gains(a, base, before, after) for a in coalition):
                    return MtoWitness(
                        base=base,
                        coalition=coalition,
                        misreports=tuple(zip(coalition, reports)),
                        outcome_before=before,
                        outcome_after=after,
                    )
    return None


def students_satisfy_utp(domain: MtoDomain):
    """Unrestricted top pairs over the students' admissible sets."""
    from .domains import PropertyCheck, utp_missing

    universe = colleges(domain.n_colleges)
    for s in students(domain.n_students):
        missing = utp_missing(domain.admissible(s), universe)
        if missing is not None:
            return PropertyCheck(False, (s,) + missing)
    return PropertyCheck(True)


# --- the worked counterexample ---------------------------------------------------


@dataclass(frozen=True)
class MixedCoalitionExample:
    """A college and an unmatched student jointly gaming the student-proposing rule."""

    profile: MtoProfile
    witness: MtoWitness

    @property
    def truthful_outcome(self) -> MtoMatching:
        return self.witness.outcome_before

    @property
    def manipulated_outcome(self) -> MtoMatching:
        return self.witness.outcome_after


def mixed_coalition_counterexample() -> MixedCoalitionExample:
    """Three colleges, five students; the first college (quota 2) and the
    last student misreport together and both strictly gain."""
    c = colleges(3)
    s = students(5)
    s1, s2, s3, s4, s5 = s

    student_prefs = [
        StudentPreference(s1, (c[2], c[0], c[1], OUTSIDE)),
        StudentPreference(s2, (c[0], c[2], c[1], OUTSIDE)),
        StudentPreference(s3, (c[0], OUTSIDE, c[1], c[2])),
        StudentPreference(s4, (c[0], c[1], c[2], OUTSIDE)),
        StudentPreference(s5, (c[1], OUTSIDE, c[0], c[2])),
    ]
    p_c1 = CollegePreference(
        c[0],
        2,
        5,
        [
            (s1, s2), (s1, s3), (s1, s4), (s2, s3), (s2, s4), (s3, s4),
            (s1,), (s2,), (s3,), (s4,), (),
            (s1, s5), (s2, s5), (s3, s5), (s4, s5), (s5,),
        ],
    )
    p_c2 = CollegePreference(c[1], 1, 5, [(s4,), (s5,), (), (s1,), (s2,), (s3,)])
    p_c3 = CollegePreference(c[2], 1, 5, [(s2,), (s5,), (s1,), (), (s3,), (s4,)])
    profile = MtoProfile([p_c1, p_c2, p_c3], student_prefs)

    tilde_s5 = StudentPreference(s5, (c[2], c[1], c[0], OUTSIDE))
    tilde_c1 = CollegePreference(
        c[0],
        2,
        5,
        [
            (s1, s4), (s2, s4), (s3, s4), (s1, s2), (s1, s3), (s2, s3),
            (s4,), (s1,), (s2,), (s3,), (),
            (s4, s5), (s1, s5), (s2, s5), (s3, s5), (s5,),
        ],
    )
    before = MtoMatching((2, 1, 1), 5, [(1, 2), (3,), (0,)])
    after = MtoMatching((2, 1, 1), 5, [(0, 3), (4,), (1,)])
    witness = MtoWitness(
        base=profile,
        coalition=(c[0], s5),
        misreports=((c[0], tilde_c1), (s5, tilde_s5)),
        outcome_before=before,
        outcome_after=after,
    )
    return MixedCoalitionExample(profile=profile, witness=witness)


# --- translation to the one-to-one model --------------------------------------


def to_marriage_profile(profile: MtoProfile):
    """Quota-one market recast with students as proposers, colleges as receivers."""
    from .core import AgentId, Preference, Profile, Side

    if any(q != 1 for q in profile.quotas):
        raise PreconditionError("translation requires every quota to be 1")
    men_prefs = []
    for sp in profile.student_prefs:
        ranking = tuple(
            OUTSIDE if x is OUTSIDE else AgentId(Side.WOMAN, x.index) for x in sp.ranking
        )
        men_prefs.append(Preference(AgentId(Side.MAN, sp.owner.index), ranking))
    women_prefs = []
    for cp in profile.college_prefs:
        ranking = tuple(
            OUTSIDE if x is OUTSIDE else AgentId(Side.MAN, x.index) for x in cp.induced_order()
        )
        women_prefs.append(Preference(AgentId(Side.WOMAN, cp.owner.index), ranking))
    return Profile(men_prefs + women_prefs)


def to_marriage_matching(nu: MtoMatching):
    """The same assignment with students as men and colleges as women."""
    from .core import Matching

    if any(q != 1 for q in nu.quotas):
        raise PreconditionError("translation requires every quota to be 1")
    woman_of: list[Optional[int]] = [None] * nu.n_students
    for ci, group in enumerate(nu.assignment):
        for si in group:
            woman_of[si] = ci
    return Matching.from_assignment(nu.n_students, len(nu.quotas), woman_of)
