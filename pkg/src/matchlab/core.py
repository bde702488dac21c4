"""One-to-one market primitives.

A market has p men and q women. Every agent holds a strict ranking of the
opposite side plus the outside option (staying unmatched, printed ``@``).
An outcome ranked above ``@`` is acceptable. A matching pairs up some men
and women mutually and injectively; it is stable when it is individually
rational and no man-woman pair prefers each other to their assignments.

Preferences store their ranking together with an inverse index, so every
comparison is O(1). All validation happens at construction, never at use.
"""

from __future__ import annotations

import itertools
import math
from enum import IntEnum
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from .errors import (
    DimensionMismatchError,
    SizeGuardError,
    UnknownOutcomeError,
    ValidationError,
)

MAX_ENUMERATION_SIDE = 6


class Side(IntEnum):
    MAN = 0
    WOMAN = 1

    @property
    def opposite(self) -> "Side":
        return Side.WOMAN if self is Side.MAN else Side.MAN

    @property
    def prefix(self) -> str:
        return "m" if self is Side.MAN else "w"


class AgentId(NamedTuple):
    side: Side
    index: int

    @property
    def name(self) -> str:
        return f"{self.side.prefix}{self.index + 1}"

    def __repr__(self) -> str:
        return self.name


class _Outside:
    """Singleton for the outside option."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "@"


OUTSIDE = _Outside()
Outcome = Union[AgentId, _Outside]


def man(index: int) -> AgentId:
    return AgentId(Side.MAN, index)


def woman(index: int) -> AgentId:
    return AgentId(Side.WOMAN, index)


def men(p: int) -> tuple[AgentId, ...]:
    return tuple(man(i) for i in range(p))


def women(q: int) -> tuple[AgentId, ...]:
    return tuple(woman(i) for i in range(q))


def outcome_key(x: Outcome) -> tuple[int, int]:
    """Deterministic sort key; the outside option sorts last."""
    if x is OUTSIDE:
        return (2, 0)
    return (int(x.side), x.index)


class StrictOrder:
    """Strict linear order over hashable outcomes with O(1) rank lookup."""

    __slots__ = ("ranking", "_rank")

    def __init__(self, ranking: Iterable):
        self.ranking = tuple(ranking)
        rank: dict = {}
        for pos, x in enumerate(self.ranking):
            if x in rank:
                raise ValidationError(f"duplicate entry {x!r} in ranking")
            rank[x] = pos
        self._rank = rank

    def rank_of(self, x) -> int:
        try:
            return self._rank[x]
        except (KeyError, TypeError):
            raise UnknownOutcomeError(f"outcome {x!r} is not ranked") from None

    def __contains__(self, x) -> bool:
        try:
            return x in self._rank
        except TypeError:
            return False

    def prefers(self, x, y) -> bool:
        return self.rank_of(x) < self.rank_of(y)

    def weakly_prefers(self, x, y) -> bool:
        return self.rank_of(x) <= self.rank_of(y)

    def top(self):
        return self.ranking[0]

    def top_among(self, outcomes: Iterable):
        """Best-ranked element of a non-empty collection."""
        return min(outcomes, key=self.rank_of)


class Preference(StrictOrder):
    """An agent's strict ranking of the whole opposite side plus ``@``.

    The ranking must be a permutation of {all opposite-side agents, OUTSIDE};
    the opposite-side size is inferred from the ranking length.
    """

    __slots__ = ("owner", "outside_rank", "acceptable_idx", "rank_by_index", "_hash")

    def __init__(self, owner: AgentId, ranking: Iterable[Outcome]):
        super().__init__(ranking)
        if not isinstance(owner, AgentId):
            raise ValidationError(f"owner must be an AgentId, got {owner!r}")
        self.owner = owner
        opp = owner.side.opposite
        n = len(self.ranking) - 1
        if OUTSIDE not in self._rank:
            raise ValidationError(f"ranking for {owner} lacks the outside option")
        seen = set()
        for x in self.ranking:
            if x is OUTSIDE:
                continue
            if not isinstance(x, AgentId) or x.side is not opp:
                raise ValidationError(f"ranking for {owner} contains {x!r}, expected {opp.prefix}-side agents")
            seen.add(x.index)
        if seen != set(range(n)):
            missing = sorted(set(range(n)) - seen)
            raise ValidationError(
                f"ranking for {owner} is not a permutation of the opposite side: "
                f"missing indices {missing}"
            )
        self.outside_rank = self._rank[OUTSIDE]
        self.acceptable_idx = tuple(x.index for x in self.ranking[: self.outside_rank])
        arr = [0] * n
        for pos, x in enumerate(self.ranking):
            if x is not OUTSIDE:
                arr[x.index] = pos
        self.rank_by_index = tuple(arr)
        self._hash = hash((owner, self.ranking))

    @property
    def n_opposite(self) -> int:
        return len(self.ranking) - 1

    def acceptable(self) -> tuple[AgentId, ...]:
        return self.ranking[: self.outside_rank]

    def is_acceptable(self, x: Outcome) -> bool:
        return self.rank_of(x) < self.outside_rank

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Preference):
            return NotImplemented
        return self.owner == other.owner and self.ranking == other.ranking

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"{self.owner}: " + " ".join(repr(x) for x in self.ranking)


def prefers(pref: StrictOrder, x, y) -> bool:
    """True when ``pref`` strictly ranks x above y."""
    return pref.prefers(x, y)


def weakly_prefers(pref: StrictOrder, x, y) -> bool:
    return pref.weakly_prefers(x, y)


class Profile:
    """One preference per agent of a p-by-q market."""

    __slots__ = ("p", "q", "_men_prefs", "_women_prefs", "_hash")

    def __init__(self, preferences: Iterable[Preference]):
        by_agent: dict[AgentId, Preference] = {}
        for pref in preferences:
            if not isinstance(pref, Preference):
                raise ValidationError(f"expected Preference, got {pref!r}")
            if pref.owner in by_agent:
                raise ValidationError(f"duplicate preference for {pref.owner}")
            by_agent[pref.owner] = pref
        men_idx = sorted(a.index for a in by_agent if a.side is Side.MAN)
        women_idx = sorted(a.index for a in by_agent if a.side is Side.WOMAN)
        p, q = len(men_idx), len(women_idx)
        if p == 0 or q == 0:
            raise ValidationError("profile needs at least one agent per side")
        if men_idx != list(range(p)) or women_idx != list(range(q)):
            raise ValidationError("agent indices must be contiguous from 0")
        for a, pref in by_agent.items():
            expected = q if a.side is Side.MAN else p
            if pref.n_opposite != expected:
                raise ValidationError(
                    f"preference for {a} ranks {pref.n_opposite} opposite agents, market has {expected}"
                )
        self.p, self.q = p, q
        self._men_prefs = tuple(by_agent[man(i)] for i in range(p))
        self._women_prefs = tuple(by_agent[woman(j)] for j in range(q))
        self._hash = hash((self._men_prefs, self._women_prefs))

    @property
    def men_prefs(self) -> tuple[Preference, ...]:
        return self._men_prefs

    @property
    def women_prefs(self) -> tuple[Preference, ...]:
        return self._women_prefs

    @property
    def men(self) -> tuple[AgentId, ...]:
        return men(self.p)

    @property
    def women(self) -> tuple[AgentId, ...]:
        return women(self.q)

    @property
    def agents(self) -> tuple[AgentId, ...]:
        return self.men + self.women

    def __getitem__(self, agent: AgentId) -> Preference:
        if agent.side is Side.MAN:
            if 0 <= agent.index < self.p:
                return self._men_prefs[agent.index]
        else:
            if 0 <= agent.index < self.q:
                return self._women_prefs[agent.index]
        raise UnknownOutcomeError(f"no such agent {agent!r} in a {self.p}x{self.q} market")

    def replace(self, updates: Mapping[AgentId, Preference]) -> "Profile":
        """New profile with some agents' preferences swapped out."""
        for a, pref in updates.items():
            if pref.owner != a:
                raise ValidationError(f"update for {a} carries a preference owned by {pref.owner}")
        current = {pref.owner: pref for pref in self._men_prefs + self._women_prefs}
        current.update(updates)
        return Profile(current.values())

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Profile):
            return NotImplemented
        return self._men_prefs == other._men_prefs and self._women_prefs == other._women_prefs

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        lines = [repr(pref) for pref in self._men_prefs + self._women_prefs]
        return "Profile(" + "; ".join(lines) + ")"


class Matching:
    """Partial injective pairing between the two sides of a p-by-q market."""

    __slots__ = ("p", "q", "_woman_of", "_man_of", "_hash")

    def __init__(self, p: int, q: int, pairs: Iterable[tuple[AgentId, AgentId]]):
        woman_of: list = [None] * p
        man_of: list = [None] * q
        for m, w in pairs:
            if not (isinstance(m, AgentId) and m.side is Side.MAN and 0 <= m.index < p):
                raise ValidationError(f"bad man in pair: {m!r}")
            if not (isinstance(w, AgentId) and w.side is Side.WOMAN and 0 <= w.index < q):
                raise ValidationError(f"bad woman in pair: {w!r}")
            if woman_of[m.index] is not None:
                raise ValidationError(f"{m} appears in two pairs")
            if man_of[w.index] is not None:
                raise ValidationError(f"{w} appears in two pairs")
            woman_of[m.index] = w.index
            man_of[w.index] = m.index
        self.p, self.q = p, q
        self._woman_of = tuple(woman_of)
        self._man_of = tuple(man_of)
        self._hash = hash((p, q, self._woman_of))

    @classmethod
    def from_assignment(cls, p: int, q: int, woman_of: Sequence) -> "Matching":
        """Build from a per-man assignment of woman indices (None = unmatched)."""
        if len(woman_of) != p:
            raise ValidationError(f"assignment covers {len(woman_of)} men, market has {p}")
        pairs = [(man(i), woman(j)) for i, j in enumerate(woman_of) if j is not None]
        return cls(p, q, pairs)

    def partner(self, agent: AgentId) -> Outcome:
        """mu(agent): the partner, or OUTSIDE when unmatched."""
        if agent.side is Side.MAN and 0 <= agent.index < self.p:
            j = self._woman_of[agent.index]
            return OUTSIDE if j is None else woman(j)
        if agent.side is Side.WOMAN and 0 <= agent.index < self.q:
            i = self._man_of[agent.index]
            return OUTSIDE if i is None else man(i)
        raise UnknownOutcomeError(f"no such agent {agent!r} in a {self.p}x{self.q} matching")

    @property
    def assignment(self) -> tuple:
        return self._woman_of

    @property
    def pairs(self) -> tuple[tuple[AgentId, AgentId], ...]:
        return tuple(
            (man(i), woman(j)) for i, j in enumerate(self._woman_of) if j is not None
        )

    @property
    def unmatched(self) -> tuple[AgentId, ...]:
        loose = [man(i) for i, j in enumerate(self._woman_of) if j is None]
        loose += [woman(j) for j, i in enumerate(self._man_of) if i is None]
        return tuple(loose)

    @property
    def is_empty(self) -> bool:
        return all(j is None for j in self._woman_of)

    def sort_key(self) -> tuple:
        return tuple(self.q if j is None else j for j in self._woman_of)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Matching):
            return NotImplemented
        return self.p == other.p and self.q == other.q and self._woman_of == other._woman_of

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inside = ", ".join(f"{m}-{w}" for m, w in self.pairs) or "(empty)"
        loose = self.unmatched
        tail = f" | unmatched: {' '.join(a.name for a in loose)}" if loose else ""
        return "{" + inside + tail + "}"


def _check_dims(matching: Matching, profile: Profile) -> None:
    if matching.p != profile.p or matching.q != profile.q:
        raise DimensionMismatchError(
            f"matching is {matching.p}x{matching.q}, profile is {profile.p}x{profile.q}"
        )


def is_individually_rational(matching: Matching, profile: Profile) -> bool:
    """No agent is matched to an unacceptable partner."""
    _check_dims(matching, profile)
    for i, j in enumerate(matching.assignment):
        if j is None:
            continue
        mp = profile.men_prefs[i]
        if mp.rank_by_index[j] > mp.outside_rank:
            return False
        wp = profile.women_prefs[j]
        if wp.rank_by_index[i] > wp.outside_rank:
            return False
    return True


def blocking_pairs(matching: Matching, profile: Profile) -> list[tuple[AgentId, AgentId]]:
    """All pairs who each prefer the other to their assignment, in (man, woman) lex order."""
    _check_dims(matching, profile)
    out = []
    man_of = [None] * profile.q
    for i, j in enumerate(matching.assignment):
        if j is not None:
            man_of[j] = i
    for i in range(profile.p):
        mp = profile.men_prefs[i]
        cur = matching.assignment[i]
        cur_rank = mp.outside_rank if cur is None else mp.rank_by_index[cur]
        for j in range(profile.q):
            if mp.rank_by_index[j] >= cur_rank:
                continue
            wp = profile.women_prefs[j]
            held = man_of[j]
            held_rank = wp.outside_rank if held is None else wp.rank_by_index[held]
            if wp.rank_by_index[i] < held_rank:
                out.append((man(i), woman(j)))
    return out


def _has_blocking_pair(matching: Matching, profile: Profile) -> bool:
    # same scan as blocking_pairs but short-circuits on the first hit
    man_of = [None] * profile.q
    for i, j in enumerate(matching.assignment):
        if j is not None:
            man_of[j] = i
    for i in range(profile.p):
        mp = profile.men_prefs[i]
        cur = matching.assignment[i]
        cur_rank = mp.outside_rank if cur is None else mp.rank_by_index[cur]
        for j in mp.acceptable_idx:
            if mp.rank_by_index[j] >= cur_rank:
                break  # acceptable_idx is in preference order
            wp = profile.women_prefs[j]
            held = man_of[j]
            held_rank = wp.outside_rank if held is None else wp.rank_by_index[held]
            if wp.rank_by_index[i] < held_rank:
                return True
    return False


def is_stable(matching: Matching, profile: Profile) -> bool:
    _check_dims(matching, profile)
    return is_individually_rational(matching, profile) and not _has_blocking_pair(matching, profile)


def count_matchings(p: int, q: int) -> int:
    """sum_k C(p,k) C(q,k) k! : closed form used as an oracle for the enumerator."""
    return sum(
        math.comb(p, k) * math.comb(q, k) * math.factorial(k)
        for k in range(min(p, q) + 1)
    )


def enumerate_matchings(p: int, q: int, force: bool = False) -> Iterator[Matching]:
    """Yield every matching of a p-by-q market in a fixed deterministic order.

    Guarded for p, q <= 6; pass force=True to exceed the guard knowingly.
    """
    if p < 1 or q < 1:
        raise ValidationError("market needs at least one agent per side")
    if not force and (p > MAX_ENUMERATION_SIDE or q > MAX_ENUMERATION_SIDE):
        raise SizeGuardError(
            f"enumerating a {p}x{q} market yields {count_matchings(p, q)} matchings; "
            f"pass force=True to proceed"
        )
    for k in range(min(p, q) + 1):
        for men_sub in itertools.combinations(range(p), k):
            for women_sub in itertools.combinations(range(q), k):
                for perm in itertools.permutations(women_sub):
                    yield Matching(p, q, [(man(i), woman(j)) for i, j in zip(men_sub, perm)])


def stable_set(profile: Profile, force: bool = False) -> list[Matching]:
    """All stable matchings of the profile, in enumeration order. Never empty."""
    return [
        mu
        for mu in enumerate_matchings(profile.p, profile.q, force=force)
        if is_stable(mu, profile)
    ]
