"""Deterministic generators over flagged alphabets, and language-level operations.

States are dense integer indices.  Every construction renumbers its result in
breadth-first discovery order from the initial state (exploring events in
ascending id order), so identical inputs give structurally identical outputs.
Transition functions are partial: an undefined (state, event) pair means the
event is disabled there.  All values are immutable after construction and all
operations are pure functions of their inputs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional

Word = tuple  # tuple[int, ...] of event ids


class AlphabetMismatchError(ValueError):
    """Operands are defined over different event sets."""


class FlagConflictError(ValueError):
    """A shared event carries contradictory controllability or agent flags."""


class PreconditionError(ValueError):
    """A stated precondition of the operation does not hold."""


class InternalInvariantError(RuntimeError):
    """A post-verified construction invariant failed; indicates a bug."""


@dataclass(frozen=True)
class Event:
    """One event: numeric id, controllability flag, optional owning agent."""

    eid: int
    controllable: bool = False
    agent: Optional[str] = None

    def __post_init__(self):
        if self.eid < 0:
            raise ValueError(f"event id must be non-negative, got {self.eid}")


@dataclass(frozen=True)
class Alphabet:
    """A finite event set partitioned into controllable/uncontrollable events.

    Agent tags, where present, induce pairwise-disjoint sub-alphabets (each
    event belongs to at most one agent).
    """

    events: tuple[Event, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.events, key=lambda e: e.eid))
        seen = set()
        for ev in ordered:
            if ev.eid in seen:
                raise FlagConflictError(f"event {ev.eid} declared more than once")
            seen.add(ev.eid)
        object.__setattr__(self, "events", ordered)

    @classmethod
    def of(cls, events: Iterable[Event]) -> "Alphabet":
        return cls(tuple(events))

    @cached_property
    def by_id(self) -> Mapping[int, Event]:
        return {ev.eid: ev for ev in self.events}

    @cached_property
    def ids(self) -> frozenset:
        return frozenset(ev.eid for ev in self.events)

    @cached_property
    def ids_sorted(self) -> tuple:
        return tuple(ev.eid for ev in self.events)

    @cached_property
    def controllable(self) -> frozenset:
        return frozenset(ev.eid for ev in self.events if ev.controllable)

    @cached_property
    def uncontrollable(self) -> frozenset:
        return frozenset(ev.eid for ev in self.events if not ev.controllable)

    @cached_property
    def agents(self) -> tuple:
        return tuple(sorted({ev.agent for ev in self.events if ev.agent is not None}))

    def event(self, eid: int) -> Event:
        return self.by_id[eid]

    def __contains__(self, eid: int) -> bool:
        return eid in self.by_id

    def agent_events(self, tag: str) -> frozenset:
        return frozenset(ev.eid for ev in self.events if ev.agent == tag)

    def own_controllable(self, tag: str) -> frozenset:
        return frozenset(
            ev.eid for ev in self.events if ev.agent == tag and ev.controllable
        )

    def restrict(self, ids: Iterable[int]) -> "Alphabet":
        keep = frozenset(ids)
        if not keep <= self.ids:
            raise PreconditionError(
                f"cannot restrict to events outside the alphabet: {sorted(keep - self.ids)}"
            )
        return Alphabet.of(ev for ev in self.events if ev.eid in keep)

    def merged(self, other: "Alphabet") -> "Alphabet":
        """Union of two alphabets; shared events must agree on their flags."""
        combined = dict(self.by_id)
        for ev in other.events:
            mine = combined.get(ev.eid)
            if mine is None:
                combined[ev.eid] = ev
                continue
            if mine.controllable != ev.controllable:
                raise FlagConflictError(
                    f"event {ev.eid}: controllable flag mismatch between operands"
                )
            if mine.agent is not None and ev.agent is not None and mine.agent != ev.agent:
                raise FlagConflictError(
                    f"event {ev.eid}: agent tag mismatch ({mine.agent!r} vs {ev.agent!r})"
                )
            if mine.agent is None and ev.agent is not None:
                combined[ev.eid] = ev
        return Alphabet.of(combined.values())


@dataclass(frozen=True)
class Automaton:
    """Deterministic partial-transition generator.

    ``transitions`` maps (state, event id) -> successor state.  Determinism is
    structural: the mapping admits at most one successor per pair.
    """

    alphabet: Alphabet
    n_states: int
    initial: int
    marked: frozenset
    transitions: Mapping[tuple, int]

    def __post_init__(self):
        object.__setattr__(self, "marked", frozenset(self.marked))
        object.__setattr__(self, "transitions", dict(self.transitions))
        if self.n_states <= 0:
            raise ValueError("an automaton needs at least one state")
        if not 0 <= self.initial < self.n_states:
            raise ValueError(f"initial state {self.initial} out of range")
        for s in self.marked:
            if not 0 <= s < self.n_states:
                raise ValueError(f"marked state {s} out of range")
        for (s, eid), t in self.transitions.items():
            if not (0 <= s < self.n_states and 0 <= t < self.n_states):
                raise ValueError(f"transition ({s},{eid})->{t} out of range")
            if eid not in self.alphabet:
                raise ValueError(f"transition on undeclared event {eid}")

    @classmethod
    def empty(cls, alphabet: Alphabet) -> "Automaton":
        """The canonical empty automaton: one unmarked dead state."""
        return cls(alphabet, 1, 0, frozenset(), {})

    @property
    def is_empty(self) -> bool:
        """True iff the marked language is empty (no marked states)."""
        return not self.marked

    @cached_property
    def _out(self) -> Mapping[int, tuple]:
        out: dict = {}
        for (s, eid) in self.transitions:
            out.setdefault(s, []).append(eid)
        return {s: tuple(sorted(v)) for s, v in out.items()}

    def events_at(self, state: int) -> tuple:
        """Defined event ids at ``state``, ascending."""
        return self._out.get(state, ())

    def step(self, state: int, eid: int) -> Optional[int]:
        return self.transitions.get((state, eid))

    def run(self, word: Word) -> Optional[int]:
        """State reached by ``word`` from the initial state, or None."""
        s = self.initial
        for eid in word:
            s = self.transitions.get((s, eid))
            if s is None:
                return None
        return s

    def accepts(self, word: Word) -> bool:
        s = self.run(word)
        return s is not None and s in self.marked


def _bfs_order(aut: Automaton, allowed=None) -> list:
    """Reachable states in breadth-first discovery order (events ascending)."""
    if allowed is not None and aut.initial not in allowed:
        return []
    order = [aut.initial]
    seen = {aut.initial}
    dq = deque(order)
    while dq:
        s = dq.popleft()
        for eid in aut.events_at(s):
            t = aut.transitions[(s, eid)]
            if allowed is not None and t not in allowed:
                continue
            if t not in seen:
                seen.add(t)
                order.append(t)
                dq.append(t)
    return order


def _restricted(aut: Automaton, order: list) -> Automaton:
    """Automaton on the given states only, renumbered by their position."""
    idx = {s: i for i, s in enumerate(order)}
    trans = {
        (idx[s], eid): idx[t]
        for (s, eid), t in aut.transitions.items()
        if s in idx and t in idx
    }
    marked = frozenset(idx[s] for s in aut.marked if s in idx)
    return Automaton(aut.alphabet, len(order), idx[aut.initial], marked, trans)


def trim(aut: Automaton) -> Automaton:
    """Restrict to states both reachable and coreachable, renumbered by BFS.

    If the initial state cannot reach a marked state the canonical empty
    automaton is returned.  The result's closed language is exactly the set
    of prefixes of its marked language.
    """
    reach = set(_bfs_order(aut))
    rev: dict = {}
    for (s, eid), t in aut.transitions.items():
        rev.setdefault(t, []).append(s)
    co = set(aut.marked)
    stack = list(co)
    while stack:
        t = stack.pop()
        for s in rev.get(t, ()):
            if s not in co:
                co.add(s)
                stack.append(s)
    keep = reach & co
    if aut.initial not in keep:
        return Automaton.empty(aut.alphabet)
    order = _bfs_order(aut, allowed=keep)
    if len(order) != len(keep):
        raise InternalInvariantError("trim lost states that should be connected")
    return _restricted(aut, order)


def prefix_closure(aut: Automaton) -> Automaton:
    """Trim, then mark every state: recognizes the closed behavior."""
    t = trim(aut)
    return Automaton(t.alphabet, t.n_states, t.initial, frozenset(range(t.n_states)), t.transitions)


def sync_product_map(a: Automaton, b: Automaton):
    """Reachable synchronous product plus the state -> (a, b) pair table.

    Shared events synchronize, private events interleave; a product state is
    marked iff both components are.  Shared events must agree on flags.
    """
    alpha = a.alphabet.merged(b.alphabet)
    a_ids, b_ids = a.alphabet.ids, b.alphabet.ids
    start = (a.initial, b.initial)
    index = {start: 0}
    pairs = [start]
    trans: dict = {}
    dq = deque([start])
    while dq:
        pair = dq.popleft()
        x, y = pair
        i = index[pair]
        for eid in alpha.ids_sorted:
            in_a, in_b = eid in a_ids, eid in b_ids
            if in_a and in_b:
                nx, ny = a.step(x, eid), b.step(y, eid)
                if nx is None or ny is None:
                    continue
                succ = (nx, ny)
            elif in_a:
                nx = a.step(x, eid)
                if nx is None:
                    continue
                succ = (nx, y)
            else:
                ny = b.step(y, eid)
                if ny is None:
                    continue
                succ = (x, ny)
            j = index.get(succ)
            if j is None:
                j = len(pairs)
                index[succ] = j
                pairs.append(succ)
                dq.append(succ)
            trans[(i, eid)] = j
    marked = frozenset(
        i for i, (x, y) in enumerate(pairs) if x in a.marked and y in b.marked
    )
    return Automaton(alpha, len(pairs), 0, marked, trans), tuple(pairs)


def sync_product(a: Automaton, b: Automaton) -> Automaton:
    aut, _ = sync_product_map(a, b)
    return aut


def sync_all(first: Automaton, *rest: Automaton) -> Automaton:
    """Left fold of sync_product; over identical alphabets this is the meet."""
    out = first
    for aut in rest:
        out = sync_product(out, aut)
    return out


def project(aut: Automaton, keep: Iterable[int]) -> Automaton:
    """Natural projection onto the event subset ``keep``.

    Erased events become silent moves; the result is determinized by subset
    construction with subset states numbered in discovery order.  Closed and
    marked languages are the projections of the input's.
    """
    keep = frozenset(keep)
    if not keep <= aut.alphabet.ids:
        raise PreconditionError(
            f"projection events not in the alphabet: {sorted(keep - aut.alphabet.ids)}"
        )
    erased = aut.alphabet.ids - keep

    def closure(states: frozenset) -> frozenset:
        out = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for eid in aut.events_at(s):
                if eid in erased:
                    t = aut.transitions[(s, eid)]
                    if t not in out:
                        out.add(t)
                        stack.append(t)
        return frozenset(out)

    start = closure(frozenset({aut.initial}))
    index = {start: 0}
    subsets = [start]
    trans: dict = {}
    dq = deque([start])
    kept_sorted = sorted(keep)
    while dq:
        sub = dq.popleft()
        i = index[sub]
        for eid in kept_sorted:
            targets = {aut.step(q, eid) for q in sub}
            targets.discard(None)
            if not targets:
                continue
            succ = closure(frozenset(targets))
            j = index.get(succ)
            if j is None:
                j = len(subsets)
                index[succ] = j
                subsets.append(succ)
                dq.append(succ)
            trans[(i, eid)] = j
    marked = frozenset(i for i, sub in enumerate(subsets) if sub & aut.marked)
    return Automaton(aut.alphabet.restrict(keep), len(subsets), 0, marked, trans)


def selfloop_lift(aut: Automaton, extra: Iterable[Event]) -> Automaton:
    """Add the ``extra`` events as self-loops at every state.

    Realizes the inverse projection that erases exactly the extra events.
    """
    extra = tuple(extra)
    ids = {ev.eid for ev in extra}
    overlap = ids & aut.alphabet.ids
    if overlap:
        raise PreconditionError(f"lift events already in the alphabet: {sorted(overlap)}")
    alpha = aut.alphabet.merged(Alphabet.of(extra))
    trans = dict(aut.transitions)
    for s in range(aut.n_states):
        for eid in sorted(ids):
            trans[(s, eid)] = s
    return Automaton(alpha, aut.n_states, aut.initial, aut.marked, trans)


def _require_same_ids(a: Automaton, b: Automaton):
    if a.alphabet.ids != b.alphabet.ids:
        raise AlphabetMismatchError(
        	"operands must share an event set; "
        	f"difference: {sorted(a.alphabet.ids ^ b.alphabet.ids)}"
        )


def language_equal_witness(a: Automaton, b: Automaton):
    """Shortest word witnessing a language difference, or None if equal.

    Runs a synchronized forward search over the pair completed with an
    implicit sink; returns (word, reason) where reason is "closed" when the
    word is in exactly one closed language and "marked" when it separates the
    marked languages.
    """
    _require_same_ids(a, b)
    start = (a.initial, b.initial)
    parent: dict = {start: None}
    dq = deque([start])

    def word_to(pair) -> Word:
        steps = []
        while parent[pair] is not None:
            pair, eid = parent[pair]
            steps.append(eid)
        return tuple(reversed(steps))

    while dq:
        pair = dq.popleft()
        x, y = pair
        if (x in a.marked) != (y in b.marked):
            return word_to(pair), "marked"
        for eid in a.alphabet.ids_sorted:
            nx, ny = a.step(x, eid), b.step(y, eid)
            if (nx is None) != (ny is None):
                return word_to(pair) + (eid,), "closed"
            if nx is None:
                continue
            succ = (nx, ny)
            if succ not in parent:
                parent[succ] = (pair, eid)
                dq.append(succ)
    return None


def language_equal(a: Automaton, b: Automaton) -> bool:
    """True iff closed and marked languages both coincide."""
    return language_equal_witness(a, b) is None


def language_subset_witness(a: Automaton, b: Automaton):
    """Shortest word in a's languages missing from b's, or None if contained."""
    _require_same_ids(a, b)
    start = (a.initial, b.initial)
    parent: dict = {start: None}
    dq = deque([start])

    def word_to(pair) -> Word:
        steps = []
        while parent[pair] is not None:
            pair, eid = parent[pair]
            steps.append(eid)
        return tuple(reversed(steps))

    while dq:
        pair = dq.popleft()
        x, y = pair
        if x in a.marked and y not in b.marked:
            return word_to(pair), "marked"
        for eid in a.events_at(x):
            nx = a.transitions[(x, eid)]
            ny = b.step(y, eid)
            if ny is None:
                return word_to(pair) + (eid,), "closed"
            succ = (nx, ny)
            if succ not in parent:
                parent[succ] = (pair, eid)
                dq.append(succ)
    return None


def language_subset(a: Automaton, b: Automaton) -> bool:
    """True iff L(a) is contained in L(b) and Lm(a) in Lm(b)."""
    return language_subset_witness(a, b) is None


def des_isomorphism(a: Automaton, b: Automaton):
    """Isomorphism from a's states onto b's, or None.

    The map must be a bijection, send initial to initial and marked set onto
    marked set, and commute with every transition in both directions.  For
    reachable deterministic automata the candidate is unique and found by
    parallel breadth-first traversal; automata with unreachable states are
    never reported isomorphic.
    """
    _require_same_ids(a, b)
    if a.n_states != b.n_states:
        return None
    theta = {a.initial: b.initial}
    rev = {b.initial: a.initial}
    dq = deque([a.initial])
    while dq:
        x = dq.popleft()
        y = theta[x]
        for eid in a.alphabet.ids_sorted:
            nx, ny = a.step(x, eid), b.step(y, eid)
            if (nx is None) != (ny is None):
                return None
            if nx is None:
                continue
            known = theta.get(nx)
            if known is not None:
                if known != ny or rev.get(ny) != nx:
                    return None
                continue
            if ny in rev:
                return None
            theta[nx] = ny
            rev[ny] = nx
            dq.append(nx)
    if len(theta) != a.n_states:
        return None
    if frozenset(theta[x] for x in a.marked) != b.marked:
        return None
    return theta
