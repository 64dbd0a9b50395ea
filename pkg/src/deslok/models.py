"""Built-in case studies: shared resource, guideway, transfer line.

Each constructor returns a CaseStudy bundling the component agents, the
specification automaton and, where known, an expected-results record used by
the fixture tests and the command-line ``demo --assert-expected`` mode.
Component alphabets are pairwise disjoint; every event carries its owning
agent's tag, and the odd-id = controllable numbering convention is followed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional

from .automaton import (
    Alphabet,
    Automaton,
    Event,
    PreconditionError,
    sync_all,
    sync_product_map,
    trim,
)


@dataclass(frozen=True)
class ExpectedRecord:
    """Results a case study is expected to reproduce end to end.

    ``state_counts`` holds frozen golden values from an audited pipeline run;
    the remaining fields pin structural facts (verdicts, event sets,
    relations between state counts).
    """

    state_localizable: bool
    event_localizable: bool
    loc_isomorphic_to_sup: Optional[bool] = None
    loc_states_match_rsup: Optional[bool] = None
    loc_states_below_rsup: Optional[bool] = None
    vacuous_superset: Mapping[str, frozenset] = field(default_factory=dict)
    relevant_exact: Mapping[str, frozenset] = field(default_factory=dict)
    decomposition_alphabets: Optional[tuple] = None
    decomposable: Optional[bool] = None
    state_counts: Optional[Mapping[str, int]] = None


@dataclass(frozen=True)
class CaseStudy:
    """Named plant components, a specification, and optional expectations."""

    name: str
    components: tuple  # tuple[tuple[str, Automaton], ...]
    spec: Automaton
    expected: Optional[ExpectedRecord] = None

    def __post_init__(self):
        seen = set()
        for _, aut in self.components:
            if seen & aut.alphabet.ids:
                raise PreconditionError("component alphabets must be pairwise disjoint")
            seen |= aut.alphabet.ids
        if not self.spec.alphabet.ids <= seen:
            raise PreconditionError("spec events must belong to some component")

    @cached_property
    def plant(self) -> Automaton:
        return sync_all(*(aut for _, aut in self.components))

    @property
    def tags(self) -> tuple:
        return tuple(tag for tag, _ in self.components)


def mutex_spec(a: Automaton, b: Automaton, forbidden_pairs) -> Automaton:
    """Shuffle product of two disjoint-alphabet automata with the forbidden
    component-state pairs deleted, then trimmed."""
    if a.alphabet.ids & b.alphabet.ids:
        raise PreconditionError("mutual exclusion requires disjoint alphabets")
    prod, pairs = sync_product_map(a, b)
    forbidden = {tuple(p) for p in forbidden_pairs}
    dead = {i for i, p in enumerate(pairs) if p in forbidden}
    trans = {
        (s, eid): t
        for (s, eid), t in prod.transitions.items()
        if s not in dead and t not in dead
    }
    raw = Automaton(prod.alphabet, prod.n_states, prod.initial, prod.marked - dead, trans)
    return trim(raw)


def shared_resource() -> CaseStudy:
    """Two agents sharing a resource that must never be held by both.

    Agent i acquires with a controllable event (11/21), may keep re-requesting
    it while holding (self-loop), and releases with an uncontrollable event
    (10/20).  Both agent states are marked (holding is a stable configuration);
    the specification marks only the all-idle state.  The agents are coupled so
    tightly that localization cannot simplify anything: each local controller
    comes out identical to the monolithic supervisor and neither the state
    count nor the used-event count drops.
    """

    def agent(tag: str, acquire: int, release: int) -> Automaton:
        alpha = Alphabet.of(
            [Event(acquire, True, tag), Event(release, False, tag)]
        )
        trans = {
            (0, acquire): 1,
            (1, acquire): 1,  # re-request while holding
            (1, release): 0,
        }
        return Automaton(alpha, 2, 0, frozenset({0, 1}), trans)

    g1 = agent("G1", 11, 10)
    g2 = agent("G2", 21, 20)
    spec = mutex_spec(g1, g2, [(1, 1)])
    # the specification marks the system at rest only (both agents idle)
    spec = Automaton(
        spec.alphabet, spec.n_states, spec.initial, frozenset({spec.initial}), spec.transitions
    )
    expected = ExpectedRecord(
        state_localizable=False,
        event_localizable=False,
        loc_isomorphic_to_sup=True,
        state_counts={"SUP": 3, "RSUP": 3, "LOC:G1": 3, "LOC:G2": 3},
    )
    return CaseStudy("sharedresource", (("G1", g1), ("G2", g2)), spec, expected)


def _vehicle(i: int, sections: int, cyclic: bool) -> Automaton:
    base = 10 * i
    tag = f"V{i}"
    n = sections + 2
    events = []
    trans = {}
    for j in range(sections + 1):
        # stoplights (controllable, odd offset) at even junctions,
        # detectors (uncontrollable, even offset) at odd junctions
        if j % 2 == 0:
            events.append(Event(base + j + 1, True, tag))
            trans[(j, base + j + 1)] = j + 1
        else:
            events.append(Event(base + j - 1, False, tag))
            trans[(j, base + j - 1)] = j + 1
    if cyclic:
        off = sections if sections % 2 == 0 else sections + 1
        events.append(Event(base + off, False, tag))
        trans[(n - 1, base + off)] = 0
        marked = frozenset({0, n - 1})
    else:
        marked = frozenset({n - 1})
    return Automaton(Alphabet.of(events), n, 0, marked, trans)


def guideway(sections: int = 4, cyclic: bool = True) -> CaseStudy:
    """Two vehicles on a one-way track split into sections.

    Vehicle i sits at station A (state 0), travels section j (state j), or
    sits at station B (state sections+1).  Controllable stoplights and
    uncontrollable detectors alternate along the track; the specification
    forbids both vehicles from occupying the same section.  The default adds
    an uncontrollable return event from B to A so the task is cyclic; the
    non-cyclic variant keeps only the one-way trip and marks station B alone.
    """
    if sections < 1:
        raise PreconditionError("the track needs at least one section")
    if sections > 8:
        raise PreconditionError("event numbering supports at most 8 sections")
    v1 = _vehicle(1, sections, cyclic)
    v2 = _vehicle(2, sections, cyclic)
    spec = mutex_spec(v1, v2, [(j, j) for j in range(1, sections + 1)])
    expected = None
    if sections == 4 and cyclic:
        sigma = v1.alphabet.ids | v2.alphabet.ids
        # The published analysis additionally reports 23 unused by V1's
        # controller and 13 unused by V2's; that holds only for a supervisor
        # synthesized under partial observation (out of scope here), so the
        # record pins the containments this pipeline reproduces.
        expected = ExpectedRecord(
            state_localizable=False,
            event_localizable=True,
            loc_states_match_rsup=True,
            vacuous_superset={
                "V1": frozenset({10, 12}),
                "V2": frozenset({20, 22}),
            },
            decomposition_alphabets=(
                frozenset(sigma - {10, 12, 23}),
                frozenset(sigma - {13, 20, 22}),
            ),
            decomposable=True,
            state_counts={"SUP": 28, "RSUP": 3, "LOC:V1": 3, "LOC:V2": 3},
        )
    return CaseStudy(
        "guideway" if cyclic else "guideway-noncyclic",
        (("V1", v1), ("V2", v2)),
        spec,
        expected,
    )


def _counter(ups, downs, cap: int) -> Automaton:
    """Bounded counter over the given increment/decrement events, marked empty."""
    events = list(ups) + list(downs)
    trans = {}
    for i in range(cap + 1):
        for ev in ups:
            if i < cap:
                trans[(i, ev.eid)] = i + 1
        for ev in downs:
            if i > 0:
                trans[(i, ev.eid)] = i - 1
    return Automaton(Alphabet.of(events), cap + 1, 0, frozenset({0}), trans)


def transfer_line(cap1: int = 3, cap2: int = 1) -> CaseStudy:
    """Two machines and a test unit linked by bounded buffers.

    M1 feeds buffer B1, M2 takes from B1 and feeds B2, the test unit takes
    from B2 and either accepts a piece (it leaves) or rejects it back into B1
    for reprocessing.  The specification protects both buffers against
    underflow and overflow.
    """
    if cap1 < 1 or cap2 < 1:
        raise PreconditionError("buffer capacities must be positive")
    e1, e2 = Event(1, True, "M1"), Event(2, False, "M1")
    e3, e4 = Event(3, True, "M2"), Event(4, False, "M2")
    e5, e6, e8 = Event(5, True, "TU"), Event(6, False, "TU"), Event(8, False, "TU")
    m1 = Automaton(Alphabet.of([e1, e2]), 2, 0, frozenset({0}), {(0, 1): 1, (1, 2): 0})
    m2 = Automaton(Alphabet.of([e3, e4]), 2, 0, frozenset({0}), {(0, 3): 1, (1, 4): 0})
    tu = Automaton(
        Alphabet.of([e5, e6, e8]), 2, 0, frozenset({0}), {(0, 5): 1, (1, 8): 0, (1, 6): 0}
    )
    b1 = _counter([e2, e6], [e3], cap1)
    b2 = _counter([e4], [e5], cap2)
    spec = sync_all(b1, b2)
    expected = None
    if (cap1, cap2) == (3, 1):
        # The published controller figures carry the event sets {1,2,6} /
        # {2,3,4,5,8} / {4,5}; no control-equivalent ensemble can realize the
        # first two (equal-projection strings force opposite decisions), so
        # the record pins the sets this pipeline actually produces, frozen
        # from an audited run.  M1's controller counts pieces downstream of
        # itself (up on 2, down on the accept event 8) and stops at four.
        expected = ExpectedRecord(
            state_localizable=True,
            event_localizable=True,
            loc_states_below_rsup=True,
            relevant_exact={
                "M1": frozenset({1, 2, 8}),
                "M2": frozenset({2, 3, 4, 5, 6}),
                "TU": frozenset({2, 3, 4, 5, 6}),
            },
            decomposition_alphabets=(
                frozenset({1, 2, 6}),
                frozenset({2, 3, 4, 5, 8}),
                frozenset({4, 5}),
            ),
            decomposable=False,
            state_counts={"SUP": 28, "RSUP": 8, "LOC:M1": 4, "LOC:M2": 7, "LOC:TU": 7},
        )
    return CaseStudy("transferline", (("M1", m1), ("M2", m2), ("TU", tu)), spec, expected)
