"""Hypothesis strategies for small deterministic automata."""

from __future__ import annotations

from hypothesis import strategies as st

from deslok import Alphabet, Automaton, Event


@st.composite
def alphabets(draw, max_events=4, tagged=False):
    n = draw(st.integers(min_value=1, max_value=max_events))
    events = []
    for i in range(n):
        controllable = draw(st.booleans())
        agent = None
        if tagged:
            agent = draw(st.sampled_from(["A1", "A2"]))
        events.append(Event(i, controllable, agent))
    return Alphabet.of(events)


@st.composite
def automata(draw, alphabet=None, max_states=6, max_events=4):
    if alphabet is None:
        alphabet = draw(alphabets(max_events=max_events))
    n = draw(st.integers(min_value=1, max_value=max_states))
    trans = {}
    for s in range(n):
        for ev in alphabet.events:
            if draw(st.booleans()):
                trans[(s, ev.eid)] = draw(st.integers(min_value=0, max_value=n - 1))
    marked = frozenset(
        s for s in range(n) if draw(st.booleans())
    )
    return Automaton(alphabet, n, 0, marked, trans)


@st.composite
def automata_pairs(draw, max_states=5, max_events=4):
    alphabet = draw(alphabets(max_events=max_events))
    a = draw(automata(alphabet=alphabet, max_states=max_states))
    b = draw(automata(alphabet=alphabet, max_states=max_states))
    return a, b
