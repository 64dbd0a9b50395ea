"""Core automaton operations against string-level oracles."""

import pytest
from hypothesis import given, settings

from deslok import (
    Alphabet,
    AlphabetMismatchError,
    Automaton,
    Event,
    FlagConflictError,
    PreconditionError,
    des_isomorphism,
    language_equal,
    language_equal_witness,
    language_subset,
    prefix_closure,
    project,
    selfloop_lift,
    sync_product,
    trim,
)
from oracles import enum_strings, project_word, projected_membership
from strategies import automata, automata_pairs


def aut(n, trans, marked, events, initial=0):
    alphabet = Alphabet.of(Event(e, bool(c)) for e, c in events)
    return Automaton(alphabet, n, initial, frozenset(marked), trans)


A = Alphabet.of([Event(0, False), Event(1, True)])


class TestTrim:
    def test_identity_on_single_marked_state(self):
        a = Automaton(A, 1, 0, frozenset({0}), {})
        assert trim(a) == a

    def test_drops_unreachable_state(self):
        # chain 0 -> 1 -> 2 with only 2 marked, plus unreachable state 3
        a = Automaton(A, 4, 0, frozenset({2}), {(0, 0): 1, (1, 0): 2})
        t = trim(a)
        assert t.n_states == 3
        assert t.marked == frozenset({2})
        assert t.transitions == {(0, 0): 1, (1, 0): 2}

    def test_blocking_branch_removed(self):
        # state 2 is a dead end; after trim the closed language must equal
        # the prefix closure of the marked language (checked by enumeration)
        a = Automaton(
            A, 3, 0, frozenset({1}), {(0, 0): 1, (0, 1): 2, (1, 0): 1}
        )
        t = trim(a)
        closed, marked = enum_strings(t, 8)
        prefixes = {w[:i] for w in marked for i in range(len(w) + 1)}
        assert closed == prefixes
        assert (1,) not in closed

    def test_empty_when_initial_not_coreachable(self):
        a = Automaton(A, 2, 0, frozenset(), {(0, 0): 1})
        t = trim(a)
        assert t == Automaton.empty(A)
        assert t.is_empty

    @given(automata())
    @settings(max_examples=60, deadline=None)
    def test_idempotent(self, a):
        t = trim(a)
        assert trim(t) == t


class TestSyncProduct:
    def test_disjoint_selfloops_shuffle(self):
        a = Automaton(Alphabet.of([Event(0)]), 1, 0, frozenset({0}), {(0, 0): 0})
        b = Automaton(Alphabet.of([Event(1)]), 1, 0, frozenset({0}), {(0, 1): 0})
        p = sync_product(a, b)
        assert p.n_states == 1
        assert p.transitions == {(0, 0): 0, (0, 1): 0}
        assert p.marked == frozenset({0})

    def test_idempotent_on_same_automaton(self):
        a = aut(2, {(0, 1): 1, (1, 0): 0}, {0}, [(0, 0), (1, 1)])
        assert language_equal(sync_product(a, a), a)

    def test_disjoint_cycles_against_string_oracle(self):
        a = aut(2, {(0, 0): 1, (1, 1): 0}, {0}, [(0, 0), (1, 1)])
        b_alpha = Alphabet.of([Event(2), Event(3, True)])
        b = Automaton(b_alpha, 2, 0, frozenset({0}), {(0, 2): 1, (1, 3): 0})
        p = sync_product(a, b)
        assert p.n_states == 4
        closed, marked = enum_strings(p, 6)
        a_closed, a_marked = enum_strings(a, 6)
        b_closed, b_marked = enum_strings(b, 6)
        for w in closed:
            assert project_word(w, {0, 1}) in a_closed
            assert project_word(w, {2, 3}) in b_closed
        for w in marked:
            assert project_word(w, {0, 1}) in a_marked
            assert project_word(w, {2, 3}) in b_marked

    def test_flag_mismatch_names_event(self):
        a = Automaton(Alphabet.of([Event(7, True)]), 1, 0, frozenset({0}), {})
        b = Automaton(Alphabet.of([Event(7, False)]), 1, 0, frozenset({0}), {})
        with pytest.raises(FlagConflictError, match="7"):
            sync_product(a, b)

    @given(automata_pairs())
    @settings(max_examples=40, deadline=None)
    def test_commutative_up_to_language(self, pair):
        a, b = pair
        assert language_equal(sync_product(a, b), sync_product(b, a))


class TestProject:
    def test_full_alphabet_is_identity_on_trim_input(self):
        a = trim(aut(3, {(0, 0): 1, (1, 1): 2}, {2}, [(0, 0), (1, 1)]))
        assert language_equal(project(a, a.alphabet.ids), a)

    def test_always_accepts_empty_string(self):
        a = aut(2, {(0, 0): 1}, {1}, [(0, 0), (1, 1)])
        p = project(a, {1})
        assert p.run(()) is not None

    def test_chain_projection_matches_string_oracle(self):
        # 0 -x-> 1 -y-> 2 with 2 marked, erase x
        a = aut(3, {(0, 0): 1, (1, 1): 2}, {2}, [(0, 0), (1, 1)])
        p = project(a, {1})
        assert p.n_states == 2
        closed, marked = enum_strings(a, 6)
        p_closed, p_marked = enum_strings(p, 6)
        assert {project_word(w, {1}) for w in closed} == p_closed
        assert {project_word(w, {1}) for w in marked} == p_marked

    def test_rejects_foreign_events(self):
        a = aut(1, {}, {0}, [(0, 0)])
        with pytest.raises(PreconditionError):
            project(a, {5})

    @given(automata())
    @settings(max_examples=40, deadline=None)
    def test_membership_against_search_oracle(self, a):
        keep = frozenset(e for e in a.alphabet.ids if e % 2 == 0)
        p = project(a, keep)
        p_closed, p_marked = enum_strings(p, 5)
        for w in p_closed:
            in_c, _ = projected_membership(a, w, keep)
            assert in_c
        for w in p_marked:
            _, in_m = projected_membership(a, w, keep)
            assert in_m


class TestSelfloopLift:
    def test_no_extra_events_is_identity(self):
        a = aut(2, {(0, 0): 1}, {1}, [(0, 0)])
        assert selfloop_lift(a, []) == a

    def test_single_state_gains_loop(self):
        a = Automaton(Alphabet.of([]), 1, 0, frozenset({0}), {})
        lifted = selfloop_lift(a, [Event(3, True)])
        assert lifted.transitions == {(0, 3): 0}
        closed, marked = enum_strings(lifted, 4)
        assert closed == marked == {(), (3,), (3, 3), (3, 3, 3), (3, 3, 3, 3)}

    def test_overlap_rejected(self):
        a = aut(1, {}, {0}, [(0, 0)])
        with pytest.raises(PreconditionError):
            selfloop_lift(a, [Event(0)])

    @given(automata())
    @settings(max_examples=40, deadline=None)
    def test_roundtrip_with_projection(self, a):
        extra = [Event(97, True), Event(99, False)]
        lifted = selfloop_lift(a, extra)
        back = project(lifted, a.alphabet.ids)
        assert language_equal(back, project(a, a.alphabet.ids))


class TestLanguageEqual:
    def test_reflexive(self):
        a = aut(2, {(0, 1): 1}, {1}, [(0, 0), (1, 1)])
        assert language_equal(a, a)

    def test_unreachable_states_invisible(self):
        a = aut(3, {(0, 1): 1}, {1}, [(0, 0), (1, 1)])
        assert language_equal(a, trim(a))

    def test_same_language_different_sizes(self):
        # two recognizers of {eps, ab}, two vs three live states
        ab = [(0, 0), (1, 1)]
        small = aut(3, {(0, 0): 1, (1, 1): 2}, {0, 2}, ab)
        big = aut(4, {(0, 0): 1, (1, 1): 2, (3, 0): 3}, {0, 2}, ab)
        assert language_equal(small, big)
        c1, m1 = enum_strings(small, 4)
        c2, m2 = enum_strings(big, 4)
        assert c1 == c2 and m1 == m2

    def test_alphabet_mismatch(self):
        a = aut(1, {}, {0}, [(0, 0)])
        b = aut(1, {}, {0}, [(1, 0)])
        with pytest.raises(AlphabetMismatchError):
            language_equal(a, b)

    def test_subset(self):
        whole = aut(2, {(0, 0): 1, (1, 0): 0}, {0}, [(0, 0)])
        part = aut(2, {(0, 0): 1}, {0}, [(0, 0)])
        assert language_subset(part, whole)
        assert not language_subset(whole, part)

    @given(automata_pairs())
    @settings(max_examples=60, deadline=None)
    def test_agrees_with_enumeration(self, pair):
        a, b = pair
        witness = language_equal_witness(a, b)
        if witness is None:
            assert enum_strings(a, 8) == enum_strings(b, 8)
        else:
            word, reason = witness
            if reason == "closed":
                assert (a.run(word) is None) != (b.run(word) is None)
            else:
                assert a.accepts(word) != b.accepts(word)


class TestIsomorphism:
    def test_identity(self):
        a = aut(2, {(0, 1): 1, (1, 0): 0}, {0}, [(0, 0), (1, 1)])
        assert des_isomorphism(a, a) == {0: 0, 1: 1}

    def test_recovers_permutation(self):
        a = aut(3, {(0, 0): 1, (1, 1): 2, (2, 0): 0}, {2}, [(0, 0), (1, 1)])
        perm = {0: 0, 1: 2, 2: 1}
        trans = {(perm[s], e): perm[t] for (s, e), t in a.transitions.items()}
        b = Automaton(a.alphabet, 3, perm[a.initial], frozenset(perm[s] for s in a.marked), trans)
        assert des_isomorphism(a, b) == perm

    def test_size_mismatch(self):
        a = aut(1, {}, {0}, [(0, 0)])
        b = aut(2, {}, {0}, [(0, 0)])
        assert des_isomorphism(a, b) is None

    @given(automata_pairs())
    @settings(max_examples=40, deadline=None)
    def test_isomorphic_implies_language_equal(self, pair):
        a, b = pair
        if des_isomorphism(a, b) is not None:
            assert language_equal(a, b)
        if des_isomorphism(trim(a), trim(b)) is not None:
            assert language_equal(trim(a), trim(b))


class TestPrefixClosure:
    def test_marks_everything(self):
        a = aut(3, {(0, 0): 1, (1, 1): 2}, {2}, [(0, 0), (1, 1)])
        c = prefix_closure(a)
        assert c.marked == frozenset(range(c.n_states))
        closed, marked = enum_strings(c, 6)
        assert closed == marked
