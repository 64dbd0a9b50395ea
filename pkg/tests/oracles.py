"""Independent oracles the unit and acceptance tests check the library against.

Everything here works at the level of explicit strings or one-state-at-a-time
set manipulation, deliberately avoiding the constructions under test.
"""

from __future__ import annotations

import random
from collections import deque

from deslok import Automaton, selfloop_lift, trim
from deslok.synthesis import _lift_spec
from deslok.automaton import sync_product_map


def enum_strings(aut: Automaton, max_len: int):
    """All words of the closed and marked language up to the given length."""
    closed = set()
    marked = set()
    frontier = [((), aut.initial)]
    for _ in range(max_len + 1):
        next_frontier = []
        for word, state in frontier:
            closed.add(word)
            if state in aut.marked:
                marked.add(word)
            if len(word) < max_len:
                for eid in aut.events_at(state):
                    next_frontier.append((word + (eid,), aut.transitions[(state, eid)]))
        frontier = next_frontier
        if not frontier:
            break
    return closed, marked


def project_word(word, keep):
    keep = frozenset(keep)
    return tuple(e for e in word if e in keep)


def projected_membership(aut: Automaton, word, keep):
    """(closed, marked) membership of ``word`` in the projection of the
    automaton's languages, decided by explicit search over (state, position)
    pairs rather than subset construction."""
    keep = frozenset(keep)
    start = (aut.initial, 0)
    seen = {start}
    dq = deque([start])
    in_closed = False
    in_marked = False
    while dq:
        state, pos = dq.popleft()
        if pos == len(word):
            in_closed = True
            if state in aut.marked:
                in_marked = True
        for eid in aut.events_at(state):
            target = aut.transitions[(state, eid)]
            if eid in keep:
                if pos < len(word) and word[pos] == eid:
                    nxt = (target, pos + 1)
                else:
                    continue
            else:
                nxt = (target, pos)
            if nxt not in seen:
                seen.add(nxt)
                dq.append(nxt)
    return in_closed, in_marked


def supcon_oracle(plant: Automaton, spec: Automaton, order="asc") -> Automaton:
    """Brute-force supremal controllable sublanguage by deleting bad product
    states one at a time (the result is order independent; ``order`` picks
    which bad state goes first: "asc", "desc", or an integer seed)."""
    plant = trim(plant)
    spec_l = _lift_spec(plant, spec)
    prod, pairs = sync_product_map(plant, spec_l)
    sigma_u = sorted(prod.alphabet.uncontrollable)
    rng = random.Random(order) if isinstance(order, int) else None

    alive = set(range(prod.n_states))

    def bad_states():
        bad = []
        for p in sorted(alive):
            q = pairs[p][0]
            for eid in sigma_u:
                if plant.step(q, eid) is None:
                    continue
                t = prod.step(p, eid)
                if t is None or t not in alive:
                    bad.append(p)
                    break
        return bad

    def trim_alive():
        reach = set()
        if prod.initial in alive:
            dq = deque([prod.initial])
            reach.add(prod.initial)
            while dq:
                s = dq.popleft()
                for eid in prod.events_at(s):
                    t = prod.transitions[(s, eid)]
                    if t in alive and t not in reach:
                        reach.add(t)
                        dq.append(t)
        rev = {}
        for (s, eid), t in prod.transitions.items():
            if s in alive and t in alive:
                rev.setdefault(t, []).append(s)
        co = {m for m in prod.marked if m in alive}
        stack = list(co)
        while stack:
            t = stack.pop()
            for s in rev.get(t, ()):
                if s not in co:
                    co.add(s)
                    stack.append(s)
        return reach & co

    while True:
        bad = bad_states()
        if bad:
            if order == "desc":
                victim = bad[-1]
            elif rng is not None:
                victim = rng.choice(bad)
            else:
                victim = bad[0]
            alive.discard(victim)
            continue
        kept = trim_alive()
        if kept != alive:
            alive = kept
            continue
        break

    if prod.initial not in alive:
        return Automaton.empty(prod.alphabet)
    order_list = []
    seen = {prod.initial}
    dq = deque([prod.initial])
    order_list.append(prod.initial)
    while dq:
        s = dq.popleft()
        for eid in prod.events_at(s):
            t = prod.transitions[(s, eid)]
            if t in alive and t not in seen:
                seen.add(t)
                order_list.append(t)
                dq.append(t)
    idx = {s: i for i, s in enumerate(order_list)}
    trans = {
        (idx[s], eid): idx[t]
        for (s, eid), t in prod.transitions.items()
        if s in idx and t in idx
    }
    marked = frozenset(idx[s] for s in prod.marked if s in idx)
    return Automaton(prod.alphabet, len(order_list), idx[prod.initial], marked, trans)


def minimal_congruence_size(sup, data, scope=None, cap=None) -> int:
    """Exhaustive minimum cell count over all valid control congruences.

    Depth-first assignment of states to cells with pairwise-consistency
    pruning; the successor condition is checked on complete partitions.  Only
    intended for small supervisors.
    """
    from deslok.reduction import consistent

    n = data.n_states
    ids = sup.alphabet.ids_sorted
    best = [cap if cap is not None else n]
    cons = [[consistent(data, x, y, scope) for y in range(n)] for x in range(n)]

    def closed_under_successors(cells):
        index = {}
        for ci, cell in enumerate(cells):
            for s in cell:
                index[s] = ci
        for cell in cells:
            for eid in ids:
                targets = {index[sup.step(s, eid)] for s in cell if sup.step(s, eid) is not None}
                if len(targets) > 1:
                    return False
        return True

    def dfs(state, cells):
        if len(cells) >= best[0]:
            return
        if state == n:
            if closed_under_successors(cells):
                best[0] = len(cells)
            return
        for cell in cells:
            if all(cons[state][other] for other in cell):
                cell.add(state)
                dfs(state + 1, cells)
                cell.remove(state)
        cells.append({state})
        dfs(state + 1, cells)
        cells.pop()

    dfs(0, [])
    return best[0]


def lift_dropped_event(aut: Automaton, eid: int) -> Automaton:
    """Project one event away and self-loop it back at every state."""
    from deslok import project

    dropped = project(aut, aut.alphabet.ids - {eid})
    return selfloop_lift(dropped, [aut.alphabet.event(eid)])
