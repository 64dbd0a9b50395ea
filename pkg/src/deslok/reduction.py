"""Supervisor reduction: control data, control congruences, induced generators.

The reduction pipeline lumps supervisor states that are control consistent
(no enable/disable conflict, compatible markings) into the cells of a control
congruence, then builds the quotient-like induced generator.  Finding a
minimum-cardinality cover is NP-hard, so a deterministic greedy heuristic is
used: state pairs are processed in ascending order, each tentative merge
propagates the successor condition transitively, and the whole merge is rolled
back if propagation reaches an inconsistent pair.  Results are therefore
reproducible but not guaranteed minimal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional

from .automaton import (
    Automaton,
    InternalInvariantError,
    PreconditionError,
    _bfs_order,
    _require_same_ids,
    _restricted,
)
from .synthesis import control_equivalent


@dataclass(frozen=True)
class ControlData:
    """Per-supervisor-state control information against a plant.

    ``enabled[x]`` is the event set defined at x; ``disabled[x]`` the events
    some co-reached plant state enables but x does not; ``agent_disabled`` the
    disabled sets restricted to each agent's own controllable events;
    ``marked_sup[x]``/``marked_plant[x]`` whether x is marked in the
    supervisor / co-reaches a marked plant state.
    """

    enabled: tuple
    disabled: tuple
    agent_disabled: Mapping[str, tuple]
    marked_sup: tuple
    marked_plant: tuple

    @property
    def n_states(self) -> int:
        return len(self.enabled)

    def disabled_at(self, x: int, scope: Optional[str] = None) -> frozenset:
        if scope is None:
            return self.disabled[x]
        return self.agent_disabled[scope][x]


def compute_control_data(sup: Automaton, plant: Automaton) -> ControlData:
    """Walk the synchronized product of supervisor and plant and collect the
    enable/disable/marking data for every supervisor state.

    Every supervised string must be possible in the plant; a supervisor
    transition with no plant counterpart is a precondition violation.  The
    disabled set is computed against all plant states co-reachable with a
    supervisor state, so it may contain uncontrollable events if the input is
    not controllable.
    """
    _require_same_ids(sup, plant)
    partners = [set() for _ in range(sup.n_states)]
    start = (sup.initial, plant.initial)
    seen = {start}
    dq = deque([start])
    partners[sup.initial].add(plant.initial)
    while dq:
        x, q = dq.popleft()
        for eid in sup.events_at(x):
            nq = plant.step(q, eid)
            if nq is None:
                raise PreconditionError(
                    f"supervisor enables event {eid} outside the plant behavior"
                )
            succ = (sup.transitions[(x, eid)], nq)
            if succ not in seen:
                seen.add(succ)
                partners[succ[0]].add(succ[1])
                dq.append(succ)

    enabled = tuple(frozenset(sup.events_at(x)) for x in range(sup.n_states))
    disabled = []
    for x in range(sup.n_states):
        dis = set()
        for q in partners[x]:
            for eid in plant.events_at(q):
                if eid not in enabled[x]:
                    dis.add(eid)
        disabled.append(frozenset(dis))
    disabled = tuple(disabled)
    agent_disabled = {
        tag: tuple(disabled[x] & sup.alphabet.own_controllable(tag) for x in range(sup.n_states))
        for tag in sup.alphabet.agents
    }
    marked_sup = tuple(x in sup.marked for x in range(sup.n_states))
    marked_plant = tuple(
        any(q in plant.marked for q in partners[x]) for x in range(sup.n_states)
    )
    return ControlData(enabled, disabled, agent_disabled, marked_sup, marked_plant)


def consistent(data: ControlData, x: int, y: int, scope: Optional[str] = None) -> bool:
    """Control consistency of two supervisor states.

    No event enabled at one state may be disabled at the other (disablement
    taken agent-locally when a scope is given), and states that agree on
    plant marking must agree on supervisor marking.
    """
    if data.enabled[x] & data.disabled_at(y, scope):
        return False
    if data.enabled[y] & data.disabled_at(x, scope):
        return False
    if data.marked_plant[x] == data.marked_plant[y] and data.marked_sup[x] != data.marked_sup[y]:
        return False
    return True


@dataclass(frozen=True)
class Congruence:
    """Pairwise-disjoint cells covering the supervisor's state set."""

    cells: tuple  # tuple[frozenset, ...], ordered by minimum member
    index: tuple  # state -> cell position

    @property
    def n_cells(self) -> int:
        return len(self.cells)


def _verify_congruence(sup: Automaton, data: ControlData, scope, cells: tuple):
    covered = set()
    index = {}
    for i, cell in enumerate(cells):
        if not cell:
            raise InternalInvariantError("empty congruence cell")
        if cell & covered:
            raise InternalInvariantError("overlapping congruence cells")
        covered |= cell
        for x in cell:
            index[x] = i
        members = sorted(cell)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                if not consistent(data, members[a], members[b], scope):
                    raise InternalInvariantError(
                        f"inconsistent pair {members[a]},{members[b]} inside a cell"
                    )
    if covered != set(range(sup.n_states)):
        raise InternalInvariantError("congruence cells do not cover the state set")
    for cell in cells:
        for eid in sup.alphabet.ids_sorted:
            succ_cells = {index[sup.step(x, eid)] for x in cell if sup.step(x, eid) is not None}
            if len(succ_cells) > 1:
                raise InternalInvariantError(
                    f"cell successors under event {eid} spread over several cells"
                )


def build_congruence(
    sup: Automaton, data: ControlData, scope: Optional[str] = None
) -> Congruence:
    """Greedy control congruence on the supervisor's states.

    Processes pairs (x, y), x < y, in ascending order; a merge of two cells
    requires every cross pair to be consistent and transitively merges
    successor cells so that all one-step successors of a cell stay within a
    single cell.  Any failure rolls the whole tentative merge back.  The
    identity partition is always valid, so the construction cannot fail.
    """
    if scope is not None and scope not in sup.alphabet.agents:
        raise PreconditionError(f"unknown agent tag {scope!r}")
    n = sup.n_states
    cell_of = list(range(n))
    members = {i: {i} for i in range(n)}

    def try_merge(cell_of_t, members_t, x, y) -> bool:
        # Cell ids are the minimum member state, so pending entries can be
        # carried as plain states.
        pending = deque([(x, y)])
        while pending:
            u, v = pending.popleft()
            cu, cv = cell_of_t[u], cell_of_t[v]
            if cu == cv:
                continue
            for p in sorted(members_t[cu]):
                for q in sorted(members_t[cv]):
                    if not consistent(data, p, q, scope):
                        return False
            keep, drop = (cu, cv) if cu < cv else (cv, cu)
            for s in members_t[drop]:
                cell_of_t[s] = keep
            members_t[keep] |= members_t[drop]
            del members_t[drop]
            for eid in sup.alphabet.ids_sorted:
                succ_cells = sorted(
                    {
                        cell_of_t[sup.step(s, eid)]
                        for s in members_t[keep]
                        if sup.step(s, eid) is not None
                    }
                )
                for other in succ_cells[1:]:
                    pending.append((succ_cells[0], other))
        return True

    for x in range(n):
        for y in range(x + 1, n):
            if cell_of[x] == cell_of[y]:
                continue
            if not consistent(data, x, y, scope):
                continue
            trial_cell_of = list(cell_of)
            trial_members = {k: set(v) for k, v in members.items()}
            if try_merge(trial_cell_of, trial_members, x, y):
                cell_of, members = trial_cell_of, trial_members

    cells = tuple(frozenset(members[i]) for i in sorted(members))
    index = [0] * n
    for i, cell in enumerate(cells):
        for s in cell:
            index[s] = i
    _verify_congruence(sup, data, scope, cells)
    return Congruence(cells, tuple(index))


def induce_generator(sup: Automaton, cong: Congruence) -> Automaton:
    """Quotient-like generator on the congruence cells.

    The cell of the initial state is initial; a cell is marked iff it meets
    the supervisor's marked set; a transition goes from cell i to cell j iff
    some member of i steps into j (well defined on a congruence).  The result
    is renumbered by breadth-first discovery.
    """
    m = len(cong.cells)
    trans: dict = {}
    for i, cell in enumerate(cong.cells):
        for eid in sup.alphabet.ids_sorted:
            targets = {
                cong.index[sup.step(x, eid)] for x in cell if sup.step(x, eid) is not None
            }
            if len(targets) > 1:
                raise InternalInvariantError(
                    f"induced transition on event {eid} from cell {i} is not well defined"
                )
            if targets:
                trans[(i, eid)] = targets.pop()
    marked = frozenset(i for i, cell in enumerate(cong.cells) if cell & sup.marked)
    raw = Automaton(sup.alphabet, m, cong.index[sup.initial], marked, trans)
    order = _bfs_order(raw)
    if len(order) != m:
        raise InternalInvariantError("induced generator has unreachable cells")
    return _restricted(raw, order)


def supreduce(sup: Automaton, plant: Automaton) -> Automaton:
    """Reduced supervisor: induced generator of the global control congruence.

    Post-verified to be control equivalent to the input supervisor w.r.t. the
    plant and no larger than it; a verification failure is an internal error.
    """
    data = compute_control_data(sup, plant)
    cong = build_congruence(sup, data, scope=None)
    rsup = induce_generator(sup, cong)
    if rsup.n_states > sup.n_states:
        raise InternalInvariantError("reduction enlarged the supervisor")
    if not control_equivalent(plant, rsup, sup):
        raise InternalInvariantError("reduced supervisor is not control equivalent")
    return rsup


def is_normal_supervisor(candidate: Automaton, sup: Automaton) -> bool:
    """Every state, transition and marked state of ``candidate`` is exercised
    by the supervisor's language.

    Computed by synchronized reachability of the pair: each candidate state
    must appear in some jointly reachable pair, each candidate transition must
    be jointly enabled somewhere, and each marked candidate state must pair
    with a marked supervisor state.
    """
    _require_same_ids(candidate, sup)
    reached = [set() for _ in range(candidate.n_states)]
    exercised = set()
    start = (candidate.initial, sup.initial)
    seen = {start}
    dq = deque([start])
    reached[candidate.initial].add(sup.initial)
    while dq:
        z, x = dq.popleft()
        for eid in candidate.events_at(z):
            nx = sup.step(x, eid)
            if nx is None:
                continue
            exercised.add((z, eid))
            succ = (candidate.transitions[(z, eid)], nx)
            if succ not in seen:
                seen.add(succ)
                reached[succ[0]].add(succ[1])
                dq.append(succ)
    for z in range(candidate.n_states):
        if not reached[z]:
            return False
    for (z, eid) in candidate.transitions:
        if (z, eid) not in exercised:
            return False
    for z in candidate.marked:
        if not any(x in sup.marked for x in reached[z]):
            return False
    return True
