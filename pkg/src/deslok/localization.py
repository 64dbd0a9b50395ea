"""Supervisor localization: one local controller per agent.

Each controller is the induced generator of an agent-scoped control
congruence, built from the same control data as the global reduction but with
disablement information restricted to the agent's own controllable events.
Controllers are emitted over the full alphabet; dropping events from their
observation scope is a separate analysis step.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .automaton import (
    Automaton,
    InternalInvariantError,
    PreconditionError,
    _require_same_ids,
    sync_all,
)
from .reduction import (
    Congruence,
    ControlData,
    build_congruence,
    compute_control_data,
    induce_generator,
    is_normal_supervisor,
)
from .synthesis import control_equivalent


@dataclass(frozen=True)
class Localization:
    """Per-agent local controllers together with their congruences."""

    sup: Automaton
    plant: Automaton
    controllers: Mapping[str, Automaton]
    congruences: Mapping[str, Congruence]

    @property
    def tags(self) -> tuple:
        return tuple(sorted(self.controllers))

    def meet(self) -> Automaton:
        """Synchronization of all controllers (intersection over the shared alphabet)."""
        return sync_all(*(self.controllers[tag] for tag in self.tags))


def _check_agent_cover(sup: Automaton):
    tags = sup.alphabet.agents
    if not tags:
        raise PreconditionError("localization needs agent tags on the alphabet")
    owned = set()
    for tag in tags:
        owned |= sup.alphabet.agent_events(tag)
    if owned != sup.alphabet.ids:
        raise PreconditionError(
            f"agent tags must partition the alphabet; untagged events: {sorted(sup.alphabet.ids - owned)}"
        )


def localize_agent(
    sup: Automaton,
    plant: Automaton,
    tag: str,
    data: Optional[ControlData] = None,
) -> Automaton:
    """Local controller for one agent: induced generator of its scoped congruence."""
    if data is None:
        data = compute_control_data(sup, plant)
    cong = build_congruence(sup, data, scope=tag)
    return induce_generator(sup, cong)


def localize(sup: Automaton, plant: Automaton) -> Localization:
    """Build a local controller for every agent and verify the solution.

    Post-verifies that the meet of all controllers is control equivalent to
    the supervisor w.r.t. the plant and that every controller is normal
    w.r.t. the supervisor; a failure of either is an internal error.
    """
    _check_agent_cover(sup)
    data = compute_control_data(sup, plant)
    controllers = {}
    congruences = {}
    for tag in sup.alphabet.agents:
        cong = build_congruence(sup, data, scope=tag)
        congruences[tag] = cong
        controllers[tag] = induce_generator(sup, cong)
    loc = Localization(sup, plant, controllers, congruences)
    if not control_equivalent(plant, loc.meet(), sup):
        raise InternalInvariantError("local controllers are not control equivalent")
    for tag, controller in controllers.items():
        if not is_normal_supervisor(controller, sup):
            raise InternalInvariantError(f"controller for {tag} is not normal")
    return loc


def is_local_controller(
    loc: Automaton, plant: Automaton, own_controllable: Iterable[int]
) -> bool:
    """True iff the controller only ever disables its own controllable events.

    Walks the synchronized product of controller and plant; any plant-enabled
    but controller-undefined event outside ``own_controllable`` is a foreign
    disablement.
    """
    _require_same_ids(loc, plant)
    own = frozenset(own_controllable)
    start = (loc.initial, plant.initial)
    seen = {start}
    dq = deque([start])
    while dq:
        z, q = dq.popleft()
        for eid in plant.events_at(q):
            nz = loc.step(z, eid)
            if nz is None:
                if eid not in own:
                    return False
                continue
            succ = (nz, plant.transitions[(q, eid)])
            if succ not in seen:
                seen.add(succ)
                dq.append(succ)
    return True
