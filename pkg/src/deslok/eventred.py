"""Event-reduction analysis of localized supervisory control.

A controller can drop an event from its observation scope when the event is
vacuous for it: self-looped wherever the controller defines it and never
disabled when the plant enables it.  Dropping a vacuous event provably changes
no control decision, which is re-verified here by reconstruction for every
event reported.  On top of that this module issues the two localizability
verdicts (state reduction and event reduction), hunts for the guaranteed
foreign self-looped events behind state reduction, tests decomposability of
the supervised behavior, and quantifies the observation traffic between
controllers.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .automaton import (
    Alphabet,
    Automaton,
    Event,
    InternalInvariantError,
    PreconditionError,
    _require_same_ids,
    language_equal,
    prefix_closure,
    project,
    selfloop_lift,
    sync_all,
    sync_product,
    trim,
)
from .localization import Localization, localize
from .models import CaseStudy
from .reduction import compute_control_data, supreduce
from .synthesis import SynthesisResult, supcon


@dataclass(frozen=True)
class EventAnalysis:
    """Vacuous/relevant split of one automaton's alphabet."""

    vacuous: frozenset
    relevant: frozenset


def vacuous_events(aut: Automaton, plant: Automaton, verify: bool = True) -> frozenset:
    """Events the automaton can stop observing without changing decisions.

    An event qualifies iff every transition the automaton defines on it is a
    self-loop and no jointly reachable plant state enables it while the
    automaton does not.  With ``verify`` each reported event is cross-checked
    by reconstruction: projecting it away and lifting it back must give a
    controller with identical closed-loop behavior.

    ``plant`` is the environment the automaton actually runs against.  For a
    monolithic or reduced supervisor that is the plant itself; for one local
    controller out of several it is the plant synchronized with the sibling
    controllers, since a disablement that some sibling also imposes decides
    nothing.  Theorem-style guarantees about foreign self-looped events hold
    for that reading, not against the bare plant.
    """
    _require_same_ids(aut, plant)
    not_selfloop = set()
    for (s, eid), t in aut.transitions.items():
        if s != t:
            not_selfloop.add(eid)
    disabled_somewhere = set()
    start = (aut.initial, plant.initial)
    seen = {start}
    dq = deque([start])
    while dq:
        z, q = dq.popleft()
        for eid in plant.events_at(q):
            nz = aut.step(z, eid)
            if nz is None:
                disabled_somewhere.add(eid)
                continue
            succ = (nz, plant.transitions[(q, eid)])
            if succ not in seen:
                seen.add(succ)
                dq.append(succ)
    result = frozenset(aut.alphabet.ids - not_selfloop - disabled_somewhere)
    if verify:
        baseline = sync_product(plant, aut)
        for eid in sorted(result):
            dropped = project(aut, aut.alphabet.ids - {eid})
            lifted = selfloop_lift(dropped, [aut.alphabet.event(eid)])
            if not language_equal(sync_product(plant, lifted), baseline):
                raise InternalInvariantError(
                    f"event {eid} reported vacuous but dropping it changes the closed loop"
                )
    return result


def analyze_events(aut: Automaton, plant: Automaton, verify: bool = True) -> EventAnalysis:
    vac = vacuous_events(aut, plant, verify=verify)
    return EventAnalysis(vac, frozenset(aut.alphabet.ids - vac))


@dataclass(frozen=True)
class AgentWitness:
    """Per-agent evidence backing a verdict."""

    tag: str
    loc_states: int
    rsup_states: int
    relevant: tuple
    vacuous: tuple
    foreign_selflooped: tuple  # foreign controllable events vacuous in this controller
    rsup_relevant: tuple
    alphabet_size: int


@dataclass(frozen=True)
class Verdict:
    """Localizability verdicts with their supporting witnesses."""

    state_localizable: bool
    event_localizable: bool
    decomposable: Optional[bool]
    witnesses: Mapping[str, AgentWitness]


def controller_environment(localization: Localization, tag: str) -> Automaton:
    """The behavior one controller runs against: plant meet sibling controllers."""
    siblings = [localization.controllers[t] for t in localization.tags if t != tag]
    return sync_all(localization.plant, *siblings)


def localizability_verdict(
    sup: Automaton,
    rsup: Automaton,
    localization: Localization,
    plant: Automaton,
    decomposable: Optional[bool] = None,
) -> Verdict:
    """State reduction holds when every controller is strictly smaller than
    the reduced supervisor; event reduction when every controller's relevant
    event set is strictly smaller than the reduced supervisor's.

    The reduced supervisor is analyzed against the plant, each local
    controller against its closed-loop environment.
    """
    rsup_analysis = analyze_events(rsup, plant)
    witnesses = {}
    state_ok = True
    event_ok = True
    for tag in localization.tags:
        controller = localization.controllers[tag]
        analysis = analyze_events(controller, controller_environment(localization, tag))
        own_c = sup.alphabet.own_controllable(tag)
        foreign = sorted((sup.alphabet.controllable - own_c) & analysis.vacuous)
        witnesses[tag] = AgentWitness(
            tag=tag,
            loc_states=controller.n_states,
            rsup_states=rsup.n_states,
            relevant=tuple(sorted(analysis.relevant)),
            vacuous=tuple(sorted(analysis.vacuous)),
            foreign_selflooped=tuple(foreign),
            rsup_relevant=tuple(sorted(rsup_analysis.relevant)),
            alphabet_size=len(sup.alphabet.ids),
        )
        state_ok = state_ok and controller.n_states < rsup.n_states
        event_ok = event_ok and len(analysis.relevant) < len(rsup_analysis.relevant)
    return Verdict(state_ok, event_ok, decomposable, witnesses)


@dataclass(frozen=True)
class Theorem1Entry:
    """One agent's evidence for the state-reduction-forces-event-reduction claim.

    ``witnesses`` holds foreign controllable events vacuous in the controller
    (self-looped wherever defined, never disabled in its environment); the
    weaker tiers record foreign controllable events self-looped at one state
    at least, and foreign controllable events the controller keeps defined at
    a cell where the supervisor disables them at some indistinguishable state
    (the tier the merge argument actually guarantees).
    """

    tag: str
    premise: bool  # controller strictly smaller than the reduced supervisor
    witnesses: tuple
    selfloop_witnesses: tuple = ()
    retained_witnesses: tuple = ()

    @property
    def counterexample(self) -> bool:
        return self.premise and not self.witnesses


@dataclass(frozen=True)
class Theorem1Report:
    entries: tuple

    @property
    def counterexamples(self) -> tuple:
        return tuple(e for e in self.entries if e.counterexample)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def check_theorem1(
    sup: Automaton,
    rsup: Automaton,
    localization: Localization,
    plant: Automaton,
) -> Theorem1Report:
    """State reduction forces event reduction: whenever a controller is
    strictly smaller than the reduced supervisor, some controllable event of
    another agent must be vacuous in it.  Agents whose controller matches the
    reduced supervisor's size are skipped (premise fails); a premise that
    holds without a witness is recorded as a counterexample, never swallowed.

    Counterexamples are data, not errors: the greedy covers built here can
    route a foreign event across cells instead of self-looping it, in which
    case only the weaker witness tiers survive.
    """
    data = compute_control_data(sup, plant)
    entries = []
    for tag in localization.tags:
        controller = localization.controllers[tag]
        premise = controller.n_states < rsup.n_states
        if not premise:
            entries.append(Theorem1Entry(tag, False, ()))
            continue
        env = controller_environment(localization, tag)
        vac = vacuous_events(controller, env, verify=False)
        own_c = sup.alphabet.own_controllable(tag)
        foreign_c = sup.alphabet.controllable - own_c
        witnesses = tuple(sorted(foreign_c & vac))
        selflooped = tuple(
            sorted(
                {
                    eid
                    for (s, eid), t in controller.transitions.items()
                    if s == t and eid in foreign_c
                }
            )
        )
        retained = set()
        for cell in localization.congruences[tag].cells:
            for sigma in foreign_c:
                if any(sup.step(x, sigma) is not None for x in cell) and any(
                    sigma in data.disabled[y] for y in cell
                ):
                    retained.add(sigma)
        entries.append(
            Theorem1Entry(tag, True, witnesses, selflooped, tuple(sorted(retained)))
        )
    return Theorem1Report(tuple(entries))


@dataclass(frozen=True)
class DecompositionResult:
    closed: bool
    marked: bool


def decomposability(k: Automaton, plant: Automaton, alphabets) -> DecompositionResult:
    """Whether the behavior equals the intersection of its per-alphabet
    projections (inverse-lifted) with the plant behavior.

    The closed-language verdict is the decomposability notion proper; the
    marked-language analogue is computed alongside and reported separately.
    """
    alphabets = [frozenset(a) for a in alphabets]
    for a in alphabets:
        if not a <= plant.alphabet.ids:
            raise PreconditionError(
                f"decomposition alphabet not contained in the plant's: {sorted(a - plant.alphabet.ids)}"
            )

    def lifted_projections(base: Automaton):
        out = []
        for a in alphabets:
            extra = [plant.alphabet.event(eid) for eid in sorted(plant.alphabet.ids - a)]
            out.append(selfloop_lift(project(base, a), extra))
        return out

    kc = prefix_closure(k)
    gc = prefix_closure(plant)
    closed_rhs = sync_all(gc, *lifted_projections(kc))
    closed = language_equal(trim(closed_rhs), kc)

    kt = trim(k)
    gt = trim(plant)
    marked_rhs = sync_all(gt, *lifted_projections(kt))
    marked = language_equal(trim(marked_rhs), kt)
    return DecompositionResult(closed, marked)


def is_decomposable(k: Automaton, plant: Automaton, alphabets) -> bool:
    return decomposability(k, plant, alphabets).closed


@dataclass(frozen=True)
class CommRow:
    observer: str
    owner: str
    events: tuple
    count: int


@dataclass(frozen=True)
class CommunicationReport:
    """Foreign events each controller must observe, pair by pair, with the
    reduced supervisor as the everyone-runs-it baseline."""

    rows: tuple
    baseline_rows: tuple
    per_agent: Mapping[str, int]
    total: int
    baseline_total: int


def communication_report(
    localization: Localization,
    plant: Automaton,
    rsup: Optional[Automaton] = None,
) -> CommunicationReport:
    if rsup is None:
        rsup = supreduce(localization.sup, plant)
    alphabet = localization.sup.alphabet
    tags = localization.tags
    rsup_relevant = analyze_events(rsup, plant, verify=False).relevant
    rows = []
    baseline_rows = []
    per_agent = {}
    for tag in tags:
        env = controller_environment(localization, tag)
        relevant = analyze_events(localization.controllers[tag], env, verify=False).relevant
        subtotal = 0
        for other in tags:
            if other == tag:
                continue
            observed = tuple(sorted(relevant & alphabet.agent_events(other)))
            rows.append(CommRow(tag, other, observed, len(observed)))
            subtotal += len(observed)
            base = tuple(sorted(rsup_relevant & alphabet.agent_events(other)))
            baseline_rows.append(CommRow(tag, other, base, len(base)))
        per_agent[tag] = subtotal
    total = sum(r.count for r in rows)
    baseline_total = sum(r.count for r in baseline_rows)
    return CommunicationReport(tuple(rows), tuple(baseline_rows), per_agent, total, baseline_total)


@dataclass(frozen=True)
class RandomParams:
    """Knobs for the reproducible random-instance generator."""

    agents: int = 2
    max_states_per_agent: int = 5
    max_events_per_agent: int = 4
    spec_density: float = 0.85
    extra_transition_rate: float = 0.35
    marking_rate: float = 0.3

    def __post_init__(self):
        if self.agents < 1 or self.max_states_per_agent < 1 or self.max_events_per_agent < 2:
            raise PreconditionError("generator parameters must be positive (and allow 2 events)")


def _random_component(rng: random.Random, k: int, params: RandomParams) -> Automaton:
    n_events = rng.randrange(2, params.max_events_per_agent + 1)
    n_controllable = rng.randrange(1, n_events)
    base = 100 * (k + 1)
    tag = f"A{k + 1}"
    events = [Event(base + 1 + 2 * i, True, tag) for i in range(n_controllable)]
    events += [Event(base + 2 * i, False, tag) for i in range(n_events - n_controllable)]
    alpha = Alphabet.of(events)
    ids = list(alpha.ids_sorted)
    n = rng.randrange(1, params.max_states_per_agent + 1)
    trans = {}
    for state in range(1, n):
        # spanning transition from an earlier state keeps the graph connected
        placed = False
        src = rng.randrange(state)
        for candidate in list(range(src, state)) + list(range(0, src)):
            free = [eid for eid in ids if (candidate, eid) not in trans]
            if free:
                trans[(candidate, rng.choice(free))] = state
                placed = True
                break
        if not placed:
            break
    for state in range(n):
        for eid in ids:
            if (state, eid) in trans:
                continue
            if rng.random() < params.extra_transition_rate:
                trans[(state, eid)] = rng.randrange(n)
    marked = {0} | {s for s in range(1, n) if rng.random() < params.marking_rate}
    return trim(Automaton(alpha, n, 0, frozenset(marked), trans))


def random_instance(seed: int, params: RandomParams = RandomParams()) -> CaseStudy:
    """Reproducible random plant components plus a random sub-shuffle spec.

    Components are connected, trim, and own disjoint alphabets with at least
    one controllable and one uncontrollable event each.  The spec keeps each
    shuffle transition with probability ``spec_density`` and always marks the
    empty string.  Identical seed and parameters give identical instances.
    """
    rng = random.Random(seed)
    components = tuple(
        (f"A{k + 1}", _random_component(rng, k, params)) for k in range(params.agents)
    )
    shuffle = sync_all(*(aut for _, aut in components))
    trans = {
        key: t
        for key, t in sorted(shuffle.transitions.items())
        if rng.random() < params.spec_density
    }
    marked = {shuffle.initial}
    for s in sorted(shuffle.marked):
        if s == shuffle.initial or rng.random() < 0.7:
            marked.add(s)
    spec = trim(Automaton(shuffle.alphabet, shuffle.n_states, shuffle.initial, frozenset(marked), trans))
    return CaseStudy(f"rand{seed}", components, spec, None)


@dataclass(frozen=True)
class PipelineResult:
    """Everything one synthesis/reduction/localization/analysis run produces."""

    case: CaseStudy
    plant: Automaton
    synthesis: SynthesisResult
    rsup: Optional[Automaton]
    localization: Optional[Localization]
    verdict: Optional[Verdict]
    analyses: Mapping[str, EventAnalysis]  # "RSUP" plus one entry per agent
    theorem1: Optional[Theorem1Report]
    communication: Optional[CommunicationReport]
    decomposition: Optional[DecompositionResult]

    @property
    def sup(self) -> Automaton:
        return self.synthesis.supervisor

    @property
    def state_counts(self) -> dict:
        counts = {"SUP": self.sup.n_states}
        if self.rsup is not None:
            counts["RSUP"] = self.rsup.n_states
        if self.localization is not None:
            for tag in self.localization.tags:
                counts[f"LOC:{tag}"] = self.localization.controllers[tag].n_states
        return counts


def run_pipeline(case: CaseStudy, verify_vacuity: bool = True) -> PipelineResult:
    """Synthesize, reduce, localize and analyze one case study.

    An empty supervisor short-circuits the pipeline and reports trivially.
    Decomposability is checked when the case carries decomposition alphabets.
    """
    plant = case.plant
    synthesis = supcon(plant, case.spec)
    if synthesis.is_empty:
        return PipelineResult(
            case, plant, synthesis, None, None, None, {}, None, None, None
        )
    sup = synthesis.supervisor
    rsup = supreduce(sup, plant)
    loc = localize(sup, plant)
    analyses = {"RSUP": analyze_events(rsup, plant, verify=verify_vacuity)}
    for tag in loc.tags:
        env = controller_environment(loc, tag)
        analyses[tag] = analyze_events(loc.controllers[tag], env, verify=verify_vacuity)
    decomposition = None
    decomposable = None
    if case.expected is not None and case.expected.decomposition_alphabets is not None:
        decomposition = decomposability(sup, plant, case.expected.decomposition_alphabets)
        decomposable = decomposition.closed
    verdict = localizability_verdict(sup, rsup, loc, plant, decomposable=decomposable)
    theorem1 = check_theorem1(sup, rsup, loc, plant)
    communication = communication_report(loc, plant, rsup=rsup)
    return PipelineResult(
        case, plant, synthesis, rsup, loc, verdict, analyses, theorem1, communication, decomposition
    )
