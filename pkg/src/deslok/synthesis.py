"""Monolithic supervisor synthesis and language-level control predicates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .automaton import (
    Automaton,
    InternalInvariantError,
    PreconditionError,
    _bfs_order,
    _require_same_ids,
    _restricted,
    language_equal,
    language_subset,
    prefix_closure,
    project,
    selfloop_lift,
    sync_all,
    sync_product,
    sync_product_map,
    trim,
)


@dataclass(frozen=True)
class SynthesisResult:
    """Supervisor automaton plus the (plant state, spec state) origin of each state."""

    supervisor: Automaton
    product_map: tuple  # tuple[tuple[int, int], ...], empty for the empty result

    @property
    def is_empty(self) -> bool:
        return self.supervisor.is_empty


def _lift_spec(plant: Automaton, spec: Automaton) -> Automaton:
    if not spec.alphabet.ids <= plant.alphabet.ids:
        raise PreconditionError(
            f"spec events outside the plant alphabet: {sorted(spec.alphabet.ids - plant.alphabet.ids)}"
        )
    plant.alphabet.merged(spec.alphabet)  # flag agreement on shared events
    missing = sorted(plant.alphabet.ids - spec.alphabet.ids)
    if not missing:
        return spec
    return selfloop_lift(spec, (plant.alphabet.event(eid) for eid in missing))


def supcon(plant: Automaton, spec: Automaton) -> SynthesisResult:
    """Supremal controllable sublanguage of Lm(plant) ∩ Lm(spec).

    The spec is first lifted by self-loops to the plant alphabet.  The
    synthesis is the standard fixpoint on the plant x spec product: delete
    product states at which an uncontrollable plant-enabled event is disabled,
    re-trim, and repeat.  Returns the canonical empty result when the fixpoint
    is empty.  The supervisor is trim and renumbered by discovery order.
    """
    plant = trim(plant)
    spec_l = _lift_spec(plant, spec)
    prod, pairs = sync_product_map(plant, spec_l)
    alphabet = prod.alphabet
    sigma_u = sorted(alphabet.uncontrollable)

    alive = set(range(prod.n_states))
    while True:
        changed = False
        bad = set()
        for p in alive:
            q = pairs[p][0]
            for eid in sigma_u:
                if plant.step(q, eid) is None:
                    continue
                t = prod.step(p, eid)
                if t is None or t not in alive:
                    bad.add(p)
                    break
        if bad:
            alive -= bad
            changed = True
        if prod.initial not in alive:
            return SynthesisResult(Automaton.empty(alphabet), ())
        # trim within the surviving states
        reach = set(_bfs_order(prod, allowed=alive))
        rev: dict = {}
        for (s, eid), t in prod.transitions.items():
            if s in alive and t in alive:
                rev.setdefault(t, []).append(s)
        co = set(m for m in prod.marked if m in alive)
        stack = list(co)
        while stack:
            t = stack.pop()
            for s in rev.get(t, ()):
                if s not in co:
                    co.add(s)
                    stack.append(s)
        keep = reach & co
        if keep != alive:
            alive = keep
            changed = True
        if prod.initial not in alive:
            return SynthesisResult(Automaton.empty(alphabet), ())
        if not changed:
            break

    order = _bfs_order(prod, allowed=alive)
    sup = _restricted(prod, order)
    return SynthesisResult(sup, tuple(pairs[s] for s in order))


def is_controllable(k: Automaton, plant: Automaton) -> bool:
    """True iff no uncontrollable plant-enabled event is disabled by ``k``.

    Checked over all jointly reachable state pairs.  An empty supervisor (no
    marked states) is controllable by convention, matching the treatment of
    the empty synthesis result.
    """
    _require_same_ids(k, plant)
    if k.is_empty:
        return True
    sigma_u = sorted(plant.alphabet.uncontrollable)
    seen = {(k.initial, plant.initial)}
    dq = deque(seen)
    while dq:
        x, q = dq.popleft()
        for eid in sigma_u:
            if plant.step(q, eid) is not None and k.step(x, eid) is None:
                return False
        for eid in k.events_at(x):
            nq = plant.step(q, eid)
            if nq is None:
                continue
            succ = (k.transitions[(x, eid)], nq)
            if succ not in seen:
                seen.add(succ)
                dq.append(succ)
    return True


def control_equivalent(plant: Automaton, candidate, sup: Automaton) -> bool:
    """True iff the candidate controller, in closed loop with the plant,
    produces exactly the supervisor's closed and marked behavior.

    ``candidate`` may be a single automaton or an iterable of controllers
    whose meet is taken first.
    """
    if not isinstance(candidate, Automaton):
        candidate = sync_all(*candidate)
    loop = sync_product(plant, candidate)
    return language_equal(loop, sup)


def _erased_events(plant: Automaton, keep: frozenset) -> list:
    return [plant.alphabet.event(eid) for eid in sorted(plant.alphabet.ids - keep)]


def language_normal(k: Automaton, plant: Automaton, keep: Iterable[int]) -> bool:
    """Normality of the closed behavior: inverse-projecting its projection and
    intersecting with the plant's closed behavior gives it back."""
    keep = frozenset(keep)
    kc = prefix_closure(k)
    gc = prefix_closure(plant)
    lifted = selfloop_lift(project(kc, keep), _erased_events(plant, keep))
    return language_equal(sync_product(lifted, gc), kc)


def marked_language_normal(k: Automaton, plant: Automaton, keep: Iterable[int]) -> bool:
    """Marked-language analogue of ``language_normal``."""
    keep = frozenset(keep)
    kt = trim(k)
    gt = trim(plant)
    lifted = selfloop_lift(project(kt, keep), _erased_events(plant, keep))
    return language_equal(trim(sync_product(lifted, gt)), kt)


def _relative_observable(
    k: Automaton, ambient: Automaton, plant: Automaton, keep: frozenset
) -> bool:
    """Decide relative observability of Lm(k) w.r.t. the ambient language.

    Explores all pairs of strings (s, s') with equal projections, s inside
    k's closed behavior and s' inside the ambient's; a verifier state is
    (k state after s, (ambient, plant, optional-k state after s')).  At each
    verifier state two conditions are enforced: an extension of s kept by k
    and possible for s' in the plant must be kept after s' as well; and if s
    is marked by k while s' is marked by the plant, s' must be marked by k.
    """
    erased = sorted(plant.alphabet.ids - keep)
    observed = sorted(keep)
    start = (k.initial, (ambient.initial, plant.initial, k.initial))
    seen = {start}
    dq = deque([start])

    def right_after(cr, qr, xr, eid):
        nc = ambient.step(cr, eid)
        if nc is None:
            return None
        nq = plant.step(qr, eid)
        if nq is None:
            raise InternalInvariantError(
                "ambient behavior escaped the plant despite the containment check"
            )
        nx = k.step(xr, eid) if xr is not None else None
        return nc, nq, nx

    while dq:
        xl, (cr, qr, xr) = dq.popleft()
        for eid in plant.alphabet.ids_sorted:
            if k.step(xl, eid) is not None and plant.step(qr, eid) is not None:
                if xr is None or k.step(xr, eid) is None:
                    return False
        if xl in k.marked and qr in plant.marked:
            if xr is None or xr not in k.marked:
                return False
        for eid in erased:
            nl = k.step(xl, eid)
            if nl is not None:
                succ = (nl, (cr, qr, xr))
                if succ not in seen:
                    seen.add(succ)
                    dq.append(succ)
            right = right_after(cr, qr, xr, eid)
            if right is not None:
                succ = (xl, right)
                if succ not in seen:
                    seen.add(succ)
                    dq.append(succ)
        for eid in observed:
            nl = k.step(xl, eid)
            if nl is None:
                continue
            right = right_after(cr, qr, xr, eid)
            if right is None:
                continue
            succ = (nl, right)
            if succ not in seen:
                seen.add(succ)
                dq.append(succ)
    return True


def observability_check(
    k: Automaton,
    ambient: Optional[Automaton],
    plant: Automaton,
    keep: Iterable[int],
    mode: str = "relative",
) -> bool:
    """Observation-property check for the marked language of ``k``.

    mode="normal" evaluates the closed-language normality equation;
    mode="relative" checks relative observability w.r.t. the ambient
    automaton's closed behavior; mode="observable" is the ambient=k special
    case.  These are exact set computations, no tolerances involved.
    """
    if mode not in ("observable", "relative", "normal"):
        raise ValueError(f"unknown mode {mode!r}")
    keep = frozenset(keep)
    if not keep <= plant.alphabet.ids:
        raise PreconditionError(
            f"observation events outside the alphabet: {sorted(keep - plant.alphabet.ids)}"
        )
    _require_same_ids(k, plant)
    if mode == "normal":
        return language_normal(k, plant, keep)
    if mode == "observable" or ambient is None:
        ambient = k
    _require_same_ids(ambient, plant)
    if not language_subset(k, ambient):
        raise PreconditionError("the checked language is not contained in the ambient one")
    if not language_subset(ambient, plant):
        raise PreconditionError("the ambient language is not contained in the plant's")
    return _relative_observable(k, ambient, plant, keep)
