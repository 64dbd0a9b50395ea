"""Text format for automata: parsing with line-numbered diagnostics, canonical
serialization, and an exact round trip between the two.

Format, one declaration per line (blank lines and ``#`` comments ignored)::

    des NAME
    states N
    initial I
    marked I [I ...]
    event ID [c|u] [agent=TAG]
    trans FROM ID TO

Events declared without a c/u flag fall back to the odd-id = controllable
convention, and the parse attaches a warning naming them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .automaton import Alphabet, Automaton, Event

_NAME_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


class ModelFormatError(ValueError):
    """Malformed model text; the message carries the offending line number."""


@dataclass
class ModelFile:
    """A named automaton plus any warnings attached while parsing."""

    name: str
    automaton: Automaton
    warnings: tuple = ()


def _fail(lineno: int, message: str):
    raise ModelFormatError(f"line {lineno}: {message}")


def _parse_int(lineno: int, token: str, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        _fail(lineno, f"{what} must be an integer, got {token!r}")
    if value < 0:
        _fail(lineno, f"{what} must be non-negative, got {value}")
    return value


def parse_model(text: str) -> ModelFile:
    name = None
    n_states = None
    initial = None
    marked = None
    events = {}  # eid -> (controllable flag or None, agent, lineno)
    transitions = {}
    trans_lines = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, args = tokens[0], tokens[1:]
        if name is None and kind != "des":
            _fail(lineno, "the file must start with a 'des <name>' header")
        if kind == "des":
            if name is not None:
                _fail(lineno, "duplicate 'des' header")
            if len(args) != 1 or not _NAME_RE.match(args[0]):
                _fail(lineno, "expected 'des <name>' with a simple name")
            name = args[0]
        elif kind == "states":
            if n_states is not None:
                _fail(lineno, "duplicate 'states' line")
            if len(args) != 1:
                _fail(lineno, "expected 'states <count>'")
            n_states = _parse_int(lineno, args[0], "state count")
            if n_states == 0:
                _fail(lineno, "an automaton needs at least one state")
        elif kind == "initial":
            if initial is not None:
                _fail(lineno, "duplicate 'initial' line")
            if len(args) != 1:
                _fail(lineno, "expected 'initial <state>'")
            initial = _parse_int(lineno, args[0], "initial state")
        elif kind == "marked":
            if marked is not None:
                _fail(lineno, "duplicate 'marked' line")
            marked = [_parse_int(lineno, tok, "marked state") for tok in args]
        elif kind == "event":
            if not args:
                _fail(lineno, "expected 'event <id> [c|u] [agent=<tag>]'")
            eid = _parse_int(lineno, args[0], "event id")
            flag = None
            agent = None
            for tok in args[1:]:
                if tok in ("c", "u"):
                    if flag is not None:
                        _fail(lineno, f"event {eid}: repeated controllability flag")
                    flag = tok == "c"
                elif tok.startswith("agent="):
                    if agent is not None:
                        _fail(lineno, f"event {eid}: repeated agent tag")
                    agent = tok[len("agent="):]
                    if not agent:
                        _fail(lineno, f"event {eid}: empty agent tag")
                else:
                    _fail(lineno, f"event {eid}: unrecognized token {tok!r}")
            if eid in events:
                old_flag, old_agent, old_line = events[eid]
                if (old_flag, old_agent) != (flag, agent):
                    _fail(
                        lineno,
                        f"event {eid} redeclared with conflicting flags "
                        f"(first declared on line {old_line})",
                    )
                _fail(lineno, f"duplicate declaration of event {eid}")
            events[eid] = (flag, agent, lineno)
        elif kind == "trans":
            if len(args) != 3:
                _fail(lineno, "expected 'trans <from> <event> <to>'")
            src = _parse_int(lineno, args[0], "source state")
            eid = _parse_int(lineno, args[1], "event id")
            dst = _parse_int(lineno, args[2], "target state")
            trans_lines.append((lineno, src, eid, dst))
        else:
            _fail(lineno, f"unknown declaration {kind!r}")

    if name is None:
        raise ModelFormatError("empty model: missing 'des' header")
    if n_states is None:
        raise ModelFormatError(f"model {name}: missing 'states' line")
    if initial is None:
        raise ModelFormatError(f"model {name}: missing 'initial' line")
    if initial >= n_states:
        raise ModelFormatError(f"model {name}: initial state {initial} out of range")

    warnings = []
    unflagged = sorted(eid for eid, (flag, _, _) in events.items() if flag is None)
    if unflagged:
        warnings.append(
            "events without c/u flag use the odd-id = controllable convention: "
            + " ".join(str(e) for e in unflagged)
        )
    alphabet = Alphabet.of(
        Event(eid, flag if flag is not None else bool(eid % 2), agent)
        for eid, (flag, agent, _) in events.items()
    )

    for lineno, src, eid, dst in trans_lines:
        if eid not in events:
            _fail(lineno, f"transition uses undeclared event {eid}")
        if src >= n_states or dst >= n_states:
            _fail(lineno, f"transition ({src},{eid})->{dst} references a state out of range")
        if (src, eid) in transitions:
            _fail(lineno, f"duplicate transition from state {src} on event {eid}")
        transitions[(src, eid)] = dst

    marked_set = frozenset(marked or ())
    for s in marked_set:
        if s >= n_states:
            raise ModelFormatError(f"model {name}: marked state {s} out of range")

    automaton = Automaton(alphabet, n_states, initial, marked_set, transitions)
    return ModelFile(name, automaton, tuple(warnings))


def serialize_model(aut: Automaton, name: str) -> str:
    """Canonical text form: flags always explicit, everything sorted."""
    if not _NAME_RE.match(name):
        raise ValueError(f"not a valid model name: {name!r}")
    lines = [f"des {name}", f"states {aut.n_states}", f"initial {aut.initial}"]
    lines.append(("marked " + " ".join(str(s) for s in sorted(aut.marked))).rstrip())
    for ev in aut.alphabet.events:
        decl = f"event {ev.eid} {'c' if ev.controllable else 'u'}"
        if ev.agent is not None:
            decl += f" agent={ev.agent}"
        lines.append(decl)
    for (src, eid), dst in sorted(aut.transitions.items()):
        lines.append(f"trans {src} {eid} {dst}")
    return "\n".join(lines) + "\n"
