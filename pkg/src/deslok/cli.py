"""Command-line front end: model-file pipeline commands, built-in case
studies, property sweeps, and human/machine-readable reports.

Identical inputs and flags produce byte-identical model files and reports;
wall-clock timing goes to standard error only.  Exit status 0 on success, 1
when ``--assert-expected`` finds a verdict mismatch, 2 on usage or parse
errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .automaton import (
    Automaton,
    FlagConflictError,
    PreconditionError,
    des_isomorphism,
    language_equal,
    sync_all,
)
from .eventred import (
    PipelineResult,
    RandomParams,
    check_theorem1,
    controller_environment,
    is_decomposable,
    random_instance,
    run_pipeline,
)
from .localization import is_local_controller
from .modelfile import ModelFormatError, parse_model, serialize_model
from .models import guideway, shared_resource, transfer_line
from .reduction import is_normal_supervisor
from .synthesis import is_controllable, observability_check, supcon

SCHEMA = "deslok.report/1"

EXIT_OK = 0
EXIT_ASSERT = 1
EXIT_USAGE = 2


@dataclass
class ReportDocument:
    """Structured result record; round-trips losslessly through JSON."""

    command: str
    inputs: list
    verdict: dict = None
    vacuous: dict = None
    relevant: dict = None
    state_counts: dict = None
    witnesses: dict = None
    communication: dict = None
    seed: str = None

    def to_json(self) -> str:
        payload = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "vacuous": self.vacuous,
            "relevant": self.relevant,
            "stateCounts": self.state_counts,
            "witnesses": self.witnesses,
            "communication": self.communication,
            "seed": self.seed,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        payload = json.loads(text)
        if payload.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema: {payload.get('schema')!r}")
        return cls(
            command=payload["command"],
            inputs=payload["inputs"],
            verdict=payload["verdict"],
            vacuous=payload["vacuous"],
            relevant=payload["relevant"],
            state_counts=payload["stateCounts"],
            witnesses=payload["witnesses"],
            communication=payload["communication"],
            seed=payload["seed"],
        )


def _color_enabled() -> bool:
    if os.environ.get("DESLOK_COLOR") == "0":
        return False
    return sys.stdout.isatty()


def _head(text: str) -> str:
    if _color_enabled():
        return f"\033[1m{text}\033[0m"
    return text


def _fmt_events(events) -> str:
    return "{" + ",".join(str(e) for e in events) + "}"


def report_from_pipeline(command: str, inputs: list, result: PipelineResult) -> ReportDocument:
    if result.rsup is None:
        return ReportDocument(
            command=command,
            inputs=inputs,
            verdict=None,
            state_counts={"SUP": result.sup.n_states, "empty": True},
        )
    verdict = result.verdict
    state_counts = {
        "SUP": result.sup.n_states,
        "RSUP": result.rsup.n_states,
        "LOC": {tag: result.localization.controllers[tag].n_states for tag in result.localization.tags},
    }
    witnesses = {}
    for tag, w in verdict.witnesses.items():
        witnesses[tag] = {
            "locStates": w.loc_states,
            "rsupStates": w.rsup_states,
            "relevant": list(w.relevant),
            "vacuous": list(w.vacuous),
            "foreignSelfLooped": list(w.foreign_selflooped),
            "rsupRelevant": list(w.rsup_relevant),
            "alphabetSize": w.alphabet_size,
        }
    for entry in result.theorem1.entries:
        witnesses[entry.tag]["theorem1"] = {
            "premise": entry.premise,
            "witnesses": list(entry.witnesses),
            "selfLoopWitnesses": list(entry.selfloop_witnesses),
            "retainedWitnesses": list(entry.retained_witnesses),
            "counterexample": entry.counterexample,
        }
    comm = result.communication
    communication = {
        "rows": [
            {"observer": r.observer, "owner": r.owner, "events": list(r.events), "count": r.count}
            for r in comm.rows
        ],
        "baselineRows": [
            {"observer": r.observer, "owner": r.owner, "events": list(r.events), "count": r.count}
            for r in comm.baseline_rows
        ],
        "total": comm.total,
        "baselineTotal": comm.baseline_total,
    }
    return ReportDocument(
        command=command,
        inputs=inputs,
        verdict={
            "stateLocalizable": verdict.state_localizable,
            "eventLocalizable": verdict.event_localizable,
            "decomposable": verdict.decomposable,
        },
        vacuous={name: sorted(a.vacuous) for name, a in result.analyses.items()},
        relevant={name: sorted(a.relevant) for name, a in result.analyses.items()},
        state_counts=state_counts,
        witnesses=witnesses,
        communication=communication,
    )


def render_report(doc: ReportDocument) -> str:
    lines = [_head(f"== {doc.command} report ==")]
    if doc.state_counts:
        if doc.state_counts.get("empty"):
            lines.append("supervisor: EMPTY (no admissible behavior)")
            return "\n".join(lines) + "\n"
        parts = [f"SUP={doc.state_counts['SUP']}", f"RSUP={doc.state_counts['RSUP']}"]
        for tag, n in sorted(doc.state_counts.get("LOC", {}).items()):
            parts.append(f"LOC[{tag}]={n}")
        lines.append("state counts: " + " ".join(parts))
    if doc.verdict:
        v = doc.verdict
        dec = v.get("decomposable")
        dec_text = "n/a" if dec is None else str(dec).lower()
        lines.append(
            f"verdict: stateLocalizable={str(v['stateLocalizable']).lower()} "
            f"eventLocalizable={str(v['eventLocalizable']).lower()} "
            f"decomposable={dec_text}"
        )
    if doc.relevant:
        for name in sorted(doc.relevant):
            lines.append(
                f"{name}: relevant={_fmt_events(doc.relevant[name])} "
                f"vacuous={_fmt_events(doc.vacuous[name])}"
            )
    if doc.witnesses:
        for tag in sorted(doc.witnesses):
            w = doc.witnesses[tag]
            t1 = w.get("theorem1")
            if t1 is None:
                continue
            if not t1["premise"]:
                lines.append(f"theorem-1 [{tag}]: skipped (controller not smaller than RSUP)")
            elif t1["counterexample"]:
                lines.append(
                    f"theorem-1 [{tag}]: COUNTEREXAMPLE "
                    f"(self-loop tier {_fmt_events(t1['selfLoopWitnesses'])}, "
                    f"retained tier {_fmt_events(t1['retainedWitnesses'])})"
                )
            else:
                lines.append(f"theorem-1 [{tag}]: witnesses {_fmt_events(t1['witnesses'])}")
    if doc.communication:
        lines.append(
            f"communication: total={doc.communication['total']} "
            f"baseline={doc.communication['baselineTotal']}"
        )
        for row in doc.communication["rows"]:
            lines.append(
                f"  {row['observer']} <- {row['owner']}: {_fmt_events(row['events'])} ({row['count']})"
            )
    return "\n".join(lines) + "\n"


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFormatError(f"cannot read {path}: {exc}") from exc
    try:
        model = parse_model(text)
    except ModelFormatError as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
    for warning in model.warnings:
        print(f"{path}: warning: {warning}", file=sys.stderr)
    return model


def _write_model(outdir: str, name: str, aut: Automaton):
    path = Path(outdir) / f"{name}.des"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_model(aut, name), encoding="utf-8")
    print(f"wrote {path}")


def _write_report(doc: ReportDocument, path: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(doc.to_json(), encoding="utf-8")
    print(f"wrote {path}")


def _parse_event_list(text: str) -> list:
    if not text.strip():
        return []
    return [int(tok) for tok in text.replace(",", " ").split()]


def _cmd_sync(args) -> int:
    models = [_load(p) for p in args.files]
    product = sync_all(*(m.automaton for m in models))
    _write_model(args.out, args.name, product)
    print(f"states: {product.n_states}")
    return EXIT_OK


def _cmd_supcon(args) -> int:
    plant = _load(args.plant).automaton
    spec = _load(args.spec).automaton
    result = supcon(plant, spec)
    _write_model(args.out, "SUP", result.supervisor)
    print(f"states: {result.supervisor.n_states}" + (" (EMPTY)" if result.is_empty else ""))
    return EXIT_OK


def _cmd_supreduce(args) -> int:
    from .reduction import supreduce

    plant = _load(args.plant).automaton
    sup = _load(args.sup).automaton
    rsup = supreduce(sup, plant)
    _write_model(args.out, "RSUP", rsup)
    print(f"states: {rsup.n_states}")
    return EXIT_OK


def _cmd_localize(args) -> int:
    from .localization import localize

    plant = _load(args.plant).automaton
    sup = _load(args.sup).automaton
    loc = localize(sup, plant)
    for tag in loc.tags:
        _write_model(args.out, f"LOC_{tag}", loc.controllers[tag])
    print(f"controllers: {' '.join(loc.tags)}")
    return EXIT_OK


def _pipeline_from_files(args):
    """Analysis for an externally supplied supervisor (no resynthesis)."""
    from .eventred import analyze_events, communication_report, localizability_verdict
    from .localization import localize
    from .reduction import supreduce
    from .synthesis import SynthesisResult

    plant = _load(args.plant).automaton
    sup = _load(args.sup).automaton
    rsup = supreduce(sup, plant)
    loc = localize(sup, plant)
    analyses = {"RSUP": analyze_events(rsup, plant)}
    for tag in loc.tags:
        analyses[tag] = analyze_events(loc.controllers[tag], controller_environment(loc, tag))
    verdict = localizability_verdict(sup, rsup, loc, plant)
    theorem1 = check_theorem1(sup, rsup, loc, plant)
    communication = communication_report(loc, plant, rsup=rsup)
    result = PipelineResult(
        case=None,
        plant=plant,
        synthesis=SynthesisResult(sup, ()),
        rsup=rsup,
        localization=loc,
        verdict=verdict,
        analyses=analyses,
        theorem1=theorem1,
        communication=communication,
        decomposition=None,
    )
    return result, [args.plant, args.sup]


def _cmd_eventred(args) -> int:
    result, inputs = _pipeline_from_files(args)
    doc = report_from_pipeline("eventred", inputs, result)
    if args.out:
        _write_model(args.out, "RSUP", result.rsup)
        for tag in result.localization.tags:
            _write_model(args.out, f"LOC_{tag}", result.localization.controllers[tag])
    sys.stdout.write(render_report(doc))
    if args.report:
        _write_report(doc, args.report)
    return EXIT_OK


def _cmd_check(args) -> int:
    kind = args.kind
    if kind == "controllability":
        plant = _load(args.files[0]).automaton
        k = _load(args.files[1]).automaton
        holds = is_controllable(k, plant)
    elif kind == "equivalence":
        plant = _load(args.files[0]).automaton
        candidate = _load(args.files[1]).automaton
        sup = _load(args.files[2]).automaton
        from .synthesis import control_equivalent

        holds = control_equivalent(plant, candidate, sup)
    elif kind == "normality":
        candidate = _load(args.files[0]).automaton
        sup = _load(args.files[1]).automaton
        holds = is_normal_supervisor(candidate, sup)
    elif kind == "observability":
        plant = _load(args.files[0]).automaton
        k = _load(args.files[1]).automaton
        ambient = _load(args.ambient).automaton if args.ambient else None
        if args.keep is None:
            raise PreconditionError("observability check needs --keep")
        holds = observability_check(k, ambient, plant, _parse_event_list(args.keep), args.mode)
    elif kind == "decomposability":
        plant = _load(args.files[0]).automaton
        k = _load(args.files[1]).automaton
        if not args.alphabets:
            raise PreconditionError("decomposability check needs --alphabets")
        alphabets = [
            _parse_event_list(chunk) for chunk in args.alphabets.split(";") if chunk.strip()
        ]
        holds = is_decomposable(k, plant, alphabets)
    else:  # pragma: no cover - argparse restricts choices
        raise PreconditionError(f"unknown check {kind!r}")
    print(f"{kind}: {'true' if holds else 'false'}")
    if args.assert_expected and not holds:
        return EXIT_ASSERT
    return EXIT_OK


_CASES = {
    "sharedresource": lambda args: shared_resource(),
    "guideway": lambda args: guideway(sections=args.sections, cyclic=not args.noncyclic),
    "transferline": lambda args: transfer_line(*args.caps),
}


def _check_expected(result: PipelineResult) -> list:
    """Mismatch descriptions between a pipeline run and the case's record."""
    expected = result.case.expected
    problems = []
    if expected is None:
        return problems
    v = result.verdict
    if v.state_localizable != expected.state_localizable:
        problems.append(
            f"stateLocalizable: got {v.state_localizable}, expected {expected.state_localizable}"
        )
    if v.event_localizable != expected.event_localizable:
        problems.append(
            f"eventLocalizable: got {v.event_localizable}, expected {expected.event_localizable}"
        )
    if expected.decomposable is not None and result.decomposition is not None:
        if result.decomposition.closed != expected.decomposable:
            problems.append(
                f"decomposable: got {result.decomposition.closed}, expected {expected.decomposable}"
            )
    loc = result.localization
    if expected.loc_isomorphic_to_sup:
        for tag in loc.tags:
            if des_isomorphism(loc.controllers[tag], result.sup) is None:
                problems.append(f"LOC[{tag}] is not isomorphic to SUP")
    if expected.loc_states_match_rsup:
        for tag in loc.tags:
            if loc.controllers[tag].n_states != result.rsup.n_states:
                problems.append(f"|LOC[{tag}]| != |RSUP|")
    if expected.loc_states_below_rsup:
        for tag in loc.tags:
            if not loc.controllers[tag].n_states < result.rsup.n_states:
                problems.append(f"|LOC[{tag}]| not below |RSUP|")
    for tag, required in expected.vacuous_superset.items():
        got = result.analyses[tag].vacuous
        if not required <= got:
            problems.append(
                f"vacuous[{tag}] missing {_fmt_events(sorted(required - got))}"
            )
    for tag, required in expected.relevant_exact.items():
        got = result.analyses[tag].relevant
        if got != required:
            problems.append(
                f"relevant[{tag}]: got {_fmt_events(sorted(got))}, expected {_fmt_events(sorted(required))}"
            )
    if expected.state_counts is not None:
        if result.state_counts != dict(expected.state_counts):
            problems.append(
                f"state counts: got {result.state_counts}, expected {dict(expected.state_counts)}"
            )
    return problems


def _cmd_demo(args) -> int:
    case = _CASES[args.case](args)
    t0 = time.perf_counter()
    result = run_pipeline(case)
    elapsed = time.perf_counter() - t0
    doc = report_from_pipeline(f"demo {case.name}", [case.name], result)
    sys.stdout.write(render_report(doc))
    if args.case == "guideway" and result.rsup is not None:
        sigma = result.plant.alphabet.ids
        relobs = observability_check(
            result.sup, result.sup, result.plant, sigma - {13, 23}, "relative"
        )
        print(f"relative observability of SUP without {{13,23}}: {'true' if relobs else 'false'}")
    print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    if args.out:
        _write_model(args.out, "PLANT", result.plant)
        _write_model(args.out, "SPEC", case.spec)
        _write_model(args.out, "SUP", result.sup)
        _write_model(args.out, "RSUP", result.rsup)
        for tag in result.localization.tags:
            _write_model(args.out, f"LOC_{tag}", result.localization.controllers[tag])
    if args.report:
        _write_report(doc, args.report)
    if args.assert_expected:
        problems = _check_expected(result)
        for problem in problems:
            print(f"expected-result mismatch: {problem}", file=sys.stderr)
        if problems:
            return EXIT_ASSERT
    return EXIT_OK


def _randtest_one(payload):
    seed, params = payload
    case = random_instance(seed, params)
    plant = case.plant
    result = run_pipeline(case)
    if result.rsup is None:
        return seed, f"seed {seed}: EMPTY", True, False
    ok = True
    for tag in result.localization.tags:
        env = controller_environment(result.localization, tag)
        if not is_local_controller(
            result.localization.controllers[tag], env, plant.alphabet.own_controllable(tag)
        ):
            ok = False
    t1 = result.theorem1
    verdict = result.verdict
    line = (
        f"seed {seed}: sup={result.sup.n_states} rsup={result.rsup.n_states} "
        f"loc={','.join(str(result.localization.controllers[t].n_states) for t in result.localization.tags)} "
        f"verdict=({str(verdict.state_localizable).lower()},{str(verdict.event_localizable).lower()}) "
        f"theorem1={'ok' if t1.ok else 'COUNTEREXAMPLE'}"
    )
    return seed, line, ok, not t1.ok


def _cmd_randtest(args) -> int:
    try:
        lo, hi = args.seeds.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise PreconditionError(f"--seeds wants a range like 0..499, got {args.seeds!r}")
    params = RandomParams(
        agents=args.agents,
        max_states_per_agent=args.max_states,
        max_events_per_agent=args.max_events,
        spec_density=args.density,
    )
    seeds = list(range(lo, hi + 1))
    t0 = time.perf_counter()
    payloads = [(seed, params) for seed in seeds]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_randtest_one, payloads, chunksize=16))
    else:
        rows = [_randtest_one(p) for p in payloads]
    elapsed = time.perf_counter() - t0
    empty = 0
    invariant_failures = 0
    counterexamples = []
    for seed, line, ok, ce in rows:
        print(line)
        if line.endswith("EMPTY"):
            empty += 1
        if not ok:
            invariant_failures += 1
        if ce:
            counterexamples.append(seed)
    print(
        f"summary: seeds={len(seeds)} empty={empty} "
        f"localController-failures={invariant_failures} "
        f"theorem1-counterexamples={len(counterexamples)}"
    )
    print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    if args.report:
        doc = ReportDocument(
            command="randtest",
            inputs=[],
            seed=args.seeds,
            witnesses={
                "summary": {
                    "seeds": len(seeds),
                    "empty": empty,
                    "localControllerFailures": invariant_failures,
                    "theorem1Counterexamples": counterexamples,
                }
            },
        )
        _write_report(doc, args.report)
    if args.assert_expected and (invariant_failures or counterexamples):
        return EXIT_ASSERT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deslok",
        description="Supervisor synthesis, reduction, localization and event-reduction analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sync", help="synchronous product of model files")
    p.add_argument("files", nargs="+")
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="SYNC")
    p.set_defaults(func=_cmd_sync)

    p = sub.add_parser("supcon", help="supremal controllable supervisor")
    p.add_argument("plant")
    p.add_argument("spec")
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_supcon)

    p = sub.add_parser("supreduce", help="reduced supervisor via control congruence")
    p.add_argument("plant")
    p.add_argument("sup")
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_supreduce)

    p = sub.add_parser("localize", help="per-agent local controllers")
    p.add_argument("plant")
    p.add_argument("sup")
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_localize)

    p = sub.add_parser("eventred", help="event-reduction analysis of a supervisor")
    p.add_argument("plant")
    p.add_argument("sup")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=_cmd_eventred)

    p = sub.add_parser("check", help="decision procedures on model files")
    p.add_argument(
        "kind",
        choices=["equivalence", "controllability", "observability", "normality", "decomposability"],
    )
    p.add_argument("files", nargs="+")
    p.add_argument("--keep", help="observable events, comma separated")
    p.add_argument("--mode", default="relative", choices=["observable", "relative", "normal"])
    p.add_argument("--ambient", help="ambient model file for relative observability")
    p.add_argument("--alphabets", help="semicolon-separated event lists")
    p.add_argument("--assert-expected", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("demo", help="run a built-in case study")
    p.add_argument("case", choices=sorted(_CASES))
    p.add_argument("--sections", type=int, default=4)
    p.add_argument("--noncyclic", action="store_true")
    p.add_argument(
        "--caps",
        type=lambda s: tuple(int(x) for x in s.split(",")),
        default=(3, 1),
        help="transfer-line buffer capacities, e.g. 3,1",
    )
    p.add_argument("--out")
    p.add_argument("--report")
    p.add_argument("--assert-expected", action="store_true")
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("randtest", help="seeded random property sweep")
    p.add_argument("--seeds", required=True, help="inclusive range, e.g. 0..499")
    p.add_argument("--agents", type=int, default=2)
    p.add_argument("--max-states", type=int, default=5)
    p.add_argument("--max-events", type=int, default=4)
    p.add_argument("--density", type=float, default=0.85)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report")
    p.add_argument("--assert-expected", action="store_true")
    p.set_defaults(func=_cmd_randtest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ModelFormatError, PreconditionError, FlagConflictError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
