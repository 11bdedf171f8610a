"""Command-line surface.

Subcommands: run, axioms, check-model, witness, compile-dtm, modal-check,
deutsch, dj, csat, parallelizable.  Data goes to stdout, diagnostics to
stderr as JSON; exit codes: 0 success, 1 domain failure (a mismatch or a
failed check), 2 usage or precondition error.  The default step budget
comes from the PARTMLAB_MAX_STEPS environment variable (fallback 200).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .axioms import (
    TraceModel,
    VARIANT_FOL,
    emit_theory,
    model_check_window,
    search_contradiction,
    serialize_theory,
)
from .classical import dtm_run, ndtm_run_all
from .epartm import epartm_acceptance, epartm_run
from .errors import PrecondError
from .machine import DslError, parse_machine, serialize_machine
from .modal import KernelCheckError, check_catalog
from .partm import partm_run
from .problems import (
    brute_force_classification,
    build_deutsch,
    build_deutsch_jozsa,
    check_parallelizable,
    csat_compile,
    csat_phase3_time,
    entry_times,
    oracle_by_name,
    parse_dimacs,
    run_deutsch,
    spliced_entry_state,
)
from .trackdtm import simulate_and_compare


def _default_steps() -> int:
    return int(os.environ.get("PARTMLAB_MAX_STEPS", "200"))


def _load_machine(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_machine(fh.read())


def _emit(doc, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(doc, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(doc if isinstance(doc, str) else json.dumps(doc, ensure_ascii=False, indent=2) + "\n")


def _text_trace_lines(trace_json: dict) -> str:
    lines = []
    for step in trace_json["trace"]:
        if "active" in step:
            active = " ".join(f"{s}@{p}" for s, p in step["active"])
            cells = " ".join(f"{p}:{{{','.join(syms)}}}" for p, syms in step["cells"].items())
            lines.append(f"t={step['t']} {active} | {cells}")
        elif "configs" in step:
            parts = [
                f"{c['state']}@{c['pos']}x{c['count']}:{c['cells']}" for c in step["configs"]
            ]
            lines.append(f"t={step['t']} " + " | ".join(parts))
        else:
            cells = " ".join(f"{p}:{s}" for p, s in step["cells"].items())
            lines.append(f"t={step['t']} {step['state']}@{step['pos']} | {cells}")
    lines.append(f"halted={trace_json['halted']} truncated={trace_json['truncated']}")
    return "\n".join(lines) + "\n"


def _cmd_run(args) -> int:
    machine = _load_machine(args.machine)
    steps = args.max_steps
    if args.semantics == "dtm":
        doc = dtm_run(machine, args.input, steps).to_json()
    elif args.semantics == "ndtm":
        doc = ndtm_run_all(machine, args.input, steps).to_json()
    elif args.semantics == "partm":
        trace = partm_run(machine, args.input, steps)
        doc = trace.to_json()
        if args.report_dir:
            from .report import write_trace_report

            for path in write_trace_report(trace, machine.blank, args.report_dir):
                print(f"wrote {path}", file=sys.stderr)
    else:
        doc = epartm_run(machine, args.input, steps, dedup=args.dedup).to_json()
    if args.format == "json":
        _emit(doc, "json")
    elif "trace" in doc:
        sys.stdout.write(_text_trace_lines(doc))
    else:
        _emit(doc, "json")
    return 0


def _cmd_axioms(args) -> int:
    machine = _load_machine(args.machine)
    theory = emit_theory(machine, args.input, args.variant)
    sys.stdout.write(serialize_theory(theory, args.format))
    return 0


def _cmd_check_model(args) -> int:
    machine = _load_machine(args.machine)
    theory = emit_theory(machine, args.input, VARIANT_FOL)
    trace = dtm_run(machine, args.input, args.max_steps)
    model = TraceModel.from_dtm_trace(machine, trace)
    report = model_check_window(theory, model)
    _emit(report.to_json(), "json")
    return 0 if not report.failures() else 1


def _cmd_witness(args) -> int:
    machine = _load_machine(args.machine)
    found = search_contradiction(machine, args.input, args.max_steps)
    doc = {
        "witness": found.witness.to_json() if found.witness else None,
        "truncated": found.truncated,
    }
    _emit(doc, "json")
    return 0


def _cmd_compile_dtm(args) -> int:
    machine = _load_machine(args.machine)
    report = simulate_and_compare(machine, args.input, args.steps)
    if args.report_dir:
        from .report import write_equivalence_report

        for path in write_equivalence_report(report, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    _emit(report.to_json(), "json")
    return 0 if report.all_matched and report.halted_in_sync else 1


def _cmd_modal_check(args) -> int:
    try:
        report = check_catalog(strict=True)
    except KernelCheckError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        report = check_catalog(strict=False)
        _emit(report, "json")
        return 1
    _emit(report, "json")
    return 0


def _cmd_deutsch(args) -> int:
    oracle = oracle_by_name(args.oracle, 1)
    machine = build_deutsch(oracle)
    verdict, trace = run_deutsch(machine, 1, args.max_steps)
    entry = spliced_entry_state(machine, oracle)
    doc = {
        "oracle": oracle.name,
        "verdict": verdict,
        "meaning": "balanced" if verdict else "constant",
        "oracle_entries": len(entry_times(trace, entry)),
    }
    if args.show_machine:
        doc["machine"] = serialize_machine(machine)
    _emit(doc, "json")
    return 0


def _cmd_dj(args) -> int:
    oracle = oracle_by_name(args.oracle, args.n)
    machine = build_deutsch_jozsa(args.n, oracle)
    verdict, trace = run_deutsch(machine, args.n, args.max_steps)
    doc = {
        "n": args.n,
        "oracle": oracle.name,
        "verdict": verdict,
        "meaning": "non-constant" if verdict else "constant",
        "classification": brute_force_classification(oracle),
    }
    _emit(doc, "json")
    return 0


def _cmd_csat(args) -> int:
    with open(args.cnf, "r", encoding="utf-8") as fh:
        cnf = parse_dimacs(fh.read())
    machine = csat_compile(cnf)
    budget = args.max_steps or (csat_phase3_time(cnf) + 4)
    trace = epartm_run(machine, "", budget)
    if not trace.halted:
        raise PrecondError("CSAT machine did not halt within budget")
    frac = epartm_acceptance(trace.final, machine)
    doc = {
        "satisfiable": frac.m == frac.n,
        "m": frac.m,
        "n": frac.n,
        "steps": trace.final.time,
    }
    _emit(doc, "json")
    return 0


def _cmd_parallelizable(args) -> int:
    oracle = oracle_by_name(args.oracle, args.n)
    report = check_parallelizable(oracle, args.n, args.max_steps)
    _emit({"oracle": oracle.name, "n": args.n, **report.to_json()}, "json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partmlab",
        description="Run machines under four semantics, emit and check their "
        "first-order theories, compile to track machines, and run the demos.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a machine file under a chosen semantics")
    p.add_argument("machine")
    p.add_argument("--semantics", choices=("dtm", "ndtm", "partm", "epartm"), required=True)
    p.add_argument("--input", default="")
    p.add_argument("--max-steps", type=int, default=_default_steps())
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.add_argument("--dedup", action="store_true", help="merge duplicate superposed configurations")
    p.add_argument("--report-dir", help="write trace.csv and trace.png here (partm only)")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("axioms", help="emit the intrinsic theory of machine-on-input")
    p.add_argument("machine")
    p.add_argument("--input", default="")
    p.add_argument("--variant", choices=("fol", "lfi1", "s5q"), default="fol")
    p.add_argument("--format", choices=("sexp", "text"), default="sexp")
    p.set_defaults(fn=_cmd_axioms)

    p = sub.add_parser("check-model", help="model-check the theory against the machine's own run")
    p.add_argument("machine")
    p.add_argument("--input", default="")
    p.add_argument("--max-steps", type=int, default=_default_steps())
    p.set_defaults(fn=_cmd_check_model)

    p = sub.add_parser("witness", help="search a multiplicity contradiction witness")
    p.add_argument("machine")
    p.add_argument("--input", default="")
    p.add_argument("--max-steps", type=int, default=_default_steps())
    p.set_defaults(fn=_cmd_witness)

    p = sub.add_parser("compile-dtm", help="compile to a track machine and compare step by step")
    p.add_argument("machine")
    p.add_argument("--input", default="")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--report-dir", help="write cycles.csv and cycles.png here")
    p.set_defaults(fn=_cmd_compile_dtm)

    p = sub.add_parser("modal-check", help="verify the modal connective catalog")
    p.set_defaults(fn=_cmd_modal_check)

    p = sub.add_parser("deutsch", help="build and run the two-query-free oracle test")
    p.add_argument("--oracle", default="const1")
    p.add_argument("--max-steps", type=int, default=_default_steps())
    p.add_argument("--show-machine", action="store_true")
    p.set_defaults(fn=_cmd_deutsch)

    p = sub.add_parser("dj", help="the n-bit generalization of the oracle test")
    p.add_argument("-n", type=int, default=2)
    p.add_argument("--oracle", default="const1")
    p.add_argument("--max-steps", type=int, default=_default_steps())
    p.set_defaults(fn=_cmd_dj)

    p = sub.add_parser("csat", help="compile a DIMACS CNF and decide it")
    p.add_argument("cnf")
    p.add_argument("--max-steps", type=int, default=0)
    p.set_defaults(fn=_cmd_csat)

    p = sub.add_parser("parallelizable", help="check an oracle against its classical runs")
    p.add_argument("--oracle", required=True)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.set_defaults(fn=_cmd_parallelizable)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (PrecondError, DslError, FileNotFoundError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
