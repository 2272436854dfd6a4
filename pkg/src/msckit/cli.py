"""Command-line interface: run, translate, generate, verify, report.

Exit codes: 0 success / everything verified, 1 a check failed, 2 usage or
parse errors.  Reports go to stdout, diagnostics to stderr; ``--json``
switches reports to the structured format.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import compile as comp
from .circuit import MPC, load_netlist, mpc_to_netlist, run_mpc
from .colevishkin import (
    CvParams, check_coloring, direct_cv_oracle, generate_cv, run_cv,
)
from .eval import run, trace_to_json, trace_to_text
from .model import PropositionSet, load_model
from .syntax import Program, metrics, parse_program, print_program
from .suites import SUITES, run_suite


class CliError(Exception):
    pass


def _read_program(path: str) -> Program:
    return parse_program(Path(path).read_text(encoding="utf-8"))


def _parse_props(text: str) -> PropositionSet:
    pi0_text, _, pi1_text = text.partition(";")
    split = lambda s: tuple(t.strip() for t in s.split(",") if t.strip())
    return PropositionSet(ordinary=split(pi0_text), distinguished=split(pi1_text))


def _props_for(args) -> PropositionSet:
    if getattr(args, "props", None):
        return _parse_props(args.props)
    if getattr(args, "model", None):
        return load_model(args.model).props
    raise CliError("this translation needs --props 'q1,... ; p1,...' or --model FILE")


def _read_graph(path: str) -> tuple[int, list[tuple[int, int]]]:
    n = None
    edges = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace("n", "").replace("=", "").split() if line.startswith("n") \
            else line.split()
        if n is None:
            if len(parts) != 1:
                raise CliError(f"first line must give the node count, got {raw!r}")
            n = int(parts[0])
            continue
        if len(parts) != 2:
            raise CliError(f"expected an edge 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise CliError("empty graph file")
    return n, edges


def _emit(args, payload_json: dict, text: str, stream=None) -> None:
    stream = stream or sys.stdout
    if args.json:
        json.dump(payload_json, stream, indent=2)
        stream.write("\n")
    else:
        stream.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_run_program(args) -> int:
    program = _read_program(args.program)
    model = load_model(args.model)
    trace = run(program, model, args.rounds)
    _emit(args, trace_to_json(trace), trace_to_text(trace))
    if args.plot_dir:
        from .report import write_trace_report
        for path in write_trace_report(trace, args.plot_dir, stem="program_trace"):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_run_circuit(args) -> int:
    obj = load_netlist(args.netlist)
    if not isinstance(obj, MPC):
        raise CliError("netlist has no MPC headers (pi/delta/k/A/P)")
    model = load_model(args.model)
    trace = run_mpc(obj, model, args.rounds)
    _emit(args, trace_to_json(trace), trace_to_text(trace))
    if args.plot_dir:
        from .report import write_trace_report
        for path in write_trace_report(trace, args.plot_dir, stem="circuit_trace"):
            print(f"wrote {path}", file=sys.stderr)
    return 0


_PROGRAM_ROUTES = {
    ("cmsc", "msc"): lambda p, a: comp.cmsc_to_msc(p),
    ("mpmsc", "mmsc"): lambda p, a: comp.cmsc_to_msc(p),
    ("msc", "terminal-zero"): lambda p, a: comp.terminal_depth_zero(p),
    ("msc", "msc1"): lambda p, a: comp.to_msc1(p),
    ("mpmsc", "cmsc"): lambda p, a: comp.eliminate_indexed_diamonds(
        p, _props_for(a).distinguished),
    ("msc", "mpc"): lambda p, a: comp.msc_to_mpc(p, a.delta, _props_for(a)),
    ("mpmsc", "mpc"): lambda p, a: comp.mpmsc_to_mpc(p, a.delta, _props_for(a)),
}


def _mpmsc_to_msc(p, args):
    cmsc, rep1 = comp.eliminate_indexed_diamonds(p, _props_for(args).distinguished)
    program, _ = comp.cmsc_to_msc(cmsc)
    rep1.name = "mpmsc_to_msc"
    rep1.target_metrics = comp.program_metrics(program)
    return program, rep1


def cmd_translate(args) -> int:
    src_kind = args.source
    dst_kind = args.target
    if src_kind == "mpc":
        mpc = load_netlist(args.input)
        if not isinstance(mpc, MPC):
            raise CliError("input netlist has no MPC headers")
        if dst_kind == "mpmsc":
            artifact, report = comp.mpc_to_mpmsc(mpc)
        elif dst_kind == "msc":
            artifact, report = comp.mpc_to_msc(mpc)
        else:
            raise CliError(f"no translation mpc -> {dst_kind}")
    else:
        program = _read_program(args.input)
        if program.variant != src_kind:
            raise CliError(f"input is a {program.variant} program, not {src_kind}")
        if (src_kind, dst_kind) in _PROGRAM_ROUTES:
            if dst_kind == "mpc" and args.delta is None:
                raise CliError("translating to an MPC needs --delta")
            artifact, report = _PROGRAM_ROUTES[(src_kind, dst_kind)](program, args)
        elif (src_kind, dst_kind) == ("mpmsc", "msc"):
            artifact, report = _mpmsc_to_msc(program, args)
        else:
            raise CliError(f"no translation {src_kind} -> {dst_kind}")

    rendered = mpc_to_netlist(artifact) if isinstance(artifact, MPC) \
        else print_program(artifact)
    if args.output:
        Path(args.output).write_text(rendered, encoding="utf-8")
        _emit(args, report.to_json(), report.to_text())
    else:
        sys.stdout.write(rendered)
        _emit(args, report.to_json(), report.to_text(), stream=sys.stderr)
    return 0


def cmd_generate_cv(args) -> int:
    from .colevishkin import appointed_counts
    params = CvParams(n=args.n, delta=args.delta)
    program = generate_cv(params, args.stage, args.allow_large_delta)
    text = print_program(program)
    counts = appointed_counts(args.stage, args.delta)
    summary = (f"{metrics(program).head_count} heads, size {metrics(program).size}, "
               f"appointed {counts['emitted']} (raw {counts['raw']}), "
               f"log*({args.n}) = {params.hours - 3}, L = {params.hours}")
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.output}: {summary}")
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return 0


def cmd_run_cv(args) -> int:
    n, edges = _read_graph(args.graph)
    result = run_cv(n, edges, stage=args.stage, delta=args.delta)
    params = result.params
    palette = result.result.palette
    verdict = check_coloring(result.result, n, edges, palette)
    oracle = direct_cv_oracle(n, edges, delta=params.delta)
    expected = {
        "7": params.comm_rounds_cv7(),
        "3": params.comm_rounds_cv3(),
        "final": params.comm_rounds_full(),
    }[args.stage]
    payload = {
        "n": n,
        "delta": params.delta,
        "stage": args.stage,
        "palette": palette,
        "outputs": {str(w + 1): result.result.outputs[w] for w in sorted(result.result.outputs)},
        "colors": {str(w + 1): result.result.color_index[w] for w in sorted(result.result.outputs)},
        "verdict": verdict,
        "comm_rounds": result.comm_round_count,
        "expected_comm_rounds": expected,
        "oracle_comm_rounds": oracle.comm_rounds,
    }
    lines = [f"stage {args.stage} coloring of {n} nodes (delta {params.delta}, palette {palette})"]
    for w in sorted(result.result.outputs):
        lines.append(f"  node {w + 1}: output {result.result.outputs[w]} "
                     f"color {result.result.color_index[w]}")
    lines.append(f"one-hot: {verdict['one_hot']}  palette ok: {verdict['palette_ok']}  "
                 f"proper: {verdict['proper']}")
    lines.append(f"global communication rounds: {result.comm_round_count} "
                 f"(expected {expected}; direct oracle used {oracle.comm_rounds})")
    _emit(args, payload, "\n".join(lines) + "\n")
    if args.plot_dir:
        from .report import write_coloring_report
        for path in write_coloring_report(
                n, edges, result.result.outputs, result.result.color_index,
                args.plot_dir, stem=f"coloring_{args.stage}"):
            print(f"wrote {path}", file=sys.stderr)
    ok = verdict["passed"] and result.comm_round_count == expected
    return 0 if ok else 1


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(name, seed=args.seed, cases=args.cases) for name in names]
    if args.json:
        payload = [
            {"suite": r.name, "passed": r.passed, "elapsed": round(r.elapsed, 2),
             "details": r.lines}
            for r in results
        ]
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for r in results:
            print(r.summary())
            for line in r.lines:
                print("   ", line)
    if args.plot_dir:
        from .report import write_scaling_report
        for r in results:
            for scaling in r.scaling:
                for path in write_scaling_report(scaling, args.plot_dir):
                    print(f"wrote {path}", file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


def cmd_stats(args) -> int:
    path = Path(args.input)
    text = path.read_text(encoding="utf-8")
    if "=" in text.splitlines()[0] or "inputs:" in text[:400] or "pi:" in text[:400]:
        obj = load_netlist(path)
        circuit = obj.circuit if isinstance(obj, MPC) else obj
        data = comp.circuit_metrics(circuit)
        if isinstance(obj, MPC):
            data.update({"k": obj.state_len, "delta": obj.delta,
                         "pi": len(obj.props.all)})
    else:
        data = comp.program_metrics(parse_program(text))
    _emit(args, data, "".join(f"{k}: {v}\n" for k, v in data.items()))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msckit",
        description="Run and translate MSC-family programs and message-passing "
                    "circuits; generate and check Cole-Vishkin coloring programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("run-program", help="run a program on a model")
    rp.add_argument("program")
    rp.add_argument("model")
    rp.add_argument("--rounds", type=int, default=16)
    rp.add_argument("--json", action="store_true")
    rp.add_argument("--plot-dir")
    rp.set_defaults(fn=cmd_run_program)

    rc = sub.add_parser("run-circuit", help="run an MPC netlist on a model")
    rc.add_argument("netlist")
    rc.add_argument("model")
    rc.add_argument("--rounds", type=int, default=16)
    rc.add_argument("--json", action="store_true")
    rc.add_argument("--plot-dir")
    rc.set_defaults(fn=cmd_run_circuit)

    tr = sub.add_parser("translate", help="translate between formalisms")
    tr.add_argument("input")
    tr.add_argument("--from", dest="source", required=True,
                    choices=["msc", "cmsc", "mpmsc", "mpc"])
    tr.add_argument("--to", dest="target", required=True,
                    choices=["msc", "mmsc", "cmsc", "msc1", "terminal-zero",
                             "mpmsc", "mpc"])
    tr.add_argument("--delta", type=int)
    tr.add_argument("--props", help="proposition set as 'q1,q2 ; p1,p2'")
    tr.add_argument("--model", help="borrow the proposition set from a model file")
    tr.add_argument("-o", "--output")
    tr.add_argument("--json", action="store_true")
    tr.set_defaults(fn=cmd_translate)

    gc = sub.add_parser("generate-cv", help="emit a Cole-Vishkin program")
    gc.add_argument("--n", type=int, required=True)
    gc.add_argument("--delta", type=int, required=True)
    gc.add_argument("--stage", choices=["7", "3", "final"], default="final")
    gc.add_argument("--allow-large-delta", action="store_true",
                    help="generate even when delta > 4 (appointed heads explode)")
    gc.add_argument("-o", "--output")
    gc.set_defaults(fn=cmd_generate_cv)

    rcv = sub.add_parser("run-cv", help="color a graph end to end")
    rcv.add_argument("--graph", required=True)
    rcv.add_argument("--stage", choices=["7", "3", "final"], default="final")
    rcv.add_argument("--delta", type=int)
    rcv.add_argument("--json", action="store_true")
    rcv.add_argument("--plot-dir")
    rcv.set_defaults(fn=cmd_run_cv)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("--suite", default="all", choices=["all"] + sorted(SUITES))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--cases", type=int)
    ver.add_argument("--json", action="store_true")
    ver.add_argument("--plot-dir")
    ver.set_defaults(fn=cmd_verify)

    st = sub.add_parser("stats", help="metrics of a program or netlist")
    st.add_argument("input")
    st.add_argument("--json", action="store_true")
    st.set_defaults(fn=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 0
    except (CliError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # domain errors: parse, variant, arity, ...
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
