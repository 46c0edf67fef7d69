"""Command-line entry points.

``anytime-cdg parse`` runs the scheduler on a sentence or a word lattice and
writes the analysis; ``anytime-cdg oracle`` lists every complete analysis by
exhaustive search. Exit status of ``parse``: 0 unique, 2 ambiguous,
3 inconsistent, 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading

from .constraints import load_grammar
from .errors import CDGError
from .lattice import Horizon, parse_lattice, simulate_stream
from .model import AMBIGUOUS, INCONSISTENT, LATTICE, STRING, UNIQUE, WordNode, nodes_from_tokens, value_key
from .propagation import oracle_enumerate
from .scheduler import Budget, run_contract, run_interruptible

EXIT_CODES = {UNIQUE: 0, AMBIGUOUS: 2, INCONSISTENT: 3}
DEFAULT_HORIZON_MS = 1000.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="anytime-cdg", description="Anytime dependency parsing by constraint propagation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ps = sub.add_parser("parse", help="parse a sentence or word lattice")
    ps.add_argument("--grammar", required=True, help="grammar JSON file")
    ps.add_argument("--input", required=True, help="input file, or - for stdin")
    ps.add_argument("--mode", choices=[STRING, LATTICE], default=STRING)
    ps.add_argument("--run", choices=["interruptible", "contract"], default="contract")
    budget = ps.add_mutually_exclusive_group()
    budget.add_argument("--budget-ms", type=_positive(float), help="wall-clock budget in ms")
    budget.add_argument("--budget-steps", type=_positive(int), help="budget in deletion steps")
    ps.add_argument("--interrupt-at-step", type=_nonnegative, help="interrupt after this many deletions")
    ps.add_argument("--heuristics", choices=["off", "auto"], default=None,
                    help="heuristic escalation (default: auto for contract runs, off for interruptible)")
    ps.add_argument("--horizon-ms", type=_positive(float), default=None, help="lattice time horizon")
    ps.add_argument("--trace-out", help="write the quality trace as CSV")
    ps.add_argument("--out", help="output file (default stdout)")
    ps.add_argument("--format", choices=["tsv", "json"], default="tsv")
    ps.add_argument("--seed", type=int, default=0, help="seed recorded with JSON output")
    ps.set_defaults(func=cmd_parse)

    po = sub.add_parser("oracle", help="enumerate all complete analyses")
    po.add_argument("--grammar", required=True)
    po.add_argument("--input", required=True)
    po.add_argument("--mode", choices=[STRING, LATTICE], default=STRING)
    po.add_argument("--with-heuristics", action="store_true", help="also enforce HEURISTIC constraints")
    po.set_defaults(func=cmd_oracle)
    return p


def _positive(kind):
    def conv(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
        return value
    return conv


def _nonnegative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _string_nodes(grammar, text):
    tokens = text.split()
    return nodes_from_tokens(grammar, tokens)


# ---- output ---------------------------------------------------------------------------

def _present_order(network):
    """Node id -> 1-based output index over the nodes still in the analysis."""
    if network.mode == STRING:
        return {n.id: n.position for n in network.nodes}
    present = sorted((n for n in network.nodes if network.size(n.id)), key=WordNode.sort_key)
    return {n.id: i for i, n in enumerate(present, start=1)}


def _fmt_value(v):
    return f"({v.head if v.head is not None else 'NIL'},{v.label})"


def format_output(result, fmt="tsv", seed=None):
    """Render a run result as TSV (head index 0 = root) or JSON."""
    if fmt == "json":
        return _format_json(result, seed)
    net = result.network
    index = _present_order(net)
    lines = ["id\tform\tcategory\thead\tlabel"]
    if result.analysis is None:
        lines.append(f"# inconsistent\t{result.error or ''}".rstrip())
        for d in result.offending:
            lines.append(f"{d.step}\t{d.node}\t{_fmt_value(d.value)}\t{d.constraint_id}\t{d.reliability:.6f}")
        return "\n".join(lines) + "\n"
    for nid, v in result.analysis.resolved.items():
        node = net.node(nid)
        head = 0 if v.head is None else index.get(v.head, v.head)
        lines.append(f"{index[nid]}\t{node.form}\t{node.category}\t{head}\t{v.label}")
    if result.analysis.unresolved:
        lines.append("# ambiguous")
        for nid, dom in result.analysis.unresolved.items():
            node = net.node(nid)
            values = ",".join(_fmt_value(v) for v in sorted(dom, key=value_key))
            lines.append(f"{index[nid]}\t{node.form}\t{node.category}\t{{{values}}}")
    return "\n".join(lines) + "\n"


def _format_json(result, seed):
    net = result.network
    analysis = result.analysis
    out = {
        "status": result.status,
        "stop_reason": result.stop_reason,
        "nodes": [],
        "ambiguous": {},
        "dropped": list(analysis.dropped) if analysis else [],
        "quality": {"a": result.a, "r": result.r, "q": result.q},
        "deletions": [
            {"step": d.step, "node": d.node, "head": d.value.head, "label": d.value.label,
             "constraint": d.constraint_id, "reliability": d.reliability}
            for d in net.deletion_log
        ],
        "escalations": [{"step": s, "tier": t} for s, t in result.escalations],
        "trace": [
            {"step": s.step, "elapsed_ms": s.elapsed, "a": s.a, "r": s.r, "q": s.q}
            for s in result.trace.samples
        ],
    }
    if result.error:
        out["error"] = result.error
    if seed is not None:
        out["seed"] = seed
    if analysis is not None:
        for nid, v in analysis.resolved.items():
            node = net.node(nid)
            out["nodes"].append({"id": nid, "form": node.form, "category": node.category,
                                 "head": v.head, "label": v.label})
        for nid, dom in analysis.unresolved.items():
            out["ambiguous"][nid] = [[v.head, v.label] for v in sorted(dom, key=value_key)]
    return json.dumps(out, indent=2, ensure_ascii=False) + "\n"


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---- commands -------------------------------------------------------------------------

def _run(args, grammar, text):
    heuristics = (args.heuristics or ("auto" if args.run == "contract" else "off")) == "auto"
    budget = Budget(wall_clock=args.budget_ms, max_steps=args.budget_steps)
    clock = "wall" if args.budget_ms is not None else "steps"
    if args.mode == LATTICE:
        if args.interrupt_at_step is not None:
            raise UsageError("--interrupt-at-step applies to string mode only")
        events = parse_lattice(text)
        horizon = Horizon(args.horizon_ms or DEFAULT_HORIZON_MS)
        if args.run == "contract" and budget.empty:
            raise UsageError("contract runs need --budget-ms or --budget-steps")
        return simulate_stream(events, grammar, horizon, budget, heuristics=heuristics, clock=clock)
    nodes = _string_nodes(grammar, text)
    if args.run == "contract":
        if budget.empty:
            raise UsageError("contract runs need --budget-ms or --budget-steps")
        if args.interrupt_at_step is not None:
            raise UsageError("--interrupt-at-step applies to interruptible runs")
        return run_contract(grammar, nodes, budget, heuristics=heuristics, clock=clock)
    if args.budget_steps is not None:
        raise UsageError("interruptible runs take --interrupt-at-step or --budget-ms, not --budget-steps")
    flag = threading.Event()
    timer = None
    if args.budget_ms is not None:
        timer = threading.Timer(args.budget_ms / 1000.0, flag.set)
        timer.start()
    try:
        return run_interruptible(grammar, nodes, flag, stop_at_step=args.interrupt_at_step,
                                 heuristics=heuristics, clock=clock)
    finally:
        if timer is not None:
            timer.cancel()


def cmd_parse(args):
    try:
        grammar = load_grammar(args.grammar)
        text = _read_text(args.input)
        result = _run(args, grammar, text)
    except (OSError, CDGError, UsageError, ValueError) as exc:
        print(f"anytime-cdg parse: {exc}", file=sys.stderr)
        return 1
    _write(args.out, format_output(result, args.format, seed=args.seed if args.format == "json" else None))
    if args.trace_out:
        result.trace.write_csv(args.trace_out)
    return EXIT_CODES[result.status]


def cmd_oracle(args):
    try:
        grammar = load_grammar(args.grammar)
        text = _read_text(args.input)
        if args.mode == LATTICE:
            nodes = [ev.hypothesis for ev in parse_lattice(text)]
        else:
            nodes = _string_nodes(grammar, text)
        solutions = oracle_enumerate(grammar, nodes, include_heuristics=args.with_heuristics)
    except (OSError, CDGError, ValueError) as exc:
        print(f"anytime-cdg oracle: {exc}", file=sys.stderr)
        return 1
    order = {n.id: i for i, n in enumerate(sorted(nodes, key=WordNode.sort_key))}
    lines = sorted(
        " ".join(f"{nid}:{_fmt_value(v)}" for nid, v in sorted(sol.items(), key=lambda kv: order[kv[0]]))
        for sol in solutions
    )
    for line in lines:
        print(line)
    print(f"count {len(lines)}")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    return args.func(args)


__all__ = ["main", "build_parser", "format_output", "cmd_parse", "cmd_oracle", "EXIT_CODES"]
