"""Command-line front end.

Subcommands: ``sim`` (signature dumps), ``sweep`` (equivalence-driven
network reduction), ``cec`` (combinational equivalence check),
``prove`` (logic-identity proof on expressions), ``stats`` (network
summary).  Exit codes: 0 success / equivalent / proved, 1 inequivalent
or refuted, 2 usage error, 3 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bexpr import ExprSyntaxError, canonical_form, parse_expr, scan_names
from .cec import InterfaceMismatch, check_equivalence
from .netlist import Network, NetlistError, parse_aiger_ascii, parse_blif, write_blif
from .simulate import (
    WindowTooLarge,
    exhaustive_window_sim,
    gen_random_patterns,
    parse_patterns,
    simulate_all,
    simulate_specified,
)
from .sweep import SweepConfig, SweepStats, sweep

EXIT_OK = 0
EXIT_DIFFER = 1
EXIT_USAGE = 2
EXIT_INPUT = 3


def load_network(path: str) -> Network:
    text = Path(path).read_text()
    head = text.lstrip()
    if head.startswith("aag"):
        return parse_aiger_ascii(text)
    return parse_blif(text)


def _labeler(net: Network):
    by_id = {nid: name for name, nid in net.names.items()}
    return lambda nid: by_id.get(nid, str(nid))


def cmd_sim(args: argparse.Namespace) -> int:
    net = load_network(args.input)
    label = _labeler(net)
    if args.pattern_file:
        patterns = parse_patterns(Path(args.pattern_file).read_text(), len(net.pis))
    else:
        patterns = gen_random_patterns(len(net.pis), args.patterns, args.seed)

    if args.mode == "all":
        sigs = simulate_all(net, patterns)
        for nid in net.topo_order():
            print(f"{label(nid)}\t{sigs[nid].to_string()}")
        return EXIT_OK

    if not args.targets:
        print("sim: --mode targets requires --targets", file=sys.stderr)
        return EXIT_USAGE
    targets = [net.resolve(tok) for tok in args.targets.split(",") if tok]
    # Prefer support-exhaustive rows when they are cheaper than the
    # requested pattern count; fall back to pattern signatures.
    window = None
    try:
        window = exhaustive_window_sim(net, targets)
    except WindowTooLarge:
        window = None
    pattern_targets = [
        t for t in targets
        if window is None or (1 << len(window.supports[t])) >= patterns.n_patterns
    ]
    sigs = simulate_specified(net, patterns, pattern_targets) if pattern_targets else {}
    for t in targets:
        if window is not None and t not in sigs:
            print(f"{label(t)}\t{window.signature_string(t)}")
        else:
            print(f"{label(t)}\t{sigs[t].to_string()}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    net = load_network(args.input)
    cfg = SweepConfig(
        tfi_bound=args.tfi_limit,
        conflict_limit=args.conflict_limit,
        n_base_patterns=args.base_patterns,
        seed=args.seed,
    )
    net, stats = sweep(net, cfg)
    Path(args.output).write_text(write_blif(net))
    print(stats.as_kv())
    print(SweepStats.CSV_HEADER)
    print(stats.as_csv_row())
    return EXIT_OK


def cmd_cec(args: argparse.Namespace) -> int:
    net_a = load_network(args.a)
    net_b = load_network(args.b)
    result = check_equivalence(net_a, net_b)
    if result.equivalent:
        print("equivalent")
        return EXIT_OK
    print(f"inequivalent at output {result.output}")
    assignment = " ".join(f"{k}={int(v)}" for k, v in sorted(result.counterexample.items()))
    print(f"counterexample: {assignment}")
    return EXIT_DIFFER


def cmd_prove(args: argparse.Namespace) -> int:
    names = sorted(scan_names(args.expr_a) | scan_names(args.expr_b))
    var_index = {name: i + 1 for i, name in enumerate(names)}
    expr_a, _ = parse_expr(args.expr_a, var_index)
    expr_b, _ = parse_expr(args.expr_b, var_index)
    n = len(names)
    ma = canonical_form(expr_a, n)
    mb = canonical_form(expr_b, n)
    if ma == mb:
        print("proved")
        return EXIT_OK
    diff = ma.row ^ mb.row
    v = (diff & -diff).bit_length() - 1
    assignment = " ".join(
        f"{name}={(v >> (n - 1 - j)) & 1}" for j, name in enumerate(names)
    )
    print(f"refuted at {assignment}")
    return EXIT_DIFFER


def cmd_stats(args: argparse.Namespace) -> int:
    net = load_network(args.input)
    print(f"name={net.name}")
    print(f"pis={len(net.pis)}")
    print(f"pos={len(net.pos)}")
    print(f"luts={net.n_luts()}")
    print(f"levels={net.level()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stpsweep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("sim", help="simulate a network and dump signatures")
    p_sim.add_argument("input")
    group = p_sim.add_mutually_exclusive_group()
    group.add_argument("--patterns", type=int, default=1024, metavar="N")
    group.add_argument("--pattern-file", metavar="F")
    p_sim.add_argument("--targets", metavar="LIST", help="comma-separated names or ids")
    p_sim.add_argument("--mode", choices=("all", "targets"), default="all")
    p_sim.add_argument("--seed", type=int, default=1)
    p_sim.set_defaults(func=cmd_sim)

    p_sweep = sub.add_parser("sweep", help="merge equivalent nodes")
    p_sweep.add_argument("input")
    p_sweep.add_argument("output")
    p_sweep.add_argument("--tfi-limit", type=int, default=1000)
    p_sweep.add_argument("--conflict-limit", type=int, default=0)
    p_sweep.add_argument("--base-patterns", type=int, default=2048)
    p_sweep.add_argument("--seed", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_cec = sub.add_parser("cec", help="combinational equivalence check")
    p_cec.add_argument("a")
    p_cec.add_argument("b")
    p_cec.set_defaults(func=cmd_cec)

    p_prove = sub.add_parser("prove", help="prove or refute a logic identity")
    p_prove.add_argument("expr_a")
    p_prove.add_argument("expr_b")
    p_prove.set_defaults(func=cmd_prove)

    p_stats = sub.add_parser("stats", help="print network statistics")
    p_stats.add_argument("input")
    p_stats.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NetlistError, ExprSyntaxError, InterfaceMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
