"""Command-line interface.

Subcommands: ``gen`` writes a random cost-weighted network, ``mda`` computes
the exact Pareto set for one endpoint pair, ``qrmo`` trains the learner on
one pair, ``bench`` runs a full experiment from a config file, and ``plot``
renders figures from emitted aggregate CSVs.

Exit codes: 0 success, 1 usage error, 2 invalid data or configuration.
"""

from __future__ import annotations

import argparse
import sys
import time

from .bench import emit_csv, load_experiment_config, plot_from_dir, run_experiment
from .errors import MospError
from .graph import (
    attribute_names,
    default_cost_distribution,
    generate_topology,
    load_graph,
    parse_topology,
    sample_costs,
    save_graph,
)
from .mda import mda_pareto
from .pareto import route_cost, write_pareto_csv
from .qrmo import QRMOConfig, extract_solutions, qrmo_run, run_episode, write_qtable_csv
from .rng import STREAM_EXPLORE, spawn_rng

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit code 2 for usage errors; remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mosp", description=__doc__.split("\n\n")[1])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a random connected network with sampled link costs")
    gen.add_argument("--spec", required=True, help="topology class name (e.g. 50N50E, MCC) or V,E pair")
    gen.add_argument("--seed", type=int, default=0, help="seed for topology and costs (default 0)")
    gen.add_argument("--out", required=True, help="output graph file")

    mda = sub.add_parser("mda", help="exact Pareto set between two nodes")
    mda.add_argument("--graph", required=True, help="graph file to read")
    mda.add_argument("--src", type=int, required=True)
    mda.add_argument("--dst", type=int, required=True)
    mda.add_argument("--out", required=True, help="output CSV of non-dominated paths")

    qrmo = sub.add_parser("qrmo", help="train the Q-routing learner between two nodes")
    qrmo.add_argument("--graph", required=True, help="graph file to read")
    qrmo.add_argument("--src", type=int, required=True)
    qrmo.add_argument("--dst", type=int, required=True)
    qrmo.add_argument("--episodes", type=int, default=100)
    qrmo.add_argument("--alpha", type=float, default=0.7)
    qrmo.add_argument("--epsilon", type=float, default=0.1)
    qrmo.add_argument("--max-steps", type=int, default=None, help="episode step cap (default 50 * nodes)")
    qrmo.add_argument("--seed", type=int, default=0)
    qrmo.add_argument("--out", required=True, help="output CSV tracing best costs per episode")
    qrmo.add_argument("--dump-q", default=None, help="also dump the final Q-table to this CSV")
    qrmo.add_argument(
        "--replay-greedy",
        action="store_true",
        help="after training, walk one greedy episode and report its route and wall time",
    )

    bench = sub.add_parser("bench", help="run a benchmark experiment from a config file")
    bench.add_argument("--config", required=True, help="key = value config file")
    bench.add_argument("--out-dir", required=True, help="directory for CSV output")
    bench.add_argument("--workers", type=int, default=1, help="worker processes for learner runs")

    plot = sub.add_parser("plot", help="render SVG figures from aggregate CSVs")
    plot.add_argument("--in-dir", required=True, help="directory containing aggregate_*.csv")
    plot.add_argument("--out-dir", default=None, help="directory for figures (default: --in-dir)")
    plot.add_argument("--checkpoints", default=None, help="comma-separated episodes for bar charts")

    return parser


def _cmd_gen(args) -> int:
    spec = parse_topology(args.spec, seed=args.seed)
    graph = sample_costs(generate_topology(spec), default_cost_distribution(), seed=args.seed)
    save_graph(graph, args.out)
    print(f"wrote {spec.label}: {graph.node_count} nodes, {len(graph.edges)} edges -> {args.out}")
    return EXIT_OK


def _cmd_mda(args) -> int:
    graph = load_graph(args.graph)
    t0 = time.perf_counter()
    pareto = mda_pareto(graph, args.src, args.dst)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    write_pareto_csv(pareto, args.out)
    print(f"{len(pareto)} non-dominated paths from {args.src} to {args.dst} in {wall_ms:.1f} ms -> {args.out}")
    return EXIT_OK


def _cmd_qrmo(args) -> int:
    graph = load_graph(args.graph)
    config = QRMOConfig(
        alpha=args.alpha,
        epsilon=args.epsilon,
        episodes=args.episodes,
        max_steps=args.max_steps,
        seed=args.seed,
    )
    memory, trace, q = qrmo_run(graph, args.src, args.dst, config)

    import csv as _csv

    names = attribute_names(graph.num_attributes)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["episode", "slot", *names])
        for episode, snapshot in enumerate(trace, start=1):
            for slot in range(graph.num_attributes):
                cost = snapshot[slot] if snapshot is not None else None
                cells = [repr(c) for c in cost] if cost is not None else [""] * graph.num_attributes
                writer.writerow([episode, slot, *cells])
    print(f"trained {config.episodes} episodes on {args.src}->{args.dst} -> {args.out}")

    try:
        for slot, (route, cost) in enumerate(extract_solutions(memory)):
            pretty = ", ".join(f"{n}={c:.6g}" for n, c in zip(names, cost))
            print(f"slot {slot}: {'-'.join(str(n) for n in route.nodes)} ({pretty})")
    except MospError as exc:
        print(f"warning: {exc}", file=sys.stderr)

    if args.dump_q:
        write_qtable_csv(q, args.dump_q)
        print(f"Q-table -> {args.dump_q}")

    if args.replay_greedy:
        greedy = QRMOConfig(
            alpha=config.alpha,
            epsilon=0.0,
            episodes=1,
            max_steps=config.max_steps,
            seed=config.seed,
        )
        rng = spawn_rng(config.seed, STREAM_EXPLORE)
        t0 = time.perf_counter()
        route, truncated = run_episode(graph, q, args.src, args.dst, greedy, rng)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        if truncated:
            print(f"greedy replay truncated after {len(route)} steps in {wall_ms:.3f} ms")
        else:
            cost = route_cost(graph, route)
            pretty = ", ".join(f"{n}={c:.6g}" for n, c in zip(names, cost))
            print(f"greedy replay: {'-'.join(str(n) for n in route.nodes)} ({pretty}) in {wall_ms:.3f} ms")
    return EXIT_OK


def _cmd_bench(args) -> int:
    config = load_experiment_config(args.config)
    result = run_experiment(config, workers=args.workers)
    paths = emit_csv(result, args.out_dir)
    for diagnostic in result.diagnostics:
        print(f"warning: {diagnostic}", file=sys.stderr)
    status = "complete" if result.complete else "INCOMPLETE"
    print(f"{result.topology_name}: {len(result.samples)} samples, {status}")
    for path in paths:
        print(f"  {path}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    checkpoints = None
    if args.checkpoints:
        try:
            checkpoints = tuple(int(p.strip()) for p in args.checkpoints.split(","))
        except ValueError:
            print(f"mosp plot: error: bad --checkpoints {args.checkpoints!r}", file=sys.stderr)
            return EXIT_USAGE
    for path in plot_from_dir(args.in_dir, args.out_dir, checkpoints):
        print(f"  {path}")
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "mda": _cmd_mda,
    "qrmo": _cmd_qrmo,
    "bench": _cmd_bench,
    "plot": _cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except MospError as exc:
        print(f"mosp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"mosp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
