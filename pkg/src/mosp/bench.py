"""Config-driven benchmark harness.

One experiment takes a topology class, generates a single network from it,
draws random endpoint pairs, computes the exact Pareto baseline per pair,
runs the learner several times per pair, and aggregates per-episode quality
metrics with confidence intervals. Results land in CSV files and plots whose
bytes depend only on the configuration and master seed (timings excepted).
"""

from __future__ import annotations

import csv
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError, GraphError, MospError
from .graph import (
    CostDistribution,
    TopologySpec,
    UniformMixture,
    default_cost_distribution,
    generate_topology,
    parse_topology,
    sample_costs,
)
from .mda import mda_pareto
from .metrics import AggregateStat, MetricSample, aggregate, dps, num_correct
from .pareto import ParetoSet
from .qrmo import QRMOConfig, qrmo_run
from .rng import STREAM_PAIRS, STREAM_RUNS, derive_seed, spawn_rng

DEFAULT_CHECKPOINTS = (10, 20, 50, 100)

# Display floor for log-scale plots; zero values are clamped to this for
# rendering only, never in stored data.
LOG_PLOT_FLOOR = 1e-20

METRIC_NAMES = ("dps", "correctness", "num_correct")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a benchmark run depends on.

    ``checkpoints=None`` selects the default episodes (10, 20, 50, 100)
    filtered to the configured horizon. All randomness derives from
    ``master_seed`` except the topology, which follows its own spec seed.
    """

    topology: TopologySpec
    cost_dist: CostDistribution = field(default_factory=default_cost_distribution)
    qrmo: QRMOConfig = field(default_factory=QRMOConfig)
    pairs: int = 5
    runs_per_pair: int = 5
    checkpoints: tuple[int, ...] | None = None
    master_seed: int = 0

    def __post_init__(self):
        if self.pairs < 1:
            raise ConfigError(f"pairs must be >= 1, got {self.pairs}")
        if self.runs_per_pair < 1:
            raise ConfigError(f"runs_per_pair must be >= 1, got {self.runs_per_pair}")
        n = self.topology.node_count
        if self.pairs > n * (n - 1):
            raise ConfigError(f"{self.pairs} distinct endpoint pairs do not fit in {n} nodes")
        if self.checkpoints is None:
            cps = tuple(c for c in DEFAULT_CHECKPOINTS if c <= self.qrmo.episodes)
            if not cps and self.qrmo.episodes >= 1:
                cps = (self.qrmo.episodes,)
            object.__setattr__(self, "checkpoints", cps)
        else:
            cps = tuple(sorted(set(int(c) for c in self.checkpoints)))
            for c in cps:
                if not 1 <= c <= self.qrmo.episodes:
                    raise ConfigError(f"checkpoint {c} outside [1, {self.qrmo.episodes}]")
            object.__setattr__(self, "checkpoints", cps)


@dataclass(frozen=True)
class AggregateRow:
    episode: int
    metric: str
    stat: AggregateStat


@dataclass(frozen=True)
class TimingRow:
    instance: str
    algorithm: str
    wall_ms: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    topology_name: str
    endpoint_pairs: list[tuple[int, int]]
    samples: list[MetricSample]
    aggregates: list[AggregateRow]
    timings: list[TimingRow]
    diagnostics: list[str]
    complete: bool


_CONFIG_KEYS = frozenset(
    {
        "topology",
        "topology_seed",
        "master_seed",
        "alpha",
        "epsilon",
        "episodes",
        "max_steps",
        "pairs",
        "runs_per_pair",
        "checkpoints",
        "loss_dist",
        "latency_dist",
        "jitter_dist",
    }
)


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    """Parse a flat ``key = value`` config file.

    ``#`` starts a comment and blank lines are skipped. Unknown or duplicate
    keys are rejected so typos cannot silently fall back to defaults.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {body!r}")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        raw[key] = value
    return build_experiment_config(raw)


def _parse_int(raw: dict[str, str], key: str, default: int | None) -> int | None:
    if key not in raw:
        return default
    try:
        return int(raw[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw[key]!r}") from None


def _parse_float(raw: dict[str, str], key: str, default: float) -> float:
    if key not in raw:
        return default
    try:
        return float(raw[key])
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw[key]!r}") from None


def _parse_mixture(key: str, text: str) -> UniformMixture:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 6:
        raise ConfigError(f"{key} needs 6 comma-separated numbers (w1,lo1,hi1,w2,lo2,hi2), got {len(parts)}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"{key} must contain numbers, got {text!r}") from None
    try:
        return UniformMixture(*values)
    except GraphError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def build_experiment_config(raw: dict[str, str]) -> ExperimentConfig:
    """Assemble and validate an :class:`ExperimentConfig` from string values."""
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    if "topology" not in raw:
        raise ConfigError("missing required key 'topology'")
    master_seed = _parse_int(raw, "master_seed", 0)
    if master_seed < 0:
        raise ConfigError(f"master_seed must be >= 0, got {master_seed}")
    topology_seed = _parse_int(raw, "topology_seed", master_seed)
    try:
        topology = parse_topology(raw["topology"], seed=topology_seed)
        qrmo = QRMOConfig(
            alpha=_parse_float(raw, "alpha", 0.7),
            epsilon=_parse_float(raw, "epsilon", 0.1),
            episodes=_parse_int(raw, "episodes", 100),
            max_steps=_parse_int(raw, "max_steps", None),
            seed=master_seed,
        )
        base = default_cost_distribution()
        mixtures = list(base.attributes)
        for j, key in enumerate(("loss_dist", "latency_dist", "jitter_dist")):
            if key in raw:
                mixtures[j] = _parse_mixture(key, raw[key])
        cost_dist = CostDistribution(tuple(mixtures), loss_index=base.loss_index)
    except GraphError as exc:
        raise ConfigError(str(exc)) from None
    checkpoints = None
    if "checkpoints" in raw:
        try:
            checkpoints = tuple(int(p.strip()) for p in raw["checkpoints"].split(","))
        except ValueError:
            raise ConfigError(f"checkpoints must be comma-separated integers, got {raw['checkpoints']!r}") from None
    return ExperimentConfig(
        topology=topology,
        cost_dist=cost_dist,
        qrmo=qrmo,
        pairs=_parse_int(raw, "pairs", 5),
        runs_per_pair=_parse_int(raw, "runs_per_pair", 5),
        checkpoints=checkpoints,
        master_seed=master_seed,
    )


def _draw_endpoint_pairs(node_count: int, count: int, rng) -> list[tuple[int, int]]:
    """Distinct ordered (src, dst) pairs, src != dst, drawn uniformly."""
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    while len(pairs) < count:
        src = int(rng.integers(node_count))
        dst = int(rng.integers(node_count))
        if src == dst or (src, dst) in seen:
            continue
        seen.add((src, dst))
        pairs.append((src, dst))
    return pairs


def _run_single(task: tuple) -> tuple[int, int, list, float]:
    graph, src, dst, run_cfg, pair_idx, run_idx = task
    t0 = time.perf_counter()
    _, trace, _ = qrmo_run(graph, src, dst, run_cfg)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return pair_idx, run_idx, trace, wall_ms


def _evaluate_trace(reference: ParetoSet, pair_idx: int, run_idx: int, trace) -> list[MetricSample]:
    """Metric samples for every episode of one learner run.

    Snapshots repeat between improvements, so scores are memoized per
    distinct snapshot.
    """
    psi = reference.costs()
    memo: dict[tuple, tuple[float, int]] = {}
    out = []
    for episode, snapshot in enumerate(trace, start=1):
        if snapshot is None:
            out.append(MetricSample(pair_idx, run_idx, episode, float("nan"), 0, 0))
            continue
        if snapshot not in memo:
            omega = list(snapshot)
            memo[snapshot] = (dps(psi, omega), num_correct(reference, omega))
        d, k = memo[snapshot]
        out.append(MetricSample(pair_idx, run_idx, episode, d, 1 if k >= 1 else 0, k))
    return out


def _aggregate_samples(samples: list[MetricSample], episodes: int) -> list[AggregateRow]:
    """Per-episode mean and CI for each metric, NaN dps values excluded."""
    by_episode: dict[int, list[MetricSample]] = {}
    for s in samples:
        by_episode.setdefault(s.episode, []).append(s)
    rows: list[AggregateRow] = []
    for episode in range(1, episodes + 1):
        group = by_episode.get(episode)
        if not group:
            continue
        dps_values = [s.dps for s in group if not math.isnan(s.dps)]
        if dps_values:
            rows.append(AggregateRow(episode, "dps", aggregate(dps_values)))
        rows.append(AggregateRow(episode, "correctness", aggregate([float(s.correctness) for s in group])))
        rows.append(AggregateRow(episode, "num_correct", aggregate([float(s.num_correct) for s in group])))
    return rows


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run one full benchmark experiment.

    The exact baseline runs once per endpoint pair; the learner runs
    ``runs_per_pair`` times per pair with run-specific seeds derived from the
    master seed. A failing instance is recorded as a diagnostic and skipped;
    the rest of the experiment continues and the result is flagged
    incomplete. ``workers > 1`` fans learner runs out to worker processes
    without changing any emitted value.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    graph = sample_costs(generate_topology(config.topology), config.cost_dist, seed=config.master_seed)
    pairs = _draw_endpoint_pairs(graph.node_count, config.pairs, spawn_rng(config.master_seed, STREAM_PAIRS))

    diagnostics: list[str] = []
    timings: list[TimingRow] = []
    references: dict[int, ParetoSet] = {}
    for p, (src, dst) in enumerate(pairs):
        t0 = time.perf_counter()
        try:
            reference = mda_pareto(graph, src, dst)
        except MospError as exc:
            diagnostics.append(f"pair {p} ({src}->{dst}): baseline failed: {exc}")
            continue
        timings.append(TimingRow(f"p{p}", "mda", (time.perf_counter() - t0) * 1000.0))
        if not len(reference):
            diagnostics.append(f"pair {p} ({src}->{dst}): baseline found no path; pair skipped")
            continue
        references[p] = reference

    tasks = []
    for p in sorted(references):
        src, dst = pairs[p]
        for r in range(config.runs_per_pair):
            run_cfg = replace(config.qrmo, seed=derive_seed(config.master_seed, STREAM_RUNS, p, r))
            tasks.append((graph, src, dst, run_cfg, p, r))

    outcomes: list[tuple[int, int, list, float]] = []
    if workers == 1:
        for task in tasks:
            try:
                outcomes.append(_run_single(task))
            except MospError as exc:
                diagnostics.append(f"pair {task[4]} run {task[5]}: learner failed: {exc}")
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            submitted = [(pool.submit(_run_single, task), task) for task in tasks]
            for future, task in submitted:
                try:
                    outcomes.append(future.result())
                except MospError as exc:
                    diagnostics.append(f"pair {task[4]} run {task[5]}: learner failed: {exc}")

    samples: list[MetricSample] = []
    for pair_idx, run_idx, trace, wall_ms in outcomes:
        timings.append(TimingRow(f"p{pair_idx}r{run_idx}", "qrmo", wall_ms))
        try:
            samples.extend(_evaluate_trace(references[pair_idx], pair_idx, run_idx, trace))
        except MospError as exc:
            diagnostics.append(f"pair {pair_idx} run {run_idx}: scoring failed: {exc}")

    expected = config.pairs * config.runs_per_pair * config.qrmo.episodes
    complete = not diagnostics and len(samples) == expected
    return ExperimentResult(
        config=config,
        topology_name=config.topology.label,
        endpoint_pairs=pairs,
        samples=samples,
        aggregates=_aggregate_samples(samples, config.qrmo.episodes),
        timings=timings,
        diagnostics=diagnostics,
        complete=complete,
    )


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def emit_csv(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """Write metrics, aggregate and timing CSVs; returns the paths written.

    Metric and aggregate bytes are a pure function of config and master
    seed; the timing file is informational and varies between runs.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = _safe_name(result.topology_name)

    metrics_path = out / f"metrics_{name}.csv"
    with open(metrics_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance", "run", "episode", "dps", "correctness", "num_correct"])
        for s in result.samples:
            writer.writerow([s.instance, s.run, s.episode, repr(s.dps), s.correctness, s.num_correct])

    aggregate_path = out / f"aggregate_{name}.csv"
    with open(aggregate_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["topology", "episode", "metric", "mean", "ci95_halfwidth", "n"])
        for row in result.aggregates:
            writer.writerow(
                [
                    result.topology_name,
                    row.episode,
                    row.metric,
                    repr(row.stat.mean),
                    repr(row.stat.ci95_halfwidth),
                    row.stat.n,
                ]
            )

    timings_path = out / f"timings_{name}.csv"
    with open(timings_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance", "algorithm", "wall_ms"])
        for row in result.timings:
            writer.writerow([row.instance, row.algorithm, repr(row.wall_ms)])

    return [metrics_path, aggregate_path, timings_path]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def _plot_dps(name: str, series: list[tuple[int, AggregateStat]], path: Path) -> None:
    """Mean DPS vs episode on a log scale with a CI band.

    Zero means and band edges are clamped to a tiny display floor; the
    underlying data is untouched.
    """
    plt = _pyplot()
    episodes = [ep for ep, _ in series]
    means = [max(st.mean, LOG_PLOT_FLOOR) for _, st in series]
    lower = [max(st.mean - st.ci95_halfwidth, LOG_PLOT_FLOOR) for _, st in series]
    upper = [max(st.mean + st.ci95_halfwidth, LOG_PLOT_FLOOR) for _, st in series]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(episodes, means, marker="o", markersize=3, linewidth=1.2, label="mean")
    ax.fill_between(episodes, lower, upper, alpha=0.25, label="95% CI")
    ax.set_yscale("log")
    ax.set_xlabel("episode")
    ax.set_ylabel("distance to Pareto set")
    ax.set_title(name)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _plot_bars(
    metric: str,
    data: dict[str, dict[int, AggregateStat]],
    checkpoints: tuple[int, ...],
    path: Path,
) -> None:
    """Grouped bars: one group per checkpoint episode, one bar per topology."""
    plt = _pyplot()
    names = sorted(data)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    width = 0.8 / max(len(names), 1)
    for i, name in enumerate(names):
        stats = data[name]
        xs = [k + i * width for k in range(len(checkpoints))]
        heights = [stats[cp].mean if cp in stats else 0.0 for cp in checkpoints]
        errors = [stats[cp].ci95_halfwidth if cp in stats else 0.0 for cp in checkpoints]
        ax.bar(xs, heights, width, yerr=errors, capsize=2, label=name)
    ax.set_xticks([k + 0.4 - width / 2 for k in range(len(checkpoints))])
    ax.set_xticklabels([str(cp) for cp in checkpoints])
    ax.set_xlabel("episode")
    ax.set_ylabel(metric.replace("_", " "))
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def emit_plots(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """Render the single-experiment plots: a DPS curve and two bar charts."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = _safe_name(result.topology_name)
    dps_series = [(r.episode, r.stat) for r in result.aggregates if r.metric == "dps"]
    written: list[Path] = []

    path = out / f"dps_{name}.svg"
    _plot_dps(result.topology_name, dps_series, path)
    written.append(path)

    for metric in ("correctness", "num_correct"):
        stats = {r.episode: r.stat for r in result.aggregates if r.metric == metric}
        cps = tuple(cp for cp in result.config.checkpoints if cp in stats)
        path = out / f"{metric}_{name}.svg"
        _plot_bars(metric, {result.topology_name: stats}, cps or result.config.checkpoints, path)
        written.append(path)
    return written


def read_aggregate_csv(path: str | Path) -> dict[str, dict[str, dict[int, AggregateStat]]]:
    """Parse an aggregate CSV into {topology: {metric: {episode: stat}}}."""
    data: dict[str, dict[str, dict[int, AggregateStat]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = {"topology", "episode", "metric", "mean", "ci95_halfwidth", "n"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise ConfigError(f"{path}: unexpected aggregate CSV columns {reader.fieldnames}")
        for row in reader:
            try:
                stat = AggregateStat(float(row["mean"]), float(row["ci95_halfwidth"]), int(row["n"]))
                episode = int(row["episode"])
            except (TypeError, ValueError):
                raise ConfigError(f"{path}: malformed aggregate row {row}") from None
            data.setdefault(row["topology"], {}).setdefault(row["metric"], {})[episode] = stat
    return data


def plot_from_dir(
    in_dir: str | Path,
    out_dir: str | Path | None = None,
    checkpoints: tuple[int, ...] | None = None,
) -> list[Path]:
    """Render plots for every ``aggregate_*.csv`` in a directory.

    Produces one DPS curve per topology plus cross-topology bar charts for
    correctness and num_correct at the checkpoint episodes (defaults
    filtered to the episodes actually present).
    """
    in_path = Path(in_dir)
    files = sorted(in_path.glob("aggregate_*.csv"))
    if not files:
        raise ConfigError(f"no aggregate_*.csv files in {in_path}")
    out = Path(out_dir) if out_dir is not None else in_path
    out.mkdir(parents=True, exist_ok=True)

    merged: dict[str, dict[str, dict[int, AggregateStat]]] = {}
    for path in files:
        for topology, metrics in read_aggregate_csv(path).items():
            merged.setdefault(topology, {}).update(metrics)

    written: list[Path] = []
    for topology, metrics in sorted(merged.items()):
        series = sorted(metrics.get("dps", {}).items())
        if series:
            path = out / f"dps_{_safe_name(topology)}.svg"
            _plot_dps(topology, series, path)
            written.append(path)

    for metric in ("correctness", "num_correct"):
        data = {t: m[metric] for t, m in merged.items() if metric in m}
        if not data:
            continue
        available = set.intersection(*(set(stats) for stats in data.values()))
        cps = tuple(c for c in (checkpoints or DEFAULT_CHECKPOINTS) if c in available)
        if not cps:
            cps = tuple(sorted(available))[-4:]
        if not cps:
            continue
        path = out / f"{metric}.svg"
        _plot_bars(metric, data, cps, path)
        written.append(path)
    return written
