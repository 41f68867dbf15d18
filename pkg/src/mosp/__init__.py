"""Multi-objective shortest paths on cost-vector networks.

Exact Pareto sets via label-setting search, a tabular multi-objective
Q-routing learner, solution-quality metrics, and a reproducible benchmark
harness with CSV and plot output.
"""

from .errors import ConfigError, GraphError, GraphFormatError, MospError
from .graph import (
    CostDistribution,
    Edge,
    Graph,
    TopologySpec,
    UniformMixture,
    additive_to_loss,
    default_cost_distribution,
    generate_topology,
    load_graph,
    loss_to_additive,
    parse_topology,
    sample_costs,
    save_graph,
)
from .mda import brute_force_pareto, mda_pareto
from .metrics import (
    AggregateStat,
    MetricSample,
    aggregate,
    correctness,
    dps,
    normalization_factors,
    num_correct,
)
from .pareto import COST_TOL, ParetoSet, Route, dominates, route_cost, validate_route
from .qrmo import (
    BestMemory,
    QRMOConfig,
    QTable,
    dominance_selection,
    extract_solutions,
    qrmo_run,
    run_episode,
    update_best_path,
    update_q,
)
from .bench import (
    ExperimentConfig,
    ExperimentResult,
    emit_csv,
    emit_plots,
    load_experiment_config,
    plot_from_dir,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateStat",
    "BestMemory",
    "COST_TOL",
    "ConfigError",
    "CostDistribution",
    "Edge",
    "ExperimentConfig",
    "ExperimentResult",
    "Graph",
    "GraphError",
    "GraphFormatError",
    "MetricSample",
    "MospError",
    "ParetoSet",
    "QRMOConfig",
    "QTable",
    "Route",
    "TopologySpec",
    "UniformMixture",
    "additive_to_loss",
    "aggregate",
    "brute_force_pareto",
    "correctness",
    "default_cost_distribution",
    "dominance_selection",
    "dominates",
    "dps",
    "emit_csv",
    "emit_plots",
    "extract_solutions",
    "generate_topology",
    "load_experiment_config",
    "load_graph",
    "loss_to_additive",
    "mda_pareto",
    "normalization_factors",
    "num_correct",
    "parse_topology",
    "plot_from_dir",
    "qrmo_run",
    "route_cost",
    "run_episode",
    "run_experiment",
    "sample_costs",
    "save_graph",
    "update_best_path",
    "update_q",
    "validate_route",
]
