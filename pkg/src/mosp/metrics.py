"""Solution-quality metrics and small-sample aggregation.

Distance to the exact Pareto set is measured after per-attribute max
normalization so attributes on different scales weigh equally; correctness
is exact cost-vector membership.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import MospError
from .graph import CostVec
from .pareto import COST_TOL, ParetoSet


def normalization_factors(
    pareto_costs: Sequence[CostVec],
    solution_costs: Sequence[CostVec],
) -> tuple[float, ...]:
    """Per-attribute maximum over both sets, with zeros replaced by 1.

    The guard keeps an all-zero attribute from dividing by zero; the order
    of the two arguments does not matter.
    """
    if not pareto_costs or not solution_costs:
        raise MospError("normalization needs at least one vector in each set")
    num = len(pareto_costs[0])
    factors = [0.0] * num
    for vec in (*pareto_costs, *solution_costs):
        if len(vec) != num:
            raise MospError(f"cost vectors differ in length: {len(vec)} vs {num}")
        for j, v in enumerate(vec):
            if v > factors[j]:
                factors[j] = v
    return tuple(f if f > 0.0 else 1.0 for f in factors)


def dps(pareto_costs: Sequence[CostVec], solution_costs: Sequence[CostVec]) -> float:
    """Smallest Euclidean distance between the normalized sets.

    Zero exactly when some solution vector equals some Pareto vector.
    """
    factors = np.asarray(normalization_factors(pareto_costs, solution_costs))
    psi = np.asarray(pareto_costs, dtype=float) / factors
    omega = np.asarray(solution_costs, dtype=float) / factors
    diff = omega[:, None, :] - psi[None, :, :]
    return float(np.sqrt((diff * diff).sum(axis=2)).min())


def correctness(pareto: ParetoSet, solution_costs: Sequence[CostVec], tol: float = COST_TOL) -> int:
    """1 if at least one solution matches a Pareto member within ``tol``, else 0."""
    return 1 if num_correct(pareto, solution_costs, tol) >= 1 else 0


def num_correct(pareto: ParetoSet, solution_costs: Sequence[CostVec], tol: float = COST_TOL) -> int:
    """Count of solutions matching Pareto members, slot multiplicity included.

    Duplicate solution vectors count once each; the result ranges from 0 to
    ``len(solution_costs)``.
    """
    if not solution_costs:
        raise MospError("need at least one solution vector")
    return sum(1 for cost in solution_costs if pareto.contains_cost(cost, tol))


@dataclass(frozen=True)
class AggregateStat:
    """Sample mean with a 95% confidence half-width."""

    mean: float
    ci95_halfwidth: float
    n: int


def aggregate(samples: Sequence[float]) -> AggregateStat:
    """Mean and 95% Student-t confidence half-width of the samples.

    A single sample gets a zero half-width, as does a constant series.
    """
    n = len(samples)
    if n < 1:
        raise MospError("cannot aggregate an empty sample list")
    mean = statistics.fmean(samples)
    if n == 1:
        return AggregateStat(mean, 0.0, 1)
    spread = statistics.stdev(samples)
    half = float(stats.t.ppf(0.975, n - 1)) * spread / math.sqrt(n)
    return AggregateStat(mean, half, n)


@dataclass(frozen=True)
class MetricSample:
    """Metrics for one (endpoint pair, run) instance at one episode.

    ``dps`` is NaN while the run has not yet completed a route. The
    correctness flag is 1 exactly when ``num_correct`` is positive.
    """

    instance: int
    run: int
    episode: int
    dps: float
    correctness: int
    num_correct: int

    def __post_init__(self):
        if self.episode < 1:
            raise MospError(f"episode must be >= 1, got {self.episode}")
        if self.correctness not in (0, 1):
            raise MospError(f"correctness must be 0 or 1, got {self.correctness}")
        if self.num_correct < 0:
            raise MospError(f"num_correct must be >= 0, got {self.num_correct}")
        if self.correctness != (1 if self.num_correct >= 1 else 0):
            raise MospError("correctness flag disagrees with num_correct")
        if not math.isnan(self.dps) and self.dps < 0:
            raise MospError(f"dps must be >= 0, got {self.dps}")
