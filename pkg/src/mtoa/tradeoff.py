"""Throughput/fairness sweeps, Pareto frontiers, and parameter tuning.

A sweep evaluates the analytical pipeline over a grid of flat-schedule
strategies (one non-capture probability, a batch size, a capture depth)
and yields one throughput/fairness point per cell. The frontier keeps
the mutually non-dominated points; tuning picks the highest-throughput
frontier point that still meets a fairness floor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ConvergenceError, FairnessFloorError
from .queueing import analyze_strategy
from .strategy import AccessStrategy, capture_depth


@dataclass(frozen=True)
class TradeoffPoint:
    """One (throughput, fairness) operating point and what produced it."""

    throughput: float
    fairness: float
    params: dict
    source: str = "analysis"
    error: str | None = None


@dataclass(frozen=True)
class SweepGrid:
    """Grid of flat-schedule strategies to evaluate for one population.

    q_values are non-capture transmission probabilities, batch_sizes the
    packets served per contention win, capture_depths the number of
    probability-1 stages; horizon is the fairness evaluation window.
    """

    q_values: tuple[float, ...]
    batch_sizes: tuple[int, ...]
    capture_depths: tuple[int, ...]
    horizon: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "q_values", tuple(float(q) for q in self.q_values))
        object.__setattr__(self, "batch_sizes", tuple(int(m) for m in self.batch_sizes))
        object.__setattr__(
            self, "capture_depths", tuple(int(c) for c in self.capture_depths)
        )
        if self.n < 1:
            raise ConfigurationError("n must be >= 1")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")


def default_q_grid(low: float = 1e-10, high: float = 1e-1,
                   points: int = 200) -> tuple[float, ...]:
    return tuple(np.logspace(np.log10(low), np.log10(high), points))


def default_batch_grid(low: int = 1, high: int = 10 ** 6,
                       points: int = 100) -> tuple[int, ...]:
    raw = np.round(np.logspace(np.log10(low), np.log10(high), points)).astype(int)
    return tuple(int(m) for m in np.unique(raw))


def _null_action_grid(low: int = 10, high: int = 10 ** 6,
                      points: int = 200) -> tuple[int, ...]:
    raw = np.round(np.logspace(np.log10(low), np.log10(high), points)).astype(int)
    return tuple(int(v) for v in np.unique(raw))


def mtoa_g_family_grid(n: int, horizon: float,
                       batch_sizes: tuple[int, ...] | None = None) -> SweepGrid:
    """Global-reward family: null actions pinned to n-1 (q = 1/n), batch swept."""
    return SweepGrid(
        q_values=(1.0 / n,),
        batch_sizes=batch_sizes or default_batch_grid(),
        capture_depths=(0,),
        horizon=horizon,
        n=n,
    )


def mtoa_l_family_grid(n: int, horizon: float,
                       q_values: tuple[float, ...] | None = None,
                       capture_depth_value: int = 2) -> SweepGrid:
    """Local-reward family: capture stages fixed, contention probability swept.

    The default sweep uses only realizable probabilities 1/(L+1) for
    integer null-action counts L; that is what the scheme can actually be
    configured to, and the denser tail keeps the frontier resolved at
    large populations.
    """
    if q_values is None:
        q_values = tuple(1.0 / (L + 1) for L in _null_action_grid(points=400))
    return SweepGrid(
        q_values=q_values,
        batch_sizes=(1,),
        capture_depths=(capture_depth_value,),
        horizon=horizon,
        n=n,
    )


def sweep_tradeoff(grid: SweepGrid) -> list[TradeoffPoint]:
    """One analytical point per grid cell; failed cells are flagged, not dropped."""
    points = []
    for depth in grid.capture_depths:
        for m in grid.batch_sizes:
            for q in grid.q_values:
                params = {
                    "q_noncapture": q, "batch_size": m, "capture_stages": depth,
                    "n": grid.n, "horizon": grid.horizon,
                }
                try:
                    strategy = AccessStrategy(
                        batch_size=m, capture_stages=depth, cutoff_stage=depth,
                        tx_probs=(1.0,) * depth + (q,),
                    )
                    result = analyze_strategy(strategy, grid.n, grid.horizon)
                except (ConfigurationError, ConvergenceError) as exc:
                    points.append(TradeoffPoint(
                        throughput=float("nan"), fairness=float("nan"),
                        params=params, error=str(exc),
                    ))
                    continue
                points.append(TradeoffPoint(
                    throughput=result.throughput, fairness=result.fairness,
                    params=params,
                ))
    return points


def _point_key(p: TradeoffPoint):
    return (p.fairness, p.throughput, p.source, repr(sorted(p.params.items())))


def pareto_frontier(points: list[TradeoffPoint]) -> list[TradeoffPoint]:
    """Maximal points under (throughput, fairness) dominance.

    A point is dominated if another is at least as good on both axes and
    strictly better on one; exact coordinate ties are all retained.
    Flagged (errored) points are ignored. Output is sorted by fairness
    ascending and does not depend on input order.
    """
    valid = [p for p in points if p.error is None]
    coords = sorted({(p.throughput, p.fairness) for p in valid},
                    key=lambda c: (-c[0], -c[1]))
    kept: set[tuple[float, float]] = set()
    best_fairness = -np.inf
    for thr, fair in coords:
        if fair > best_fairness:
            kept.add((thr, fair))
            best_fairness = fair
    frontier = [p for p in valid if (p.throughput, p.fairness) in kept]
    return sorted(frontier, key=_point_key)


def max_throughput_under_fairness(frontier: list[TradeoffPoint],
                                  j_min: float) -> TradeoffPoint:
    """Highest-throughput frontier point with fairness >= the floor."""
    feasible = [p for p in frontier if p.error is None and p.fairness >= j_min]
    if not feasible:
        raise FairnessFloorError(
            f"fairness floor {j_min} infeasible on this frontier"
        )
    return max(feasible, key=lambda p: (p.throughput, p.fairness))


@dataclass(frozen=True)
class RecommendedLocal:
    """Tuned local-reward parameters and the predicted operating point."""

    learning_rate: float
    reset_threshold: float
    null_actions: int
    predicted: TradeoffPoint


@dataclass(frozen=True)
class RecommendedGlobal:
    """Tuned global-reward parameters and the predicted operating point."""

    null_actions: int
    reset_window: int
    predicted: TradeoffPoint


def recommend_mtoa_l(n: int, horizon: float, j_min: float,
                     learning_rate: float = 0.9,
                     reset_threshold: float = 0.05) -> RecommendedLocal:
    """Tune the local-reward scheme for a fairness floor.

    The learning rate and reset threshold must place the capture depth at
    2 (the best connection-free tradeoff); the number of null actions is
    then chosen on the analytical frontier over realizable integer
    values.
    """
    if n < 2:
        raise ConfigurationError("tuning needs n >= 2")
    depth = capture_depth(learning_rate, reset_threshold)
    if depth != 2:
        raise ConfigurationError(
            f"(learning_rate={learning_rate}, reset_threshold={reset_threshold}) "
            f"gives capture depth {depth}; tuning requires depth 2"
        )
    grid = mtoa_l_family_grid(n, horizon)
    best = max_throughput_under_fairness(pareto_frontier(sweep_tradeoff(grid)), j_min)
    null_actions = round(1.0 / best.params["q_noncapture"]) - 1
    return RecommendedLocal(
        learning_rate=learning_rate, reset_threshold=reset_threshold,
        null_actions=int(null_actions), predicted=best,
    )


def recommend_mtoa_g(n: int, horizon: float, j_min: float,
                     batch_sizes: tuple[int, ...] | None = None) -> RecommendedGlobal:
    """Tune the global-reward scheme for a fairness floor.

    Null actions are always n - 1 (contention probability exactly 1/n,
    which maximizes throughput and fairness simultaneously); the reset
    window is the largest batch size on the frontier still meeting the
    floor.
    """
    if n < 2:
        raise ConfigurationError("tuning needs n >= 2")
    grid = mtoa_g_family_grid(n, horizon, batch_sizes)
    best = max_throughput_under_fairness(pareto_frontier(sweep_tradeoff(grid)), j_min)
    return RecommendedGlobal(
        null_actions=n - 1,
        reset_window=int(best.params["batch_size"]),
        predicted=best,
    )
