"""Bandit-learned random access over a collision channel.

Four pieces: a slot-accurate simulator of the two reward designs
(mtoa-l, mtoa-g), an identification step that maps the learned behaviour
onto explicit access strategies, a renewal-process analysis that
predicts throughput and short-horizon fairness in closed form, and a
sweep/frontier layer that tunes parameters for the best
throughput-fairness tradeoff. The experiment harness and ``mtoa`` CLI
tie them together behind JSON configs and deterministic CSV artifacts.
"""

from .config import NetworkConfig, Scheme
from .errors import ConfigurationError, ConvergenceError, FairnessFloorError
from .harness import (
    CompareResult,
    ExperimentSpec,
    ReportRow,
    compare_sim_analysis,
    emit_report_csv,
    parse_config,
    parse_report_csv,
    run_experiment,
)
from .queueing import (
    AnalysisResult,
    EmpiricalMoments,
    FixedPoint,
    ServiceMoments,
    StateDistribution,
    analyze_strategy,
    fairness_index,
    hol_renewal_oracle,
    limiting_probabilities,
    max_throughput,
    network_throughput,
    service_moments,
    solve_fixed_point,
    variance_ratio_capture_free,
)
from .simulation import (
    AgentState,
    ChannelEvent,
    RunMetrics,
    Simulation,
    SlotOutcome,
    jain_index,
    resolve_channel,
    run_replication,
    select_action,
    update_q,
)
from .strategy import (
    UNBOUNDED_CAPTURE,
    AccessStrategy,
    StrategyClass,
    capture_depth,
    capture_depth_oracle,
    classify,
    derive_strategy_mtoa_g,
    derive_strategy_mtoa_l,
)
from .tradeoff import (
    RecommendedGlobal,
    RecommendedLocal,
    SweepGrid,
    TradeoffPoint,
    default_batch_grid,
    default_q_grid,
    max_throughput_under_fairness,
    mtoa_g_family_grid,
    mtoa_l_family_grid,
    pareto_frontier,
    recommend_mtoa_g,
    recommend_mtoa_l,
    sweep_tradeoff,
)

__version__ = "0.1.0"
