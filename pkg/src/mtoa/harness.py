"""Experiment orchestration: JSON configs in, deterministic CSV/JSON out.

Modes: ``simulate`` (seeded replications of the slot engine), ``analyze``
(the analytical pipeline for one strategy), ``sweep`` (family frontier),
``compare`` (simulation next to analysis with relative errors), and
``recommend`` (parameter tuning under a fairness floor).

CSV artifacts are byte-deterministic for a fixed spec: fixed column
order, ``repr`` floats, '.' decimal, LF line endings, rows sorted by
seed. The aggregate row of a simulate/compare run carries an empty seed
cell; an unbounded reset window encodes as ``inf`` and not-applicable
cells as the empty string.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .config import NetworkConfig, Scheme
from .errors import ConfigurationError
from .queueing import analyze_strategy
from .simulation import RunMetrics, run_replication
from .strategy import (
    AccessStrategy,
    capture_depth,
    derive_strategy_mtoa_g,
    derive_strategy_mtoa_l,
)
from .tradeoff import (
    SweepGrid,
    max_throughput_under_fairness,
    mtoa_g_family_grid,
    mtoa_l_family_grid,
    pareto_frontier,
    recommend_mtoa_g,
    recommend_mtoa_l,
    sweep_tradeoff,
)

MODES = ("simulate", "analyze", "sweep", "compare", "recommend")

DESK_SCALE_HORIZON = 10 ** 6
FULL_SCALE_HORIZON = 10 ** 7


@dataclass(frozen=True)
class ReportRow:
    """One emitted result row; ``None`` fields print as empty cells."""

    scheme: str
    n: int
    horizon: int
    source: str
    seed: int | None = None
    null_actions: int | None = None
    learning_rate: float | None = None
    reset_threshold: float | None = None
    reset_window: float | None = None   # int-valued, inf when unbounded
    capture_stages: int | None = None
    q_noncapture: float | None = None
    lambda_out: float | None = None
    jain: float | None = None
    rel_error: float | None = None
    rel_error_jain: float | None = None
    error: str | None = None


_COLUMNS = (
    ("scheme", "scheme"),
    ("n", "n"),
    ("T", "horizon"),
    ("seed", "seed"),
    ("L", "null_actions"),
    ("alpha", "learning_rate"),
    ("q_th", "reset_threshold"),
    ("m_window", "reset_window"),
    ("n_capture", "capture_stages"),
    ("q_noncapture", "q_noncapture"),
    ("lambda_out", "lambda_out"),
    ("jain", "jain"),
    ("source", "source"),
    ("rel_error", "rel_error"),
    ("rel_error_jain", "rel_error_jain"),
    ("error", "error"),
)

_INT_FIELDS = {"n", "horizon", "seed", "null_actions", "capture_stages"}
_FLOAT_FIELDS = {"learning_rate", "reset_threshold", "q_noncapture",
                 "lambda_out", "jain", "rel_error", "rel_error_jain"}


def _encode_cell(attr: str, value) -> str:
    if value is None:
        return ""
    if attr == "reset_window":
        return "inf" if math.isinf(value) else str(int(value))
    if attr in _INT_FIELDS:
        return str(int(value))
    if attr in _FLOAT_FIELDS:
        return repr(float(value))
    return str(value)


def _decode_cell(attr: str, text: str):
    if text == "":
        return None
    if attr == "reset_window":
        return math.inf if text == "inf" else int(text)
    if attr in _INT_FIELDS:
        return int(text)
    if attr in _FLOAT_FIELDS:
        return float(text)
    return text


def emit_report_csv(rows: list[ReportRow]) -> str:
    """Render rows to the canonical CSV text (UTF-8 content, LF, header row)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([header for header, _ in _COLUMNS])
    for row in rows:
        writer.writerow([_encode_cell(attr, getattr(row, attr)) for _, attr in _COLUMNS])
    return buf.getvalue()


def parse_report_csv(text: str) -> list[ReportRow]:
    """Inverse of :func:`emit_report_csv`."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    expected = [h for h, _ in _COLUMNS]
    if header != expected:
        raise ConfigurationError(f"unexpected CSV header {header!r}")
    rows = []
    for record in reader:
        kwargs = {attr: _decode_cell(attr, cell)
                  for (_, attr), cell in zip(_COLUMNS, record)}
        rows.append(ReportRow(**kwargs))
    return rows


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated experiment description (see parse_config for the schema)."""

    mode: str
    scheme: str | None = None
    n: int | None = None
    horizon: int = DESK_SCALE_HORIZON
    horizon_is_default: bool = True     # a default horizon yields to --full-scale
    null_actions: int | None = None
    learning_rate: float = 0.9
    reset_threshold: float | None = None
    reset_window: int | None = None     # None: unbounded (mtoa-g)
    seed: int = 1
    replications: int = 5
    j_min: float | None = None
    strategy: AccessStrategy | None = None
    grid: dict | None = None
    output_path: str | None = None


_KNOWN_KEYS = {
    "mode", "scheme", "n", "T", "L", "alpha", "q_th", "m_window", "seed",
    "replications", "j_min", "strategy", "grid", "output_path",
}

_STRATEGY_KEYS = {"batch_size", "capture_stages", "cutoff_stage", "tx_probs"}
_GRID_KEYS = {"q_values", "batch_sizes", "capture_depths"}


def parse_config(text: str) -> ExperimentSpec:
    """Parse and validate a JSON experiment config.

    Unknown keys are rejected by name; out-of-range values are rejected
    with the valid range. Defaults: T=1e6 (desk scale), replications=5,
    alpha=0.9, seed=1.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    for key in raw:
        if key not in _KNOWN_KEYS:
            raise ConfigurationError(f"unknown key {key!r}")
    mode = raw.get("mode")
    if mode not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}, got {mode!r}")

    scheme = raw.get("scheme")
    if scheme is not None:
        scheme = Scheme.parse(scheme).value

    def _int_at_least(key, minimum, value):
        if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
            raise ConfigurationError(f"{key} must be an integer >= {minimum}")
        return value

    n = raw.get("n")
    if n is not None:
        n = _int_at_least("n", 1, n)
    horizon = raw.get("T")
    horizon_is_default = horizon is None
    if horizon_is_default:
        horizon = DESK_SCALE_HORIZON
    else:
        horizon = _int_at_least("T", 1, horizon)
    null_actions = raw.get("L")
    if null_actions is not None:
        null_actions = _int_at_least("L", 1, null_actions)
    alpha = raw.get("alpha", 0.9)
    if not isinstance(alpha, (int, float)) or not 0.0 < float(alpha) <= 1.0:
        raise ConfigurationError("alpha must lie in (0,1]")
    q_th = raw.get("q_th")
    if q_th is not None and (not isinstance(q_th, (int, float)) or q_th < 0):
        raise ConfigurationError("q_th must be >= 0")
    m_window = raw.get("m_window")
    if m_window is not None:
        m_window = _int_at_least("m_window", 1, m_window)
    seed = raw.get("seed", 1)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigurationError("seed must be an integer")
    replications = _int_at_least("replications", 1, raw.get("replications", 5))
    j_min = raw.get("j_min")
    if j_min is not None and (not isinstance(j_min, (int, float))
                              or not 0.0 <= float(j_min) <= 1.0):
        raise ConfigurationError("j_min must lie in [0,1]")

    strategy = None
    if raw.get("strategy") is not None:
        sdict = raw["strategy"]
        if not isinstance(sdict, dict):
            raise ConfigurationError("strategy must be an object")
        for key in sdict:
            if key not in _STRATEGY_KEYS:
                raise ConfigurationError(f"unknown key {key!r} in strategy")
        try:
            strategy = AccessStrategy(
                batch_size=sdict["batch_size"],
                capture_stages=sdict["capture_stages"],
                cutoff_stage=sdict["cutoff_stage"],
                tx_probs=tuple(sdict["tx_probs"]),
            )
        except KeyError as exc:
            raise ConfigurationError(f"strategy is missing key {exc.args[0]!r}") from None

    grid = raw.get("grid")
    if grid is not None:
        if not isinstance(grid, dict):
            raise ConfigurationError("grid must be an object")
        for key in grid:
            if key not in _GRID_KEYS:
                raise ConfigurationError(f"unknown key {key!r} in grid")

    spec = ExperimentSpec(
        mode=mode, scheme=scheme, n=n, horizon=horizon,
        horizon_is_default=horizon_is_default,
        null_actions=null_actions, learning_rate=float(alpha),
        reset_threshold=q_th, reset_window=m_window, seed=seed,
        replications=replications, j_min=j_min, strategy=strategy,
        grid=grid, output_path=raw.get("output_path"),
    )
    _check_mode_requirements(spec)
    return spec


def _check_mode_requirements(spec: ExperimentSpec) -> None:
    def need(condition, message):
        if not condition:
            raise ConfigurationError(message)

    if spec.mode in ("simulate", "compare"):
        need(spec.scheme is not None, f"{spec.mode} mode requires 'scheme'")
        need(spec.n is not None, f"{spec.mode} mode requires 'n'")
        need(spec.null_actions is not None, f"{spec.mode} mode requires 'L'")
        if spec.scheme == Scheme.LOCAL.value:
            need(spec.reset_threshold is not None, "mtoa-l requires 'q_th'")
    elif spec.mode == "analyze":
        need(spec.n is not None, "analyze mode requires 'n'")
        if spec.strategy is None:
            need(spec.scheme is not None and spec.null_actions is not None,
                 "analyze mode requires either 'strategy' or scheme parameters")
            if spec.scheme == Scheme.LOCAL.value:
                need(spec.reset_threshold is not None, "mtoa-l requires 'q_th'")
    elif spec.mode == "sweep":
        need(spec.n is not None, "sweep mode requires 'n'")
        need(spec.scheme is not None or spec.grid is not None,
             "sweep mode requires 'scheme' or 'grid'")
    elif spec.mode == "recommend":
        need(spec.scheme is not None, "recommend mode requires 'scheme'")
        need(spec.n is not None, "recommend mode requires 'n'")
        need(spec.j_min is not None, "recommend mode requires 'j_min'")


def _resolve_horizon(spec: ExperimentSpec, full_scale: bool) -> int:
    if spec.horizon_is_default and full_scale:
        return FULL_SCALE_HORIZON
    return spec.horizon


def _network_config(spec: ExperimentSpec, horizon: int, seed: int) -> NetworkConfig:
    return NetworkConfig(
        n=spec.n, horizon=horizon, scheme=spec.scheme,
        null_actions=spec.null_actions, learning_rate=spec.learning_rate,
        reset_threshold=spec.reset_threshold
        if spec.scheme == Scheme.LOCAL.value else None,
        reset_window=spec.reset_window
        if spec.scheme == Scheme.GLOBAL.value else None,
        seed=seed,
    )


def _derived_strategy(spec: ExperimentSpec) -> AccessStrategy:
    if spec.strategy is not None:
        return spec.strategy
    if spec.scheme == Scheme.LOCAL.value:
        return derive_strategy_mtoa_l(
            spec.null_actions, spec.learning_rate, spec.reset_threshold
        )
    return derive_strategy_mtoa_g(spec.null_actions, spec.reset_window)


def _base_row(spec: ExperimentSpec, horizon: int, source: str) -> ReportRow:
    return ReportRow(
        scheme=spec.scheme or "", n=spec.n, horizon=horizon, source=source,
        null_actions=spec.null_actions, learning_rate=spec.learning_rate,
        reset_threshold=spec.reset_threshold,
        reset_window=(math.inf if spec.reset_window is None else spec.reset_window)
        if spec.scheme == Scheme.GLOBAL.value else None,
    )


def _run_one(config: NetworkConfig) -> RunMetrics:
    return run_replication(config)


def _simulation_rows(spec: ExperimentSpec, horizon: int, workers: int) -> list[ReportRow]:
    configs = [_network_config(spec, horizon, spec.seed + k)
               for k in range(spec.replications)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            metrics = list(pool.map(_run_one, configs))
    else:
        metrics = [_run_one(c) for c in configs]
    by_seed = sorted(zip(configs, metrics), key=lambda cm: cm[0].seed)
    base = _base_row(spec, horizon, "sim")
    rows = [replace(base, seed=c.seed, lambda_out=m.lambda_out_hat, jain=m.jain)
            for c, m in by_seed]
    rows.append(replace(
        base, seed=None,
        lambda_out=statistics.fmean(m.lambda_out_hat for _, m in by_seed),
        jain=statistics.fmean(m.jain for _, m in by_seed),
    ))
    return rows


def _analysis_row(spec: ExperimentSpec, horizon: int) -> ReportRow:
    strategy = _derived_strategy(spec)
    result = analyze_strategy(strategy, spec.n, horizon)
    return replace(
        _base_row(spec, horizon, "analysis"),
        capture_stages=strategy.capture_stages,
        q_noncapture=strategy.tx_probs[strategy.capture_stages],
        lambda_out=result.throughput, jain=result.fairness,
    )


_JOIN_KEY_ATTRS = ("scheme", "n", "horizon", "null_actions", "learning_rate",
                   "reset_threshold", "reset_window")


def _join_key(row: ReportRow):
    return tuple(getattr(row, a) for a in _JOIN_KEY_ATTRS)


def _relative_error(sim_value, analysis_value):
    if sim_value is None or analysis_value is None or analysis_value == 0:
        return None
    if math.isnan(sim_value) or math.isnan(analysis_value):
        return None
    return abs(sim_value - analysis_value) / analysis_value


@dataclass(frozen=True)
class CompareResult:
    """Joined rows plus the keys that failed to match (non-fatal)."""

    rows: list[ReportRow]
    diagnostics: dict


def compare_sim_analysis(sim_rows: list[ReportRow],
                         analysis_rows: list[ReportRow]) -> CompareResult:
    """Join simulation rows to analysis rows on their parameter tuple.

    Matched simulation rows come back with relative errors on throughput
    and fairness next to their analysis row; unmatched keys on either
    side are reported in the diagnostics, never silently dropped.
    """
    analysis_by_key: dict = {}
    for row in analysis_rows:
        analysis_by_key.setdefault(_join_key(row), row)
    matched: list[ReportRow] = []
    unmatched_sim = []
    used_keys = set()
    for row in sim_rows:
        key = _join_key(row)
        ana = analysis_by_key.get(key)
        if ana is None:
            unmatched_sim.append(key)
            continue
        used_keys.add(key)
        matched.append(replace(
            row,
            rel_error=_relative_error(row.lambda_out, ana.lambda_out),
            rel_error_jain=_relative_error(row.jain, ana.jain),
        ))
        if ana not in matched:
            matched.append(ana)
    unmatched_analysis = [k for k in analysis_by_key if k not in used_keys]
    return CompareResult(
        rows=matched,
        diagnostics={
            "unmatched_sim": sorted(map(str, unmatched_sim)),
            "unmatched_analysis": sorted(map(str, unmatched_analysis)),
        },
    )


def _sweep_grid(spec: ExperimentSpec, horizon: int) -> SweepGrid:
    if spec.grid is not None:
        return SweepGrid(
            q_values=tuple(spec.grid["q_values"]),
            batch_sizes=tuple(spec.grid["batch_sizes"]),
            capture_depths=tuple(spec.grid["capture_depths"]),
            horizon=horizon, n=spec.n,
        )
    if spec.scheme == Scheme.GLOBAL.value:
        return mtoa_g_family_grid(spec.n, horizon)
    depth = capture_depth(spec.learning_rate,
                          0.05 if spec.reset_threshold is None else spec.reset_threshold)
    if math.isinf(depth):
        raise ConfigurationError("q_th = 0 has no re-contention renewal to sweep")
    return mtoa_l_family_grid(spec.n, horizon, capture_depth_value=int(depth))


def _sweep_rows(spec: ExperimentSpec, horizon: int) -> tuple[list[ReportRow], dict]:
    points = sweep_tradeoff(_sweep_grid(spec, horizon))
    frontier = pareto_frontier(points)
    failed = [p for p in points if p.error is not None]
    rows = []
    base = _base_row(spec, horizon, "analysis")
    for p in frontier + failed:
        rows.append(replace(
            base,
            capture_stages=p.params["capture_stages"],
            q_noncapture=p.params["q_noncapture"],
            reset_window=(p.params["batch_size"]
                          if spec.scheme == Scheme.GLOBAL.value else base.reset_window),
            null_actions=(round(1.0 / p.params["q_noncapture"]) - 1
                          if spec.scheme is not None else None),
            lambda_out=None if p.error else p.throughput,
            jain=None if p.error else p.fairness,
            error=p.error,
        ))
    summary = {"points": len(points), "frontier": len(frontier), "failed": len(failed)}
    if spec.j_min is not None:
        best = max_throughput_under_fairness(frontier, spec.j_min)
        summary["max_throughput_at_j_min"] = best.throughput
        summary["fairness_at_max"] = best.fairness
    return rows, summary


def _recommend_rows(spec: ExperimentSpec, horizon: int) -> tuple[list[ReportRow], dict]:
    base = _base_row(spec, horizon, "analysis")
    if spec.scheme == Scheme.LOCAL.value:
        rec = recommend_mtoa_l(spec.n, horizon, spec.j_min,
                               learning_rate=spec.learning_rate,
                               reset_threshold=0.05 if spec.reset_threshold is None
                               else spec.reset_threshold)
        row = replace(
            base, null_actions=rec.null_actions, learning_rate=rec.learning_rate,
            reset_threshold=rec.reset_threshold, capture_stages=2,
            q_noncapture=rec.predicted.params["q_noncapture"],
            lambda_out=rec.predicted.throughput, jain=rec.predicted.fairness,
        )
        params = {"alpha": rec.learning_rate, "q_th": rec.reset_threshold,
                  "L": rec.null_actions}
    else:
        rec = recommend_mtoa_g(spec.n, horizon, spec.j_min)
        row = replace(
            base, null_actions=rec.null_actions, reset_window=rec.reset_window,
            capture_stages=0, q_noncapture=1.0 / spec.n,
            lambda_out=rec.predicted.throughput, jain=rec.predicted.fairness,
        )
        params = {"L": rec.null_actions, "m_window": rec.reset_window}
    summary = {"recommended": params,
               "predicted_throughput": row.lambda_out,
               "predicted_fairness": row.jain}
    return [row], summary


def run_experiment(spec: ExperimentSpec, out_path: str | None = None,
                   summary_path: str | None = None, full_scale: bool = False,
                   workers: int = 1) -> tuple[list[ReportRow], dict]:
    """Execute a spec; write the CSV (and optional JSON summary) artifacts.

    Returns the emitted rows and a summary dict. ``out_path`` overrides
    the spec's own output_path; with neither, nothing is written.
    """
    horizon = _resolve_horizon(spec, full_scale)
    summary: dict = {"mode": spec.mode, "T": horizon}
    if spec.mode == "simulate":
        rows = _simulation_rows(spec, horizon, workers)
        summary["mean_lambda_out"] = rows[-1].lambda_out
        summary["mean_jain"] = rows[-1].jain
    elif spec.mode == "analyze":
        rows = [_analysis_row(spec, horizon)]
        summary["lambda_out"] = rows[0].lambda_out
        summary["jain"] = rows[0].jain
    elif spec.mode == "compare":
        sim_rows = _simulation_rows(spec, horizon, workers)
        analysis = _analysis_row(spec, horizon)
        joined = compare_sim_analysis([sim_rows[-1]], [analysis])
        rows = sim_rows[:-1] + joined.rows
        summary["diagnostics"] = joined.diagnostics
        summary["rel_error_lambda_out"] = joined.rows[0].rel_error
        summary["rel_error_jain"] = joined.rows[0].rel_error_jain
    elif spec.mode == "sweep":
        rows, extra = _sweep_rows(spec, horizon)
        summary.update(extra)
    elif spec.mode == "recommend":
        rows, extra = _recommend_rows(spec, horizon)
        summary.update(extra)
    else:  # pragma: no cover - parse_config rejects unknown modes
        raise ConfigurationError(f"unknown mode {spec.mode!r}")

    target = out_path or spec.output_path
    if target:
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(emit_report_csv(rows))
    if summary_path:
        with open(summary_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return rows, summary
