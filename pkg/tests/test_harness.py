"""Harness: config parsing, CSV artifacts, modes, CLI exit codes."""

import json
import math

import pytest

from mtoa import (
    ConfigurationError,
    ReportRow,
    compare_sim_analysis,
    emit_report_csv,
    parse_config,
    parse_report_csv,
    run_experiment,
)
from mtoa.cli import main


def _row(**overrides):
    base = dict(scheme="mtoa-g", n=4, horizon=1000, source="sim", seed=1,
                null_actions=3, learning_rate=0.9, reset_window=5,
                lambda_out=0.5, jain=0.9)
    base.update(overrides)
    return ReportRow(**base)


class TestParseConfig:
    def test_minimal_simulate_gets_defaults(self):
        spec = parse_config(json.dumps({
            "mode": "simulate", "scheme": "mtoa-g", "n": 100, "L": 99,
            "m_window": 100, "seed": 1,
        }))
        assert spec.horizon == 10 ** 6
        assert spec.horizon_is_default
        assert spec.replications == 5
        assert spec.learning_rate == 0.9

    def test_alpha_range_error(self):
        with pytest.raises(ConfigurationError, match=r"alpha must lie in \(0,1\]"):
            parse_config(json.dumps({
                "mode": "simulate", "scheme": "mtoa-l", "n": 4, "L": 3,
                "q_th": 0.1, "alpha": 1.5,
            }))

    def test_valid_recommend_spec(self):
        spec = parse_config(json.dumps({
            "mode": "recommend", "scheme": "mtoa-l", "n": 100,
            "T": 10_000_000, "j_min": 0.99,
        }))
        assert spec.mode == "recommend"
        assert spec.horizon == 10 ** 7
        assert not spec.horizon_is_default

    def test_unknown_key_named(self):
        with pytest.raises(ConfigurationError, match="'frobnicate'"):
            parse_config(json.dumps({"mode": "simulate", "frobnicate": 1}))

    def test_missing_mode(self):
        with pytest.raises(ConfigurationError, match="mode"):
            parse_config(json.dumps({"n": 4}))

    def test_local_scheme_needs_threshold(self):
        with pytest.raises(ConfigurationError, match="q_th"):
            parse_config(json.dumps({
                "mode": "simulate", "scheme": "mtoa-l", "n": 4, "L": 3,
            }))

    def test_not_json(self):
        with pytest.raises(ConfigurationError, match="JSON"):
            parse_config("scheme: mtoa-g")

    def test_explicit_strategy_for_analyze(self):
        spec = parse_config(json.dumps({
            "mode": "analyze", "n": 50,
            "strategy": {"batch_size": 10, "capture_stages": 0,
                         "cutoff_stage": 0, "tx_probs": [0.02]},
        }))
        assert spec.strategy.batch_size == 10


class TestCsvRoundTrip:
    def test_round_trip_identity(self):
        rows = [
            _row(),
            _row(seed=None, lambda_out=0.51, rel_error=0.02, rel_error_jain=0.001),
            _row(scheme="mtoa-l", reset_window=None, reset_threshold=0.05,
                 capture_stages=2, q_noncapture=0.01, source="analysis"),
            _row(reset_window=math.inf),
            _row(lambda_out=None, jain=None, error="did not converge"),
        ]
        assert parse_report_csv(emit_report_csv(rows)) == rows

    def test_emit_is_deterministic(self):
        rows = [_row(), _row(seed=2)]
        assert emit_report_csv(rows) == emit_report_csv(rows)

    def test_header_checked(self):
        with pytest.raises(ConfigurationError):
            parse_report_csv("bogus,header\n1,2\n")


class TestCompare:
    def test_identical_values_zero_error(self):
        sim = [_row(lambda_out=0.4, jain=0.99)]
        ana = [_row(source="analysis", seed=None, lambda_out=0.4, jain=0.99)]
        result = compare_sim_analysis(sim, ana)
        assert result.rows[0].rel_error == 0.0
        assert result.rows[0].rel_error_jain == 0.0

    def test_relative_error_arithmetic(self):
        sim = [_row(lambda_out=0.36, jain=0.99)]
        ana = [_row(source="analysis", seed=None, lambda_out=0.3697, jain=0.999)]
        result = compare_sim_analysis(sim, ana)
        assert result.rows[0].rel_error == pytest.approx(0.0262, abs=1e-4)

    def test_disjoint_keys_reported(self):
        sim = [_row(n=4)]
        ana = [_row(source="analysis", n=5)]
        result = compare_sim_analysis(sim, ana)
        assert result.rows == []
        assert len(result.diagnostics["unmatched_sim"]) == 1
        assert len(result.diagnostics["unmatched_analysis"]) == 1


def _write_config(tmp_path, payload, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestRunExperiment:
    def test_simulate_mode_is_byte_deterministic(self, tmp_path):
        spec = parse_config(json.dumps({
            "mode": "simulate", "scheme": "mtoa-g", "n": 4, "L": 3,
            "m_window": 5, "T": 3000, "seed": 9, "replications": 2,
        }))
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_experiment(spec, out_path=str(out_a))
        run_experiment(spec, out_path=str(out_b))
        assert out_a.read_bytes() == out_b.read_bytes()
        rows = parse_report_csv(out_a.read_text(encoding="utf-8"))
        assert len(rows) == 3  # two replications plus the aggregate
        assert rows[-1].seed is None
        assert [r.seed for r in rows[:2]] == [9, 10]

    def test_compare_mode_attaches_errors(self):
        spec = parse_config(json.dumps({
            "mode": "compare", "scheme": "mtoa-g", "n": 8, "L": 7,
            "m_window": 10, "T": 40000, "seed": 3, "replications": 2,
        }))
        rows, summary = run_experiment(spec)
        sources = [r.source for r in rows]
        assert sources.count("analysis") == 1
        mean_rows = [r for r in rows if r.source == "sim" and r.seed is None]
        assert len(mean_rows) == 1
        assert mean_rows[0].rel_error is not None
        assert summary["rel_error_lambda_out"] < 0.2

    def test_analyze_mode(self):
        spec = parse_config(json.dumps({
            "mode": "analyze", "scheme": "mtoa-g", "n": 100, "L": 99,
            "m_window": 100, "T": 10_000_000,
        }))
        rows, summary = run_experiment(spec)
        assert rows[0].lambda_out == pytest.approx(0.9832389320, abs=1e-6)
        assert summary["jain"] == rows[0].jain

    def test_sweep_mode_emits_frontier(self, tmp_path):
        spec = parse_config(json.dumps({
            "mode": "sweep", "scheme": "mtoa-g", "n": 20, "T": 100000,
            "j_min": 0.9,
        }))
        out = tmp_path / "frontier.csv"
        rows, summary = run_experiment(spec, out_path=str(out))
        assert summary["frontier"] == len(
            [r for r in rows if r.error is None])
        assert summary["failed"] == 0
        parsed = parse_report_csv(out.read_text(encoding="utf-8"))
        assert parsed == rows
        assert "max_throughput_at_j_min" in summary

    def test_recommend_mode(self):
        spec = parse_config(json.dumps({
            "mode": "recommend", "scheme": "mtoa-g", "n": 50, "T": 1_000_000,
            "j_min": 0.95,
        }))
        rows, summary = run_experiment(spec)
        assert rows[0].null_actions == 49
        assert summary["recommended"]["L"] == 49
        assert rows[0].jain >= 0.95

    def test_full_scale_flag_respects_explicit_horizon(self):
        explicit = parse_config(json.dumps({
            "mode": "analyze", "scheme": "mtoa-g", "n": 10, "L": 9,
            "m_window": 4, "T": 777,
        }))
        rows, _ = run_experiment(explicit, full_scale=True)
        assert rows[0].horizon == 777
        defaulted = parse_config(json.dumps({
            "mode": "analyze", "scheme": "mtoa-g", "n": 10, "L": 9,
            "m_window": 4,
        }))
        rows, _ = run_experiment(defaulted, full_scale=True)
        assert rows[0].horizon == 10 ** 7

    def test_parallel_workers_match_sequential(self):
        spec = parse_config(json.dumps({
            "mode": "simulate", "scheme": "mtoa-l", "n": 4, "L": 3,
            "q_th": 0.05, "T": 2000, "seed": 1, "replications": 3,
        }))
        rows_seq, _ = run_experiment(spec, workers=1)
        rows_par, _ = run_experiment(spec, workers=3)
        assert rows_seq == rows_par


class TestCli:
    def test_simulate_round_trip(self, tmp_path):
        cfg = _write_config(tmp_path, {
            "mode": "simulate", "scheme": "mtoa-g", "n": 4, "L": 3,
            "m_window": 5, "T": 1000, "seed": 1, "replications": 1,
        })
        out = tmp_path / "rows.csv"
        summary = tmp_path / "summary.json"
        code = main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--summary-out", str(summary)])
        assert code == 0
        assert out.exists()
        assert json.loads(summary.read_text())["mode"] == "simulate"

    def test_config_error_exit_code(self, tmp_path):
        cfg = _write_config(tmp_path, {"mode": "simulate", "bogus": 1})
        assert main(["simulate", "--config", str(cfg)]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "absent.json")]) == 2

    def test_mode_mismatch(self, tmp_path):
        cfg = _write_config(tmp_path, {
            "mode": "analyze", "scheme": "mtoa-g", "n": 4, "L": 3, "m_window": 5,
        })
        assert main(["simulate", "--config", str(cfg)]) == 2

    def test_numerical_failure_exit_code(self, tmp_path):
        cfg = _write_config(tmp_path, {
            "mode": "recommend", "scheme": "mtoa-g", "n": 10, "j_min": 1.0,
        })
        assert main(["recommend", "--config", str(cfg)]) == 3
