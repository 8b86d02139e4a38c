"""Strategy identification: capture depth, derived schedules, classification."""

import math

import numpy as np
import pytest

from mtoa import (
    AccessStrategy,
    ConfigurationError,
    UNBOUNDED_CAPTURE,
    capture_depth,
    capture_depth_oracle,
    classify,
    derive_strategy_mtoa_g,
    derive_strategy_mtoa_l,
)


class TestCaptureDepthOracle:
    def test_full_rate_one_failure(self):
        assert capture_depth_oracle(1.0, 0.5, 1.0) == 1

    def test_two_decades_two_steps(self):
        # 1 -> 0.1 -> 0.01 crosses 0.05 on the second failure
        assert capture_depth_oracle(0.9, 0.05, 1.0) == 2

    def test_zero_threshold_never_reached(self):
        assert capture_depth_oracle(0.5, 0.0, 1.0, max_iter=10 ** 6) == UNBOUNDED_CAPTURE

    def test_starting_below_threshold(self):
        assert capture_depth_oracle(0.5, 0.3, 0.2) == 0


class TestCaptureDepth:
    def test_threshold_at_or_above_rate_is_capture_free(self):
        assert capture_depth(0.9, 0.9) == 0
        assert capture_depth(0.5, 0.8) == 0

    def test_full_rate_single_capture(self):
        assert capture_depth(1.0, 0.5) == 1

    def test_oracle_frozen_case(self):
        assert capture_depth(0.9, 0.05, 1.0) == 2

    def test_zero_threshold_unbounded(self):
        assert capture_depth(0.9, 0.0) == UNBOUNDED_CAPTURE

    def test_invalid_inputs(self):
        with pytest.raises(ConfigurationError):
            capture_depth(0.0, 0.5)
        with pytest.raises(ConfigurationError):
            capture_depth(0.5, -0.1)
        with pytest.raises(ConfigurationError):
            capture_depth(0.5, 0.1, q0=0.0)

    def test_matches_oracle_on_random_grid(self):
        # the regime the closed form covers: threshold strictly between 0
        # and the learning rate, rate strictly below 1
        rng = np.random.default_rng(515)
        for _ in range(10_000):
            rate = rng.uniform(0.01, 0.999)
            threshold = rng.uniform(1e-9, rate * 0.999)
            q0 = rng.uniform(1e-6, 1.0)
            assert capture_depth(rate, threshold, q0) == \
                capture_depth_oracle(rate, threshold, q0)


class TestDeriveLocal:
    def test_capture_free_threshold(self):
        s = derive_strategy_mtoa_l(99, 0.9, 1.0)
        assert (s.batch_size, s.capture_stages, s.cutoff_stage) == (1, 0, 0)
        assert s.tx_probs == (0.01,)

    def test_two_stage_capture(self):
        s = derive_strategy_mtoa_l(99, 0.9, 0.05, 1.0)
        assert (s.batch_size, s.capture_stages, s.cutoff_stage) == (1, 2, 2)
        assert s.tx_probs == (1.0, 1.0, 0.01)

    def test_full_rate_single_stage(self):
        s = derive_strategy_mtoa_l(1, 1.0, 0.5)
        assert (s.batch_size, s.capture_stages, s.cutoff_stage) == (1, 1, 1)
        assert s.tx_probs == (1.0, 0.5)

    def test_zero_threshold_rejected(self):
        with pytest.raises(ConfigurationError):
            derive_strategy_mtoa_l(9, 0.9, 0.0)

    def test_threshold_at_rate_always_capture_free(self):
        rng = np.random.default_rng(99)
        for _ in range(300):
            rate = rng.uniform(0.05, 1.0)
            threshold = rate * rng.uniform(1.0, 2.0)
            q0 = rng.uniform(0.1, 1.0)
            s = derive_strategy_mtoa_l(10, rate, threshold, q0)
            assert s.capture_stages == 0


class TestDeriveGlobal:
    def test_standard_window(self):
        s = derive_strategy_mtoa_g(99, 100)
        assert (s.batch_size, s.capture_stages, s.cutoff_stage) == (100, 0, 0)
        assert s.tx_probs == (0.01,)

    def test_window_one_degenerates_to_plain_contention(self):
        s = derive_strategy_mtoa_g(1, 1)
        assert (s.batch_size, s.capture_stages) == (1, 0)
        assert s.tx_probs == (0.5,)

    def test_small_window(self):
        s = derive_strategy_mtoa_g(9, 5)
        assert s.batch_size == 5
        assert s.tx_probs == (0.1,)

    def test_unbounded_window_rejected(self):
        with pytest.raises(ConfigurationError):
            derive_strategy_mtoa_g(9, None)
        with pytest.raises(ConfigurationError):
            derive_strategy_mtoa_g(9, math.inf)


class TestClassify:
    def test_local_capture_free(self):
        c = classify(derive_strategy_mtoa_l(99, 0.9, 0.9))
        assert (c.sensing, c.connection, c.capture) == \
            ("sensing-free", "connection-free", "capture-free")

    def test_local_capture_based(self):
        c = classify(derive_strategy_mtoa_l(99, 0.9, 0.05))
        assert (c.sensing, c.connection, c.capture) == \
            ("sensing-free", "connection-free", "capture-based")

    def test_global_connection_based(self):
        c = classify(derive_strategy_mtoa_g(99, 100))
        assert (c.sensing, c.connection, c.capture) == \
            ("sensing-free", "connection-based", "capture-free")


class TestAccessStrategyValidation:
    def test_derived_schedules_are_well_formed(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            rate = rng.uniform(0.5, 0.999)
            threshold = rng.uniform(1e-4, rate * 0.9)
            s = derive_strategy_mtoa_l(int(rng.integers(1, 10 ** 4)), rate, threshold)
            assert all(s.tx_probs[k] == 1.0 for k in range(s.capture_stages))
            assert all(s.tx_probs[k + 1] <= s.tx_probs[k]
                       for k in range(s.cutoff_stage))

    def test_increasing_schedule_rejected(self):
        with pytest.raises(ConfigurationError):
            AccessStrategy(1, 0, 1, (0.1, 0.2))

    def test_capture_stage_below_one_rejected(self):
        with pytest.raises(ConfigurationError):
            AccessStrategy(1, 1, 1, (0.9, 0.5))

    def test_wrong_length_rejected(self):
        with pytest.raises(ConfigurationError):
            AccessStrategy(1, 0, 1, (0.5,))

    def test_out_of_range_probability_rejected(self):
        with pytest.raises(ConfigurationError):
            AccessStrategy(1, 0, 0, (1.5,))
        with pytest.raises(ConfigurationError):
            AccessStrategy(1, 0, 0, (0.0,))
