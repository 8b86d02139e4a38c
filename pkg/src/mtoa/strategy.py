"""Maps learned bandit behaviour onto explicit access-strategy parameters.

Both schemes settle into a simple renewal pattern: contenders transmit
with a flat probability, a winner may hold the channel for a while, and
everybody eventually re-contends. That pattern is captured by four
numbers: the batch size served per successful contention, the number of
leading backoff stages transmitted with probability 1 (capture stages),
the cutoff stage after which the transmission probability stays flat,
and the per-stage transmission probabilities themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

#: Reported capture depth when a positive entry can never cross the threshold.
UNBOUNDED_CAPTURE = math.inf


@dataclass(frozen=True)
class AccessStrategy:
    """Queueing-model view of an access scheme.

    batch_size: packets served per successful contention (1 means every
        packet contends on its own).
    capture_stages: leading stages transmitted with probability 1.
    cutoff_stage: stage beyond which the transmission probability is flat.
    tx_probs: transmission probability per stage 0..cutoff_stage,
        non-increasing, each in (0, 1], and 1 below ``capture_stages``.
    """

    batch_size: int
    capture_stages: int
    cutoff_stage: int
    tx_probs: tuple[float, ...]

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if not 0 <= self.capture_stages <= self.cutoff_stage:
            raise ConfigurationError("need 0 <= capture_stages <= cutoff_stage")
        probs = tuple(float(p) for p in self.tx_probs)
        object.__setattr__(self, "tx_probs", probs)
        if len(probs) != self.cutoff_stage + 1:
            raise ConfigurationError("tx_probs must have cutoff_stage + 1 entries")
        for k, p in enumerate(probs):
            if not 0.0 < p <= 1.0:
                raise ConfigurationError("transmission probabilities must lie in (0,1]")
            if k < self.capture_stages and p != 1.0:
                raise ConfigurationError("capture stages must transmit with probability 1")
            if k > 0 and p > probs[k - 1]:
                raise ConfigurationError("tx_probs must be non-increasing")


@dataclass(frozen=True)
class StrategyClass:
    """Design features: sensing, connection, and capture behaviour."""

    sensing: str
    connection: str
    capture: str


def capture_depth(learning_rate: float, reset_threshold: float,
                  q0: float = 1.0) -> int | float:
    """Failures needed before a winner's transmit entry resets.

    A winner holds entry value ``q0`` and loses a factor (1 - learning_rate)
    per failed transmission until the value lands at or below the reset
    threshold. Returns ``UNBOUNDED_CAPTURE`` when that never happens
    (threshold 0 with learning_rate < 1).
    """
    if not 0.0 < learning_rate <= 1.0:
        raise ConfigurationError("learning_rate must lie in (0,1]")
    if reset_threshold < 0:
        raise ConfigurationError("reset_threshold must be >= 0")
    if not 0.0 < q0 <= 1.0:
        raise ConfigurationError("q0 must lie in (0,1]")
    if reset_threshold >= learning_rate:
        return 0
    if learning_rate == 1.0:
        return 1
    if reset_threshold == 0.0:
        return UNBOUNDED_CAPTURE
    steps = math.log(reset_threshold / q0) / math.log(1.0 - learning_rate)
    return max(0, math.ceil(steps))


def capture_depth_oracle(learning_rate: float, reset_threshold: float,
                         q0: float = 1.0, max_iter: int = 10 ** 6) -> int | float:
    """Literal decay simulation: first k with (1-lr)^k * q0 <= threshold.

    Iterates in log space, which orders identically to the float product
    but cannot underflow; a threshold of exactly 0 is therefore never
    reached (a positive value stays positive in exact arithmetic), except
    with learning_rate 1 where one failure lands exactly on zero.
    """
    if not 0.0 < learning_rate <= 1.0:
        raise ConfigurationError("learning_rate must lie in (0,1]")
    if not 0.0 < q0 <= 1.0:
        raise ConfigurationError("q0 must lie in (0,1]")
    target = math.log(reset_threshold) if reset_threshold > 0 else -math.inf
    log_decay = math.log1p(-learning_rate) if learning_rate < 1 else -math.inf
    log_value = math.log(q0)
    for k in range(max_iter + 1):
        if log_value <= target:
            return k
        log_value += log_decay
    return UNBOUNDED_CAPTURE


def derive_strategy_mtoa_l(null_actions: int, learning_rate: float,
                           reset_threshold: float, q0: float = 1.0) -> AccessStrategy:
    """Strategy a node settles into under local rewards.

    Every packet contends on its own (batch size 1); a winner transmits
    with probability 1 until ``capture_depth`` failures have pushed its
    entry under the threshold, then contends at 1/(null_actions + 1).
    """
    if null_actions < 1:
        raise ConfigurationError("null_actions must be >= 1")
    depth = capture_depth(learning_rate, reset_threshold, q0)
    if math.isinf(depth):
        raise ConfigurationError(
            "reset threshold 0 lets a winner hold the channel forever; "
            "no re-contention renewal exists"
        )
    contend = 1.0 / (null_actions + 1)
    return AccessStrategy(
        batch_size=1,
        capture_stages=depth,
        cutoff_stage=depth,
        tx_probs=(1.0,) * depth + (contend,),
    )


def derive_strategy_mtoa_g(null_actions: int, reset_window: int | None) -> AccessStrategy:
    """Strategy a node settles into under global rewards.

    Contention at 1/(null_actions + 1); a winner holds the channel for
    the full reset window, so the window size is the served batch size.
    """
    if null_actions < 1:
        raise ConfigurationError("null_actions must be >= 1")
    if reset_window is None or math.isinf(reset_window):
        raise ConfigurationError("unbounded reset window has no re-contention renewal")
    if reset_window < 1:
        raise ConfigurationError("reset_window must be >= 1")
    return AccessStrategy(
        batch_size=int(reset_window),
        capture_stages=0,
        cutoff_stage=0,
        tx_probs=(1.0 / (null_actions + 1),),
    )


def classify(strategy: AccessStrategy) -> StrategyClass:
    """Design features of a strategy; both schemes learn sensing-free access."""
    return StrategyClass(
        sensing="sensing-free",
        connection="connection-based" if strategy.batch_size > 1 else "connection-free",
        capture="capture-based" if strategy.capture_stages >= 1 else "capture-free",
    )
