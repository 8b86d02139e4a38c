"""Slot-level executor for the two bandit access schemes.

The network is n saturated queues sharing one collision channel: every
node always has a packet, each slot carries at most one success, and a
transmission succeeds iff nobody else transmits in the same slot. Each
node keeps one action-value row over ``null_actions + 1`` arms (index 0
transmits, the others stay silent), plays the argmax with uniform tie
breaking, and updates the chosen entry towards its reward.

Under local rewards (mtoa-l) only a sole transmitter is rewarded and a
chosen entry is reset to zero when the post-update value is at or below
``reset_threshold``. Under global rewards (mtoa-g) every node receives
the network success indicator and an entry that has stayed positive for
``reset_window`` consecutive slots is forced back to zero.

Reproducibility: node ``i`` consumes a dedicated Philox substream spawned
from the root seed (one extra substream is reserved so nothing else ever
draws node entropy), and a replication is strictly single threaded, so
identical configs give bit-identical results regardless of how many
replications run in parallel. A node draws exactly one bounded integer on
slots where its row is all zero (the only possible tie: a positive entry
is always the unique argmax, which also means a stale positive transmit
entry can never be reset while a null action is taken).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._kernels import run_global_reward, run_local_reward
from .config import NetworkConfig, Scheme
from .errors import ConfigurationError

_BUFFER = 4096
_UNBOUNDED_WINDOW = np.int64(2 ** 62)


def update_q(q: float, reward: float, learning_rate: float) -> float:
    """One exponential step of the action-value estimate towards the reward."""
    return q + learning_rate * (reward - q)


def select_action(q_row, rng) -> int:
    """Index of a maximal entry; exact ties broken uniformly with one draw."""
    row = np.asarray(q_row, dtype=float)
    if row.size == 0:
        raise ConfigurationError("action-value row is empty")
    ties = np.flatnonzero(row == row.max())
    if ties.size == 1:
        return int(ties[0])
    return int(ties[int(rng.integers(ties.size))])


class ChannelEvent(Enum):
    IDLE = "idle"
    SUCCESS = "success"
    COLLISION = "collision"


def resolve_channel(transmitters) -> tuple[ChannelEvent, int | None]:
    """Collision-channel outcome: success iff exactly one transmitter."""
    tx = tuple(transmitters)
    if not tx:
        return ChannelEvent.IDLE, None
    if len(tx) == 1:
        return ChannelEvent.SUCCESS, tx[0]
    return ChannelEvent.COLLISION, None


def jain_index(per_node_rates) -> float:
    """Jain fairness of nonnegative rates: (sum x)^2 / (n sum x^2), in [1/n, 1].

    Undefined for all-zero rates; raises instead of silently returning 0.
    """
    rates = np.asarray(per_node_rates, dtype=float)
    if rates.size == 0:
        raise ConfigurationError("need at least one rate")
    if np.any(rates < 0):
        raise ConfigurationError("rates must be nonnegative")
    if float(rates.sum()) == 0.0:
        raise ValueError("Jain index undefined for all-zero rates")
    # scale-invariant: normalize by the peak so squares cannot under/overflow
    scaled = rates / rates.max()
    total = float(scaled.sum())
    return total * total / (rates.size * float(np.square(scaled).sum()))


@dataclass(frozen=True)
class SlotOutcome:
    """One slot: chosen actions, transmitter set, channel event, rewards."""

    actions: tuple[int, ...]
    transmitters: tuple[int, ...]
    event: ChannelEvent
    winner: int | None
    rewards: tuple[int, ...]


@dataclass
class AgentState:
    """Full action-value row of one node plus its mtoa-g window counter."""

    q_row: np.ndarray
    w_counter: int = 0


@dataclass(frozen=True)
class RunMetrics:
    """Per-replication results over the slots run so far.

    ``jain`` is NaN when the replication ended with zero successes (the
    index is undefined there).
    """

    per_node_successes: np.ndarray
    per_node_rates: np.ndarray
    lambda_out_hat: float
    jain: float
    slots: int


class Simulation:
    """One replication, stepped either slot by slot or in bulk.

    ``collect_q0`` reserves room for that many samples of the winner's
    post-update transmit-entry value (the value the next head-of-line
    packet sees), recorded at each success of an mtoa-l run.
    """

    def __init__(self, config: NetworkConfig, collect_q0: int = 0):
        self.config = config
        n = config.n
        children = np.random.SeedSequence(config.seed).spawn(n + 1)
        # child n stays reserved: nothing else may consume node entropy
        self._gens = [np.random.Generator(np.random.Philox(c)) for c in children[:n]]
        self._draws = np.stack(
            [g.integers(0, config.null_actions + 1, size=_BUFFER) for g in self._gens]
        )
        self._cursors = np.zeros(n, dtype=np.int64)
        self._successes = np.zeros(n, dtype=np.int64)
        self._scratch_act = np.zeros((1, n), dtype=np.int64)
        self._no_winner = np.zeros(0, dtype=np.int64)
        self.slots_elapsed = 0
        if config.scheme is Scheme.LOCAL:
            self._q = np.zeros(n)
            self._threshold = float(config.reset_threshold)
        else:
            self._entry_action = np.full(n, -1, dtype=np.int64)
            self._entry_value = np.zeros(n)
            self._window_count = np.zeros(n, dtype=np.int64)
            self._window_limit = (
                _UNBOUNDED_WINDOW if config.reset_window is None
                else np.int64(config.reset_window)
            )
        self._q0_samples = np.empty(max(0, collect_q0))
        self._q0_count = np.zeros(1, dtype=np.int64)

    def _refill(self) -> None:
        for i in np.flatnonzero(self._cursors >= _BUFFER):
            self._draws[i] = self._gens[i].integers(
                0, self.config.null_actions + 1, size=_BUFFER
            )
            self._cursors[i] = 0

    def _advance(self, max_slots: int, record: bool, act, winner, ntx) -> int:
        c = self.config
        if c.scheme is Scheme.LOCAL:
            return run_local_reward(
                self._q, self._successes, self._draws, self._cursors, _BUFFER,
                c.learning_rate, self._threshold, max_slots, record,
                act, winner, ntx, self._q0_samples, self._q0_count,
            )
        return run_global_reward(
            self._entry_action, self._entry_value, self._window_count,
            self._successes, self._draws, self._cursors, _BUFFER,
            c.learning_rate, self._window_limit, max_slots, record,
            act, winner, ntx,
        )

    def run(self, slots: int | None = None) -> None:
        """Advance ``slots`` slots (default: the configured horizon)."""
        remaining = self.config.horizon if slots is None else int(slots)
        dummy = self._no_winner
        while remaining > 0:
            self._refill()
            done = self._advance(remaining, False, self._scratch_act, dummy, dummy)
            if done == 0 and not np.any(self._cursors >= _BUFFER):
                raise RuntimeError("slot loop stalled without exhausting a draw buffer")
            remaining -= done
            self.slots_elapsed += done

    def step(self) -> SlotOutcome:
        """Advance exactly one slot and return its full outcome."""
        self._refill()
        n = self.config.n
        act = np.zeros((1, n), dtype=np.int64)
        winner = np.full(1, -1, dtype=np.int64)
        ntx = np.zeros(1, dtype=np.int64)
        done = self._advance(1, True, act, winner, ntx)
        assert done == 1
        self.slots_elapsed += 1
        actions = tuple(int(a) for a in act[0])
        transmitters = tuple(i for i, a in enumerate(actions) if a == 0)
        event, win = resolve_channel(transmitters)
        if self.config.scheme is Scheme.LOCAL:
            rewards = tuple(1 if i == win else 0 for i in range(n))
        else:
            r = 1 if event is ChannelEvent.SUCCESS else 0
            rewards = (r,) * n
        return SlotOutcome(actions, transmitters, event, win, rewards)

    def agent_states(self) -> list[AgentState]:
        """Materialized action-value rows (null entries are implicit zeros)."""
        c = self.config
        width = c.null_actions + 1
        states = []
        for i in range(c.n):
            row = np.zeros(width)
            if c.scheme is Scheme.LOCAL:
                row[0] = self._q[i]
                states.append(AgentState(q_row=row))
            else:
                a = int(self._entry_action[i])
                if a >= 0:
                    row[a] = self._entry_value[i]
                states.append(AgentState(q_row=row, w_counter=int(self._window_count[i])))
        return states

    def q0_samples(self) -> np.ndarray:
        """Collected post-success transmit-entry samples (mtoa-l)."""
        return self._q0_samples[: int(self._q0_count[0])].copy()

    def metrics(self) -> RunMetrics:
        if self.slots_elapsed == 0:
            raise ConfigurationError("no slots have been run")
        successes = self._successes.copy()
        rates = successes / self.slots_elapsed
        total = int(successes.sum())
        jain = jain_index(rates) if total > 0 else float("nan")
        return RunMetrics(
            per_node_successes=successes,
            per_node_rates=rates,
            lambda_out_hat=total / self.slots_elapsed,
            jain=jain,
            slots=self.slots_elapsed,
        )


def run_replication(config: NetworkConfig) -> RunMetrics:
    """Run the configured horizon from the all-zero state and report metrics."""
    sim = Simulation(config)
    sim.run()
    return sim.metrics()
