"""Shared test utilities: engine trace extraction and independent oracles."""

import numpy as np

from mtoa import AccessStrategy, Scheme, Simulation


def flat_strategy(batch_size, depth, q):
    """Flat schedule: ``depth`` probability-1 stages then a constant q."""
    return AccessStrategy(
        batch_size=batch_size, capture_stages=depth, cutoff_stage=depth,
        tx_probs=(1.0,) * depth + (q,),
    )


def run_engine_trace(config):
    """Step the production engine and record naive-comparable slot records."""
    sim = Simulation(config)
    trace = []
    for _ in range(config.horizon):
        out = sim.step()
        states = sim.agent_states()
        table = tuple(tuple(float(v) for v in st.q_row) for st in states)
        record = (out.actions, out.transmitters, out.winner, out.rewards, table)
        if config.scheme is Scheme.GLOBAL:
            record = record + (tuple(st.w_counter for st in states),)
        trace.append(record)
    return trace


def simulate_reserving_aloha(n, q0, batch_size, horizon, seed):
    """Independent Monte-Carlo of the n-queue system with a fixed strategy.

    Every node contends with probability q0 whenever the channel is
    unreserved; a contention win reserves the channel for batch_size - 1
    further slots, each carrying one packet. Reserved stretches are
    fast-forwarded (nothing random happens inside them). Returns
    empirical per-node successes plus frequencies for the steady-state
    cross-checks: the channel-free probability seen by a non-holding
    node and the success probability of an observed transmission.
    """
    rng = np.random.default_rng(seed)
    successes = np.zeros(n, dtype=np.int64)
    contention_slots = 0
    reserved_by_other = np.zeros(n, dtype=np.int64)
    tagged_tx = 0
    tagged_wins = 0
    t = 0
    while t < horizon:
        contention_slots += 1
        tx = rng.random(n) < q0
        if tx[0]:
            tagged_tx += 1
        count = int(tx.sum())
        if count == 1:
            holder = int(np.flatnonzero(tx)[0])
            if holder == 0:
                tagged_wins += 1
            successes[holder] += 1
            t += 1
            hold = min(batch_size - 1, horizon - t)
            successes[holder] += hold
            mask = np.ones(n, dtype=bool)
            mask[holder] = False
            reserved_by_other[mask] += hold
            t += hold
        else:
            t += 1
    denom = contention_slots + reserved_by_other[0]
    beta_hat = contention_slots / denom
    p_hat = tagged_wins / tagged_tx if tagged_tx else float("nan")
    return {
        "successes": successes,
        "beta_hat": beta_hat,
        "p_hat": p_hat,
        "tagged_tx": tagged_tx,
        "throughput": successes.sum() / horizon,
    }


def brute_force_frontier_ids(points):
    """O(n^2) dominance filter; returns the ids of non-dominated points."""
    kept = []
    for i, p in enumerate(points):
        dominated = False
        for j, q in enumerate(points):
            if i == j:
                continue
            ge = q.throughput >= p.throughput and q.fairness >= p.fairness
            gt = q.throughput > p.throughput or q.fairness > p.fairness
            if ge and gt:
                dominated = True
                break
        if not dominated:
            kept.append(p.params["id"])
    return sorted(kept)


def best_throughput_at(points, floor):
    """Highest throughput among points meeting a fairness floor (or None)."""
    feasible = [p.throughput for p in points
                if p.error is None and p.fairness >= floor]
    return max(feasible) if feasible else None
