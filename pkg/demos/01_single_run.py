"""Run both access schemes on a small network and watch what they learn.

Twenty nodes share one collision channel. Each node is a bandit with one
transmit arm and `null_actions` silent arms, plays greedily with uniform
tie breaking, and learns from either its own successes (mtoa-l) or the
network-wide success indicator (mtoa-g).
"""

from mtoa import ChannelEvent, NetworkConfig, Simulation, run_replication

N = 20
HORIZON = 200_000

local_cfg = NetworkConfig(
    n=N, horizon=HORIZON, scheme="mtoa-l", null_actions=N - 1,
    learning_rate=0.9, reset_threshold=1.0, seed=42,
)
global_cfg = NetworkConfig(
    n=N, horizon=HORIZON, scheme="mtoa-g", null_actions=N - 1,
    learning_rate=0.9, reset_window=50, seed=42,
)

print("=== slot-by-slot view (first 15 slots, global rewards) ===")
sim = Simulation(global_cfg)
for t in range(15):
    out = sim.step()
    mark = {"idle": ".", "collision": "x"}.get(out.event.value, "")
    winner = f"node {out.winner}" if out.event is ChannelEvent.SUCCESS else mark
    print(f"slot {t:>2}: transmitters={list(out.transmitters)!s:<12} -> {winner}")

print("\n=== full replications ===")
for name, cfg in (("local rewards (mtoa-l)", local_cfg),
                  ("global rewards (mtoa-g)", global_cfg)):
    metrics = run_replication(cfg)
    top = metrics.per_node_successes.max()
    print(f"{name:<24} throughput={metrics.lambda_out_hat:.4f} "
          f"jain={metrics.jain:.4f} busiest-node share={top / max(metrics.per_node_successes.sum(), 1):.3f}")

print("\nWith the threshold at/above the learning rate, mtoa-l stays fully")
print("symmetric (plain contention); mtoa-g trades a little fairness for")
print("the 50-slot channel holds its reset window allows, and triples the")
print("throughput here.")
