"""From learning parameters to an explicit access strategy.

The steady behaviour of each scheme collapses to four numbers: batch
size, capture stages, cutoff stage, and the per-stage transmission
probabilities. This script shows how the learning parameters map onto
them, and checks the fresh-entry value assumption behind that mapping
against the simulator.
"""

import numpy as np

from mtoa import (
    NetworkConfig,
    Simulation,
    capture_depth,
    classify,
    derive_strategy_mtoa_g,
    derive_strategy_mtoa_l,
)

print("=== capture depth vs learning rate and reset threshold ===")
print(f"{'alpha':>6} {'q_th':>6} {'depth':>8}")
for alpha, threshold in ((0.9, 1.0), (0.9, 0.5), (0.9, 0.05), (0.9, 0.005),
                         (1.0, 0.5), (0.5, 0.05)):
    print(f"{alpha:>6} {threshold:>6} {capture_depth(alpha, threshold)!s:>8}")

print("\n=== derived strategies and their design features ===")
cases = [
    ("mtoa-l, q_th >= alpha", derive_strategy_mtoa_l(99, 0.9, 1.0)),
    ("mtoa-l, q_th = 0.05", derive_strategy_mtoa_l(99, 0.9, 0.05)),
    ("mtoa-g, window 100", derive_strategy_mtoa_g(99, 100)),
]
for name, strategy in cases:
    features = classify(strategy)
    print(f"{name:<22} batch={strategy.batch_size:<4} "
          f"captures={strategy.capture_stages} probs={strategy.tx_probs} "
          f"-> {features.connection}, {features.capture}")

print("\n=== fresh-entry value: assumption vs simulation ===")
# the capture-depth formula assumes a fresh winner holds entry value ~1;
# actual values are at least the learning rate and approach 1 after
# repeated wins - sample them from a live run
cfg = NetworkConfig(n=20, horizon=300_000, scheme="mtoa-l", null_actions=19,
                    learning_rate=0.9, reset_threshold=0.05, seed=5)
sim = Simulation(cfg, collect_q0=50_000)
sim.run()
samples = sim.q0_samples()
print(f"samples={samples.size}  min={samples.min():.4f}  "
      f"mean={samples.mean():.4f}  median={np.median(samples):.4f}")
print(f"fraction within 10% of 1.0: {(samples > 0.9).mean():.3f}")
print("The approximation is tight for learning rates near 1, which is")
print("exactly the regime the depth-2 tuning uses.")
