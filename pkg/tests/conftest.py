import numpy as np
import pytest

from mtoa import NetworkConfig, Simulation


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile both numba kernels once so per-test timings stay honest."""
    for scheme, extra in (("mtoa-l", {"reset_threshold": 0.1}),
                          ("mtoa-g", {"reset_window": 3})):
        cfg = NetworkConfig(n=2, horizon=4, scheme=scheme, null_actions=1,
                            learning_rate=0.5, seed=0, **extra)
        sim = Simulation(cfg)
        sim.run(2)
        sim.step()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
