import numpy as np
import pytest

from uavfbl.channel import Position3D, build_link_budget
from uavfbl.config import ScenarioConfig
from uavfbl.schemes import ReliabilityTargets


class Scenario:
    def __init__(self, cfg, fading, beta, targets):
        self.cfg = cfg
        self.budget = build_link_budget(cfg, fading)
        self.M = cfg.frame_length
        self.p0 = cfg.p0
        self.beta = beta
        self.targets = targets

    def __repr__(self):
        return (f"Scenario(gu={self.cfg.gu_pos}, uav={self.cfg.uav_pos}, M={self.M}, "
                f"beta={self.beta:.4f}, {self.targets}, {self.budget})")


def random_scenarios(n, seed, beta_range=(0.1, 1.5), frame_lengths=(300, 400, 600)):
    """Randomized topologies, fading realizations, targets and guarantees."""
    rng = np.random.default_rng(seed)
    base = ScenarioConfig()
    out = []
    for _ in range(n):
        cfg = base.replace(
            gu_pos=Position3D(float(rng.uniform(300, 1000)), float(rng.uniform(-100, 100)), 0.0),
            uav_pos=Position3D(float(rng.uniform(0, 400)), 0.0, float(rng.uniform(60, 200))),
            frame_length=int(rng.choice(frame_lengths)),
            p0_dbm=float(rng.uniform(20, 33)),
        )
        fading = tuple(float(x) for x in rng.uniform(0.3, 2.0, 3))
        nu1 = float(10 ** rng.uniform(-7, -4))
        targets = ReliabilityTargets(nu1, float(nu1 * 10 ** rng.uniform(0.5, 2)))
        out.append(Scenario(cfg, fading, float(rng.uniform(*beta_range)), targets))
    return out


@pytest.fixture(scope="session")
def topo():
    return Scenario(ScenarioConfig(), (1.0, 1.0, 1.0), 1.0, ReliabilityTargets(1e-4, 1e-3))
