"""Fading draws and campaign-level averages over channel realizations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .channel import build_link_budget, uav_gu_los
from .schemes import ReliabilityTargets
from .solvers import solve

if TYPE_CHECKING:
    from .config import ScenarioConfig

#: Identifies the random stream layout stored with every report.
RNG_ALGORITHM = "numpy-PCG64/SeedSequence([seed, trial])"


@dataclass(frozen=True)
class FadingSpec:
    """Unit-mean power fading.

    For ``rician``, ``non_centrality`` is the amplitude ``s`` of the
    deterministic component before normalization, i.e. K-factor ``s**2``.
    ``None`` means "use the link's LoS probability", resolved per scenario.
    """

    kind: str
    non_centrality: float | None = 0.0

    def __post_init__(self):
        if self.kind not in ("rician", "rayleigh"):
            raise ValueError(f"unknown fading kind {self.kind!r}")
        if self.kind == "rayleigh" and self.non_centrality not in (0.0, None):
            raise ValueError("rayleigh fading takes no parameter")
        if self.non_centrality is not None and self.non_centrality < 0:
            raise ValueError("non-centrality must be non-negative")

    def resolved(self, los_probability: float) -> FadingSpec:
        if self.kind == "rician" and self.non_centrality is None:
            return FadingSpec("rician", los_probability)
        return self


def sample_fading(spec: FadingSpec, rng: np.random.Generator, size=None):
    """Power gain |h|^2 with E[|h|^2] = 1."""
    if spec.kind == "rayleigh":
        return rng.exponential(1.0, size)
    s = spec.non_centrality
    if s is None:
        raise ValueError("rician spec with LoS-derived parameter must be resolved first")
    if math.isinf(s):
        return np.ones(size) if size is not None else 1.0
    k = s * s
    los = math.sqrt(k / (k + 1.0))
    scatter = math.sqrt(1.0 / (2.0 * (k + 1.0)))
    re = los + scatter * rng.standard_normal(size)
    im = scatter * rng.standard_normal(size)
    return re * re + im * im


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))


@dataclass(frozen=True)
class MonteCarloReport:
    scheme: str
    regime: str
    beta: float
    trials: int
    seed: int
    mean_uav: float
    mean_gu: float
    outage_probability: float
    confidence_halfwidth: float
    feasible_trials: int
    mean_over: str = "feasible trials"
    rng: str = RNG_ALGORITHM


def draw_trial_fading(cfg: ScenarioConfig, seed: int, trial: int) -> tuple[float, float, float]:
    if cfg.unit_fading:
        return (1.0, 1.0, 1.0)
    rng = trial_rng(seed, trial)
    p_los = uav_gu_los(cfg)
    return tuple(float(sample_fading(spec.resolved(p_los), rng)) for spec in cfg.fading)


def run_campaign(cfg: ScenarioConfig, scheme: str, regime: str, beta: float, trials: int,
                 seed: int) -> MonteCarloReport:
    """Average the optimal allocation over independent block-fading realizations.

    Trial ``i`` draws from its own stream seeded by ``(seed, i)``, so results
    do not depend on evaluation order. A trial whose solver reports
    infeasibility (or raises) counts as an outage; means are taken over the
    remaining trials.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    targets = ReliabilityTargets(cfg.nu1, cfg.nu2)
    uav_sum = gu_sum = 0.0
    ok = 0
    for i in range(trials):
        budget = build_link_budget(cfg, draw_trial_fading(cfg, seed, i))
        try:
            res = solve(budget, cfg.frame_length, cfg.p0, scheme, regime, beta, targets,
                        integer=cfg.integer_blocklengths, tol=cfg.blocklength_tol,
                        peak_power=cfg.peak_power)
        except (ValueError, ArithmeticError):
            continue
        if res.feasible:
            ok += 1
            uav_sum += res.uav
            gu_sum += res.gu
    outage = 1.0 - ok / trials
    half = 1.959963984540054 * math.sqrt(outage * (1.0 - outage) / trials)
    return MonteCarloReport(
        scheme=scheme, regime=regime, beta=beta, trials=trials, seed=seed,
        mean_uav=uav_sum / ok if ok else math.nan,
        mean_gu=gu_sum / ok if ok else math.nan,
        outage_probability=outage, confidence_halfwidth=half, feasible_trials=ok)
