"""Desk-scale invariant checks behind ``uavfbl validate``.

Each check is a zero-argument callable registered under a stable name. It
returns a short detail string on success and raises :class:`CheckFailed`
otherwise. Golden values were computed independently at 50-digit precision,
so a corrupted constant in the numerical core shows up as a named failure.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channel, fbl
from .channel import Position3D, build_link_budget
from .config import ScenarioConfig
from .montecarlo import FadingSpec, run_campaign, sample_fading, trial_rng
from .schemes import ReliabilityTargets
from .solvers import grid_oracle, max_feasible_beta, relay_ibl_objective, solve

GOLDEN_FBL_RATE = 3.2590511576926600263        # fbl_rate(400, 10, 1e-3)
GOLDEN_FBL_ERROR = 4.2076073602439095428e-6    # fbl_error(84, 2, 1.0)
GOLDEN_INVERSE_SNR = 3.5818479477971587402     # invert_snr_for_error(400, 1e-3, 2.0)
GOLDEN_INV_Q = {1e-2: 2.32634787404084, 1e-9: 5.99780701500769}


class CheckFailed(AssertionError):
    pass


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


CHECKS: dict[str, Callable[[], str]] = {}


def check(name):
    def register(fn):
        CHECKS[name] = fn
        return fn
    return register


def _require(cond, message):
    if not cond:
        raise CheckFailed(message)


def _rel(a, b):
    return abs(a - b) / abs(b)


@check("inv-q-accuracy")
def _inv_q_accuracy():
    ps = np.geomspace(1e-9, 0.5, 200)
    worst = float(np.max(np.abs(fbl.q_function(fbl.inv_q(ps)) - ps) / ps))
    _require(worst <= 1e-9, f"round-trip error {worst:.3g} > 1e-9")
    for p, x in GOLDEN_INV_Q.items():
        _require(_rel(fbl.inv_q(p), x) <= 1e-9, f"inv_q({p:g}) = {fbl.inv_q(p)!r}, want {x}")
    return f"max round-trip error {worst:.2g}"


@check("fbl-golden-values")
def _fbl_golden():
    pairs = ((fbl.fbl_rate(400, 10.0, 1e-3), GOLDEN_FBL_RATE),
             (fbl.fbl_error(84, 2.0, 1.0), GOLDEN_FBL_ERROR),
             (fbl.invert_snr_for_error(400, 1e-3, 2.0), GOLDEN_INVERSE_SNR))
    worst = max(_rel(got, want) for got, want in pairs)
    _require(worst <= 1e-9, f"golden mismatch {worst:.3g} > 1e-9: {pairs}")
    return f"max relative deviation {worst:.2g}"


@check("fbl-inverse-pairs")
def _fbl_inverse_pairs():
    worst = 0.0
    for m in (84, 200, 400, 1000):
        for snr in (1.0, 5.0, 10.0, 100.0):
            for eps in np.geomspace(1e-9, 1e-1, 9):
                r = fbl.fbl_rate(m, snr, eps)
                worst = max(worst, _rel(fbl.fbl_error(m, snr, r), eps))
                worst = max(worst, _rel(fbl.invert_snr_for_error(m, eps, r), snr))
    _require(worst <= 1e-6, f"inverse-pair error {worst:.3g} > 1e-6")
    return f"max relative error {worst:.2g}"


@check("fbl-below-capacity")
def _fbl_below_capacity():
    for m in (1, 10, 84, 400, 10_000):
        for snr in (0.01, 1.0, 100.0):
            for eps in (1e-9, 1e-3, 0.49):
                bound = fbl.shannon_capacity(snr) + math.log2(m) / m
                _require(fbl.fbl_rate(m, snr, eps) <= bound + 1e-12,
                         f"rate above capacity bound at m={m}, snr={snr}, eps={eps}")
    return "dispersion term subtractive on grid"


@check("fbl-monotone-domain")
def _fbl_monotone():
    ms = np.arange(84, 2001, 16, dtype=float)
    snrs = np.geomspace(1.0, 1e3, 40)
    for eps in (1e-9, 1e-5, 1e-3, 1e-1):
        r = fbl.fbl_rate_raw(ms[:, None], snrs[None, :], eps)
        _require(np.all(np.diff(r, axis=0) > 0), f"rate not increasing in m at eps={eps}")
        _require(np.all(np.diff(r, axis=1) > 0), f"rate not increasing in snr at eps={eps}")
    return "strictly increasing in m and SNR"


@check("ibl-fbl-gap-shrinks")
def _gap_shrinks():
    ms = np.arange(84, 10_001, dtype=float)
    for snr in (0.5, 1.0, 10.0, 100.0):
        gap = fbl.shannon_capacity(snr) - fbl.fbl_rate_raw(ms, snr, 1e-4)
        _require(np.all(gap > 0) and np.all(np.diff(gap) < 0),
                 f"gap not positive and decreasing at snr={snr}")
    return "positive and decreasing over m in [84, 10000]"


@check("channel-reference-values")
def _channel_values():
    pl = channel.PathLossParams()
    _require(abs(pl.reference_loss_db - 78.4625) < 1e-3,
             f"free-space loss {pl.reference_loss_db}")
    cfg = ScenarioConfig()
    b = build_link_budget(cfg)
    _require(b.g1 > b.g2, "AP-UAV gain not above AP-GU gain")
    _require(b.g3 > b.g2, "UAV-GU gain not above AP-GU gain")
    theta = [channel.los_probability(t, pl.a2, pl.b2) for t in (10.0, 30.0, 60.0, 90.0)]
    _require(all(a < c for a, c in zip(theta, theta[1:])), "LoS probability not increasing")
    return f"L(d0) = {pl.reference_loss_db:.4f} dB"


@check("fading-unit-mean")
def _fading_mean():
    rng = trial_rng(0, 0)
    for spec in (FadingSpec("rayleigh"), FadingSpec("rician", 1.0), FadingSpec("rician", 0.3)):
        mean = float(np.mean(sample_fading(spec, rng, 200_000)))
        _require(abs(mean - 1.0) < 0.01, f"{spec} mean {mean:.4f}")
    return "all specs within 1% of unit mean"


def _random_budgets(n, seed):
    rng = np.random.default_rng(seed)
    cfg = ScenarioConfig()
    for _ in range(n):
        gu = Position3D(float(rng.uniform(300, 1000)), 0.0, 0.0)
        uav = Position3D(float(rng.uniform(50, 400)), 0.0, float(rng.uniform(60, 200)))
        fading = tuple(float(x) for x in rng.uniform(0.5, 1.5, 3))
        c = cfg.replace(gu_pos=gu, uav_pos=uav)
        yield c, build_link_budget(c, fading), float(rng.uniform(0.3, 1.5))


@check("equality-at-optimum")
def _equalities():
    targets = ReliabilityTargets()
    count = 0
    for cfg, b, beta in _random_budgets(12, 11):
        for scheme in ("noma", "relay"):
            for regime in ("ibl", "fbl"):
                res = solve(b, cfg.frame_length, cfg.p0, scheme, regime, beta, targets)
                if not res.feasible:
                    continue
                a = res.allocation
                count += 1
                if res.target > 0:
                    _require(_rel(res.gu, res.target) <= 1e-6,
                             f"{scheme}/{regime}: GU {res.gu} vs target {res.target}")
                spent = a.p1 + a.p2 if scheme == "noma" else a.m1 * a.p1 + a.m2 * a.p2
                budget = cfg.p0 if scheme == "noma" else cfg.frame_length * cfg.p0
                _require(_rel(spent, budget) <= 1e-9, f"{scheme}/{regime}: budget {spent}")
    return f"{count} feasible solutions checked"


@check("noma-matches-oracle")
def _noma_oracle():
    targets = ReliabilityTargets()
    for cfg, b, beta in _random_budgets(4, 12):
        beta = min(beta, 0.95)
        for regime in ("ibl", "fbl"):
            res = solve(b, cfg.frame_length, cfg.p0, "noma", regime, beta, targets)
            ref = grid_oracle(b, cfg.frame_length, cfg.p0, "noma", regime, beta, targets,
                              resolution=1e-4)
            _require(res.feasible == ref.feasible, f"{regime}: feasibility disagrees")
            if res.feasible:
                _require(res.uav >= ref.uav * (1 - 1e-9), f"{regime}: oracle beats solver")
                _require(abs(res.allocation.p1 - ref.allocation.p1) <= 1e-4 * cfg.p0,
                         f"{regime}: p1 off by more than one grid step")
    return "closed forms agree with grid search"


@check("relay-ibl-concave")
def _relay_concave():
    for cfg, b, beta in _random_budgets(8, 13):
        M, p0 = cfg.frame_length, cfg.p0
        xs = np.linspace(1.0, M - 1.0, 52)[1:-1]
        h = 0.5
        for x in xs:
            vals = [relay_ibl_objective(b, M, p0, beta, x + d) for d in (-h, 0.0, h)]
            if any(math.isnan(v) for v in vals):
                continue
            second = vals[0] - 2 * vals[1] + vals[2]
            _require(second <= 1e-9 * max(1.0, abs(vals[1])),
                     f"positive second difference {second:.3g} at m1={x:.1f}")
    return "second differences non-positive"


@check("noma-max-beta-is-one")
def _noma_beta():
    cfg = ScenarioConfig()
    b = build_link_budget(cfg)
    for regime in ("ibl", "fbl"):
        v = max_feasible_beta(b, cfg.frame_length, cfg.p0, "noma", regime,
                              ReliabilityTargets()).value
        _require(abs(v - 1.0) <= 1e-4 + 1e-12, f"{regime}: max beta {v}")
    return "1.0 within 1e-4 in both regimes"


@check("relay-win-win")
def _relay_win_win():
    cfg = ScenarioConfig()
    b = build_link_budget(cfg)
    out = []
    for regime in ("ibl", "fbl"):
        v = max_feasible_beta(b, cfg.frame_length, cfg.p0, "relay", regime,
                              ReliabilityTargets()).value
        _require(v > 1.0, f"{regime}: max beta {v} not above 1")
        out.append(f"{regime} {v:.3f}")
    return "max beta " + ", ".join(out)


@check("montecarlo-reproducible")
def _mc_repro():
    cfg = ScenarioConfig()
    a = run_campaign(cfg, "noma", "fbl", 0.9, 200, 5)
    b = run_campaign(cfg, "noma", "fbl", 0.9, 200, 5)
    _require(a == b, "reports differ across identical runs")
    return f"outage {a.outage_probability:.3f} reproduced"


@check("outage-monotone-in-beta")
def _outage_monotone():
    cfg = ScenarioConfig(gu_pos=Position3D(800.0, 0.0, 0.0), uav_pos=Position3D(150.0, 0.0, 100.0))
    outs = [run_campaign(cfg, "relay", "ibl", beta, 300, 9).outage_probability
            for beta in (0.5, 1.0, 1.5)]
    _require(all(x <= y for x, y in zip(outs, outs[1:])), f"outage not monotone: {outs}")
    return "relay/ibl outage " + ", ".join(f"{x:.3f}" for x in outs)


def run_checks(names=None) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS.items():
        if names is not None and name not in names:
            continue
        t0 = time.perf_counter()
        try:
            detail, ok = fn(), True
        except Exception as exc:  # a crash is a failure of that property
            detail, ok = f"{type(exc).__name__}: {exc}", False
        results.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return results
