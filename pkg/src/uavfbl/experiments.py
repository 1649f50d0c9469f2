"""Parameter sweeps, the relaying blocklength ablation, and their CSV rows."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .channel import Position3D, build_link_budget
from .config import ScenarioConfig
from .montecarlo import run_campaign
from .schemes import ReliabilityTargets
from .solvers import MIN_FBL_BLOCKLENGTH, AllocationResult, _relay_fbl_point, solve

SWEEPS = ("beta", "gu_distance", "frame_length", "nu2", "uav_ground_distance")
COMBOS = (("noma", "ibl"), ("noma", "fbl"), ("relay", "ibl"), ("relay", "fbl"))

SWEEP_HEADER = ("swept_name", "swept_value", "scheme", "regime", "p1", "p2", "m1", "m2",
                "uav_bits", "gu_bits", "feasible", "outage", "seed", "uav_bps", "gu_bps")
ABLATION_HEADER = ("swept_name", "swept_value", "frame_length", "ibl_m1", "ibl_uav_bits",
                   "fbl_m1", "fbl_uav_bits", "fbl_at_ibl_m1_uav_bits", "ibl_feasible",
                   "fbl_feasible", "fbl_at_ibl_m1_feasible")


def fmt(x) -> str:
    """Fixed 12-significant-digit scientific notation; blank for missing values."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    return f"{float(x):.11e}"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def sweep_values(start: float, stop: float, steps: int, log: bool = False) -> list[float]:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return [float(start)]
    if log:
        return list(np.geomspace(start, stop, steps))
    return list(np.linspace(start, stop, steps))


def apply_sweep(cfg: ScenarioConfig, name: str, value: float) -> ScenarioConfig:
    if name == "beta":
        return cfg.replace(beta=value)
    if name == "gu_distance":
        return cfg.replace(gu_pos=Position3D(value, cfg.gu_pos.y, cfg.gu_pos.z))
    if name == "uav_ground_distance":
        return cfg.replace(uav_pos=Position3D(value, cfg.uav_pos.y, cfg.uav_pos.z))
    if name == "frame_length":
        if value != int(value):
            raise ValueError("frame_length sweep values must be integers")
        return cfg.replace(frame_length=int(value))
    if name == "nu2":
        # relaying needs nu1 < nu2; keep the UAV target at least a decade tighter
        return cfg.replace(nu2=value, nu1=min(cfg.nu1, value / 10.0))
    raise ValueError(f"unknown sweep {name!r}; expected one of {SWEEPS}")


def solve_config(cfg: ScenarioConfig, scheme: str | None = None,
                 regime: str | None = None) -> AllocationResult:
    """Solve on the configured fading realization (unit gains unless given)."""
    fading = (1.0, 1.0, 1.0) if cfg.unit_fading else cfg.fading_realization
    budget = build_link_budget(cfg, fading)
    return solve(budget, cfg.frame_length, cfg.p0, scheme or cfg.scheme, regime or cfg.regime,
                 cfg.beta, ReliabilityTargets(cfg.nu1, cfg.nu2),
                 integer=cfg.integer_blocklengths, tol=cfg.blocklength_tol,
                 peak_power=cfg.peak_power)


def _bps(cfg, bits):
    if cfg.symbol_rate is None or bits is None or math.isnan(bits):
        return None
    return bits * cfg.symbol_rate / cfg.frame_length


def result_row(cfg, name, value, scheme, regime, res: AllocationResult):
    a = res.allocation
    uav = res.uav if res.feasible or res.throughputs is not None else math.nan
    return (name, value, scheme, regime,
            a.p1 if a else None, a.p2 if a else None, a.m1 if a else None, a.m2 if a else None,
            uav, res.gu, res.feasible, None, None, _bps(cfg, uav), _bps(cfg, res.gu))


def run_sweep(cfg: ScenarioConfig, name: str, values, combos=COMBOS):
    """One row per (value, scheme, regime), in input order."""
    rows = []
    for v in values:
        c = apply_sweep(cfg, name, v)
        for scheme, regime in combos:
            rows.append(result_row(c, name, v, scheme, regime, solve_config(c, scheme, regime)))
    return rows


def run_montecarlo(cfg: ScenarioConfig, trials: int, seed: int, name: str | None = None,
                   values=(None,), combos=COMBOS):
    rows = []
    for v in values:
        c = cfg if name is None else apply_sweep(cfg, name, v)
        for scheme, regime in combos:
            rep = run_campaign(c, scheme, regime, c.beta, trials, seed)
            rows.append((name or "none", v, scheme, regime, None, None, None, None,
                         rep.mean_uav, rep.mean_gu, rep.feasible_trials > 0,
                         rep.outage_probability, str(seed),
                         _bps(c, rep.mean_uav), _bps(c, rep.mean_gu)))
    return rows


@dataclass
class AblationRow:
    ibl: AllocationResult
    fbl: AllocationResult
    fbl_at_ibl_m1: float
    fbl_at_ibl_m1_feasible: bool


def ablate(cfg: ScenarioConfig) -> AblationRow:
    """Relaying throughput: IBL-optimal, FBL-optimal, and FBL at the IBL blocklength.

    The third figure keeps the IBL-optimal ``m1`` and re-solves both powers so
    that the GU's FBL throughput and reliability targets are met.
    """
    fading = (1.0, 1.0, 1.0) if cfg.unit_fading else cfg.fading_realization
    budget = build_link_budget(cfg, fading)
    targets = ReliabilityTargets(cfg.nu1, cfg.nu2)
    kw = dict(integer=cfg.integer_blocklengths, tol=cfg.blocklength_tol,
              peak_power=cfg.peak_power)
    M, p0 = cfg.frame_length, cfg.p0
    ibl = solve(budget, M, p0, "relay", "ibl", cfg.beta, targets, **kw)
    fbl = solve(budget, M, p0, "relay", "fbl", cfg.beta, targets, **kw)
    value, ok = math.nan, False
    a = ibl.allocation
    if a is not None and a.m2 >= 1.0 and targets.nu1 < targets.nu2:
        ev = _relay_fbl_point(budget, M, p0, cfg.beta * fbl.mu0, targets, a.m1,
                              cfg.peak_power)
        if ev.pair is not None:
            # an IBL blocklength outside the FBL domain is reported but flagged
            in_domain = min(a.m1, a.m2) >= MIN_FBL_BLOCKLENGTH
            value, ok = ev.pair.uav, ev.reason == "none" and in_domain
    return AblationRow(ibl, fbl, value, ok)


def run_ablation(cfg: ScenarioConfig, name: str | None = None, values=(None,)):
    rows = []
    for v in values:
        c = cfg if name is None else apply_sweep(cfg, name, v)
        r = ablate(c)
        rows.append((name or "none", v, c.frame_length,
                     r.ibl.allocation.m1 if r.ibl.allocation else None, r.ibl.uav,
                     r.fbl.allocation.m1 if r.fbl.allocation else None, r.fbl.uav,
                     r.fbl_at_ibl_m1, r.ibl.feasible, r.fbl.feasible, r.fbl_at_ibl_m1_feasible))
    return rows
