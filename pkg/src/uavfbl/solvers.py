"""Optimal power and blocklength allocation under a weighted GU guarantee.

Every solver maximizes the UAV throughput subject to the GU receiving
``beta`` times its solo throughput, with the GU guarantee and the power and
blocklength budgets met with equality at the optimum.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import fbl
from .channel import LinkBudget
from .optimize import golden_section_max
from .schemes import (
    Allocation,
    ReliabilityTargets,
    SchemeError,
    ThroughputPair,
    check_sic_order,
    noma_throughputs_fbl,
    noma_throughputs_ibl,
    relay_throughputs_fbl,
    relay_throughputs_ibl,
    solo_throughput,
)

#: Shortest blocklength considered by the relaying FBL search (LTE-A minimum).
MIN_FBL_BLOCKLENGTH = 84

NONE = "none"
GU_TARGET_UNREACHABLE = "gu-target-unreachable"
SIC_BUDGET_EXHAUSTED = "sic-budget-exhausted"
SIC_ORDERING = "sic-ordering"
NEGATIVE_UAV = "negative-uav-throughput"
POWER_EXHAUSTED = "power-exhausted"
RELIABILITY_ORDERING = "reliability-ordering"
BLOCKLENGTH_DOMAIN = "blocklength-domain"

# p1 below this fraction of p0 counts as zero (closed forms round around 0)
_ZERO_POWER = 1e-12


@dataclass
class AllocationResult:
    allocation: Allocation | None
    throughputs: ThroughputPair | None
    beta: float
    feasible: bool
    infeasibility_reason: str = NONE
    mu0: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def target(self) -> float:
        return self.beta * self.mu0

    @property
    def uav(self) -> float:
        return self.throughputs.uav if self.throughputs is not None else math.nan

    @property
    def gu(self) -> float:
        return self.throughputs.gu if self.throughputs is not None else math.nan


def _infeasible(beta, mu0, reason, allocation=None, throughputs=None, **diag):
    return AllocationResult(allocation, throughputs, beta, False, reason, mu0, diag)


def _noma_p1(budget: LinkBudget, p0: float, sinr_gu: float) -> float:
    # p0 - sinr (p0 g2 + s) / (g2 (1 + sinr)), rearranged to avoid cancellation
    snr0 = p0 * budget.g2 / budget.noise_power
    return (snr0 - sinr_gu) * budget.noise_power / (budget.g2 * (1.0 + sinr_gu))


def solve_noma_ibl(budget: LinkBudget, M: float, p0: float, beta: float) -> AllocationResult:
    mu0 = solo_throughput("ibl", budget, M, p0)
    try:
        check_sic_order(budget)
    except SchemeError:
        return _infeasible(beta, mu0, SIC_ORDERING)
    target = beta * mu0
    sinr_gu = math.expm1(target / M * math.log(2.0))
    p1 = p0 if target == 0.0 else _noma_p1(budget, p0, sinr_gu)
    if p1 <= _ZERO_POWER * p0:
        return _infeasible(beta, mu0, GU_TARGET_UNREACHABLE, sinr_gu=sinr_gu, p1_raw=p1)
    p1 = min(p1, p0)
    pair = noma_throughputs_ibl(budget, M, p1, p0 - p1)
    return AllocationResult(Allocation(p1, p0 - p1, M, M), pair, beta, True, NONE, mu0,
                            {"sinr_gu": sinr_gu})


def solve_noma_fbl(budget: LinkBudget, M: float, p0: float, beta: float,
                   targets: ReliabilityTargets) -> AllocationResult:
    mu0 = solo_throughput("fbl", budget, M, p0, targets.nu2)
    try:
        check_sic_order(budget)
    except SchemeError:
        return _infeasible(beta, mu0, SIC_ORDERING)
    target = beta * mu0
    if target == 0.0:
        sinr_gu, p1 = 0.0, p0
    else:
        r2 = target / (M * (1.0 - targets.nu2))
        try:
            sinr_gu = fbl.invert_snr_for_error(M, targets.nu2, r2)
        except fbl.InfeasibleRateError:
            return _infeasible(beta, mu0, GU_TARGET_UNREACHABLE)
        p1 = _noma_p1(budget, p0, sinr_gu)
    if p1 <= _ZERO_POWER * p0:
        return _infeasible(beta, mu0, GU_TARGET_UNREACHABLE, sinr_gu=sinr_gu, p1_raw=p1)
    p1 = min(p1, p0)
    alloc = Allocation(p1, p0 - p1, M, M)
    try:
        pair = noma_throughputs_fbl(budget, M, p1, p0 - p1, targets)
    except SchemeError as exc:
        return _infeasible(beta, mu0, exc.reason, alloc)
    if not pair.feasible:
        return _infeasible(beta, mu0, NEGATIVE_UAV, alloc, pair)
    return AllocationResult(alloc, pair, beta, True, NONE, mu0, {"sinr_gu": sinr_gu})


def _relay_ibl_powers(budget: LinkBudget, M: float, p0: float, target: float, m1: float):
    m2 = M - m1
    p2 = budget.noise_power / budget.g3 * math.expm1(target / m2 * math.log(2.0)) \
        if target > 0.0 else 0.0
    p1 = (M * p0 - m2 * p2) / m1
    return p1, p2


def relay_ibl_objective(budget: LinkBudget, M: float, p0: float, beta: float, m1: float,
                        mu0: float | None = None) -> float:
    """UAV IBL throughput as a function of ``m1`` alone, after eliminating both powers.

    Returns NaN where the implied UAV power is negative.
    """
    if mu0 is None:
        mu0 = solo_throughput("ibl", budget, M, p0)
    target = beta * mu0
    p1, _ = _relay_ibl_powers(budget, M, p0, target, m1)
    if p1 < 0.0:
        return math.nan
    return m1 * math.log2(1.0 + p1 * budget.g1 / budget.noise_power) - target


def _relay_ibl_upper(budget, M, p0, target):
    """Largest m1 leaving non-negative UAV power, or None if no m1 does."""
    k = budget.noise_power / budget.g3
    ln2t = target * math.log(2.0)

    def excess(m2):
        # energy needed on hop two minus the frame budget; decreasing in m2
        x = ln2t / m2
        if x > 700.0:
            return math.inf
        return m2 * k * math.expm1(x) - M * p0

    if excess(M) >= 0.0:
        return None
    lo = M
    while excess(lo) < 0.0 and lo > 1e-300:
        lo *= 0.5
    m2_min = brentq(excess, lo, M, xtol=1e-12, rtol=1e-14)
    return M - m2_min


def solve_relay_ibl(budget: LinkBudget, M: float, p0: float, beta: float, *,
                    integer: bool = False, tol: float = 1e-4,
                    peak_power: float | None = None) -> AllocationResult:
    """Relaying allocation in the IBL regime.

    The objective is concave in ``m1`` once both powers are eliminated, so a
    golden-section search over the power-feasible interval finds the optimum.
    """
    mu0 = solo_throughput("ibl", budget, M, p0)
    target = beta * mu0

    if target == 0.0:
        # no second hop needed: the supremum sits at m1 -> M
        m1 = M - (1.0 if integer else tol)
        p1 = M * p0 / m1
        if peak_power is not None and p1 > peak_power:
            p1 = peak_power
        pair = relay_throughputs_ibl(budget, M, m1, p1, 0.0)
        return AllocationResult(Allocation(p1, 0.0, m1, M - m1), pair, beta, pair.feasible,
                                NONE if pair.feasible else NEGATIVE_UAV, mu0,
                                {"boundary_supremum": True})
    if budget.g3 <= 0.0:
        return _infeasible(beta, mu0, GU_TARGET_UNREACHABLE)

    hi = _relay_ibl_upper(budget, M, p0, target)
    if hi is None or hi <= 0.0:
        return _infeasible(beta, mu0, POWER_EXHAUSTED)
    lo = 0.0
    if peak_power is not None:
        lo, hi = _peak_interval(budget, M, p0, target, lo, hi, peak_power)
        if lo is None:
            return _infeasible(beta, mu0, POWER_EXHAUSTED)

    def obj(m1):
        return relay_ibl_objective(budget, M, p0, beta, m1, mu0)

    m1, _ = golden_section_max(obj, lo, hi, tol=tol)
    if integer:
        cands = [c for c in (math.floor(m1), math.ceil(m1))
                 if max(1.0, lo) <= c <= min(hi, M - 1.0)]
        if not cands:
            return _infeasible(beta, mu0, POWER_EXHAUSTED, continuous_m1=m1)
        vals = [obj(c) for c in cands]
        m1 = cands[int(np.argmax(vals))]
    p1, p2 = _relay_ibl_powers(budget, M, p0, target, m1)
    p1 = max(p1, 0.0)
    pair = relay_throughputs_ibl(budget, M, m1, p1, p2)
    alloc = Allocation(p1, p2, m1, M - m1)
    if not pair.feasible:
        return _infeasible(beta, mu0, NEGATIVE_UAV, alloc, pair, m1_interval=(lo, hi))
    return AllocationResult(alloc, pair, beta, True, NONE, mu0, {"m1_interval": (lo, hi)})


def _peak_interval(budget, M, p0, target, lo, hi, peak):
    """Shrink the m1 interval so that both per-phase powers stay below ``peak``."""
    def p1_minus_peak(m1):
        return _relay_ibl_powers(budget, M, p0, target, m1)[0] - peak

    def p2_minus_peak(m1):
        return _relay_ibl_powers(budget, M, p0, target, m1)[1] - peak

    eps = 1e-9 * M
    # p2 grows with m1
    if p2_minus_peak(max(lo, eps)) > 0.0:
        return None, None
    if p2_minus_peak(hi - eps) > 0.0:
        hi = brentq(p2_minus_peak, max(lo, eps), hi - eps)
    # p1 shrinks with m1
    if p1_minus_peak(hi - eps) > 0.0:
        return None, None
    if p1_minus_peak(max(lo, eps)) > 0.0:
        lo = brentq(p1_minus_peak, max(lo, eps), hi - eps)
    return lo, hi


class _RelayFblEval(NamedTuple):
    uav: float
    alloc: Allocation | None
    pair: ThroughputPair | None
    reason: str


def _relay_fbl_point(budget, M, p0, target, targets, m1, peak_power) -> _RelayFblEval:
    m2 = M - m1
    if target > 0.0:
        if budget.g3 <= 0.0:
            return _RelayFblEval(-math.inf, None, None, GU_TARGET_UNREACHABLE)
        eps_r2 = 1.0 - (1.0 - targets.nu2) / (1.0 - targets.nu1)
        r = target / (m2 * (1.0 - targets.nu2))
        try:
            snr3 = fbl.invert_snr_for_error(m2, eps_r2, r)
        except fbl.InfeasibleRateError:
            return _RelayFblEval(-math.inf, None, None, GU_TARGET_UNREACHABLE)
        p2 = snr3 * budget.noise_power / budget.g3
    else:
        p2 = 0.0
    p1 = (M * p0 - m2 * p2) / m1
    if p1 <= 0.0 or (peak_power is not None and max(p1, p2) > peak_power):
        return _RelayFblEval(-math.inf, None, None, POWER_EXHAUSTED)
    pair = relay_throughputs_fbl(budget, M, m1, p1, p2, targets)
    alloc = Allocation(p1, p2, m1, m2)
    if not pair.feasible:
        return _RelayFblEval(-math.inf, alloc, pair, NEGATIVE_UAV)
    return _RelayFblEval(pair.uav, alloc, pair, NONE)


def _relay_fbl_scan(budget, M, p0, target, targets, grid, peak_power):
    """Vectorized :func:`_relay_fbl_point` over a grid of ``m1``.

    Returns the UAV throughputs (``-inf`` where infeasible) and the
    per-point infeasibility reasons.
    """
    nu1, nu2 = targets.nu1, targets.nu2
    s = budget.noise_power
    m2 = M - grid
    uav = np.full(grid.shape, -math.inf)
    reasons = np.full(grid.shape, NONE, dtype=object)
    if target > 0.0:
        if budget.g3 <= 0.0:
            reasons[:] = GU_TARGET_UNREACHABLE
            return uav, reasons
        eps_r2 = 1.0 - (1.0 - nu2) / (1.0 - nu1)
        snr3 = fbl.invert_snr_for_error_many(m2, eps_r2, target / (m2 * (1.0 - nu2)))
        unreachable = np.isnan(snr3)
        reasons[unreachable] = GU_TARGET_UNREACHABLE
        snr3 = np.where(unreachable, 0.0, snr3)
        p2 = snr3 * s / budget.g3
        raw2 = np.zeros(grid.shape)
        pos = snr3 > 0.0
        raw2[pos] = fbl.fbl_rate_raw(m2[pos], snr3[pos], eps_r2)
    else:
        unreachable = np.zeros(grid.shape, dtype=bool)
        p2 = raw2 = np.zeros(grid.shape)
    p1 = (M * p0 - m2 * p2) / grid
    exhausted = ~unreachable & (p1 <= 0.0)
    if peak_power is not None:
        exhausted |= ~unreachable & (np.maximum(p1, p2) > peak_power)
    reasons[exhausted] = POWER_EXHAUSTED
    live = ~unreachable & ~exhausted
    raw1 = np.full(grid.shape, -math.inf)
    snr1 = p1[live] * budget.g1 / s
    raw1[live] = np.where(fbl.on_increasing_branch(grid[live], snr1, nu1),
                          fbl.fbl_rate_raw(grid[live], snr1, nu1), -1.0)
    gu = m2 * np.maximum(raw2, 0.0) * (1.0 - nu2)
    u = grid * np.maximum(raw1, 0.0) * (1.0 - nu1) - gu
    ok = live & (u >= 0.0) & (raw1 >= 0.0) & (raw2 >= 0.0)
    reasons[live & ~ok] = NEGATIVE_UAV
    uav[ok] = u[ok]
    return uav, reasons


def solve_relay_fbl(budget: LinkBudget, M: float, p0: float, beta: float,
                    targets: ReliabilityTargets, *, integer: bool = False,
                    tol: float = 1e-4, peak_power: float | None = None,
                    record_evaluations: bool = False) -> AllocationResult:
    """Relaying allocation in the FBL regime.

    For each first-phase blocklength the GU guarantee pins ``p2`` and the
    energy budget pins ``p1``, leaving a one-dimensional search over ``m1``.
    Every integer ``m1`` with both phases at least
    :data:`MIN_FBL_BLOCKLENGTH` symbols is evaluated; unless ``integer`` is
    set, the best one is then refined by golden-section search within one
    symbol either side.
    """
    mu0 = solo_throughput("fbl", budget, M, p0, targets.nu2)
    if not targets.nu1 < targets.nu2:
        return _infeasible(beta, mu0, RELIABILITY_ORDERING)
    target = beta * mu0
    m_lo, m_hi = MIN_FBL_BLOCKLENGTH, int(math.floor(M)) - MIN_FBL_BLOCKLENGTH
    if m_hi < m_lo:
        return _infeasible(beta, mu0, BLOCKLENGTH_DOMAIN)

    evaluated = []

    def point(m1):
        if record_evaluations:
            evaluated.append(m1)
        return _relay_fbl_point(budget, M, p0, target, targets, m1, peak_power)

    grid = np.arange(m_lo, m_hi + 1, dtype=float)
    if record_evaluations:
        evaluated.extend(grid.tolist())
    uav, reasons = _relay_fbl_scan(budget, M, p0, target, targets, grid, peak_power)
    best = None
    causes = Counter(r for r in reasons if r != NONE)
    best_uav = None
    for m1, u, r in zip(grid, uav, reasons):
        # strict improvement keeps the smaller m1 on ties
        if r == NONE and (best_uav is None or u > best_uav * (1.0 + 1e-9) + 1e-12):
            best, best_uav = m1, u
    if best is not None:
        best = point(float(best))
        if best.reason != NONE:
            best = None
    diag = {"evaluated_m1": evaluated} if record_evaluations else {}
    if best is None:
        reason = causes.most_common(1)[0][0] if causes else POWER_EXHAUSTED
        return _infeasible(beta, mu0, reason, **diag)

    if not integer:
        m_grid = best.alloc.m1
        a, b = max(m_lo, m_grid - 1.0), min(m_hi, m_grid + 1.0)
        if b > a:
            x, _ = golden_section_max(lambda m: point(m).uav, a, b, tol=tol)
            ev = point(x)
            if ev.reason == NONE and ev.uav > best.uav:
                best = ev
    return AllocationResult(best.alloc, best.pair, beta, True, NONE, mu0, diag)


def solve(budget: LinkBudget, M: float, p0: float, scheme: str, regime: str, beta: float,
          targets: ReliabilityTargets | None = None, *, integer: bool = False,
          tol: float = 1e-4, peak_power: float | None = None) -> AllocationResult:
    """Dispatch to the solver for ``(scheme, regime)``."""
    targets = targets or ReliabilityTargets()
    if scheme == "noma":
        if regime == "ibl":
            return solve_noma_ibl(budget, M, p0, beta)
        if regime == "fbl":
            return solve_noma_fbl(budget, M, p0, beta, targets)
    elif scheme == "relay":
        if regime == "ibl":
            return solve_relay_ibl(budget, M, p0, beta, integer=integer, tol=tol,
                                   peak_power=peak_power)
        if regime == "fbl":
            return solve_relay_fbl(budget, M, p0, beta, targets, integer=integer, tol=tol,
                                   peak_power=peak_power)
    raise ValueError(f"unknown scheme/regime {scheme!r}/{regime!r}")


class FeasibleBeta(NamedTuple):
    value: float
    feasible_at_zero: bool


def max_feasible_beta(budget: LinkBudget, M: float, p0: float, scheme: str, regime: str,
                      targets: ReliabilityTargets | None = None, *, tol: float = 1e-5,
                      beta_cap: float = 1024.0, **solver_kw) -> FeasibleBeta:
    """Largest ``beta`` with a feasible allocation and non-negative UAV throughput.

    Relies on feasibility being monotone in ``beta``: brackets by doubling and
    then bisects to ``tol``. The returned value is always a feasible ``beta``.
    Very close to a zero-power UAV the FBL rate passes through its dispersion
    dip, so feasibility can flicker in a band of width about 1e-4 below the
    supremum; the bisection then lands on the lower edge of that band.
    """
    def ok(beta):
        res = solve(budget, M, p0, scheme, regime, beta, targets, **solver_kw)
        return res.feasible and res.uav >= 0.0

    if not ok(0.0):
        return FeasibleBeta(0.0, False)
    lo, hi = 0.0, 1.0
    while ok(hi):
        lo, hi = hi, 2.0 * hi
        if hi > beta_cap:
            return FeasibleBeta(lo, True)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return FeasibleBeta(lo, True)


def grid_oracle(budget: LinkBudget, M: float, p0: float, scheme: str, regime: str,
                beta: float, targets: ReliabilityTargets | None = None,
                resolution: float = 1e-5) -> AllocationResult:
    """Brute-force reference solution.

    NOMA enumerates ``p1`` on a grid of step ``resolution * p0`` with the
    power budget spent in full. Relaying enumerates every integer ``m1`` (FBL:
    both phases at least :data:`MIN_FBL_BLOCKLENGTH` long) and, for FBL, finds
    the GU power by vectorized bisection on the forward throughput.
    """
    targets = targets or ReliabilityTargets()
    if scheme == "noma":
        return _oracle_noma(budget, M, p0, regime, beta, targets, resolution)
    if scheme == "relay":
        return _oracle_relay(budget, M, p0, regime, beta, targets)
    raise ValueError(f"unknown scheme {scheme!r}")


def _oracle_noma(budget, M, p0, regime, beta, targets, resolution):
    nu1, nu2 = targets.nu1, targets.nu2
    mu0 = solo_throughput(regime, budget, M, p0, nu2)
    target = beta * mu0
    if not budget.g1 > budget.g2:
        return _infeasible(beta, mu0, SIC_ORDERING)
    g1, g2, s = budget.g1, budget.g2, budget.noise_power
    n = int(round(1.0 / resolution))
    p1 = p0 * np.arange(1, n) / n
    p2 = p0 - p1
    sinr_gu = p2 * g2 / (p1 * g2 + s)
    if regime == "ibl":
        gu = M * np.log2(1.0 + sinr_gu)
        uav = M * np.log2(1.0 + p1 * g1 / s)
        ok = gu >= target
    else:
        raw2 = np.asarray(fbl.fbl_rate_raw(M, sinr_gu, nu2))
        r2 = np.maximum(raw2, 0.0)
        gu = M * r2 * (1.0 - nu2)
        eps_sic = np.asarray(fbl.fbl_error(M, p2 * g1 / (p1 * g1 + s), r2))
        ok = ((gu >= target) & (raw2 >= 0.0) & (eps_sic < nu1)
              & fbl.on_increasing_branch(M, sinr_gu, nu2))
        eps_n1 = np.where(ok, 1.0 - (1.0 - nu1) / (1.0 - np.minimum(eps_sic, 0.5 * nu1)), 0.5)
        raw1 = np.asarray(fbl.fbl_rate_raw(M, p1 * g1 / s, eps_n1))
        ok &= (raw1 >= 0.0) & fbl.on_increasing_branch(M, p1 * g1 / s, eps_n1)
        uav = M * np.maximum(raw1, 0.0) * (1.0 - nu1)
    if not ok.any():
        return _infeasible(beta, mu0, GU_TARGET_UNREACHABLE)
    k = int(np.argmax(np.where(ok, uav, -np.inf)))
    a, b = float(p1[k]), float(p2[k])
    pair = (noma_throughputs_ibl(budget, M, a, b) if regime == "ibl"
            else noma_throughputs_fbl(budget, M, a, b, targets))
    return AllocationResult(Allocation(a, b, M, M), pair, beta, True, NONE, mu0,
                            {"grid_step": p0 / n})


def _oracle_relay(budget, M, p0, regime, beta, targets):
    nu1, nu2 = targets.nu1, targets.nu2
    s = budget.noise_power
    if regime == "fbl":
        mu0 = solo_throughput("fbl", budget, M, p0, nu2)
        if not nu1 < nu2:
            return _infeasible(beta, mu0, RELIABILITY_ORDERING)
        m1 = np.arange(MIN_FBL_BLOCKLENGTH, int(M) - MIN_FBL_BLOCKLENGTH + 1, dtype=float)
    else:
        mu0 = solo_throughput("ibl", budget, M, p0)
        m1 = np.arange(1, int(math.ceil(M)), dtype=float)
    target = beta * mu0
    if m1.size == 0:
        return _infeasible(beta, mu0, BLOCKLENGTH_DOMAIN)
    m2 = M - m1

    eps_r2 = 1.0 - (1.0 - nu2) / (1.0 - nu1)
    if target == 0.0:
        snr3 = np.zeros_like(m1)
    elif budget.g3 <= 0.0:
        return _infeasible(beta, mu0, GU_TARGET_UNREACHABLE)
    elif regime == "ibl":
        with np.errstate(over="ignore"):
            snr3 = np.expm1(target / m2 * np.log(2.0))
    else:
        need = target / (m2 * (1.0 - nu2))
        # start of the increasing branch, per row: u (u - 1) = Q^-1(eps)^2 / m
        t2 = fbl.inv_q(eps_r2) ** 2 / m2
        lo = np.maximum(np.sqrt(0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t2))) - 1.0, 1e-300)
        hi = np.full_like(m1, fbl.SNR_CAP)
        reach = fbl.fbl_rate_raw(m2, hi, eps_r2) >= need
        met_lo = fbl.fbl_rate_raw(m2, lo, eps_r2) >= need
        log_lo, log_hi = np.log(lo), np.log(hi)
        for _ in range(200):
            mid = 0.5 * (log_lo + log_hi)
            up = fbl.fbl_rate_raw(m2, np.exp(mid), eps_r2) >= need
            log_hi = np.where(up, mid, log_hi)
            log_lo = np.where(up, log_lo, mid)
        snr3 = np.where(met_lo, lo, np.exp(log_hi))
        snr3 = np.where(reach, snr3, np.inf)
    p2 = snr3 * s / budget.g3 if budget.g3 > 0 else np.zeros_like(m1)
    p1 = (M * p0 - m2 * p2) / m1
    ok = np.isfinite(p2) & (p1 > 0.0)
    p1c = np.where(ok, p1, 0.0)
    if regime == "ibl":
        first = m1 * np.log2(1.0 + p1c * budget.g1 / s)
        gu = m2 * np.log2(1.0 + np.where(ok, p2, 0.0) * budget.g3 / s)
    else:
        first = np.zeros_like(m1)
        pos = ok & (p1c * budget.g1 > 0.0)
        if pos.any():
            snr1 = p1c[pos] * budget.g1 / s
            raw1 = fbl.fbl_rate_raw(m1[pos], snr1, nu1)
            first[pos] = m1[pos] * np.maximum(raw1, 0.0) * (1.0 - nu1)
            ok[pos] &= (raw1 >= 0.0) & fbl.on_increasing_branch(m1[pos], snr1, nu1)
        snr3c = np.where(ok, snr3, 1.0)
        pos2 = ok & (snr3c > 0.0)
        gu = np.zeros_like(m1)
        if pos2.any():
            raw2 = fbl.fbl_rate_raw(m2[pos2], snr3c[pos2], eps_r2)
            gu[pos2] = m2[pos2] * np.maximum(raw2, 0.0) * (1.0 - nu2)
    uav = first - gu
    ok &= uav >= 0.0
    if not ok.any():
        return _infeasible(beta, mu0, NEGATIVE_UAV)
    k = int(np.argmax(np.where(ok, uav, -np.inf)))
    a, b, c = float(p1[k]), float(p2[k]), float(m1[k])
    pair = (relay_throughputs_ibl(budget, M, c, a, b) if regime == "ibl"
            else relay_throughputs_fbl(budget, M, c, a, b, targets))
    return AllocationResult(Allocation(a, b, c, M - c), pair, beta, True, NONE, mu0)
