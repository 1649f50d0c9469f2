"""Forward throughput models for NOMA and decode-and-forward relaying.

Every function works on SNRs built from a :class:`~uavfbl.channel.LinkBudget`
and returns throughputs in bits per frame. FBL variants apply the normal
approximation with the reliability bookkeeping of each scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .channel import LinkBudget
from .fbl import fbl_error, fbl_rate_raw, on_increasing_branch


class SchemeError(ValueError):
    reason = "infeasible"


class SicOrderingError(SchemeError):
    """The UAV link is not stronger than the GU link, so SIC at the UAV fails."""

    reason = "sic-ordering"


class SicBudgetExhausted(SchemeError):
    """SIC alone already uses up the UAV's error budget."""

    reason = "sic-budget-exhausted"


class ReliabilityOrderingError(SchemeError):
    """Relaying needs the UAV target tighter than the GU's end-to-end target."""

    reason = "reliability-ordering"


@dataclass(frozen=True)
class ReliabilityTargets:
    nu1: float = 1e-4
    nu2: float = 1e-3

    def __post_init__(self):
        for v in (self.nu1, self.nu2):
            if not 0.0 < v < 1.0:
                raise ValueError(f"reliability target {v} outside (0, 1)")


@dataclass(frozen=True)
class Allocation:
    p1: float
    p2: float
    m1: float
    m2: float


@dataclass
class ThroughputPair:
    uav: float
    gu: float
    feasible: bool = True
    diagnostics: dict = field(default_factory=dict)


def _rate(m, snr, eps):
    """Clamped FBL rate plus clamp flag; zero SNR carries zero rate.

    An SNR below the dispersion dip is flagged like a negative rate: the
    approximation is not monotone there and would credit vanishing SNRs
    with about ``log2(m)/m`` bits per symbol.
    """
    if snr <= 0.0:
        return 0.0, False
    if not on_increasing_branch(m, snr, eps):
        return 0.0, True
    raw = fbl_rate_raw(m, snr, eps)
    return max(raw, 0.0), raw < 0.0


def check_sic_order(budget: LinkBudget) -> None:
    if not budget.g1 > budget.g2:
        raise SicOrderingError(f"need g1 > g2, got g1={budget.g1:g}, g2={budget.g2:g}")


def solo_throughput(regime: str, budget: LinkBudget, M: float, p0: float,
                    nu2: float | None = None) -> float:
    """GU throughput when it has the resource block to itself."""
    snr = p0 * budget.g2 / budget.noise_power
    if regime == "ibl":
        return M * math.log2(1.0 + snr)
    if regime != "fbl":
        raise ValueError(f"unknown regime {regime!r}")
    if nu2 is None:
        raise ValueError("FBL solo throughput needs nu2")
    r, _ = _rate(M, snr, nu2)
    return M * r * (1.0 - nu2)


def noma_throughputs_ibl(budget: LinkBudget, M: float, p1: float, p2: float) -> ThroughputPair:
    check_sic_order(budget)
    g1, g2, s = budget.g1, budget.g2, budget.noise_power
    sinr_gu = p2 * g2 / (p1 * g2 + s)
    uav = M * math.log2(1.0 + p1 * g1 / s)
    gu = M * math.log2(1.0 + sinr_gu)
    return ThroughputPair(uav, gu, True, {
        "r1": uav / M, "r2": gu / M, "sinr_gu": sinr_gu, "snr_uav": p1 * g1 / s})


def noma_throughputs_fbl(budget: LinkBudget, M: float, p1: float, p2: float,
                         targets: ReliabilityTargets) -> ThroughputPair:
    """UAV and GU FBL throughputs under NOMA with SIC at the UAV.

    The UAV's decoding target is loosened so that SIC and own-packet errors
    together meet ``nu1``. Raises :class:`SicBudgetExhausted` when the SIC
    error alone reaches ``nu1``.
    """
    check_sic_order(budget)
    nu1, nu2 = targets.nu1, targets.nu2
    g1, g2, s = budget.g1, budget.g2, budget.noise_power
    sinr_gu = p2 * g2 / (p1 * g2 + s)
    r2, clamp2 = _rate(M, sinr_gu, nu2)
    gu = M * r2 * (1.0 - nu2)
    if r2 > 0.0:
        eps_sic = fbl_error(M, p2 * g1 / (p1 * g1 + s), r2)
    else:
        eps_sic = 0.0
    diag = {"r2": r2, "sinr_gu": sinr_gu, "eps_sic": eps_sic, "snr_uav": p1 * g1 / s}
    if eps_sic >= nu1:
        raise SicBudgetExhausted(f"eps_sic={eps_sic:g} >= nu1={nu1:g}")
    eps_n1 = 1.0 - (1.0 - nu1) / (1.0 - eps_sic)
    r1, clamp1 = _rate(M, p1 * g1 / s, eps_n1)
    uav = M * r1 * (1.0 - nu1)
    diag.update(r1=r1, eps_n1=eps_n1, rate_clamped=clamp1 or clamp2)
    return ThroughputPair(uav, gu, not (clamp1 or clamp2), diag)


def relay_throughputs_ibl(budget: LinkBudget, M: float, m1: float, p1: float,
                          p2: float) -> ThroughputPair:
    if not 0.0 < m1 <= M:
        raise ValueError(f"first-phase blocklength {m1} outside (0, {M}]")
    s = budget.noise_power
    first_hop = m1 * math.log2(1.0 + p1 * budget.g1 / s)
    gu = (M - m1) * math.log2(1.0 + p2 * budget.g3 / s)
    uav = first_hop - gu
    return ThroughputPair(uav, gu, uav >= 0.0, {"first_hop": first_hop})


def relay_throughputs_fbl(budget: LinkBudget, M: float, m1: float, p1: float, p2: float,
                          targets: ReliabilityTargets) -> ThroughputPair:
    """Decode-and-forward FBL throughputs.

    The first hop carries both packets at error ``nu1``; the second hop gets
    whatever error budget is left of ``nu2``. A negative UAV throughput is
    reported as-is with ``feasible=False``.
    """
    nu1, nu2 = targets.nu1, targets.nu2
    if not nu1 < nu2:
        raise ReliabilityOrderingError(f"need nu1 < nu2, got {nu1:g} >= {nu2:g}")
    if not 0.0 < m1 <= M:
        raise ValueError(f"first-phase blocklength {m1} outside (0, {M}]")
    s = budget.noise_power
    m2 = M - m1
    eps_r2 = 1.0 - (1.0 - nu2) / (1.0 - nu1)
    r1, clamp1 = _rate(m1, p1 * budget.g1 / s, nu1)
    first_hop = m1 * r1 * (1.0 - nu1)
    if m2 > 0.0 and p2 > 0.0:
        r2, clamp2 = _rate(m2, p2 * budget.g3 / s, eps_r2)
    else:
        r2, clamp2 = 0.0, False
    gu = m2 * r2 * (1.0 - nu2)
    uav = first_hop - gu
    ok = uav >= 0.0 and not (clamp1 or clamp2)
    return ThroughputPair(uav, gu, ok, {
        "first_hop": first_hop, "r1": r1, "r2": r2, "eps_r2": eps_r2,
        "rate_clamped": clamp1 or clamp2})
