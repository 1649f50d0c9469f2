import math

import numpy as np
import pytest

from conftest import random_scenarios
from uavfbl import fbl
from uavfbl.channel import LinkBudget
from uavfbl.schemes import ReliabilityTargets, solo_throughput
from uavfbl.solvers import (MIN_FBL_BLOCKLENGTH, grid_oracle, max_feasible_beta,
                            relay_ibl_objective, solve, solve_noma_ibl, solve_relay_fbl,
                            solve_relay_ibl)


def run(s, scheme, regime, beta=None, **kw):
    beta = s.beta if beta is None else beta
    return solve(s.budget, s.M, s.p0, scheme, regime, beta, s.targets, **kw)


# Pins: solver outputs at the reference topology, each confirmed by grid_oracle
PINS = {
    ("noma", "ibl", 0.5): dict(p1=0.38425395184144084, m1=400, uav=3354.929788874424),
    ("noma", "fbl", 0.95): dict(p1=0.02729441402526674, m1=400, uav=1752.135603018252),
    ("relay", "ibl", 1.0): dict(p1=0.8699102403061543, m1=312.16057362255196,
                                uav=2441.1971157322077),
    ("relay", "fbl", 1.0): dict(p1=0.9224701697888503, m1=316.0, uav=2491.209956846003),
}


@pytest.mark.parametrize("key", list(PINS))
def test_pinned_solutions(topo, key):
    scheme, regime, beta = key
    res = run(topo, scheme, regime, beta)
    want = PINS[key]
    assert res.feasible
    assert res.allocation.p1 == pytest.approx(want["p1"], rel=1e-8)
    assert res.allocation.m1 == pytest.approx(want["m1"], rel=1e-8)
    assert res.uav == pytest.approx(want["uav"], rel=1e-9)
    ref = grid_oracle(topo.budget, topo.M, topo.p0, scheme, regime, beta, topo.targets)
    assert ref.uav <= res.uav * (1 + 1e-9)
    assert res.uav - ref.uav <= 1e-3 * res.uav


def test_noma_ibl_closed_form_independent(topo):
    snr0 = topo.p0 * topo.budget.g2 / topo.budget.noise_power
    mu0 = topo.M * math.log2(1 + snr0)
    gamma = 2 ** (0.5 * mu0 / topo.M) - 1
    p1 = topo.p0 - gamma * (topo.p0 * topo.budget.g2 + topo.budget.noise_power) / (
        topo.budget.g2 * (1 + gamma))
    assert run(topo, "noma", "ibl", 0.5).allocation.p1 == pytest.approx(p1, rel=1e-12)


def test_beta_zero(topo):
    for regime in ("ibl", "fbl"):
        res = run(topo, "noma", regime, 0.0)
        assert res.allocation.p1 == topo.p0 and res.allocation.p2 == 0.0
    res = run(topo, "noma", "ibl", 0.0)
    assert res.uav == pytest.approx(topo.M * math.log2(1 + topo.p0 * topo.budget.g1 / 1e-11))
    cont = solve_relay_ibl(topo.budget, topo.M, topo.p0, 0.0, tol=1e-4)
    assert cont.feasible and cont.allocation.m1 == pytest.approx(topo.M - 1e-4)
    assert cont.diagnostics["boundary_supremum"]
    whole = solve_relay_ibl(topo.budget, topo.M, topo.p0, 0.0, integer=True)
    assert whole.allocation.m1 == topo.M - 1


def test_noma_beta_one_has_no_uav_power(topo):
    res = solve_noma_ibl(topo.budget, topo.M, topo.p0, 1.0)
    assert not res.feasible and res.infeasibility_reason == "gu-target-unreachable"


@pytest.mark.parametrize("regime", ["ibl", "fbl"])
def test_noma_infeasible_above_one(regime):
    for s in random_scenarios(30, 3):
        mu0 = solo_throughput(regime, s.budget, s.M, s.p0, s.targets.nu2)
        if mu0 > 0:
            assert not run(s, "noma", regime, 1.0 + 1e-6).feasible


def test_sic_ordering_reason(topo):
    b = topo.budget
    swapped = LinkBudget(b.g2, b.g1, b.g3, b.noise_power)
    res = solve(swapped, 400, 1.0, "noma", "fbl", 0.5, topo.targets)
    assert res.infeasibility_reason == "sic-ordering"


def test_reliability_ordering_reason(topo):
    res = solve(topo.budget, 400, 1.0, "relay", "fbl", 0.5, ReliabilityTargets(1e-3, 1e-4))
    assert not res.feasible and res.infeasibility_reason == "reliability-ordering"


def test_short_frame_outside_fbl_domain(topo):
    res = solve(topo.budget, 150, 1.0, "relay", "fbl", 0.5, topo.targets)
    assert res.infeasibility_reason == "blocklength-domain"


def test_relay_fbl_only_evaluates_domain(topo):
    res = solve_relay_fbl(topo.budget, topo.M, topo.p0, 1.0, topo.targets,
                          record_evaluations=True)
    ev = res.diagnostics["evaluated_m1"]
    assert min(ev) >= MIN_FBL_BLOCKLENGTH and max(ev) <= topo.M - MIN_FBL_BLOCKLENGTH
    assert len(ev) > topo.M - 2 * MIN_FBL_BLOCKLENGTH


def test_integer_mode_gives_integer_blocklengths(topo):
    for regime in ("ibl", "fbl"):
        res = run(topo, "relay", regime, 1.3, integer=True)
        assert res.allocation.m1 == int(res.allocation.m1)


def test_peak_power_cap_respected(topo):
    free = run(topo, "relay", "ibl", 1.0)
    cap = 1.2
    assert max(free.allocation.p1, free.allocation.p2) > cap
    for regime in ("ibl", "fbl"):
        res = run(topo, "relay", regime, 1.0, peak_power=cap)
        if res.feasible:
            assert max(res.allocation.p1, res.allocation.p2) <= cap * (1 + 1e-9)
            assert res.uav <= run(topo, "relay", regime, 1.0).uav


@pytest.mark.parametrize("scheme", ["noma", "relay"])
@pytest.mark.parametrize("regime", ["ibl", "fbl"])
def test_feasibility_monotone_in_beta(topo, scheme, regime):
    betas = np.linspace(0.0, 3.0, 31)
    ok = [run(topo, scheme, regime, b).feasible for b in betas]
    first_bad = ok.index(False) if False in ok else len(ok)
    assert not any(ok[first_bad:])


def test_max_feasible_beta_reference(topo):
    for regime in ("ibl", "fbl"):
        v = max_feasible_beta(topo.budget, topo.M, topo.p0, "noma", regime, topo.targets)
        assert v.feasible_at_zero and abs(v.value - 1.0) <= 1e-4
        r = max_feasible_beta(topo.budget, topo.M, topo.p0, "relay", regime, topo.targets)
        assert r.value > 1.0
        assert run(topo, "relay", regime, r.value).feasible
        assert not run(topo, "relay", regime, r.value + 1e-3).feasible


def test_max_feasible_beta_infeasible_at_zero(topo):
    b = topo.budget
    swapped = LinkBudget(b.g2, b.g1, b.g3, b.noise_power)
    v = max_feasible_beta(swapped, 400, 1.0, "noma", "ibl")
    assert v == (0.0, False)


def test_relay_ibl_oracle_agreement():
    for s in random_scenarios(20, 4):
        res = run(s, "relay", "ibl")
        ref = grid_oracle(s.budget, s.M, s.p0, "relay", "ibl", s.beta, s.targets)
        assert res.feasible == ref.feasible, s
        if res.feasible:
            assert abs(res.allocation.m1 - ref.allocation.m1) <= 1.0, s
            assert res.uav >= ref.uav * (1 - 1e-9), s


def test_relay_fbl_oracle_agreement():
    for s in random_scenarios(10, 5):
        res = run(s, "relay", "fbl")
        ref = grid_oracle(s.budget, s.M, s.p0, "relay", "fbl", s.beta, s.targets)
        assert res.feasible == ref.feasible, s
        if res.feasible:
            assert abs(res.allocation.m1 - ref.allocation.m1) <= 1.0, s
            assert res.uav >= ref.uav * (1 - 1e-7), s


def test_relay_fbl_approaches_ibl_for_long_frames(topo):
    tight = ReliabilityTargets(1e-6, 1e-5)
    gaps = []
    for M in (2_000, 20_000, 100_000):
        ibl = solve(topo.budget, M, 1.0, "relay", "ibl", 1.0)
        fbl_res = solve(topo.budget, M, 1.0, "relay", "fbl", 1.0, tight)
        gaps.append(abs(fbl_res.uav / ibl.uav - 1.0))
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 0.01


def test_relay_ibl_objective_nan_when_power_negative(topo):
    assert math.isnan(relay_ibl_objective(topo.budget, topo.M, topo.p0, 2.5, 395.0))


def test_fbl_equal_split_needs_less_gu_power(topo):
    m = topo.M / 2
    target = solo_throughput("ibl", topo.budget, topo.M, topo.p0)
    p2_ibl = (2 ** (target / m) - 1) * topo.budget.noise_power / topo.budget.g3
    mu0 = solo_throughput("fbl", topo.budget, topo.M, topo.p0, 1e-3)
    eps_r2 = 1 - (1 - 1e-3) / (1 - 1e-4)
    snr = fbl.invert_snr_for_error(m, eps_r2, mu0 / (m * (1 - 1e-3)))
    p2_fbl = snr * topo.budget.noise_power / topo.budget.g3
    assert p2_fbl < p2_ibl
