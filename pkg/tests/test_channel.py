import math

import numpy as np
import pytest

from uavfbl import channel
from uavfbl.channel import PathLossParams, Position3D
from uavfbl.config import ScenarioConfig

# 30-digit reference evaluation of the default topology
G1 = 8.68798259128277384713e-09
G2 = 1.56783184881112247486e-11
G3 = 4.94383966058462850916e-10


def test_distances():
    ap, uav, gu = Position3D(0, 0, 20), Position3D(100, 0, 100), Position3D(700, 0, 0)
    assert channel.distance(ap, gu) == pytest.approx(700.2856560, rel=1e-9)
    assert channel.distance(ap, uav) == pytest.approx(128.0624847, rel=1e-9)


def test_elevation_angle():
    assert channel.elevation_angle(Position3D(100, 0, 100), Position3D(700, 0, 0)) == \
        pytest.approx(9.46232220802561739, rel=1e-12)
    assert channel.elevation_angle(Position3D(5, 5, 50), Position3D(5, 5, 0)) == 90.0
    with pytest.raises(ValueError):
        channel.elevation_angle(Position3D(0, 0, 0), Position3D(1, 0, 0))


def test_los_probability():
    pl = PathLossParams()
    assert channel.los_probability(9.46232220802561739, pl.a2, pl.b2) == \
        pytest.approx(0.0922528520272409131, rel=1e-12)
    assert channel.los_probability(90.0, pl.a2, pl.b2) == pytest.approx(0.99997507453790, rel=1e-12)
    thetas = np.linspace(1, 90, 50)
    p = [channel.los_probability(t, pl.a2, pl.b2) for t in thetas]
    assert all(a < b for a, b in zip(p, p[1:]))


def test_exponent_decreases_with_elevation():
    pl = PathLossParams()
    alphas = [channel.uav_gu_exponent(t, pl.a1, pl.b1, pl.a2, pl.b2) for t in (5, 20, 45, 90)]
    assert all(a > b for a, b in zip(alphas, alphas[1:]))
    assert alphas[-1] == pytest.approx(0.5 + 1.5 * (1 - 0.99997507453790), rel=1e-9)
    with pytest.raises(channel.ChannelConfigError):
        channel.uav_gu_exponent(90.0, -3.0, 2.0, pl.a2, pl.b2)


def test_reference_loss():
    assert PathLossParams().reference_loss_db == pytest.approx(78.4623720993283, rel=1e-13)


def test_link_gain_and_dbm():
    assert channel.link_gain(78.46, 0.5) == pytest.approx(7.12803796801094e-9, rel=1e-12)
    assert channel.dbm_to_watt(30.0) == 1.0
    assert channel.dbm_to_watt(-80.0) == pytest.approx(1e-11)
    with pytest.raises(ValueError):
        channel.link_gain(80.0, -1.0)


def test_default_budget():
    b = channel.build_link_budget(ScenarioConfig())
    assert (b.g1, b.g2, b.g3) == pytest.approx((G1, G2, G3), rel=1e-12)
    assert b.noise_power == pytest.approx(1e-11)
    assert b.snr_per_watt == pytest.approx((G1 / 1e-11, G2 / 1e-11, G3 / 1e-11))


def test_fading_scales_gains():
    b = channel.build_link_budget(ScenarioConfig(), (2.0, 0.5, 0.0))
    assert (b.g1, b.g2, b.g3) == pytest.approx((2 * G1, 0.5 * G2, 0.0), rel=1e-12)


@pytest.mark.parametrize("x", np.linspace(150, 1000, 18))
def test_uav_link_beats_gu_link(x):
    cfg = ScenarioConfig(gu_pos=Position3D(float(x), 0, 0))
    b = channel.build_link_budget(cfg)
    assert b.g1 > b.g2


@pytest.mark.parametrize("kw", [dict(d0=0), dict(carrier_frequency=-1), dict(alpha1=0)])
def test_bad_path_loss_params(kw):
    with pytest.raises(ValueError):
        PathLossParams(**kw)


def test_position_rejects_nan():
    with pytest.raises(ValueError):
        Position3D(math.nan, 0, 0)
