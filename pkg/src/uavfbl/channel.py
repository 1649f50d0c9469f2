"""Geometry, log-distance path loss and the air-to-ground LoS model."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .config import ScenarioConfig

SPEED_OF_LIGHT = 3.0e8  # rounded value conventional in link-budget work


class ChannelConfigError(ValueError):
    """Channel parameters produce a non-physical link."""


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinates: {self}")


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path loss with an elevation-dependent UAV-GU exponent.

    ``a1``/``b1`` are the slope and intercept of the UAV-GU exponent in the
    LoS probability; ``a2``/``b2`` shape the LoS sigmoid itself.
    """

    d0: float = 100.0
    carrier_frequency: float = 2e9
    alpha1: float = 2.0
    alpha2: float = 3.5
    a1: float = -1.5
    b1: float = 2.0
    a2: float = 9.61
    b2: float = 0.16

    def __post_init__(self):
        if not self.d0 > 0:
            raise ValueError("d0 must be positive")
        if not self.carrier_frequency > 0:
            raise ValueError("carrier_frequency must be positive")
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise ValueError("path-loss exponents must be positive")
        if not self.b2 > 0:
            raise ValueError("b2 must be positive")

    @property
    def reference_loss_db(self) -> float:
        return free_space_loss_db(self.d0, self.carrier_frequency)


@dataclass(frozen=True)
class LinkBudget:
    """Linear gains AP-UAV (g1), AP-GU (g2), UAV-GU (g3) and noise power in W."""

    g1: float
    g2: float
    g3: float
    noise_power: float

    @property
    def snr_per_watt(self) -> tuple[float, float, float]:
        s = self.noise_power
        return self.g1 / s, self.g2 / s, self.g3 / s


def distance(a: Position3D, b: Position3D) -> float:
    return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))


def elevation_angle(uav: Position3D, gu: Position3D) -> float:
    """Elevation of the UAV as seen from the GU, in degrees."""
    dz = uav.z - gu.z
    if not dz > 0:
        raise ValueError("UAV must be above the ground user")
    horizontal = math.hypot(uav.x - gu.x, uav.y - gu.y)
    if horizontal == 0.0:
        return 90.0
    return math.degrees(math.atan(dz / horizontal))


def los_probability(theta: float, a2: float, b2: float) -> float:
    return 1.0 / (1.0 + a2 * math.exp(-b2 * (theta - a2)))


def uav_gu_exponent(theta: float, a1: float, b1: float, a2: float, b2: float) -> float:
    alpha = a1 * los_probability(theta, a2, b2) + b1
    if not alpha > 0:
        raise ChannelConfigError(f"UAV-GU path-loss exponent {alpha} is not positive")
    return alpha


def free_space_loss_db(d: float, frequency: float) -> float:
    return 20.0 * math.log10(4.0 * math.pi * d * frequency / SPEED_OF_LIGHT)


def path_loss_db(d: float, alpha: float, params: PathLossParams) -> float:
    if not d > 0:
        raise ValueError("distance must be positive")
    return params.reference_loss_db + 10.0 * alpha * math.log10(d / params.d0)


def link_gain(loss_db: float, fading: float) -> float:
    if fading < 0:
        raise ValueError("fading power gain must be non-negative")
    return fading * 10.0 ** (-loss_db / 10.0)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def uav_gu_los(cfg: ScenarioConfig) -> float:
    pl = cfg.path_loss
    return los_probability(elevation_angle(cfg.uav_pos, cfg.gu_pos), pl.a2, pl.b2)


def build_link_budget(cfg: ScenarioConfig,
                      fading: tuple[float, float, float] = (1.0, 1.0, 1.0)) -> LinkBudget:
    pl = cfg.path_loss
    z1, z2, z3 = fading
    theta = elevation_angle(cfg.uav_pos, cfg.gu_pos)
    alpha3 = uav_gu_exponent(theta, pl.a1, pl.b1, pl.a2, pl.b2)
    l1 = path_loss_db(distance(cfg.ap_pos, cfg.uav_pos), pl.alpha1, pl)
    l2 = path_loss_db(distance(cfg.ap_pos, cfg.gu_pos), pl.alpha2, pl)
    l3 = path_loss_db(distance(cfg.uav_pos, cfg.gu_pos), alpha3, pl)
    return LinkBudget(
        g1=link_gain(l1, z1),
        g2=link_gain(l2, z2),
        g3=link_gain(l3, z3),
        noise_power=dbm_to_watt(cfg.noise_power_dbm),
    )
