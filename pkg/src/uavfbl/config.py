"""Scenario configuration and its INI-file representation.

Example file (every key optional; omitted keys take the defaults shown)::

    [scenario]
    ap_pos = 0, 0, 20
    uav_pos = 100, 0, 100
    gu_pos = 700, 0, 0
    p0_dbm = 30
    noise_power_dbm = -80
    frame_length = 400
    nu1 = 1e-4
    nu2 = 1e-3
    beta = 1.0
    scheme = relay
    regime = ibl
    symbol_rate =

    [path_loss]
    d0 = 100
    carrier_frequency = 2e9
    alpha1 = 2
    alpha2 = 3.5
    a1 = -1.5
    b1 = 2
    a2 = 9.61
    b2 = 0.16

    [fading]
    ap_uav = rician 1
    ap_gu = rayleigh
    uav_gu = rician los
    unit = false
    realization = 1, 1, 1

    [solver]
    integer_blocklengths = false
    peak_power_dbm =
    blocklength_tol = 1e-4
    beta_tol = 1e-5

A file whose regime resolves to ``fbl`` must state ``nu1`` and ``nu2``
explicitly.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .channel import PathLossParams, Position3D, dbm_to_watt
from .montecarlo import FadingSpec

SCHEMES = ("noma", "relay")
REGIMES = ("ibl", "fbl")


class ConfigError(ValueError):
    """Malformed or out-of-domain configuration; ``field`` names the culprit."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _default_fading():
    return (FadingSpec("rician", 1.0), FadingSpec("rayleigh"), FadingSpec("rician", None))


@dataclass(frozen=True)
class ScenarioConfig:
    ap_pos: Position3D = Position3D(0.0, 0.0, 20.0)
    uav_pos: Position3D = Position3D(100.0, 0.0, 100.0)
    gu_pos: Position3D = Position3D(700.0, 0.0, 0.0)
    p0_dbm: float = 30.0
    noise_power_dbm: float = -80.0
    frame_length: int = 400
    nu1: float = 1e-4
    nu2: float = 1e-3
    beta: float = 1.0
    path_loss: PathLossParams = PathLossParams()
    # AP-UAV, AP-GU, UAV-GU
    fading: tuple[FadingSpec, FadingSpec, FadingSpec] = field(default_factory=_default_fading)
    unit_fading: bool = False
    fading_realization: tuple[float, float, float] = (1.0, 1.0, 1.0)
    scheme: str = "relay"
    regime: str = "ibl"
    integer_blocklengths: bool = False
    peak_power_dbm: float | None = None
    blocklength_tol: float = 1e-4
    beta_tol: float = 1e-5
    symbol_rate: float | None = None
    # keys stated by a config file; None when built in code
    stated_keys: frozenset[str] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"expected one of {SCHEMES}, got {self.scheme!r}")
        if self.regime not in REGIMES:
            raise ConfigError("regime", f"expected one of {REGIMES}, got {self.regime!r}")
        if not self.frame_length >= 2:
            raise ConfigError("frame_length", "must be at least 2 symbols")
        for name in ("nu1", "nu2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(name, f"must lie in (0, 1), got {v}")
        if not (self.beta >= 0.0 and math.isfinite(self.beta)):
            raise ConfigError("beta", "must be a finite non-negative number")
        if not self.uav_pos.z > self.gu_pos.z:
            raise ConfigError("uav_pos", "UAV must fly above the ground user")
        if any(z < 0 for z in self.fading_realization):
            raise ConfigError("realization", "fading gains must be non-negative")
        if self.symbol_rate is not None and not self.symbol_rate > 0:
            raise ConfigError("symbol_rate", "must be positive")
        for name in ("blocklength_tol", "beta_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(name, "must be positive")

    @property
    def p0(self) -> float:
        """Power budget in watts."""
        return dbm_to_watt(self.p0_dbm)

    @property
    def peak_power(self) -> float | None:
        return None if self.peak_power_dbm is None else dbm_to_watt(self.peak_power_dbm)

    def replace(self, **changes) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)


_SCENARIO_FLOATS = ("p0_dbm", "noise_power_dbm", "nu1", "nu2", "beta")
_PATH_LOSS_KEYS = tuple(f.name for f in dataclasses.fields(PathLossParams))
_SECTIONS = {
    "scenario": ("ap_pos", "uav_pos", "gu_pos", "frame_length", "scheme", "regime",
                 "symbol_rate") + _SCENARIO_FLOATS,
    "path_loss": _PATH_LOSS_KEYS,
    "fading": ("ap_uav", "ap_gu", "uav_gu", "unit", "realization"),
    "solver": ("integer_blocklengths", "peak_power_dbm", "blocklength_tol", "beta_tol"),
}


def _float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}") from None


def _triple(key, text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(key, f"expected three comma-separated numbers, got {text!r}")
    return tuple(_float(key, p) for p in parts)


def _bool(key, text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {text!r}")


def parse_fading_spec(key: str, text: str) -> FadingSpec:
    parts = text.split()
    if not parts:
        raise ConfigError(key, "empty fading specification")
    kind = parts[0].lower()
    if kind == "rayleigh" and len(parts) == 1:
        return FadingSpec("rayleigh")
    if kind == "rician" and len(parts) == 2:
        if parts[1].lower() == "los":
            return FadingSpec("rician", None)
        s = _float(key, parts[1])
        if s < 0:
            raise ConfigError(key, "non-centrality must be non-negative")
        return FadingSpec("rician", s)
    raise ConfigError(key, f"expected 'rayleigh', 'rician <s>' or 'rician los', got {text!r}")


def parse_config(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, empty_lines_in_values=False)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc).splitlines()[0]) from None

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(section, "unknown section")
        for key in parser[section]:
            if key not in _SECTIONS[section]:
                raise ConfigError(key, f"unknown key in [{section}]")

    kw: dict = {}
    sc = parser["scenario"] if parser.has_section("scenario") else {}
    for key in ("ap_pos", "uav_pos", "gu_pos"):
        if key in sc:
            kw[key] = Position3D(*_triple(key, sc[key]))
    for key in _SCENARIO_FLOATS:
        if key in sc:
            kw[key] = _float(key, sc[key])
    if "frame_length" in sc:
        m = _float("frame_length", sc["frame_length"])
        if m != int(m):
            raise ConfigError("frame_length", "must be an integer number of symbols")
        kw["frame_length"] = int(m)
    for key in ("scheme", "regime"):
        if key in sc:
            kw[key] = sc[key].strip().lower()
    if sc.get("symbol_rate", "").strip():
        kw["symbol_rate"] = _float("symbol_rate", sc["symbol_rate"])

    if parser.has_section("path_loss"):
        pl = {k: _float(k, v) for k, v in parser["path_loss"].items()}
        try:
            kw["path_loss"] = PathLossParams(**pl)
        except ValueError as exc:
            raise ConfigError("path_loss", str(exc)) from None

    if parser.has_section("fading"):
        fd = parser["fading"]
        defaults = _default_fading()
        kw["fading"] = tuple(
            parse_fading_spec(k, fd[k]) if k in fd else d
            for k, d in zip(("ap_uav", "ap_gu", "uav_gu"), defaults))
        if "unit" in fd:
            kw["unit_fading"] = _bool("unit", fd["unit"])
        if "realization" in fd:
            kw["fading_realization"] = _triple("realization", fd["realization"])

    if parser.has_section("solver"):
        so = parser["solver"]
        if "integer_blocklengths" in so:
            kw["integer_blocklengths"] = _bool("integer_blocklengths", so["integer_blocklengths"])
        if so.get("peak_power_dbm", "").strip():
            kw["peak_power_dbm"] = _float("peak_power_dbm", so["peak_power_dbm"])
        for key in ("blocklength_tol", "beta_tol"):
            if key in so:
                kw[key] = _float(key, so[key])

    kw["stated_keys"] = frozenset(k for sec in parser.sections() for k in parser[sec])
    try:
        cfg = ScenarioConfig(**kw)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from None
    check_fbl_targets(cfg)
    return cfg


def check_fbl_targets(cfg: ScenarioConfig, regimes=None) -> None:
    """File-based configs running an FBL regime must state both error targets."""
    regimes = (cfg.regime,) if regimes is None else regimes
    if cfg.stated_keys is None or "fbl" not in regimes:
        return
    for key in ("nu1", "nu2"):
        if key not in cfg.stated_keys:
            raise ConfigError(key, "required when regime = fbl")


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
