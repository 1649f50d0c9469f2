import textwrap

import pytest

from uavfbl.channel import Position3D
from uavfbl.config import (ConfigError, ScenarioConfig, check_fbl_targets, load_config,
                           parse_config, parse_fading_spec)
from uavfbl.montecarlo import FadingSpec


def ini(text):
    return textwrap.dedent(text).strip() + "\n"


def test_defaults_match_reference_scenario():
    cfg = ScenarioConfig()
    assert cfg.ap_pos == Position3D(0, 0, 20)
    assert cfg.uav_pos == Position3D(100, 0, 100)
    assert cfg.gu_pos == Position3D(700, 0, 0)
    assert cfg.p0 == 1.0
    assert cfg.frame_length == 400
    assert (cfg.nu1, cfg.nu2) == (1e-4, 1e-3)
    pl = cfg.path_loss
    assert (pl.d0, pl.alpha1, pl.alpha2) == (100, 2, 3.5)
    assert (pl.a1, pl.b1, pl.a2, pl.b2) == (-1.5, 2, 9.61, 0.16)
    assert cfg.fading == (FadingSpec("rician", 1.0), FadingSpec("rayleigh"), FadingSpec("rician", None))


def test_empty_file_is_defaults():
    assert parse_config("") == ScenarioConfig()


def test_full_file_roundtrip():
    cfg = parse_config(ini("""
        [scenario]
        gu_pos = 400, 0, 0
        p0_dbm = 27
        frame_length = 600
        nu1 = 1e-5
        nu2 = 1e-3
        beta = 0.8
        scheme = NOMA
        regime = fbl
        symbol_rate = 1e6

        [path_loss]
        alpha2 = 3.2

        [fading]
        ap_gu = rician 0.5
        unit = yes
        realization = 1, 0.5, 2

        [solver]
        integer_blocklengths = true
        peak_power_dbm = 33
    """))
    assert cfg.gu_pos == Position3D(400, 0, 0)
    assert cfg.p0 == pytest.approx(10 ** -0.3)
    assert (cfg.frame_length, cfg.beta, cfg.scheme, cfg.regime) == (600, 0.8, "noma", "fbl")
    assert cfg.path_loss.alpha2 == 3.2 and cfg.path_loss.alpha1 == 2
    assert cfg.fading[1] == FadingSpec("rician", 0.5)
    assert cfg.unit_fading and cfg.fading_realization == (1, 0.5, 2)
    assert cfg.integer_blocklengths
    assert cfg.peak_power == pytest.approx(10 ** 0.3)
    assert cfg.symbol_rate == 1e6


@pytest.mark.parametrize("text, field", [
    ("[scenario]\nnu3 = 1\n", "nu3"),
    ("[extra]\na = 1\n", "extra"),
    ("[scenario]\nbeta = lots\n", "beta"),
    ("[scenario]\nbeta = -1\n", "beta"),
    ("[scenario]\nnu1 = 1.5\n", "nu1"),
    ("[scenario]\nframe_length = 10.5\n", "frame_length"),
    ("[scenario]\ngu_pos = 1, 2\n", "gu_pos"),
    ("[scenario]\nscheme = tdma\n", "scheme"),
    ("[fading]\nap_gu = nakagami 2\n", "ap_gu"),
    ("[fading]\nunit = maybe\n", "unit"),
    ("[path_loss]\nd0 = 0\n", "path_loss"),
    ("[scenario]\nuav_pos = 0, 0, -5\n", "uav_pos"),
])
def test_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field
    assert field in str(info.value)


def test_fbl_file_must_state_targets():
    with pytest.raises(ConfigError) as info:
        parse_config("[scenario]\nregime = fbl\nnu1 = 1e-4\n")
    assert info.value.field == "nu2"
    cfg = parse_config("[scenario]\nregime = ibl\n")
    with pytest.raises(ConfigError):
        check_fbl_targets(cfg, ("ibl", "fbl"))
    check_fbl_targets(ScenarioConfig(regime="fbl"))  # built in code: defaults apply


def test_fading_spec_parsing():
    assert parse_fading_spec("k", "rayleigh") == FadingSpec("rayleigh")
    assert parse_fading_spec("k", "Rician 2") == FadingSpec("rician", 2.0)
    assert parse_fading_spec("k", "rician los") == FadingSpec("rician", None)
    for bad in ("", "rician", "rician -1", "rayleigh 1"):
        with pytest.raises(ConfigError):
            parse_fading_spec("k", bad)


def test_load_config(tmp_path):
    p = tmp_path / "s.ini"
    p.write_text("[scenario]\nbeta = 0.5\n")
    assert load_config(p).beta == 0.5
    with pytest.raises(ConfigError) as info:
        load_config(tmp_path / "missing.ini")
    assert info.value.field == "config"


def test_replace_keeps_stated_keys():
    cfg = parse_config("[scenario]\nbeta = 0.5\n")
    assert "beta" in cfg.replace(regime="fbl").stated_keys
