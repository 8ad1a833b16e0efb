import dataclasses

import numpy as np
import pytest

from irsopt.config import ConfigError, SystemConfig


def test_defaults_are_valid():
    cfg = SystemConfig()
    cfg.validate()
    assert cfg.mt == 16 and cfg.mr == 4 and cfg.mi == 100 and cfg.ms == 4
    assert cfg.power_db == 10.0 and cfg.noise_power == 1.0
    assert cfg.rho == 1.0 and cfg.tau == 0.001 and cfg.k_max == 100


def test_linear_power_and_rician_factor():
    cfg = SystemConfig(power_db=10.0, rician_factor_db=10.0)
    assert np.isclose(cfg.power, 10.0)
    assert np.isclose(cfg.rician_factor, 10.0)
    assert np.isclose(cfg.snr_per_stream, 10.0 / 4.0)
    pure = SystemConfig(rician_factor_db=float("-inf"))
    assert pure.rician_factor == 0.0


@pytest.mark.parametrize("bad", [
    dict(mt=0), dict(mr=-1), dict(mi=-2), dict(ms=0),
    dict(ms=5),                       # exceeds min(mt, mr) at defaults
    dict(noise_power=0.0), dict(rho=0.0), dict(tau=0.0),
    dict(k_max=0), dict(seed=-1),
    dict(pathloss_exponent=-0.5), dict(ref_distance=0.0),
    dict(link_distance=0.0), dict(element_spacing=0.0),
    dict(csi_delta=-0.1), dict(convergence_tol=0.0),
])
def test_validate_rejects_bad_fields(bad):
    with pytest.raises(ConfigError):
        SystemConfig(**bad).validate()


def test_ms_bound_follows_smaller_array():
    SystemConfig(mt=2, mr=8, ms=2).validate()
    with pytest.raises(ConfigError):
        SystemConfig(mt=2, mr=8, ms=3).validate()


def test_dict_round_trip():
    cfg = SystemConfig(mt=8, mr=2, mi=16, ms=2, power_db=3.0, seed=42,
                       csi_delta=0.4, early_stop=True)
    again = SystemConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_from_dict_rejects_unknown_key():
    with pytest.raises(ConfigError):
        SystemConfig.from_dict({"mt": 4, "bogus": 1})


def test_fixed_angles_normalized_and_validated():
    cfg = SystemConfig(fixed_angles={"h1": [0.1, 0.2]})
    assert cfg.fixed_angles == {"h1": (0.1, 0.2)}
    cfg.validate()
    with pytest.raises(ConfigError):
        SystemConfig(fixed_angles={"nope": (0.0, 0.0)}).validate()
    round_trip = SystemConfig.from_dict(cfg.to_dict())
    assert round_trip == cfg


def test_config_is_frozen():
    cfg = SystemConfig()
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.mt = 8
