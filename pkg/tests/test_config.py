import numpy as np
import pytest

from stapsim.config import ConfigError, load_experiment, load_scenario


SCENARIO_TEXT = """
# side-looking array
carrier_frequency = 450e6
prf = 300
platform_velocity = 50
platform_height = 9000
num_elements = 8
num_pulses = 8
cnr_db = 40
jnr_db = 30
jammer_azimuths = -45, 60
noise_power = 1.0
target_azimuth = 0
target_normalized_doppler = 0.25
"""

EXPERIMENT_TEXT = """
[experiment]
num_trials = 4
snapshot_count = 32
base_seed = 1234567890123
pfa = 1e-10
snr_db = 0
workers = 2
pd_grid_db = -6:6:13

[scenario]
num_elements = 4
num_pulses = 4
jammer_azimuths = -45 60

[algorithm abfa-rls]
rank = 4
num_banks = 4
lambda = 0.9998
delta = 0.01

[algorithm smi]
loading = 0.5
refit_interval = 8
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestScenarioFiles:
    def test_flat_file(self, tmp_path):
        sc = load_scenario(write(tmp_path, "s.cfg", SCENARIO_TEXT))
        assert sc.num_elements == 8
        assert sc.jammer_azimuths == (-45.0, 60.0)
        assert sc.dim == 64

    def test_sectioned_file(self, tmp_path):
        sc = load_scenario(write(tmp_path, "s.cfg", "[scenario]\n" + SCENARIO_TEXT))
        assert sc.cnr_db == 40.0

    def test_disabled_clutter_flag(self, tmp_path):
        sc = load_scenario(write(tmp_path, "s.cfg", "cnr_db = -inf\n"))
        assert np.isneginf(sc.cnr_db)

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_scenario(write(tmp_path, "s.cfg", "bandwidth = 1e6\n"))

    def test_bad_value_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_scenario(write(tmp_path, "s.cfg", "prf = often\n"))

    def test_invalid_physics_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_scenario(write(tmp_path, "s.cfg", "jammer_azimuths = 95\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_scenario(tmp_path / "nope.cfg")

    def test_extra_section_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_scenario(write(tmp_path, "s.cfg", "[scenario]\nprf = 300\n[other]\nx = 1\n"))


class TestExperimentFiles:
    def test_full_parse(self, tmp_path):
        cfg = load_experiment(write(tmp_path, "e.cfg", EXPERIMENT_TEXT))
        assert cfg.num_trials == 4
        assert cfg.snapshot_count == 32
        assert cfg.base_seed == 1234567890123
        assert cfg.workers == 2
        assert cfg.scenario.dim == 16
        np.testing.assert_allclose(cfg.pd_grid_db, np.linspace(-6, 6, 13))
        assert [spec.name for spec in cfg.algorithms] == ["abfa-rls", "smi"]
        assert cfg.algorithms[0].params["lambda"] == 0.9998
        assert cfg.algorithms[1].params["refit_interval"] == 8

    def test_defaults_without_sections(self, tmp_path):
        cfg = load_experiment(write(tmp_path, "e.cfg", "[experiment]\nnum_trials = 2\n"))
        assert cfg.scenario.dim == 64
        assert cfg.algorithms == []
        assert cfg.pfa == 1e-10

    def test_unknown_algorithm(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(write(tmp_path, "e.cfg", "[algorithm pca]\nrank = 4\n"))

    def test_unknown_parameter(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(
                write(tmp_path, "e.cfg", "[algorithm abfa-sg]\nmu = 0.01\nmomentum = 2\n")
            )

    def test_unknown_section(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(write(tmp_path, "e.cfg", "[plotting]\nstyle = dark\n"))

    def test_unknown_experiment_key(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(write(tmp_path, "e.cfg", "[experiment]\nepochs = 7\n"))

    def test_bad_grid(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(write(tmp_path, "e.cfg", "[experiment]\npd_grid_db = 1:2\n"))

    def test_invalid_trial_count(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(write(tmp_path, "e.cfg", "[experiment]\nnum_trials = 0\n"))
