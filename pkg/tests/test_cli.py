"""CLI surface: config parsing, presets, exit codes, CSV echo round trips."""

import pytest

from spinprobe import cli
from spinprobe.cli import (ConfigError, builtin_presets, config_to_toml,
                           parse_config_text, read_config_echo, run)
from spinprobe.qfi import Estimator, QfiRoute

GOOD_CONFIG = """
[params]
N = 4
eps0 = 4.0
eps = 2.0
delta = 1.0
omega = 1.0
chi = 0.1
g = 0.5
T = 1.0
boundary = "periodic"

[trajectory]
mode = "PulseCorrelated"
t_min = 0.0
t_max = 2.0
t_points = 11

[output]
path = "out.csv"
"""


class TestParsing:
    def test_good_config(self):
        cfg = parse_config_text(GOOD_CONFIG)
        assert cfg.command == "trajectory"
        assert cfg.params.n == 4
        assert cfg.output_path == "out.csv"

    def test_missing_params_section(self):
        with pytest.raises(ConfigError):
            parse_config_text("[trajectory]\nmode = \"PulseCorrelated\"\n")

    def test_requires_exactly_one_payload(self):
        text = GOOD_CONFIG + "\n[compare]\nestimator = \"Temperature\"\nx_value = 1.0\n"
        with pytest.raises(ConfigError):
            parse_config_text(text)

    def test_rejects_unknown_keys(self):
        with pytest.raises(ConfigError):
            parse_config_text(GOOD_CONFIG.replace("t_points = 11",
                                                  "t_pionts = 11"))

    def test_rejects_empty_modes(self):
        text = GOOD_CONFIG.replace(
            '[trajectory]\nmode = "PulseCorrelated"\nt_min = 0.0\nt_max = 2.0\nt_points = 11',
            '[qfi-time]\nestimator = "Temperature"\nmodes = []')
        with pytest.raises(ConfigError):
            parse_config_text(text)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ConfigError):
            parse_config_text(GOOD_CONFIG.replace("PulseCorrelated", "Sideways"))

    def test_rejects_bad_temperature(self):
        with pytest.raises(ConfigError):
            parse_config_text(GOOD_CONFIG.replace("T = 1.0", "T = -1.0"))

    def test_toml_round_trip(self):
        cfg = parse_config_text(GOOD_CONFIG)
        assert parse_config_text(config_to_toml(cfg)) == cfg

    def test_per_spin_lists_round_trip(self):
        text = GOOD_CONFIG.replace("omega = 1.0", "omega = [1.0, 1.5, 0.5, 2.0]")
        text = text.replace("chi = 0.1", "chi = [0.1, 0.2, 0.0, 0.3]")
        cfg = parse_config_text(text)
        assert cfg.params.omega == (1.0, 1.5, 0.5, 2.0)
        assert parse_config_text(config_to_toml(cfg)) == cfg


class TestPresets:
    def test_exactly_seven(self):
        presets = builtin_presets()
        assert len(presets) == 7
        assert sorted(presets) == ["fig1", "fig2", "fig3", "fig4", "fig5",
                                   "fig6", "oracle-check"]

    def test_fig3_is_fig1_params_at_strong_coupling(self):
        presets = builtin_presets()
        assert presets["fig3"].params == \
            type(presets["fig3"].params)(**{**presets["fig2"].params.__dict__,
                                            "g": 1.0})

    def test_fig4_adds_interactions_in_small_bath(self):
        p = builtin_presets()["fig4"].params
        assert p.n == 10 and p.chi == 0.1

    def test_all_presets_serialize_and_reparse(self):
        for name, cfg in builtin_presets().items():
            assert parse_config_text(config_to_toml(cfg)) == cfg, name


class TestRun:
    def test_trajectory_csv(self, tmp_path):
        cfg = parse_config_text(GOOD_CONFIG)
        path = run(cfg, output_path=str(tmp_path / "traj.csv"))
        lines = open(path).read().splitlines()
        body = [ln for ln in lines if not ln.startswith("#")]
        assert body[0] == "t,nx,ny,nz,Gamma,phase,mode"
        assert len(body) == 1 + 11

    def test_config_echo_round_trip(self, tmp_path):
        cfg = parse_config_text(GOOD_CONFIG)
        path = run(cfg, output_path=str(tmp_path / "traj.csv"))
        recovered = read_config_echo(path)
        assert recovered.params == cfg.params
        assert recovered.job == cfg.job
        assert recovered.command == cfg.command

    def test_rerun_is_bit_identical(self, tmp_path):
        text = GOOD_CONFIG.replace(
            '[trajectory]\nmode = "PulseCorrelated"\nt_min = 0.0\nt_max = 2.0\nt_points = 11',
            '[qfi-time]\nestimator = "Temperature"\n'
            'modes = ["PulseCorrelated", "ProjectiveUncorrelated"]\n'
            't_min = 0.0\nt_max = 2.0\nt_points = 21\nvalues = [0.5, 1.0]')
        cfg = parse_config_text(text)
        p1 = run(cfg, output_path=str(tmp_path / "a.csv"))
        p2 = run(cfg, output_path=str(tmp_path / "b.csv"))
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_opt_sweep_csv(self, tmp_path):
        text = GOOD_CONFIG.replace(
            '[trajectory]\nmode = "PulseCorrelated"\nt_min = 0.0\nt_max = 2.0\nt_points = 11',
            '[opt-sweep]\nvariable = "Temperature"\nvalues = [0.5, 1.0]\n'
            'modes = ["PulseCorrelated"]\nt_min = 0.0\nt_max = 4.0\ngrid_points = 101')
        path = run(parse_config_text(text), output_path=str(tmp_path / "s.csv"))
        body = [ln for ln in open(path).read().splitlines()
                if not ln.startswith("#")]
        assert body[0] == "variable,x_value,mode,t_star,F_star,boundary_flag"
        assert len(body) == 1 + 2

    def test_compare_csv(self, tmp_path):
        text = GOOD_CONFIG.replace(
            '[trajectory]\nmode = "PulseCorrelated"\nt_min = 0.0\nt_max = 2.0\nt_points = 11',
            '[compare]\nestimator = "Temperature"\nx_value = 1.0\n'
            't_min = 0.0\nt_max = 3.0\ngrid_points = 101')
        path = run(parse_config_text(text), output_path=str(tmp_path / "c.csv"))
        text_out = open(path).read()
        assert text_out.count("ratio corr_over_uncorr_pulse") == 1
        body = [ln for ln in text_out.splitlines() if not ln.startswith("#")]
        assert len(body) == 1 + 4

    def test_oracle_check_csv(self, tmp_path):
        text = GOOD_CONFIG.replace(
            '[trajectory]\nmode = "PulseCorrelated"\nt_min = 0.0\nt_max = 2.0\nt_points = 11',
            '[oracle-check]\nN = [2, 3]\nt_max = 5.0\nt_points = 21\nqfi_points = 1')
        path = run(parse_config_text(text), output_path=str(tmp_path / "o.csv"))
        body = [ln for ln in open(path).read().splitlines()
                if not ln.startswith("#")]
        assert body[0] == "N,mode,max_bloch_dev,max_qfi_rel_dev,pass"
        assert len(body) == 1 + 2 * 4
        assert all(row.endswith("true") for row in body[1:])


class TestMainExitCodes:
    def test_success(self, tmp_path):
        cfg_file = tmp_path / "cfg.toml"
        cfg_file.write_text(GOOD_CONFIG)
        out = tmp_path / "out.csv"
        assert cli.main(["run", str(cfg_file), "--output", str(out)]) == 0
        assert out.exists()

    def test_missing_file_is_config_error(self, tmp_path):
        assert cli.main(["run", str(tmp_path / "nope.toml")]) == 2

    def test_malformed_toml_is_config_error(self, tmp_path):
        cfg_file = tmp_path / "bad.toml"
        cfg_file.write_text("[params\nN = 4")
        assert cli.main(["run", str(cfg_file)]) == 2

    def test_empty_modes_is_config_error(self, tmp_path):
        cfg_file = tmp_path / "bad.toml"
        cfg_file.write_text(GOOD_CONFIG.replace(
            '[trajectory]\nmode = "PulseCorrelated"\nt_min = 0.0\nt_max = 2.0\nt_points = 11',
            '[qfi-time]\nestimator = "Temperature"\nmodes = []'))
        assert cli.main(["run", str(cfg_file)]) == 2

    def test_numeric_domain_error_is_exit_3(self, tmp_path):
        # closed-form route at t = 0 on a pure projective state violates the
        # route's domain (e^{2 Gamma} = f)
        cfg_file = tmp_path / "domain.toml"
        cfg_file.write_text(GOOD_CONFIG.replace(
            '[trajectory]\nmode = "PulseCorrelated"\nt_min = 0.0\nt_max = 2.0\nt_points = 11',
            '[qfi-time]\nestimator = "Temperature"\n'
            'modes = ["ProjectiveUncorrelated"]\n'
            't_min = 0.0\nt_max = 1.0\nt_points = 5\nroute = "closed_form"'))
        assert cli.main(["run", str(cfg_file),
                         "--output", str(tmp_path / "x.csv")]) == 3

    def test_presets_listing(self, capsys):
        assert cli.main(["presets"]) == 0
        out = capsys.readouterr().out.split()
        assert len(out) == 7

    def test_unknown_preset(self):
        assert cli.main(["preset", "fig99"]) == 2
        assert cli.main(["dump-preset", "fig99"]) == 2

    def test_oracle_check_rejects_oversized_bath(self, tmp_path):
        cfg_file = tmp_path / "big.toml"
        cfg_file.write_text(GOOD_CONFIG.replace(
            '[trajectory]\nmode = "PulseCorrelated"\nt_min = 0.0\nt_max = 2.0\nt_points = 11',
            '[oracle-check]\nN = [2, 12]\nt_points = 5'))
        assert cli.main(["run", str(cfg_file),
                         "--output", str(tmp_path / "x.csv")]) == 2

    def test_dump_preset_parses(self, capsys):
        assert cli.main(["dump-preset", "fig5"]) == 0
        dumped = capsys.readouterr().out
        cfg = parse_config_text(dumped)
        assert cfg.job.estimator is Estimator.COUPLING
        assert cfg.job.route is QfiRoute.BLOCH

    def test_module_entry_point(self):
        import subprocess
        import sys
        proc = subprocess.run([sys.executable, "-m", "spinprobe", "presets"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert len(proc.stdout.split()) == 7
