"""Config parsing, command execution, CSV schemas, exit codes."""

import json
import os

import numpy as np
import pytest

from anisomhd.errors import ConfigError
from anisomhd.cli import main, parse_config

MINIMAL = """
grid.n = 32
params.eps = 0.01
params.zeta = 0.01
params.m = 4
time.dt = 1e-3
time.t_end = 1.0
"""

TINY_RUN = """
grid.n = 8
params.eps = 0.01
params.zeta = 0.01
params.m = 4
time.dt = 0.02
time.t_end = 0.1
init.amplitude = 1e-3
init.modes = 2
output.diagnostics_every = 2
"""


class TestParseConfig:
    def test_minimal_valid_with_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg["grid.n"] == 32
        assert cfg["params.eps"] == 0.01
        assert cfg["init.seed"] == 0              # default applied
        assert cfg["output.projection_every"] == 1

    def test_zeta_out_of_range(self):
        with pytest.raises(ConfigError, match=r"zeta must lie in \(0, 0.05\)"):
            parse_config(MINIMAL + "params.zeta = 0.1\n")

    def test_m_too_small(self):
        with pytest.raises(ConfigError, match="m must be >= 4"):
            parse_config(MINIMAL + "params.m = 3\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key 'grid.dx'"):
            parse_config("grid.dx = 0.1\n")

    def test_comments_and_blanks(self):
        cfg = parse_config("# comment\n\ngrid.n = 16  # trailing\n")
        assert cfg["grid.n"] == 16

    def test_bad_value_type(self):
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_config("grid.n = big\n")


def write_cfg(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return str(p)


class TestCommands:
    def test_simulate_schema_and_determinism(self, tmp_path):
        cfg = write_cfg(tmp_path, TINY_RUN)
        out1 = tmp_path / "o1"
        out2 = tmp_path / "o2"
        assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        d1 = (out1 / "diagnostics.csv").read_bytes()
        d2 = (out2 / "diagnostics.csv").read_bytes()
        assert d1 == d2
        header = d1.decode().splitlines()[0]
        assert header == ("t,E_m,D_m,E_tan,D_tan,E_tilde,E_neg,"
                          "div_b_max,mass_mean,min_density")
        decay = (out1 / "decay.csv").read_text().splitlines()
        assert decay[0] == "t,E_tilde,D_tan,violation_flag"
        man = json.loads((out1 / "manifest.json").read_text())
        assert man["completed"] is True
        assert man["seed"] == 0

    def test_seed_override_changes_output(self, tmp_path):
        cfg = write_cfg(tmp_path, TINY_RUN)
        outa = tmp_path / "a"
        outb = tmp_path / "b"
        assert main(["simulate", "--config", cfg, "--out", str(outa)]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(outb),
                     "--seed", "5"]) == 0
        assert (outa / "diagnostics.csv").read_bytes() \
            != (outb / "diagnostics.csv").read_bytes()

    def test_invalid_config_exit_1(self, tmp_path):
        cfg = write_cfg(tmp_path, MINIMAL + "params.zeta = 0.2\n")
        assert main(["simulate", "--config", cfg,
                     "--out", str(tmp_path)]) == 1

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.cfg"),
                     "--out", str(tmp_path)]) == 1

    def test_check_ineq_schema(self, tmp_path):
        cfg = write_cfg(tmp_path, TINY_RUN + "ineq.trials = 5\nineq.n = 16\n")
        out = tmp_path / "ineq"
        assert main(["check-ineq", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "ineq.csv").read_text().splitlines()
        assert lines[0] == ("variant,trials,max_ratio,median_ratio,"
                            "violations,structural_failures")
        names = [ln.split(",")[0] for ln in lines[1:]]
        assert names == ["sobolev1", "sobolev2", "sobolev3", "sobolev4",
                         "hls", "interpolation"]

    def test_check_cancel_schema(self, tmp_path):
        cfg = write_cfg(tmp_path, TINY_RUN + "cancel.states = 2\n"
                        "cancel.n = 16\n")
        out = tmp_path / "cancel"
        assert main(["check-cancel", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "cancel.csv").read_text().splitlines()
        assert lines[0] == ("state,alpha1,alpha2,residual_i,residual_ii,"
                            "residual_iii")
        assert len(lines) == 1 + 2 * 4   # two states, four multi-indices

    def test_sweep_partial_exit_2(self, tmp_path):
        # dt far beyond the CFL bound of a large-amplitude member aborts
        # the run at start; the sweep must be marked partial
        text = TINY_RUN.replace("time.dt = 0.02", "time.dt = 40.0") \
                       .replace("init.amplitude = 1e-3",
                                "init.amplitude = 0.5")
        cfg = write_cfg(tmp_path, text + "sweep.eps_list = 1e-1,1e-2\n"
                        "sweep.T = 40.0\n")
        out = tmp_path / "sweep"
        assert main(["sweep-eps", "--config", cfg, "--out", str(out)]) == 2
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "eps,sup_Ebar,T_star,completed"
        assert all(ln.rsplit(",", 1)[1] == "0" for ln in lines[1:])

    def test_sweep_ok_exit_0(self, tmp_path):
        cfg = write_cfg(tmp_path, TINY_RUN + "sweep.eps_list = 1e-1,1e-2,"
                        "1e-3\nsweep.T = 0.08\n")
        out = tmp_path / "sweep0"
        assert main(["sweep-eps", "--config", cfg, "--out", str(out)]) == 0
        man = json.loads((out / "manifest.json").read_text())
        assert man["partial"] is False

    def test_report_roundtrip(self, tmp_path):
        cfg = write_cfg(tmp_path, TINY_RUN)
        out = tmp_path / "rep"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        assert main(["report", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "report.csv").read_text().splitlines()
        assert lines[0] == "quantity,value"
        names = [ln.split(",")[0] for ln in lines[1:]]
        assert "sup_E_m" in names and "int_D_m" in names

    def test_report_without_simulate_exit_1(self, tmp_path):
        cfg = write_cfg(tmp_path, TINY_RUN)
        out = tmp_path / "rep2"
        os.makedirs(out)
        assert main(["report", "--config", cfg, "--out", str(out)]) == 1
