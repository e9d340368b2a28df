"""Command-line surface: config parsing, run management, CSV emission.

Configs are plain ``section.key = value`` lines; ``#`` starts a comment.
Unknown keys are rejected.  Every run writes CSV artifacts with fixed
headers plus a ``manifest.json`` echoing the configuration, the seed,
package versions and wall time.  Numeric CSV fields use ``repr`` so they
round-trip exactly; re-running a command with the same config and seed
reproduces the CSVs byte for byte.

Exit codes: 0 success, 1 validation error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ConfigError
from .experiments import (BootstrapReport, bootstrap_monitor, paper_exponent,
                          run_decay, run_epsilon_sweep)
from .functionals import DIAGNOSTICS_COLUMNS
from .inequalities import (check_cancellations, check_hls,
                           check_interpolation, check_sobolev)
from .integrate import RunConfig, random_state
from .models import Params, PerturbState
from .spectral import Grid, set_num_threads
from .integrate import project_div_free_b

SWEEP_COLUMNS = ("eps", "sup_Ebar", "T_star", "completed")
DECAY_COLUMNS = ("t", "E_tilde", "D_tan", "violation_flag")
INEQ_COLUMNS = ("variant", "trials", "max_ratio", "median_ratio",
                "violations", "structural_failures")
CANCEL_COLUMNS = ("state", "alpha1", "alpha2", "residual_i", "residual_ii",
                  "residual_iii")
REPORT_COLUMNS = ("quantity", "value")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# configuration schema
# ---------------------------------------------------------------------------

_SCHEMA: dict[str, tuple] = {
    # key: (type, default)
    "grid.n": (int, 32),
    "grid.L": (float, 2.0 * np.pi),
    "params.eps": (float, 0.01),
    "params.zeta": (float, 0.01),
    "params.m": (int, 4),
    "params.kappa": (float, 0.05),
    "params.kappa1": (float, 0.05),
    "time.dt": (float, 1e-3),
    "time.t_end": (float, 1.0),
    "init.amplitude": (float, 1e-3),
    "init.modes": (int, 4),
    "init.seed": (int, 0),
    "output.diagnostics_every": (int, 1),
    "output.projection_every": (int, 1),
    "sweep.eps_list": (str, "1e-1,3.162e-2,1e-2,3.162e-3,1e-3"),
    "sweep.T": (float, 2.0),
    "ineq.trials": (int, 100),
    "ineq.seed": (int, 0),
    "ineq.n": (int, 16),
    "ineq.s": (float, 0.75),
    "ineq.alpha": (float, 0.5),
    "cancel.states": (int, 20),
    "cancel.n": (int, 32),
    "cancel.seed": (int, 0),
    "cancel.m_vertical": (int, 2),
}


@dataclass
class Config:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.values[key]

    def grid(self) -> Grid:
        n = self["grid.n"]
        return Grid(n, n, n, self["grid.L"])

    def params(self, grid: Grid | None = None) -> Params:
        return Params(grid=grid or self.grid(),
                      eps=self["params.eps"], zeta=self["params.zeta"],
                      m=self["params.m"], kappa=self["params.kappa"],
                      kappa1=self["params.kappa1"])

    def run_config(self) -> RunConfig:
        return RunConfig(params=self.params(), dt=self["time.dt"],
                         t_end=self["time.t_end"], seed=self["init.seed"],
                         init_amplitude=self["init.amplitude"],
                         init_modes=self["init.modes"],
                         projection_every=self["output.projection_every"],
                         diagnostics_every=self["output.diagnostics_every"])

    def eps_list(self) -> list[float]:
        parts = [p for p in self["sweep.eps_list"].split(",") if p.strip()]
        try:
            return [float(p) for p in parts]
        except ValueError as exc:
            raise ConfigError(f"sweep.eps_list: {exc}") from None


def parse_config(text: str) -> Config:
    """Parse and validate key=value configuration text (strict keys)."""
    values = {k: d for k, (_, d) in _SCHEMA.items()}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got "
                              f"{raw!r}")
        key, _, val = (p.strip() for p in line.partition("="))
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r} (line {lineno})")
        typ, _ = _SCHEMA[key]
        try:
            values[key] = typ(val)
        except ValueError:
            raise ConfigError(
                f"key {key!r}: cannot parse {val!r} as {typ.__name__}") from None

    # invariants, named after the offending key
    if not 0.0 < values["params.zeta"] < 0.05:
        raise ConfigError("params.zeta: zeta must lie in (0, 0.05)")
    if values["params.m"] < 4:
        raise ConfigError("params.m: m must be >= 4")
    if values["params.eps"] < 0:
        raise ConfigError("params.eps: eps must be >= 0")
    if values["grid.n"] < 8 or values["grid.n"] % 2:
        raise ConfigError("grid.n: grid size must be even and >= 8")
    if values["time.dt"] <= 0:
        raise ConfigError("time.dt: dt must be positive")
    if values["time.t_end"] <= 0:
        raise ConfigError("time.t_end: t_end must be positive")
    if not values["params.kappa"] > 0:
        raise ConfigError("params.kappa: kappa must be positive")
    return Config(values)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _manifest(outdir: str, cfg: Config, seed: int, wall: float,
              extra: dict | None = None) -> None:
    payload = {
        "config": {k: (repr(v) if isinstance(v, float) else v)
                   for k, v in cfg.values.items()},
        "seed": seed,
        "versions": {"anisomhd": __version__, "numpy": np.__version__,
                     "python": sys.version.split()[0]},
        "wall_time_s": wall,
    }
    if extra:
        payload.update(extra)
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_simulate(cfg: Config, outdir: str) -> int:
    t0 = time.time()
    series = run_decay(cfg.run_config()).series
    rows = [r.csv_values() for r in series.rows]
    write_csv(os.path.join(outdir, "diagnostics.csv"), DIAGNOSTICS_COLUMNS,
              rows)
    report = run_decay_rows(cfg, series)
    write_csv(os.path.join(outdir, "decay.csv"), DECAY_COLUMNS, report)
    _manifest(outdir, cfg, cfg["init.seed"], time.time() - t0,
              {"completed": series.completed,
               "abort_reason": series.abort_reason})
    return 0 if series.completed else 2


def run_decay_rows(cfg: Config, series) -> list:
    """Decay-CSV rows (t, E_tilde, D_tan, violation_flag) from a series."""
    from .experiments import MONOTONE_RTOL
    rows = []
    prev = None
    for t, r in zip(series.times, series.rows):
        flag = 0
        if prev is not None and r.E_tilde > prev * (1.0 + MONOTONE_RTOL):
            flag = 1
        rows.append((t, r.E_tilde, r.D_tan, flag))
        prev = r.E_tilde
    return rows


def cmd_sweep(cfg: Config, outdir: str) -> int:
    t0 = time.time()
    report = run_epsilon_sweep(cfg.run_config(), cfg.eps_list(),
                               cfg["sweep.T"])
    rows = [(e, s, ts, ok) for e, s, ts, ok in
            zip(report.eps_values, report.sup_Ebar, report.T_star_values,
                report.completed)]
    write_csv(os.path.join(outdir, "sweep.csv"), SWEEP_COLUMNS, rows)
    _manifest(outdir, cfg, cfg["init.seed"], time.time() - t0,
              {"fitted_slope": report.fitted_slope,
               "paper_exponent": report.paper_exponent,
               "partial": report.partial})
    return 2 if report.partial else 0


def cmd_check_ineq(cfg: Config, outdir: str) -> int:
    t0 = time.time()
    trials, seed, n = cfg["ineq.trials"], cfg["ineq.seed"], cfg["ineq.n"]
    reports = [check_sobolev(v, trials=trials, seed=seed, n=n,
                             s=cfg["ineq.s"]) for v in (1, 2, 3, 4)]
    reports.append(check_hls(cfg["ineq.alpha"], trials=trials, seed=seed))
    reports.append(check_interpolation(1.0 - cfg["params.zeta"],
                                       trials=trials, seed=seed, n=n))
    rows = [(r.variant, r.trials, r.max_ratio, r.median_ratio, r.violations,
             r.structural_failures) for r in reports]
    write_csv(os.path.join(outdir, "ineq.csv"), INEQ_COLUMNS, rows)
    _manifest(outdir, cfg, seed, time.time() - t0)
    return 0 if all(r.structural_failures == 0 for r in reports) else 2


def cmd_check_cancel(cfg: Config, outdir: str) -> int:
    t0 = time.time()
    n = cfg["cancel.n"]
    grid = Grid(n, n, n, cfg["grid.L"])
    rows = []
    for i in range(cfg["cancel.states"]):
        state = random_state(grid, cfg["cancel.seed"] + i, modes=4)
        state = PerturbState(grid, state.coeffs * 0.05)
        state = project_div_free_b(state)
        for alpha in ((0, 0), (1, 0), (1, 1), (2, 1)):
            res = check_cancellations(state, alpha_h=alpha,
                                      m_vertical=cfg["cancel.m_vertical"])
            rows.append((i, alpha[0], alpha[1], res["i"], res["ii"],
                         res["iii"]))
    write_csv(os.path.join(outdir, "cancel.csv"), CANCEL_COLUMNS, rows)
    _manifest(outdir, cfg, cfg["cancel.seed"], time.time() - t0)
    return 0


def cmd_report(cfg: Config, outdir: str) -> int:
    """Summarize a prior simulate run: bootstrap quantities + decay stats."""
    t0 = time.time()
    diag_path = os.path.join(outdir, "diagnostics.csv")
    if not os.path.exists(diag_path):
        print(f"error: {diag_path} not found (run simulate first)",
              file=sys.stderr)
        return 1
    data = np.genfromtxt(diag_path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    params = cfg.params()
    t = data["t"]
    s, sigma = params.s, params.sigma
    rows = [
        ("sup_E_m", float(data["E_m"].max())),
        ("sup_weighted_E_tan", float(((1 + t) ** s * data["E_tan"]).max())),
        ("int_weighted_D_tan",
         float(np.trapezoid((1 + t) ** sigma * data["D_tan"], t))),
        ("int_D_m", float(np.trapezoid(data["D_m"], t))),
        ("max_div_b", float(data["div_b_max"].max())),
        ("min_density", float(data["min_density"].min())),
        ("paper_exponent", paper_exponent(params.m, params.zeta)),
    ]
    write_csv(os.path.join(outdir, "report.csv"), REPORT_COLUMNS, rows)
    _manifest(outdir, cfg, cfg["init.seed"], time.time() - t0)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep-eps": cmd_sweep,
    "check-ineq": cmd_check_ineq,
    "check-cancel": cmd_check_cancel,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="anisomhd",
        description="anisotropic compressible MHD verification harness")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="config file path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override init.seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="FFT worker threads (or ANISOMHD_THREADS)")
    args = parser.parse_args(argv)

    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("ANISOMHD_THREADS", "1"))
    set_num_threads(threads)

    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg.values["init.seed"] = args.seed
        cfg.values["ineq.seed"] = args.seed
        cfg.values["cancel.seed"] = args.seed

    os.makedirs(args.out, exist_ok=True)
    if not os.access(args.out, os.W_OK):
        print(f"error: output directory {args.out} not writable",
              file=sys.stderr)
        return 1
    try:
        return COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
