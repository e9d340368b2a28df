"""Figure rendering: schemas, markers, determinism, slope overlays."""

import numpy as np
import pytest

from plotkit import (MissingColumnsError, PlotSpec, plot_decay, plot_sweep,
                     render)
from plotkit.cli import main

DECAY_HEADER = "t,E_tilde,D_tan,violation_flag\n"
SWEEP_HEADER = "eps,sup_Ebar,T_star,completed\n"


def decay_csv(tmp_path, rows, name="decay.csv"):
    p = tmp_path / name
    p.write_text(DECAY_HEADER + "".join(f"{t},{e},{d},{f}\n"
                                        for t, e, d, f in rows))
    return str(p)


def sweep_csv(tmp_path, rows, name="sweep.csv"):
    p = tmp_path / name
    p.write_text(SWEEP_HEADER + "".join(f"{e},{s},{ts},{c}\n"
                                        for e, s, ts, c in rows))
    return str(p)


def monotone_rows(n=20):
    t = np.linspace(0.0, 2.0, n)
    e = 1e-6 * np.exp(-t)
    d = 3e-6 * np.exp(-t)
    return [(ti, ei, di, 0) for ti, ei, di in zip(t, e, d)]


class TestDecay:
    def test_empty_csv_renders(self, tmp_path):
        csv = decay_csv(tmp_path, [])
        out = str(tmp_path / "empty.png")
        res = plot_decay(csv, out)
        assert res.n_points == 0
        assert (tmp_path / "empty.png").stat().st_size > 0

    def test_monotone_series_no_markers(self, tmp_path):
        csv = decay_csv(tmp_path, monotone_rows())
        res = plot_decay(csv, str(tmp_path / "m.png"))
        assert res.n_violation_markers == 0
        assert "monotonicity violation" not in res.legend_labels

    def test_injected_increase_one_marker(self, tmp_path):
        rows = monotone_rows()
        t, e, d, _ = rows[7]
        rows[7] = (t, e * 3.0, d, 1)      # one flagged increase
        csv = decay_csv(tmp_path, rows)
        res = plot_decay(csv, str(tmp_path / "v.png"))
        assert res.n_violation_markers == 1
        assert "monotonicity violation" in res.legend_labels

    def test_missing_columns_named(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t,E_tilde\n0.0,1.0\n")
        with pytest.raises(MissingColumnsError) as err:
            plot_decay(str(p), str(tmp_path / "x.png"))
        assert "violation_flag" in str(err.value)
        assert "D_tan" in str(err.value)

    def test_input_not_mutated(self, tmp_path):
        csv = decay_csv(tmp_path, monotone_rows())
        before = open(csv, "rb").read()
        plot_decay(csv, str(tmp_path / "m.png"))
        assert open(csv, "rb").read() == before


class TestSweep:
    def test_two_point_exact_power_law(self, tmp_path):
        p = 2.0
        eps = [1e-1, 1e-3]
        rows = [(e, 3.0 * e ** p, 1.0, 1) for e in eps]
        csv = sweep_csv(tmp_path, rows)
        res = plot_sweep(csv, str(tmp_path / "s.png"), ref_slope=p)
        assert res.fitted_slope == pytest.approx(p, abs=1e-12)
        assert res.ref_slope == p

    def test_reference_overlay_in_legend(self, tmp_path):
        rows = [(1e-1, 1e-4, 1.0, 1), (1e-2, 1e-6, 2.0, 1),
                (1e-3, 1e-8, 3.0, 1)]
        csv = sweep_csv(tmp_path, rows)
        res = plot_sweep(csv, str(tmp_path / "s2.png"), ref_slope=0.8799)
        assert "reference slope 0.8799" in res.legend_labels
        assert any(lbl.startswith("fitted slope") for lbl in
                   res.legend_labels)

    def test_missing_sup_column(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("eps,T_star\n0.1,1.0\n")
        with pytest.raises(MissingColumnsError) as err:
            plot_sweep(str(p), str(tmp_path / "x.png"))
        assert "sup_Ebar" in str(err.value)


class TestDeterminism:
    def test_decay_byte_identical(self, tmp_path):
        csv = decay_csv(tmp_path, monotone_rows())
        a = str(tmp_path / "a.png")
        b = str(tmp_path / "b.png")
        plot_decay(csv, a)
        plot_decay(csv, b)
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_sweep_byte_identical(self, tmp_path):
        rows = [(1e-1, 1e-4, 1.0, 1), (1e-2, 1e-6, 2.0, 1),
                (1e-3, 1e-8, 3.0, 1)]
        csv = sweep_csv(tmp_path, rows)
        a = str(tmp_path / "a.png")
        b = str(tmp_path / "b.png")
        plot_sweep(csv, a, ref_slope=0.8799)
        plot_sweep(csv, b, ref_slope=0.8799)
        assert open(a, "rb").read() == open(b, "rb").read()


class TestCLI:
    def test_decay_roundtrip(self, tmp_path):
        csv = decay_csv(tmp_path, monotone_rows())
        out = str(tmp_path / "cli.png")
        assert main(["--csv", csv, "--kind", "decay", "--out", out]) == 0

    def test_sweep_with_ref(self, tmp_path):
        rows = [(1e-1, 1e-4, 1.0, 1), (1e-2, 1e-6, 2.0, 1),
                (1e-3, 1e-8, 3.0, 1)]
        csv = sweep_csv(tmp_path, rows)
        out = str(tmp_path / "cli2.png")
        assert main(["--csv", csv, "--kind", "sweep", "--out", out,
                     "--ref-slope", "0.8799"]) == 0

    def test_missing_file_exit_1(self, tmp_path):
        assert main(["--csv", str(tmp_path / "no.csv"), "--kind", "decay",
                     "--out", str(tmp_path / "x.png")]) == 1

    def test_render_dispatch(self, tmp_path):
        csv = decay_csv(tmp_path, monotone_rows())
        res = render(PlotSpec(csv, "decay", str(tmp_path / "d.png")))
        assert res.n_points == 20
        with pytest.raises(ValueError, match="unknown plot kind"):
            render(PlotSpec(csv, "heatmap", "x.png"))
