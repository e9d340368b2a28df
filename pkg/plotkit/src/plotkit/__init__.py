"""Render decay and eps-convergence figures from anisomhd CSV artifacts.

Consumes only the CSV schemas of the simulation harness:

  decay CSV:  t, E_tilde, D_tan, violation_flag
  sweep CSV:  eps, sup_Ebar, T_star, completed

Figures are deterministic: fixed size and dpi, no embedded timestamps or
software tags, so repeated invocations produce byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__version__ = "0.1.0"

_SAVE_KW = dict(dpi=150, metadata={"Software": None})


@dataclass(frozen=True)
class PlotSpec:
    """One figure request."""

    csv_path: str
    kind: str                     # "decay" | "sweep"
    out_path: str
    ref_slope: float | None = None
    log_x: bool = True
    log_y: bool = True


@dataclass(frozen=True)
class PlotResult:
    """What was drawn, for callers that want to assert on it."""

    out_path: str
    n_points: int
    n_violation_markers: int = 0
    fitted_slope: float | None = None
    ref_slope: float | None = None
    legend_labels: tuple = ()


class MissingColumnsError(ValueError):
    def __init__(self, missing):
        super().__init__("missing CSV columns: " + ", ".join(sorted(missing)))
        self.missing = tuple(sorted(missing))


def _read_csv(path: str, required: tuple[str, ...]):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, not even a header")
        missing = set(required) - set(header)
        if missing:
            raise MissingColumnsError(missing)
        idx = [header.index(c) for c in required]
        rows = [[float(row[i]) for i in idx] for row in reader if row]
    if not rows:
        return {c: np.empty(0) for c in required}
    arr = np.asarray(rows)
    return {c: arr[:, j] for j, c in enumerate(required)}


def _new_axes():
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def plot_decay(csv_path: str, out_path: str) -> PlotResult:
    """Semilog plot of E_tilde(t) and D_tan(t) with violation markers."""
    data = _read_csv(csv_path, ("t", "E_tilde", "D_tan", "violation_flag"))
    t = data["t"]
    fig, ax = _new_axes()
    labels = []
    n_marks = 0
    if t.size:
        for name, style in (("E_tilde", "k-"), ("D_tan", "b--")):
            y = data[name]
            pos = y > 0
            if pos.any():
                ax.semilogy(t[pos], y[pos], style, label=name)
                labels.append(name)
        bad = data["violation_flag"] > 0.5
        n_marks = int(bad.sum())
        if n_marks:
            ax.semilogy(t[bad], data["E_tilde"][bad], "rx", markersize=9,
                        label="monotonicity violation")
            labels.append("monotonicity violation")
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    if labels:
        ax.legend(loc="best")
    fig.savefig(out_path, **_SAVE_KW)
    plt.close(fig)
    return PlotResult(out_path, int(t.size), n_violation_markers=n_marks,
                      legend_labels=tuple(labels))


def _fit_line(eps, sup):
    lx, ly = np.log(eps), np.log(sup)
    if lx.size < 2:
        return None, None
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def plot_sweep(csv_path: str, out_path: str,
               ref_slope: float | None = None) -> PlotResult:
    """Log-log plot of sup_Ebar vs eps with fitted and reference lines."""
    data = _read_csv(csv_path, ("eps", "sup_Ebar"))
    eps = data["eps"]
    sup = data["sup_Ebar"]
    keep = (eps > 0) & (sup > 0) & np.isfinite(sup)
    eps, sup = eps[keep], sup[keep]
    fig, ax = _new_axes()
    labels = []
    slope = None
    if eps.size:
        order = np.argsort(eps)
        eps, sup = eps[order], sup[order]
        ax.loglog(eps, sup, "ko", label="sup Ebar")
        labels.append("sup Ebar")
        slope, intercept = _fit_line(eps, sup)
        if slope is not None:
            lbl = f"fitted slope {slope:.4f}"
            ax.loglog(eps, np.exp(intercept) * eps ** slope, "k--", label=lbl)
            labels.append(lbl)
        if ref_slope is not None:
            anchor = sup[-1]
            lbl = f"reference slope {ref_slope:.4f}"
            ax.loglog(eps, anchor * (eps / eps[-1]) ** ref_slope, "r-",
                      label=lbl)
            labels.append(lbl)
    ax.set_xlabel("eps")
    ax.set_ylabel("sup Ebar")
    if labels:
        ax.legend(loc="best")
    fig.savefig(out_path, **_SAVE_KW)
    plt.close(fig)
    return PlotResult(out_path, int(eps.size), fitted_slope=slope,
                      ref_slope=ref_slope, legend_labels=tuple(labels))


def render(spec: PlotSpec) -> PlotResult:
    if spec.kind == "decay":
        return plot_decay(spec.csv_path, spec.out_path)
    if spec.kind == "sweep":
        return plot_sweep(spec.csv_path, spec.out_path, spec.ref_slope)
    raise ValueError(f"unknown plot kind {spec.kind!r}")
