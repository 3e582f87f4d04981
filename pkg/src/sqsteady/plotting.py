"""
Figure rendering from emitted CSV files.

The CSV is the contract; this module is a bundled consumer that turns
`sweep` output into E_N maps/curves and `tc` output into critical
temperature curves, one figure file per CSV.
"""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_csv"]

AXIS_LABELS = {
    "r1": r"$r_1$",
    "r2": r"$r_2$",
    "phi1": r"$\phi_1$",
    "phi2": r"$\phi_2$",
    "J": r"$J$",
    "T": r"$T$",
}


def _read_rows(path: str) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


def _sweep_axes(rows: list[dict[str, str]]) -> list[str]:
    """Columns among the sweepable parameters that actually vary."""
    varying = []
    for name in ("r1", "r2", "phi1", "phi2", "J", "T"):
        if len({row[name] for row in rows}) > 1:
            varying.append(name)
    return varying


def plot_csv(csv_path: str, out_path: str) -> None:
    """Render a figure for a `sweep` or `tc` CSV and write it to out_path."""
    rows = _read_rows(csv_path)
    if not rows:
        raise ValueError(f"{csv_path}: no data rows")
    if "T_c" in rows[0]:
        _plot_tc(rows, out_path)
    elif "E_N" in rows[0]:
        _plot_sweep(rows, out_path)
    else:
        raise ValueError(f"{csv_path}: not a recognized sweep or tc CSV")


def _plot_tc(rows: list[dict[str, str]], out_path: str) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    j_values = sorted({row["J"] for row in rows}, key=float)
    for j in j_values:
        pts = [(float(r["r"]), float(r["T_c"])) for r in rows if r["J"] == j and r["T_c"]]
        if pts:
            r_vals, tc_vals = zip(*sorted(pts))
            ax.plot(r_vals, tc_vals, label=f"J = {float(j):g}")
    ax.set_xlabel(r"squeezing strength $r$")
    ax.set_ylabel(r"$T_c$  [$\omega/k_B$]")
    ax.set_title(f"critical temperature ({rows[0]['frame']} frame)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=200)
    plt.close(fig)


def _plot_sweep(rows: list[dict[str, str]], out_path: str) -> None:
    varying = _sweep_axes(rows)
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    if len(varying) >= 2:
        a1, a2 = varying[0], varying[1]
        x1 = np.array(sorted({float(r[a1]) for r in rows}))
        x2 = np.array(sorted({float(r[a2]) for r in rows}))
        grid = np.full((x1.size, x2.size), np.nan)
        i1 = {v: i for i, v in enumerate(x1)}
        i2 = {v: i for i, v in enumerate(x2)}
        for row in rows:
            grid[i1[float(row[a1])], i2[float(row[a2])]] = float(row["E_N"])
        mesh = ax.pcolormesh(x2, x1, grid, shading="auto", cmap="magma")
        fig.colorbar(mesh, ax=ax, label=r"$E_N$")
        ax.set_xlabel(AXIS_LABELS.get(a2, a2))
        ax.set_ylabel(AXIS_LABELS.get(a1, a1))
    else:
        a1 = varying[0] if varying else "r1"
        pts = sorted((float(r[a1]), float(r["E_N"])) for r in rows)
        ax.plot(*zip(*pts))
        ax.set_xlabel(AXIS_LABELS.get(a1, a1))
        ax.set_ylabel(r"$E_N$")
    ax.set_title(f"logarithmic negativity ({rows[0]['frame']} frame)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=200)
    plt.close(fig)
