"""PNG renderings of result grids, fidelity curves and angle traces."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 7,
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _is_log_axis(values) -> bool:
    v = np.asarray(values, dtype=float)
    return len(v) > 2 and np.all(v > 0) and v.max() / v.min() > 50


def heatmap_figure(sweep_values, pulse_indices, grid, path) -> Path:
    """Mean fidelity versus sweep value (x) and pulse index (y)."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        x = np.asarray(sweep_values, dtype=float)
        y = np.asarray(pulse_indices)
        mesh = ax.pcolormesh(x, y, np.asarray(grid).T, shading="nearest", cmap="viridis")
        if _is_log_axis(x):
            ax.set_xscale("log")
        ax.set_xlabel("sweep value (Hz)")
        ax.set_ylabel("pulse index")
        ax.grid(False)
        fig.colorbar(mesh, ax=ax, label="mean fidelity")
        return _save(fig, path)


def lines_figure(pulse_indices, names, columns, path) -> Path:
    """One infidelity curve per column against pulse index."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for name, col in zip(names, columns):
            infid = np.clip(1.0 - np.asarray(col, dtype=float), 1e-16, None)
            ax.semilogy(pulse_indices, infid, marker="o", ms=3, label=name)
        ax.set_xlabel("pulse index")
        ax.set_ylabel("1 - mean fidelity")
        if len(names) <= 12:
            ax.legend()
        return _save(fig, path)


def angle_figure(csv_path, path) -> Path:
    """Polar angle and both azimuth components per pulse, one curve per sweep value."""
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    groups: dict[str, list] = {}
    for r in rows:
        groups.setdefault(r["sweep_value"], []).append(r)
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.4, 7.5))
        keys = [("polar", "polar (deg)"), ("dynamics_azimuth", "simulated azimuth (deg)"),
                ("clock_azimuth", "clock azimuth (deg)")]
        for label, rs in groups.items():
            k = [int(r["pulse_index"]) for r in rs]
            for ax, (key, _) in zip(axes, keys):
                vals = np.degrees([float(r[key]) for r in rs])
                ax.plot(k, np.mod(vals, 360) if key != "polar" else vals, marker="o", ms=3,
                        label=f"{float(label) / 1e6:g} MHz")
        for ax, (_, ylabel) in zip(axes, keys):
            ax.set_ylabel(ylabel)
        axes[0].legend()
        axes[-1].set_xlabel("pulse index")
        return _save(fig, path)


def trajectory_figure(csv_paths, labels, path) -> Path:
    """Excited-state population over time for each trajectory file."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for p, label in zip(csv_paths, labels):
            d = np.loadtxt(p, delimiter=",", skiprows=1)
            ax.plot(d[:, 0] * 1e9, d[:, 3] ** 2 + d[:, 4] ** 2, lw=0.8, label=label)
        ax.set_xlabel("time (ns)")
        ax.set_ylabel("excited population")
        ax.legend()
        return _save(fig, path)
