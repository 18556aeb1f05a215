"""Report rendering: per-quantity CSV series plus matplotlib figures.

Each plotted quantity gets a small CSV next to its PNG so the numbers can
be re-processed without parsing the full trajectory log.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .controller import Reference  # noqa: E402
from .engine import TrajectoryLog  # noqa: E402


def _write_series(path: Path, header, columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([f"{x:.17g}" for x in row])


def _line_figure(path: Path, t, series, ylabel, title) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 2.8))
    for label, values, style in series:
        ax.plot(t, values, style, label=label, linewidth=1.2)
    ax.set_xlabel("time [s]")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(series) > 1:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_trajectory_report(log: TrajectoryLog, ref: Reference, outdir,
                            render: bool = True) -> list:
    """Emit per-figure series CSVs (and PNG renderings) for one run.

    Returns the list of files written.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    t = log.t

    actuated = [("alpha", "slew angle", "rad", 0),
                ("beta", "luff angle", "rad", 1),
                ("rope_length", "rope length", "m", 2)]
    for name, title, unit, idx in actuated:
        series_path = outdir / f"{name}.csv"
        reference = np.full_like(t, ref.q1d[idx])
        _write_series(series_path, ["t", "reference", "actual"],
                      [t, reference, log.q[:, idx]])
        written.append(series_path)
        if render:
            png = outdir / f"{name}.png"
            _line_figure(png, t,
                         [("reference", reference, "r--"),
                          ("actual", log.q[:, idx], "b-")],
                         f"{title} [{unit}]", title)
            written.append(png)

    for name, title, idx in [("theta1", "tangential sway", 3),
                             ("theta2", "radial sway", 4)]:
        series_path = outdir / f"{name}.csv"
        deg = np.degrees(log.q[:, idx])
        _write_series(series_path, ["t", "degrees"], [t, deg])
        written.append(series_path)
        if render:
            png = outdir / f"{name}.png"
            _line_figure(png, t, [(name, deg, "b-")], f"{title} [deg]", title)
            written.append(png)

    series_path = outdir / "control_inputs.csv"
    _write_series(series_path,
                  ["t", "u1_cmd", "u2_cmd", "u3_cmd", "u1_app", "u2_app", "u3_app"],
                  [t, log.u_cmd[:, 0], log.u_cmd[:, 1], log.u_cmd[:, 2],
                   log.u_app[:, 0], log.u_app[:, 1], log.u_app[:, 2]])
    written.append(series_path)
    if render:
        png = outdir / "control_inputs.png"
        fig, axes = plt.subplots(3, 1, figsize=(7.0, 6.0), sharex=True)
        labels = ["slew torque u1 [N m]", "luff torque u2 [N m]", "rope force u3 [N]"]
        for i, ax in enumerate(axes):
            ax.plot(t, log.u_cmd[:, i], "c-", linewidth=0.9, label="commanded")
            ax.plot(t, log.u_app[:, i], "b-", linewidth=1.1, label="applied")
            ax.set_ylabel(labels[i], fontsize=8)
            ax.grid(True, alpha=0.3)
        axes[0].legend(loc="best", fontsize=8)
        axes[-1].set_xlabel("time [s]")
        axes[0].set_title("control inputs")
        fig.tight_layout()
        fig.savefig(png, dpi=150)
        plt.close(fig)
        written.append(png)

    if np.any(log.wind_force != 0.0):
        series_path = outdir / "wind_force.csv"
        mag = np.linalg.norm(log.wind_force, axis=1)
        _write_series(series_path, ["t", "Fw_x", "Fw_y", "Fw_z", "magnitude"],
                      [t, log.wind_force[:, 0], log.wind_force[:, 1],
                       log.wind_force[:, 2], mag])
        written.append(series_path)
        if render:
            png = outdir / "wind_force.png"
            _line_figure(png, t, [("|F|", mag, "b-")],
                         "wind drag force [N]", "wind disturbance")
            written.append(png)
    return written


def write_stability_report(points, outdir, render: bool = True) -> list:
    """Stability-map figure from a list of StabilityMapPoint."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if not render:
        return written

    betas = sorted({p.beta for p in points})
    ds = sorted({p.d for p in points})
    if len(betas) > 1 and len(ds) > 1 and len(points) == len(betas) * len(ds):
        grid = np.empty((len(ds), len(betas)))
        bi = {b: i for i, b in enumerate(betas)}
        di = {d: i for i, d in enumerate(ds)}
        for p in points:
            grid[di[p.d], bi[p.beta]] = p.max_real_eigenvalue
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        mesh = ax.pcolormesh(betas, ds, grid, shading="nearest", cmap="RdYlGn_r")
        fig.colorbar(mesh, ax=ax, label="max real eigenvalue [1/s]")
        ax.set_xlabel("luff angle beta [rad]")
        ax.set_ylabel("rope length d [m]")
        ax.set_title("sway linearization: spectral abscissa")
        fig.tight_layout()
        png = outdir / "stability_map.png"
        fig.savefig(png, dpi=150)
        plt.close(fig)
        written.append(png)
    return written
