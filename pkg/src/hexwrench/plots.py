"""Plot data (CSV) and static SVG figures for an evaluation run."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import _write_rows  # noqa: E402
from .metrics import HYSTERESIS_GRID, MetricError, hysteresis_branches, loop_gap  # noqa: E402
from .model import AXES  # noqa: E402

plt.rcParams["svg.hashsalt"] = "hexwrench"
_SVG_META = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def widest_loop(meas, ref, n_grid=HYSTERESIS_GRID):
    """Grid, loading and unloading curves of the widest hysteresis loop, or None."""
    try:
        pairs = hysteresis_branches(meas, ref)
        (rl, ml), (ru, mu) = max(pairs, key=lambda p: loop_gap(*p, n_grid))
    except (MetricError, ValueError):
        return None
    grid = np.linspace(max(rl.min(), ru.min()), min(rl.max(), ru.max()), n_grid)
    return grid, np.interp(grid, rl, ml), np.interp(grid, ru, mu)


def emit(outdir, t, meas, ref, label="run"):
    """Write static-response, hysteresis and drift data plus SVGs; returns written paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    p = out / "static_response.csv"
    _write_rows(p, ["t", *(f"ref_{a}" for a in AXES), *(f"meas_{a}" for a in AXES)],
                np.column_stack([t, ref, meas]))
    written.append(p)
    fig, axs = plt.subplots(2, 3, figsize=(9, 5.5))
    for i, (a, ax) in enumerate(zip(AXES, axs.flat)):
        ax.plot(ref[:, i], meas[:, i], ".", ms=1)
        lim = np.max(np.abs(ref[:, i])) or 1.0
        ax.plot([-lim, lim], [-lim, lim], "k--", lw=0.8)
        ax.set_title(a)
        ax.set_xlabel("reference")
        ax.set_ylabel("measured")
    fig.tight_layout()
    p = out / "static_response.svg"
    _save(fig, p)
    written.append(p)

    rows = []
    fig, axs = plt.subplots(2, 3, figsize=(9, 5.5))
    for i, (a, ax) in enumerate(zip(AXES, axs.flat)):
        loop = widest_loop(meas[:, i], ref[:, i])
        ax.set_title(a)
        if loop is None:
            continue
        grid, up, down = loop
        rows += [(i, 0, g, v) for g, v in zip(grid, up)]
        rows += [(i, 1, g, v) for g, v in zip(grid, down)]
        ax.plot(grid, up, label="loading")
        ax.plot(grid, down, label="unloading")
    fig.tight_layout()
    p = out / f"hysteresis_{label}.csv"
    _write_rows(p, ["axis_index", "unloading", "ref", "meas"], rows)
    written.append(p)
    p = out / f"hysteresis_{label}.svg"
    _save(fig, p)
    written.append(p)

    idle = np.all(ref == 0, axis=1)
    p = out / "drift.csv"
    _write_rows(p, ["t", *AXES], np.column_stack([t[idle], meas[idle]]))
    written.append(p)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for i, a in enumerate(AXES):
        ax.plot(t[idle], meas[idle, i], ".", ms=1, label=a)
    ax.set_xlabel("t [s]")
    ax.legend(ncol=3, fontsize="small")
    fig.tight_layout()
    p = out / "drift.svg"
    _save(fig, p)
    written.append(p)
    return written
