"""Per-axis error metrics for a sensor against a reference instrument.

All functions take 1-D arrays of the measured and reference signal for one
axis and return fractions (multiply by 100 for percent).

Cycle segmentation (for repeatability) splits the series where the
reference rises out of its rest level near zero.  Branch splitting (for hysteresis)
cuts the reference into monotone runs; each rising run is paired with the
falling run that follows it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .model import AXES

HYSTERESIS_GRID = 201


class MetricError(ValueError):
    pass


def _pair(meas, ref):
    meas = np.asarray(meas, dtype=float).reshape(-1)
    ref = np.asarray(ref, dtype=float).reshape(-1)
    if meas.shape != ref.shape:
        raise MetricError(f"length mismatch: {meas.size} measured vs {ref.size} reference")
    if meas.size == 0:
        raise MetricError("empty series")
    return meas, ref


def _ref_scale(ref):
    scale = np.max(np.abs(ref))
    if not scale > 0:
        raise MetricError("reference is identically zero")
    return scale


def e_dev(meas, ref) -> float:
    """Mean absolute deviation normalised by the reference peak."""
    meas, ref = _pair(meas, ref)
    return float(np.mean(np.abs(meas - ref)) / _ref_scale(ref))


CYCLE_LEVEL = 0.02


def cycle_starts(ref, level=CYCLE_LEVEL) -> np.ndarray:
    """Indices where the reference rises through ``level`` times its peak.

    A small positive level stands in for zero: sampled triangles rarely hit
    zero exactly between cycles.
    """
    ref = np.asarray(ref, dtype=float)
    thr = level * np.max(np.abs(ref)) if ref.size else 0.0
    return np.flatnonzero((ref[:-1] <= thr) & (ref[1:] > thr))


def split_cycles(meas, ref):
    """Aligned (n_cycles, length) arrays of measured and reference cycles."""
    meas, ref = _pair(meas, ref)
    starts = cycle_starts(ref)
    if starts.size < 2:
        raise MetricError(f"need at least 2 loading cycles, found {starts.size}")
    bounds = np.append(starts, len(ref))
    length = int(np.min(np.diff(bounds)))
    m = np.stack([meas[s:s + length] for s in starts])
    r = np.stack([ref[s:s + length] for s in starts])
    return m, r


def e_rep(meas, ref) -> float:
    """Repeatability: mean change of the tracking error between consecutive
    cycles, halved, over the reference peak.

    Sample k of cycle j is compared with sample k of cycle j-1.  Working on
    the error ``meas - ref`` rather than ``meas`` keeps the metric at zero
    when cycles are sampled at slightly different phases.
    """
    m, r = split_cycles(meas, ref)
    err = m - r
    diffs = np.abs(err[1:] - err[:-1])
    return float(np.sum(diffs) / (2 * diffs.size) / _ref_scale(ref))


def affine_fit(meas, ref):
    """Ordinary least-squares slope and intercept of ``meas`` on ``ref``."""
    meas, ref = _pair(meas, ref)
    rc = ref - ref.mean()
    sxx = np.dot(rc, rc)
    if not sxx > 0:
        raise MetricError("constant reference; regression is degenerate")
    slope = np.dot(rc, meas - meas.mean()) / sxx
    return float(slope), float(meas.mean() - slope * ref.mean())


def e_nlin(meas, ref) -> float:
    """Mean distance to the best-fit line, over the line's peak magnitude."""
    meas, ref = _pair(meas, ref)
    slope, intercept = affine_fit(meas, ref)
    line = slope * ref + intercept
    peak = np.max(np.abs(line))
    if not peak > 0:
        raise MetricError("fitted line is identically zero")
    return float(np.mean(np.abs(meas - line)) / peak)


def monotone_runs(ref):
    """(start, stop, direction) for maximal runs where ``ref`` rises (+1) or falls (-1)."""
    d = np.sign(np.diff(np.asarray(ref, dtype=float)))
    runs = []
    i, n = 0, len(d)
    while i < n:
        if d[i] == 0:
            i += 1
            continue
        j = i
        while j + 1 < n and d[j + 1] in (0, d[i]):
            j += 1
        # trailing flat steps belong to the plateau, not the run
        while d[j] == 0:
            j -= 1
        runs.append((i, j + 2, int(d[i])))
        i = j + 1
    return runs


def hysteresis_branches(meas, ref):
    """Pairs of (loading, unloading) branches as (ref, meas) tuples."""
    meas, ref = _pair(meas, ref)
    runs = monotone_runs(ref)
    pairs = []
    for (a0, a1, da), (b0, b1, db) in zip(runs, runs[1:]):
        if da > 0 and db < 0:
            pairs.append(((ref[a0:a1], meas[a0:a1]), (ref[b0:b1][::-1], meas[b0:b1][::-1])))
    return pairs


def loop_gap(loading, unloading, n_grid=HYSTERESIS_GRID) -> float:
    """Largest |load - unload| with both branches resampled on a shared force grid."""
    (rl, ml), (ru, mu) = loading, unloading
    lo = max(rl.min(), ru.min())
    hi = min(rl.max(), ru.max())
    if not hi > lo:
        raise MetricError("loading and unloading branches do not overlap in force")
    grid = np.linspace(lo, hi, n_grid)
    return float(np.max(np.abs(np.interp(grid, rl, ml) - np.interp(grid, ru, mu))))


def e_hys(meas, ref, n_grid=HYSTERESIS_GRID) -> float:
    """Half the widest loading/unloading gap over the measured peak."""
    meas, ref = _pair(meas, ref)
    pairs = hysteresis_branches(meas, ref)
    if not pairs:
        raise MetricError("no loading/unloading branch pair in the reference")
    gap = max(loop_gap(l, u, n_grid) for l, u in pairs)
    peak = np.max(np.abs(meas))
    if not peak > 0:
        raise MetricError("measured signal is identically zero")
    return float(0.5 * gap / peak)


def e_dri(unloaded_meas, full_scale: float = 1.0) -> float:
    """Mean magnitude of an unloaded output over full scale (reported as +/-)."""
    x = np.asarray(unloaded_meas, dtype=float).reshape(-1)
    if x.size == 0:
        raise MetricError("empty drift series")
    return float(np.mean(np.abs(x)) / full_scale)


def e_acc(rep: float, nlin: float, hys: float) -> float:
    if min(rep, nlin, hys) < 0:
        raise MetricError("error components must be non-negative")
    return math.sqrt(rep * rep + nlin * nlin + hys * hys)


@dataclass
class StaticFit:
    slope: float
    stderr: float
    ci_low: float
    ci_high: float
    r2: float


def static_regression(meas, ref, confidence=0.95) -> StaticFit:
    """Zero-intercept least squares ``meas ~ slope * ref``.

    R^2 uses the uncentred total sum of squares, as is usual for a line
    through the origin.
    """
    y, x = _pair(meas, ref)
    n = x.size
    if n < 3:
        raise MetricError("need at least 3 points")
    sxx = np.dot(x, x)
    if not sxx > 0:
        raise MetricError("reference is identically zero")
    slope = np.dot(x, y) / sxx
    resid = y - slope * x
    sse = np.dot(resid, resid)
    syy = np.dot(y, y)
    r2 = 1.0 - sse / syy if syy > 0 else 1.0
    stderr = math.sqrt(sse / (n - 1) / sxx)
    half = stats.t.ppf(0.5 + confidence / 2, n - 1) * stderr
    return StaticFit(float(slope), float(stderr), float(slope - half), float(slope + half), float(r2))


@dataclass
class AxisReport:
    e_dev: Optional[float] = None
    e_rep: Optional[float] = None
    e_nlin: Optional[float] = None
    e_hys: Optional[float] = None
    e_dri: Optional[float] = None
    e_acc: Optional[float] = None
    static: Optional[StaticFit] = None
    notes: list = field(default_factory=list)


@dataclass
class EvalReport:
    axes: dict  # axis name -> AxisReport
    full_scale: tuple

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "full_scale": dict(zip(AXES, self.full_scale)),
            "axes": {k: asdict(v) for k, v in self.axes.items()},
        }


def _try(fn, notes, name):
    try:
        return fn()
    except MetricError as exc:
        notes.append(f"{name}: {exc}")
        return None


def evaluate(meas, ref, full_scale=(50.0, 50.0, 50.0, 1.0, 1.0, 1.0)) -> EvalReport:
    """All metrics for (n, 6) measured and reference wrench series.

    Drift uses the rows where the whole reference wrench is zero.  A metric
    that cannot be computed is left ``None`` with a note.
    """
    meas = np.asarray(meas, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if meas.shape != ref.shape or meas.ndim != 2 or meas.shape[1] != 6:
        raise MetricError(f"expected matching (n, 6) arrays, got {meas.shape} and {ref.shape}")
    idle = np.all(ref == 0, axis=1)
    axes = {}
    for i, name in enumerate(AXES):
        m, r = meas[:, i], ref[:, i]
        rep = AxisReport()
        n = rep.notes
        rep.e_dev = _try(lambda: e_dev(m, r), n, "e_dev")
        rep.e_rep = _try(lambda: e_rep(m, r), n, "e_rep")
        rep.e_nlin = _try(lambda: e_nlin(m, r), n, "e_nlin")
        rep.e_hys = _try(lambda: e_hys(m, r), n, "e_hys")
        rep.e_dri = _try(lambda: e_dri(m[idle], full_scale[i]), n, "e_dri")
        if None not in (rep.e_rep, rep.e_nlin, rep.e_hys):
            rep.e_acc = e_acc(rep.e_rep, rep.e_nlin, rep.e_hys)
        rep.static = _try(lambda: static_regression(m, r), n, "static")
        axes[name] = rep
    return EvalReport(axes=axes, full_scale=tuple(float(v) for v in full_scale))
