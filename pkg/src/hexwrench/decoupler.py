"""Runtime conversion of absolute chamber pressures to a wrench."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import islice

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_pressures
from .model import CANONICAL_FROM_SENSOR, N_CHANNELS, Wrench

_CHUNK = 8192


def tare(baseline_samples) -> np.ndarray:
    """Per-channel mean of no-load pressure rows."""
    x = np.asarray(baseline_samples, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.size == 0 or x.shape[0] == 0:
        raise ValueError("empty taring window")
    if x.shape[1] != N_CHANNELS:
        raise ValueError(f"expected {N_CHANNELS} channels, got {x.shape[1]}")
    return x.mean(axis=0)


@dataclass
class StreamResult:
    index: np.ndarray  # row indices of accepted samples
    wrench: np.ndarray  # (n_accepted, 6), canonical order
    rejected: list = field(default_factory=list)  # (row index, reason)

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


class Decoupler(TransformerMixin, BaseEstimator):
    """Apply ``F = K (p - baseline)`` to absolute pressure samples.

    ``fit`` tares on no-load samples.  A baseline carried with the
    calibration can be supplied up front instead.  Outputs are canonical
    (fx, fy, fz, tx, ty, tz).

    Parameters
    ----------
    K : array (6, 16)
        Decoupling matrix, rows in sensor order (fx, fy, tz, fz, tx, ty).
    baseline : array (16,), optional
    smoothing_window : int
        Causal moving-average length for :meth:`decouple_stream`; 1 means
        no filtering.
    """

    def __init__(self, K=None, baseline=None, smoothing_window=1):
        self.K = K
        self.baseline = baseline
        self.smoothing_window = smoothing_window

    @classmethod
    def from_calibration(cls, result, **kwargs):
        return cls(K=result.K, baseline=result.baseline, **kwargs)

    def fit(self, X, y=None):
        self.baseline_ = tare(X)
        return self

    tare = fit

    def _matrix(self):
        if self.K is None:
            raise NotFittedError("decoupling matrix K not loaded")
        K = np.asarray(self.K, dtype=float)
        if K.shape != (6, N_CHANNELS):
            raise ValueError(f"K must be 6x16, got {K.shape}")
        return K

    def _baseline(self):
        if hasattr(self, "baseline_"):
            return self.baseline_
        if self.baseline is not None:
            return np.asarray(self.baseline, dtype=float)
        raise NotFittedError("decoupler is not tared; call fit() with no-load samples")

    def transform(self, X):
        K = self._matrix()
        X = check_pressures(X)
        return ((X - self._baseline()) @ K.T)[:, CANONICAL_FROM_SENSOR]

    def decouple(self, p_abs) -> Wrench:
        """Single sample; depends only on ``p_abs``."""
        p = np.asarray(p_abs, dtype=float).reshape(-1)
        if p.shape != (N_CHANNELS,):
            raise ValueError(f"expected {N_CHANNELS} channels, got {p.shape[0]}")
        out = (self._matrix() @ (p - self._baseline()))[CANONICAL_FROM_SENSOR]
        return Wrench.from_array(out)

    def decouple_stream(self, rows) -> StreamResult:
        """Decouple rows in order, rejecting malformed or non-finite ones.

        ``rows`` is an (n, 16) array or any iterable of 16-value rows.
        Rejected rows are reported by index; processing continues.
        """
        K = self._matrix()
        base = self._baseline()
        index, outputs, rejected = [], [], []
        for start, block, bad in _chunks(rows):
            rejected.extend(bad)
            ok = np.all(np.isfinite(block), axis=1)
            for i in np.flatnonzero(~ok):
                if not any(r[0] == start + i for r in bad):
                    rejected.append((start + int(i), "non-finite value"))
            index.append(start + np.flatnonzero(ok))
            outputs.append((block[ok] - base) @ K.T)
        rejected.sort()
        idx = np.concatenate(index) if index else np.zeros(0, dtype=int)
        w = np.concatenate(outputs) if outputs else np.zeros((0, 6))
        w = w[:, CANONICAL_FROM_SENSOR]
        if self.smoothing_window > 1 and len(w):
            w = _moving_average(w, int(self.smoothing_window))
        return StreamResult(index=idx, wrench=w, rejected=rejected)


def _moving_average(w, n):
    c = np.cumsum(np.vstack([np.zeros((1, w.shape[1])), w]), axis=0)
    k = np.arange(1, len(w) + 1)
    lo = np.maximum(k - n, 0)
    return (c[k] - c[lo]) / (k - lo)[:, None]


def _chunks(rows):
    if isinstance(rows, np.ndarray) and rows.ndim == 2 and rows.shape[1] == N_CHANNELS:
        for start in range(0, len(rows), _CHUNK):
            yield start, np.asarray(rows[start:start + _CHUNK], dtype=float), []
        return
    it = iter(rows)
    start = 0
    while True:
        chunk = list(islice(it, _CHUNK))
        if not chunk:
            return
        block = np.full((len(chunk), N_CHANNELS), math.nan)
        bad = []
        for i, row in enumerate(chunk):
            try:
                vals = [float(v) for v in row]
            except (TypeError, ValueError):
                bad.append((start + i, "unparsable value"))
                continue
            if len(vals) != N_CHANNELS:
                bad.append((start + i, f"expected {N_CHANNELS} values, got {len(vals)}"))
                continue
            block[i] = vals
        yield start, block, bad
        start += len(chunk)
