"""Input checks shared by the estimators."""

import numpy as np
from sklearn.utils import check_array

from .model import AXES, N_CHANNELS


class InsufficientExcitationError(ValueError):
    """Calibration data does not excite every wrench axis."""

    def __init__(self, axes, detail=""):
        self.axes = tuple(axes)
        msg = "insufficient excitation"
        if self.axes:
            msg += f": axes not excited: {', '.join(self.axes)}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


def check_pressures(X, allow_nan=False):
    X = check_array(X, dtype=np.float64, ensure_all_finite="allow-nan" if allow_nan else True)
    if X.shape[1] != N_CHANNELS:
        raise ValueError(f"expected {N_CHANNELS} pressure channels, got {X.shape[1]}")
    return X


def check_wrenches(y, n_samples=None):
    y = check_array(y, dtype=np.float64, ensure_2d=True)
    if y.shape[1] != 6:
        raise ValueError(f"expected 6 wrench columns, got {y.shape[1]}")
    if n_samples is not None and y.shape[0] != n_samples:
        raise ValueError(f"pressure and wrench sample counts differ: {n_samples} vs {y.shape[0]}")
    return y


def check_excitation(y, axes=range(6), rtol=1e-12):
    """Raise if any requested axis is flat or the axes are collinear."""
    y = np.asarray(y)
    idx = list(axes)
    scale = np.max(np.abs(y[:, idx]), axis=0)
    dead = [AXES[i] for i, s in zip(idx, scale) if not s > 0]
    if dead:
        raise InsufficientExcitationError(dead)
    sub = y[:, idx] / scale
    rank = np.linalg.matrix_rank(sub, tol=rtol * np.sqrt(len(y)))
    if rank < len(idx):
        raise InsufficientExcitationError([], f"wrench samples span only {rank} of {len(idx)} axes")
