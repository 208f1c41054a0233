"""First-order transfer-function identification, G(s) = gain / (tau s + 1)."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize_scalar
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .simulation import apply_dynamics

# Identified per-axis models of the prototype: axis -> (gain, tau [s]).
PROTOTYPE_TRANSFER_FUNCTIONS = {
    "fx": (0.9879, 0.0036),
    "fy": (0.9761, 0.0038),
    "fz": (0.9815, 0.0018),
    "tx": (1.007, 0.0033),
    "ty": (0.9899, 0.0026),
    "tz": (0.9488, 0.0049),
}
PROTOTYPE_MEAN_TAU = 0.0034


class IdentificationError(ValueError):
    pass


def _profile_cost(tau, u, y, dt):
    z = apply_dynamics(u, tau, dt)
    zz = np.dot(z, z)
    gain = np.dot(z, y) / zz if zz > 0 else 0.0
    r = y - gain * z
    return np.dot(r, r), gain


def fit_first_order(u, y, dt, tau_max=None, xtol=1e-7):
    """Output-error fit of a first-order lag.

    For each candidate time constant the unit-gain response is simulated
    and the gain is solved in closed form; the time constant is found by a
    log-spaced scan followed by bounded Brent refinement.

    Returns
    -------
    gain, tau, rms : float
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if u.shape != y.shape:
        raise IdentificationError("input and output lengths differ")
    if dt <= 0:
        raise IdentificationError("dt must be positive")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(y))):
        raise IdentificationError("non-finite samples")
    if np.ptp(u) == 0:
        raise IdentificationError("input is constant; not persistently exciting")
    if tau_max is None:
        tau_max = max(100 * dt, 0.05 * dt * len(u))

    grid = np.concatenate([[0.0], np.geomspace(dt * 1e-3, tau_max, 60)])
    costs = [_profile_cost(t, u, y, dt)[0] for t in grid]
    k = int(np.argmin(costs))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(lambda t: _profile_cost(t, u, y, dt)[0], bounds=(lo, hi),
                          method="bounded", options={"xatol": xtol})
    tau = float(res.x) if res.fun <= costs[k] else float(grid[k])
    cost, gain = _profile_cost(tau, u, y, dt)
    return float(gain), tau, math.sqrt(cost / len(y))


def bode_points(gain, tau, freqs):
    """Magnitude (dB) and phase (deg) of gain / (tau s + 1) at ``freqs`` Hz."""
    f = np.asarray(freqs, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequencies must be positive")
    wt = 2 * math.pi * f * tau
    mag = 20 * np.log10(gain / np.sqrt(1 + wt**2))
    phase = -np.degrees(np.arctan(wt))
    return mag, phase


def corner_frequency(tau):
    return 1.0 / (2 * math.pi * tau)


class FirstOrderModel(RegressorMixin, BaseEstimator):
    """scikit-learn wrapper: ``fit(u, y)`` on uniformly sampled 1-D signals.

    ``predict(u)`` simulates the identified lag from rest at ``u[0]``.
    """

    def __init__(self, dt=1 / 1024, tau_max=None):
        self.dt = dt
        self.tau_max = tau_max

    def fit(self, X, y):
        u = np.asarray(X, dtype=float).reshape(-1)
        self.gain_, self.tau_, self.rms_ = fit_first_order(u, y, self.dt, self.tau_max)
        return self

    def predict(self, X):
        check_is_fitted(self, "tau_")
        u = np.asarray(X, dtype=float).reshape(-1)
        return self.gain_ * apply_dynamics(u, self.tau_, self.dt)

    def bode(self, freqs):
        check_is_fitted(self, "tau_")
        return bode_points(self.gain_, self.tau_, freqs)
