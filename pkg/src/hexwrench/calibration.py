"""Least-squares recovery of the 6x16 decoupling matrix.

Three estimators share the scikit-learn regressor interface
(``fit(dp, wrench)`` / ``predict(dp)``) and differ in how many entries of
``K`` they treat as free:

* :class:`DenseCalibrator`      - every entry, 96 parameters.
* :class:`BlockCalibrator`      - lower channels only feed (fz, tx, ty);
  the upper-right 3x8 block is zero, 72 parameters.
* :class:`StructuredCalibrator` - six layer sensitivities; ``K`` follows
  from the chamber layout, 6 parameters.

``K_`` rows are in sensor order (fx, fy, tz, fz, tx, ty); ``predict``
returns canonical order (fx, fy, fz, tx, ty, tz).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import InsufficientExcitationError, check_excitation, check_pressures, check_wrenches
from .model import (
    AXES,
    CANONICAL_FROM_SENSOR,
    N_CHANNELS,
    SENSOR_AXES,
    SENSOR_ORDER,
    SCALAR_NAMES,
    LayoutError,
    SensorGeometry,
    assemble_blocks,
    build_layout,
    direction_matrix_txy,
)

log = logging.getLogger(__name__)

COND_FLAG = 1e8
SCHEMA_VERSION = 1

# canonical indices of the lower-layer and upper-layer wrench triples
LOWER_AXES = [2, 3, 4]  # fz, tx, ty
UPPER_AXES = [0, 1, 5]  # fx, fy, tz


class DegenerateSensitivityError(ValueError):
    pass


def assemble_k(scalars, layout: SensorGeometry, kappa=1.0) -> np.ndarray:
    """Decoupling matrix from the six layer sensitivities.

    ``kappa`` is the gas stiffness -p0/v0, scalar or one value per channel.
    Non-square inverses are Moore-Penrose left inverses.
    """
    kappa = np.broadcast_to(np.asarray(kappa, dtype=float), (N_CHANNELS,))
    T_l, T_u1, T_u2 = assemble_blocks(scalars, layout)
    A_l = kappa[:8, None] * T_l
    A_u1 = kappa[8:, None] * T_u1
    A_u2 = kappa[8:, None] * T_u2
    for name, A in (("lower", A_l), ("upper", A_u1)):
        rank = np.linalg.matrix_rank(A)
        if rank < 3:
            raise LayoutError(f"{name} sensitivity block has rank {rank} < 3")
    B_l = np.linalg.pinv(A_l)
    B_u2 = np.linalg.pinv(A_u1)
    B_u1 = -B_u2 @ A_u2 @ B_l
    return np.block([[B_u1, B_u2], [B_l, np.zeros((3, 8))]])


@dataclass
class CalibrationResult:
    """Fitted decoupling matrix plus diagnostics; serialisable to JSON."""

    K: np.ndarray
    strategy: str
    n_params: int
    residual_rms: np.ndarray
    condition_number: float
    scalars: Optional[np.ndarray] = None
    baseline: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    @property
    def flagged(self) -> bool:
        return not self.condition_number <= COND_FLAG

    def predict(self, dp) -> np.ndarray:
        return (np.asarray(dp) @ self.K.T)[..., CANONICAL_FROM_SENSOR]

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "strategy": self.strategy,
            "row_order": list(SENSOR_AXES),
            "column_order": [f"p{i:02d}" for i in range(1, N_CHANNELS + 1)],
            "K": self.K.tolist(),
            "diagnostics": {
                "n_params": self.n_params,
                "residual_rms": dict(zip(AXES, map(float, self.residual_rms))),
                "condition_number": _json_float(self.condition_number),
                "flagged": self.flagged,
                **self.extra,
            },
        }
        if self.scalars is not None:
            d["scalars"] = dict(zip(SCALAR_NAMES, map(float, self.scalars)))
        if self.baseline is not None:
            d["baseline"] = self.baseline.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationResult":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported calibration schema_version {d.get('schema_version')!r}")
        K = np.asarray(d["K"], dtype=float)
        if K.shape != (6, N_CHANNELS):
            raise ValueError(f"K must be 6x16, got {K.shape}")
        diag = dict(d.get("diagnostics", {}))
        rms = diag.pop("residual_rms", {})
        scalars = d.get("scalars")
        baseline = d.get("baseline")
        cond = diag.pop("condition_number", float("nan"))
        diag.pop("flagged", None)
        return cls(
            K=K,
            strategy=d["strategy"],
            n_params=int(diag.pop("n_params", 0)),
            residual_rms=np.array([rms.get(a, np.nan) for a in AXES], dtype=float),
            condition_number=float("inf") if cond is None else float(cond),
            scalars=None if scalars is None else np.array([scalars[n] for n in SCALAR_NAMES]),
            baseline=None if baseline is None else np.asarray(baseline, dtype=float),
            extra=diag,
        )


def _json_float(x):
    return float(x) if np.isfinite(x) else None


def _lstsq(X, Y, ridge, rcond):
    if ridge > 0:
        n = X.shape[1]
        return np.linalg.solve(X.T @ X + ridge * np.eye(n), X.T @ Y)
    coef, *_ = np.linalg.lstsq(X, Y, rcond=rcond)
    return coef


def _cond(X):
    s = np.linalg.svd(X, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


class _BaseCalibrator(RegressorMixin, BaseEstimator):
    strategy = ""

    def fit(self, X, y):
        """Fit ``K`` from tared pressures ``X`` (n, 16) and reference wrenches ``y`` (n, 6)."""
        X = check_pressures(X)
        y = check_wrenches(y, X.shape[0])
        if X.shape[0] < self._min_samples:
            raise ValueError(f"need at least {self._min_samples} samples, got {X.shape[0]}")
        check_excitation(y)
        self._fit(X, y)
        self.residual_rms_ = np.sqrt(np.mean((y - self.predict(X)) ** 2, axis=0))
        if not self.condition_number_ <= COND_FLAG:
            log.info("%s fit: design condition number %.3g exceeds %.0e",
                     self.strategy, self.condition_number_, COND_FLAG)
        return self

    def predict(self, X):
        check_is_fitted(self, "K_")
        X = check_pressures(X)
        return (X @ self.K_.T)[:, CANONICAL_FROM_SENSOR]

    @property
    def flagged_(self):
        return not self.condition_number_ <= COND_FLAG

    def result(self, baseline=None) -> CalibrationResult:
        check_is_fitted(self, "K_")
        return CalibrationResult(
            K=self.K_.copy(),
            strategy=self.strategy,
            n_params=self.n_params_,
            residual_rms=self.residual_rms_.copy(),
            condition_number=self.condition_number_,
            scalars=getattr(self, "scalars_", None),
            baseline=None if baseline is None else np.asarray(baseline, dtype=float),
        )


class DenseCalibrator(_BaseCalibrator):
    """Unconstrained least squares: every channel may feed every axis.

    Parameters
    ----------
    ridge : float
        Tikhonov penalty on ``K``; 0 disables it.
    rcond : float
        Relative singular-value cutoff for the least-squares solve.
        Noise-free data occupies a 6-dimensional subspace of the 16
        channels; the cutoff keeps rounding-level directions out of ``K``.
    """

    strategy = "dense"
    _min_samples = N_CHANNELS

    def __init__(self, ridge=0.0, rcond=1e-10):
        self.ridge = ridge
        self.rcond = rcond

    def _fit(self, X, y):
        coef = _lstsq(X, y[:, SENSOR_ORDER], self.ridge, self.rcond)  # (16, 6)
        self.K_ = coef.T
        self.n_params_ = int(coef.size)
        self.condition_number_ = _cond(X)


class BlockCalibrator(_BaseCalibrator):
    """Two independent solves: (fz, tx, ty) from the lower eight channels,
    (fx, fy, tz) from all sixteen.  The upper-right block stays exactly zero."""

    strategy = "block"
    _min_samples = N_CHANNELS

    def __init__(self, ridge=0.0, rcond=1e-10):
        self.ridge = ridge
        self.rcond = rcond

    def _fit(self, X, y):
        B_l = _lstsq(X[:, :8], y[:, LOWER_AXES], self.ridge, self.rcond).T  # (3, 8)
        B_u = _lstsq(X, y[:, UPPER_AXES], self.ridge, self.rcond).T  # (3, 16)
        K = np.zeros((6, N_CHANNELS))
        K[:3] = B_u
        K[3:, :8] = B_l
        self.K_ = K
        self.n_params_ = int(B_l.size + B_u.size)
        self.condition_number_ = max(_cond(X[:, :8]), _cond(X))


def structured_design(y, layout: SensorGeometry, kappa=1.0) -> np.ndarray:
    """Regressors of the pressure response on the six sensitivities.

    Returns an (n, 16, 6) array ``G`` with ``dp = G @ scalars`` for every
    sample.  Scalars are ordered as :data:`SCALAR_NAMES`.
    """
    layout = build_layout(layout)
    kappa = np.broadcast_to(np.asarray(kappa, dtype=float), (N_CHANNELS,))
    y = np.asarray(y, dtype=float)
    fx, fy, fz, tx, ty, tz = y.T
    txy_l = direction_matrix_txy(layout, "lower")
    txy_u = direction_matrix_txy(layout, "upper")
    ttz = np.asarray(layout.upper_pairing, dtype=float)
    G = np.zeros((len(y), N_CHANNELS, 6))
    G[:, :8, 0] = -fz[:, None]
    G[:, :8, 1] = np.column_stack([tx, ty]) @ txy_l.T
    G[:, 8:, 2] = np.column_stack([fx, fy]) @ txy_u.T
    G[:, 8:, 3] = tz[:, None] * ttz
    G[:, 8:, 4] = -fz[:, None]
    G[:, 8:, 5] = np.column_stack([tx, ty]) @ txy_u.T
    return G * kappa[None, :, None]


class StructuredCalibrator(_BaseCalibrator):
    """Fit the six layer sensitivities and build ``K`` from the layout.

    The pressure response is linear in the sensitivities once the layout is
    fixed, so the fit is an ordinary least-squares problem with six unknowns.
    With ``kappa=1`` the fitted scalars absorb the gas stiffness
    (``kappa * alpha_l`` and so on); pass the true per-channel ``kappa`` to
    recover the bare sensitivities instead.

    Parameters
    ----------
    layout : SensorGeometry, optional
        Chamber arrangement; the default geometry when omitted.
    kappa : float or array of 16
    min_sensitivity : float
        A scalar whose contribution to the fitted pressures is below this
        fraction of the pressure signal is reported as degenerate.
    """

    strategy = "structured"
    _min_samples = 6

    def __init__(self, layout=None, kappa=1.0, min_sensitivity=1e-9):
        self.layout = layout
        self.kappa = kappa
        self.min_sensitivity = min_sensitivity

    def _fit(self, X, y):
        layout = build_layout(self.layout)
        G = structured_design(y, layout, self.kappa)
        D = G.reshape(-1, 6)
        target = X.reshape(-1)
        theta, *_ = np.linalg.lstsq(D, target, rcond=None)
        col_norm = np.linalg.norm(D, axis=0)
        signal = np.linalg.norm(target)
        weak = np.abs(theta) * col_norm <= self.min_sensitivity * signal
        if np.any(weak):
            names = [n for n, w in zip(SCALAR_NAMES, weak) if w]
            raise DegenerateSensitivityError(f"near-zero fitted sensitivity: {', '.join(names)}")
        self.scalars_ = theta
        self.K_ = assemble_k(theta, layout, self.kappa)
        self.n_params_ = int(theta.size)
        self.condition_number_ = _cond(D)
        resid = (target - D @ theta).reshape(X.shape)
        self.pressure_residual_rms_ = np.sqrt(np.mean(resid**2, axis=0))


STRATEGIES = {
    "dense": DenseCalibrator,
    "block": BlockCalibrator,
    "structured": StructuredCalibrator,
}


def make_calibrator(strategy: str, **kwargs):
    try:
        cls = STRATEGIES[strategy]
    except KeyError:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(STRATEGIES)}") from None
    return cls(**kwargs)


def baseline_rows(t, wrench, tare_seconds=0.5):
    """Indices of no-load rows used to tare a calibration log.

    Rows whose reference wrench is exactly zero are preferred; if there are
    none, the first ``tare_seconds`` of the log are used.
    """
    t = np.asarray(t)
    idle = np.flatnonzero(np.all(np.asarray(wrench) == 0, axis=1))
    if idle.size:
        return idle
    rows = np.flatnonzero(t - t[0] < tare_seconds)
    if rows.size == 0:
        raise ValueError("empty taring window")
    return rows


def calibrate_log(log, strategy="structured", tare_seconds=0.5, **kwargs):
    """Tare and fit a :class:`~hexwrench.simulation.SimLog`; returns a CalibrationResult."""
    from .decoupler import tare

    rows = baseline_rows(log.t, log.wrench, tare_seconds)
    baseline = tare(log.pressure[rows])
    dp = log.pressure - baseline
    est = make_calibrator(strategy, **kwargs).fit(dp, log.wrench)
    return est.result(baseline=baseline)


__all__ = [
    "assemble_k",
    "structured_design",
    "CalibrationResult",
    "DenseCalibrator",
    "BlockCalibrator",
    "StructuredCalibrator",
    "DegenerateSensitivityError",
    "InsufficientExcitationError",
    "make_calibrator",
    "baseline_rows",
    "calibrate_log",
    "STRATEGIES",
]
