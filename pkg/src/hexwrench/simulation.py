"""Synthetic sensor logs: load profiles pushed through the forward model.

Imperfections are applied in a fixed order: first-order lag on the load,
then on each pressure channel a play (backlash) operator, white noise, a
random-walk drift and finally quantisation to the barometer resolution.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from .model import AXES, SensorModel

BAROMETER_RESOLUTION = 3.9  # Pa (0.039 mbar)
DEFAULT_RATE = 1024.0
FREQUENCY_PRESETS = {"LF": 0.2, "MF": 1.0, "HF": 5.0}
WAVEFORM_KINDS = ("ramp", "sine", "random_walk")


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Waveform:
    """One component of a load profile, active on ``[start, stop)`` seconds.

    ``ramp`` is a triangular upload-download wave from 0 to ``amplitude``;
    give either ``cycles`` (over the window) or ``frequency``.  ``sine`` uses
    ``frequency``.  ``random_walk`` is a seeded walk rescaled so its peak
    magnitude equals ``amplitude``.
    """

    axis: str
    kind: str
    amplitude: float
    frequency: Optional[float] = None
    cycles: Optional[float] = None
    start: float = 0.0
    stop: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.axis not in AXES:
            raise ProfileError(f"unknown axis {self.axis!r}")
        if self.kind not in WAVEFORM_KINDS:
            raise ProfileError(f"unknown waveform kind {self.kind!r}")
        if self.kind == "ramp" and (self.cycles is None) == (self.frequency is None):
            raise ProfileError("ramp needs exactly one of cycles or frequency")
        if self.kind == "sine" and self.frequency is None:
            raise ProfileError("sine needs a frequency")

    def sample(self, t: np.ndarray, duration: float) -> np.ndarray:
        stop = duration if self.stop is None else self.stop
        active = (t >= self.start) & (t < stop)
        out = np.zeros_like(t)
        tau = t[active] - self.start
        if self.kind == "ramp":
            if self.cycles is not None:
                phase = np.mod(tau * self.cycles / (stop - self.start), 1.0)
            else:
                phase = np.mod(tau * self.frequency, 1.0)
            out[active] = self.amplitude * (1.0 - np.abs(2.0 * phase - 1.0))
        elif self.kind == "sine":
            out[active] = self.amplitude * np.sin(2 * math.pi * self.frequency * tau)
        else:
            rng = np.random.default_rng(self.seed)
            walk = np.cumsum(rng.standard_normal(tau.size))
            walk -= walk[0]
            peak = np.max(np.abs(walk)) if walk.size else 0.0
            out[active] = self.amplitude * walk / peak if peak > 0 else 0.0
        return out


@dataclass(frozen=True)
class ProfileSpec:
    sample_rate: float = DEFAULT_RATE
    duration: float = 10.0
    waveforms: tuple = ()
    force_capacity: float = 50.0
    torque_capacity: float = 1.0

    def __post_init__(self):
        if self.sample_rate <= 0 or self.duration <= 0:
            raise ProfileError("sample_rate and duration must be positive")
        waves = tuple(w if isinstance(w, Waveform) else Waveform(**w) for w in self.waveforms)
        object.__setattr__(self, "waveforms", waves)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["waveforms"] = [dataclasses.asdict(w) for w in self.waveforms]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProfileSpec":
        return cls(**d)


@dataclass(frozen=True)
class LoadProfile:
    spec: ProfileSpec
    t: np.ndarray
    wrench: np.ndarray  # (n, 6) canonical

    @property
    def sample_rate(self) -> float:
        return self.spec.sample_rate

    @property
    def dt(self) -> float:
        return 1.0 / self.spec.sample_rate


def generate_profile(spec) -> LoadProfile:
    """Sample every waveform and check the summed load against capacity."""
    if isinstance(spec, dict):
        spec = ProfileSpec.from_dict(spec)
    n = int(round(spec.duration * spec.sample_rate))
    t = np.arange(n) / spec.sample_rate
    wrench = np.zeros((n, 6))
    for w in spec.waveforms:
        wrench[:, AXES.index(w.axis)] += w.sample(t, spec.duration)
    limits = [spec.force_capacity] * 3 + [spec.torque_capacity] * 3
    for i, (axis, cap) in enumerate(zip(AXES, limits)):
        peak = np.max(np.abs(wrench[:, i])) if n else 0.0
        if peak > cap * (1 + 1e-12):
            raise ProfileError(f"capacity exceeded on axis {axis}: peak {peak:g} > {cap:g}")
    return LoadProfile(spec=spec, t=t, wrench=wrench)


def upload_download_spec(axis, amplitude, frequency=None, cycles=None, duration=10.0,
                         sample_rate=DEFAULT_RATE, rest=0.0, **caps) -> ProfileSpec:
    """Single-axis triangular loading, optionally after ``rest`` seconds unloaded."""
    wave = Waveform(axis=axis, kind="ramp", amplitude=amplitude, frequency=frequency,
                    cycles=cycles, start=rest)
    return ProfileSpec(sample_rate=sample_rate, duration=duration, waveforms=(wave,), **caps)


def default_profile_spec(duration=10.0, sample_rate=DEFAULT_RATE, rest=0.5,
                         cycles_per_axis=2, force=50.0, torque=1.0) -> ProfileSpec:
    """Rest, then each axis in turn ramped to capacity ``cycles_per_axis`` times."""
    slot = (duration - rest) / len(AXES)
    waves = []
    for i, axis in enumerate(AXES):
        amp = force if i < 3 else torque
        start = rest + i * slot
        waves.append(Waveform(axis=axis, kind="ramp", amplitude=amp, cycles=cycles_per_axis,
                              start=start, stop=start + slot))
    return ProfileSpec(sample_rate=sample_rate, duration=duration, waveforms=tuple(waves),
                       force_capacity=force, torque_capacity=torque)


def random_profile_spec(duration=10.0, sample_rate=DEFAULT_RATE, seed=0, force=50.0,
                        torque=1.0, fraction=0.5) -> ProfileSpec:
    """All six axes driven by independent random walks (for calibration)."""
    waves = tuple(
        Waveform(axis=axis, kind="random_walk", amplitude=(force if i < 3 else torque) * fraction,
                 seed=seed * 6 + i)
        for i, axis in enumerate(AXES)
    )
    return ProfileSpec(sample_rate=sample_rate, duration=duration, waveforms=waves,
                       force_capacity=force, torque_capacity=torque)


@dataclass(frozen=True)
class NoiseConfig:
    """Imperfection settings; all amplitudes in Pa, ``tau`` per axis in s."""

    gaussian_std: float = 2000.0
    drift_rw_std: float = 4.0
    quant_step: float = BAROMETER_RESOLUTION
    hysteresis_play: float = 600.0
    seed: int = 0
    tau: Optional[Sequence[float]] = (0.0036, 0.0038, 0.0018, 0.0033, 0.0026, 0.0049)

    def __post_init__(self):
        for name in ("gaussian_std", "drift_rw_std", "quant_step", "hysteresis_play"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        if self.tau is not None:
            tau = tuple(float(v) for v in self.tau)
            if len(tau) != 6 or any(not v >= 0 for v in tau):
                raise ValueError("tau needs six non-negative time constants")
            object.__setattr__(self, "tau", tau)

    @classmethod
    def clean(cls, seed: int = 0) -> "NoiseConfig":
        return cls(gaussian_std=0.0, drift_rw_std=0.0, quant_step=0.0, hysteresis_play=0.0,
                   seed=seed, tau=None)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["tau"] = None if self.tau is None else list(self.tau)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseConfig":
        return cls(**d)


@dataclass
class SimLog:
    """Paired reference wrench and absolute chamber pressures at a fixed rate."""

    t: np.ndarray
    wrench: np.ndarray  # (n, 6) canonical reference load
    pressure: np.ndarray  # (n, 16) Pa absolute, lower 1-8 then upper 1-8
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.wrench = np.asarray(self.wrench, dtype=float).reshape(len(self.t), 6)
        self.pressure = np.asarray(self.pressure, dtype=float).reshape(len(self.t), 16)

    def __len__(self):
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else float("nan")

    def slice(self, rows) -> "SimLog":
        return SimLog(self.t[rows], self.wrench[rows], self.pressure[rows], dict(self.metadata))


def apply_hysteresis(series, play: float) -> np.ndarray:
    """Play (backlash) operator along axis 0: y_t = clamp(y_{t-1}, x_t - play, x_t + play).

    The output starts at the first input sample, so ``play=0`` is the identity.
    """
    if play < 0:
        raise ValueError("play must be non-negative")
    x = np.asarray(series, dtype=float)
    if play == 0 or len(x) == 0:
        return x.copy()
    y = np.empty_like(x)
    prev = x[0]
    for i in range(len(x)):
        prev = np.minimum(np.maximum(prev, x[i] - play), x[i] + play)
        y[i] = prev
    return y


def apply_dynamics(series, tau: float, dt: float) -> np.ndarray:
    """First-order lag 1/(tau s + 1), zero-order-hold discretised along axis 0.

    y_t = y_{t-1} + g (x_t - y_{t-1}) with g = 1 - exp(-dt / tau); the
    filter starts at rest on the first sample.  ``tau=0`` passes through.
    """
    if tau < 0 or dt <= 0:
        raise ValueError("need tau >= 0 and dt > 0")
    x = np.asarray(series, dtype=float)
    if tau == 0 or len(x) == 0:
        return x.copy()
    g = -math.expm1(-dt / tau)
    zi = ((1 - g) * x[0])[None, ...] if x.ndim > 1 else np.array([(1 - g) * x[0]])
    y, _ = lfilter([g], [1.0, g - 1.0], x, axis=0, zi=zi)
    return y


def simulate(profile, model: SensorModel | None = None, noise: NoiseConfig | None = None) -> SimLog:
    """Run a load profile through the model; deterministic for a given seed."""
    if not isinstance(profile, LoadProfile):
        profile = generate_profile(profile)
    model = model if model is not None else SensorModel()
    noise = noise if noise is not None else NoiseConfig()
    w = profile.wrench
    if noise.tau is not None:
        w = np.column_stack([apply_dynamics(w[:, i], noise.tau[i], profile.dt) for i in range(6)])
    dp = model.pressures(w)
    dp = apply_hysteresis(dp, noise.hysteresis_play)
    rng = np.random.default_rng(noise.seed)
    if noise.gaussian_std > 0:
        dp = dp + rng.normal(0.0, noise.gaussian_std, dp.shape)
    if noise.drift_rw_std > 0:
        dp = dp + np.cumsum(rng.normal(0.0, noise.drift_rw_std, dp.shape), axis=0)
    if noise.quant_step > 0:
        dp = noise.quant_step * np.round(dp / noise.quant_step)
    p_abs = model.gas.p0 + dp
    metadata = {
        "schema_version": 1,
        "sample_rate": profile.spec.sample_rate,
        "seed": noise.seed,
        "model_hash": model.fingerprint(),
        "profile": profile.spec.to_dict(),
        "noise": noise.to_dict(),
    }
    return SimLog(t=profile.t.copy(), wrench=profile.wrench.copy(), pressure=p_abs, metadata=metadata)
