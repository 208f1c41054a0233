import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexwrench import (
    Decoupler,
    NoiseConfig,
    ProfileSpec,
    Waveform,
    default_profile_spec,
    generate_profile,
    simulate,
    upload_download_spec,
)
from hexwrench.metrics import e_dri, e_hys
from hexwrench.simulation import ProfileError, apply_dynamics, apply_hysteresis


def triangle(amplitude, cycles, n_per_cycle=400):
    up = np.linspace(0, amplitude, n_per_cycle // 2 + 1)
    one = np.concatenate([up, up[-2:0:-1]])
    return np.concatenate([np.tile(one, cycles), [0.0]])


def trace_play(x, play):
    """Loop-by-loop trace of a backlash element, written out branch by branch."""
    y = [x[0]]
    for v in x[1:]:
        prev = y[-1]
        if v - play > prev:
            y.append(v - play)
        elif v + play < prev:
            y.append(v + play)
        else:
            y.append(prev)
    return np.array(y)


def shoelace(x, y):
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def test_ramp_profile_shape():
    prof = generate_profile(upload_download_spec("fz", 50.0, cycles=1))
    assert len(prof.t) == 10240
    assert prof.wrench[:, 2].max() == 50.0
    assert np.all(prof.wrench[:, [0, 1, 3, 4, 5]] == 0)
    fz = prof.wrench[:, 2]
    assert fz[5120] == 50.0
    assert np.allclose(fz[1:5120], fz[5121:][::-1], atol=1e-12)  # symmetric up/down
    assert np.allclose(np.diff(fz[:5120]), 50.0 / 5120)


def test_sine_respects_amplitude():
    spec = ProfileSpec(waveforms=(Waveform("tz", "sine", 1.0, frequency=5.0),))
    tz = generate_profile(spec).wrench[:, 5]
    assert np.max(np.abs(tz)) == pytest.approx(1.0, abs=1e-12)


def test_cycles_are_identical():
    prof = generate_profile(upload_download_spec("fx", 40.0, cycles=6, duration=6.0,
                                                 sample_rate=1000))
    loops = prof.wrench[:, 0].reshape(6, -1)
    assert np.allclose(loops, loops[0], atol=1e-12)


def test_capacity_violation_names_axis():
    with pytest.raises(ProfileError, match="ty"):
        generate_profile(upload_download_spec("ty", 1.5, cycles=1))


def test_clean_simulation_matches_forward_model(model):
    log = simulate(default_profile_spec(), model, NoiseConfig.clean())
    assert np.array_equal(log.pressure, model.gas.p0 + model.pressures(log.wrench))
    assert np.all(np.diff(log.t) > 0)
    assert log.metadata["model_hash"] == model.fingerprint()


def test_zero_noise_round_trip_with_true_k(model, clean_log):
    dec = Decoupler(K=model.true_k(), baseline=model.gas.p0)
    w = dec.transform(clean_log.pressure)
    err = np.max(np.abs(w - clean_log.wrench), axis=0) / model.full_scale
    assert np.all(err < 1e-9)


def test_quantisation_grid(model):
    noise = NoiseConfig(gaussian_std=50.0, drift_rw_std=1.0, hysteresis_play=0.0, tau=None, seed=4)
    log = simulate(upload_download_spec("fz", 50.0, cycles=2, duration=2.0), model, noise)
    k = (log.pressure - model.gas.p0) / 3.9
    assert np.max(np.abs(k - np.round(k))) < 1e-6


def test_same_seed_is_bit_identical(model):
    a = simulate(default_profile_spec(), model, NoiseConfig(seed=11))
    b = simulate(default_profile_spec(), model, NoiseConfig(seed=11))
    c = simulate(default_profile_spec(), model, NoiseConfig(seed=12))
    assert np.array_equal(a.pressure, b.pressure)
    assert not np.array_equal(a.pressure, c.pressure)


def test_play_zero_is_identity():
    x = np.random.default_rng(0).normal(size=(100, 3))
    assert np.array_equal(apply_hysteresis(x, 0.0), x)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 5.0), st.integers(0, 1000))
def test_play_matches_branch_trace(play, seed):
    x = np.cumsum(np.random.default_rng(seed).normal(size=300))
    assert np.allclose(apply_hysteresis(x, play), trace_play(x, play), rtol=0, atol=1e-12)


def test_play_loop_width_and_hysteresis_metric():
    A, p = 50.0, 2.0
    x = triangle(A, 3)
    y = apply_hysteresis(x, p)
    # steady loop: loading y = x - p, unloading y = x + p away from the turning points
    cyc = slice(400, 800)
    assert np.max(y[cyc]) == pytest.approx(A - p)
    mid = np.abs(x[cyc] - A / 2) < 5
    widths = np.abs(y[cyc][mid] - x[cyc][mid])
    assert np.allclose(widths, p)
    assert e_hys(y, x) == pytest.approx(p / (A - p), rel=1e-12)


def test_loop_area_grows_with_play():
    x = triangle(50.0, 2)
    cyc = slice(400, 801)
    areas = [shoelace(x[cyc], apply_hysteresis(x, p)[cyc]) for p in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert areas[0] == pytest.approx(0.0, abs=1e-9)
    assert all(b >= a for a, b in zip(areas, areas[1:]))


def test_zoh_step_response():
    tau = 0.0034
    dt = tau / 100
    x = np.r_[0.0, np.ones(500)]
    y = apply_dynamics(x, tau, dt)
    assert y[100] == pytest.approx(1 - math.exp(-1), rel=1e-12)
    assert y[100] == pytest.approx(0.632, abs=5e-4)
    assert np.array_equal(apply_dynamics(x, 0.0, dt), x)


def test_dynamics_starts_at_rest_on_first_sample():
    x = np.full(20, 7.0)
    assert np.allclose(apply_dynamics(x, 0.01, 1e-3), 7.0)


def test_drift_metric_scales_with_walk_step(model):
    spec = ProfileSpec(duration=5.0)
    dec = Decoupler(K=model.true_k(), baseline=model.gas.p0)
    vals = []
    for step in (4.0, 8.0):
        noise = NoiseConfig(gaussian_std=0, drift_rw_std=step, quant_step=0, hysteresis_play=0,
                            tau=None, seed=3)
        w = dec.transform(simulate(spec, model, noise).pressure)
        vals.append([e_dri(w[:, i], fs) for i, fs in enumerate(model.full_scale)])
    assert np.allclose(np.array(vals[1]) / np.array(vals[0]), 2.0, rtol=1e-9)


def test_noise_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(gaussian_std=-1)
    with pytest.raises(ValueError):
        NoiseConfig(tau=(0.1, 0.1))
    cfg = NoiseConfig(seed=5)
    assert NoiseConfig.from_dict(cfg.to_dict()) == cfg


def test_profile_spec_round_trip():
    spec = default_profile_spec()
    assert ProfileSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ProfileError):
        Waveform("fq", "ramp", 1.0, cycles=1)
