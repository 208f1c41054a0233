import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexwrench import SensorGeometry, SensorModel, Wrench, build_layout
from hexwrench.model import (
    CANONICAL_FROM_SENSOR,
    SENSOR_ORDER,
    ChamberGasState,
    LayoutError,
    MaterialParams,
    coupling_matrices,
    deformation_strains,
    direction_matrix_txy,
    dv_normal_force,
    dv_shear_force,
    dv_torque_xy,
    dv_torque_z,
    pressure_from_volume,
)

from .conftest import random_wrenches

# Frozen from a hand evaluation of the compression coefficient with
# R0=40 mm, r0=6 mm, h0=8 mm, E=0.5 MPa, nu=0.49, S=pi r0^2, arc pi/8.
ALPHA_REF = 5.486777777777777e-08
DV_50N_REF = -2.7433888888888884e-06
BETA_REF = 3.878570595384358e-08
LAMBDA_REF = 1.5903115591393496e-06
XI_REF = 3.225115766814168e-07
ROW_REF = 0.3901806440322565  # 2 sin(pi/16); also matches a 2e5-point midpoint quadrature

layout = build_layout()
params = MaterialParams()


def rotate_inplane(w, angle):
    c, s = math.cos(angle), math.sin(angle)
    out = np.array(w, dtype=float)
    for i, j in ((0, 1), (3, 4)):
        out[..., i] = c * w[..., i] - s * w[..., j]
        out[..., j] = s * w[..., i] + c * w[..., j]
    return out


def test_default_layout_centers():
    assert np.allclose(layout.chamber_centers_lower, [k * math.pi / 4 for k in range(8)])
    upper = np.asarray(layout.chamber_centers_upper)
    assert np.allclose(upper[::2], np.arange(4) * math.pi / 2 - math.pi / 8)
    assert np.allclose(upper[1::2], np.arange(4) * math.pi / 2 + math.pi / 8)
    assert layout.upper_pairing == (1, -1, 1, -1, 1, -1, 1, -1)


def test_overlapping_arcs_rejected():
    with pytest.raises(LayoutError, match="overlap"):
        build_layout(SensorGeometry(lower_arc_span=math.pi / 3))
    with pytest.raises(LayoutError):
        SensorGeometry(pillar_radius=0.05)
    with pytest.raises(LayoutError):
        SensorGeometry(upper_pairing=(1, 1, 1, 1, 1, -1, -1, 1))


def test_direction_matrix_closed_form():
    T = direction_matrix_txy(layout, "lower")
    assert T[0] == pytest.approx([ROW_REF, 0.0], abs=1e-15)
    assert T[2] == pytest.approx([0.0, ROW_REF], abs=1e-15)
    assert np.allclose(T.sum(axis=0), 0.0, atol=1e-15)
    assert np.allclose(T[:4], -T[4:], atol=1e-15)


def test_compression_coefficient_matches_hand_value():
    dv = dv_normal_force(50.0, params, layout)
    assert np.all(dv == dv[0])
    assert dv[0] == pytest.approx(DV_50N_REF, rel=1e-12)
    c = coupling_matrices(params, params, layout)
    assert c.alpha_l == pytest.approx(ALPHA_REF, rel=1e-12)
    assert c.beta_u == pytest.approx(BETA_REF, rel=1e-12)
    assert c.lambda_l == pytest.approx(LAMBDA_REF, rel=1e-12)
    assert c.xi_u == pytest.approx(XI_REF, rel=1e-12)


def test_zero_loads_give_zero_volume():
    for dv in (dv_normal_force(0, params, layout), dv_shear_force(0, 0, params, layout),
               dv_torque_z(0, params, layout), dv_torque_xy(0, 0, params, layout)):
        assert np.all(dv == 0)


def test_shear_antisymmetry_and_lower_layer_silence():
    dv = dv_shear_force(10.0, 0.0, params, layout, layer="upper")
    T = direction_matrix_txy(layout, "upper")
    assert np.allclose(dv, 10.0 * BETA_REF * T[:, 0], rtol=1e-12)
    assert np.allclose(dv[:4], -dv[4:], rtol=1e-12)
    assert np.all(dv_shear_force(3.0, -7.0, params, layout, layer="lower") == 0)
    assert np.all(dv_torque_z(0.5, params, layout, layer="lower") == 0)


def test_twist_pattern():
    dv = dv_torque_z(1.0, params, layout)
    assert np.allclose(np.abs(dv), abs(dv[0]))
    assert np.all(np.sign(dv) == np.sign(XI_REF) * np.asarray(layout.upper_pairing))
    assert abs(dv.sum()) < 1e-20


def test_tilt_quarter_turn_relation():
    a = dv_torque_xy(0.4, 0.0, params, layout)
    b = dv_torque_xy(0.0, 0.4, params, layout)
    assert np.allclose(np.roll(a, 2), b, rtol=1e-12, atol=1e-20)
    # chambers at pi/2 and 3pi/2 lie on the neutral line of a pure tx tilt
    assert abs(a[2]) < 1e-20 and abs(a[6]) < 1e-20


def test_rank_of_default_blocks():
    c = coupling_matrices(params, params, layout)
    assert np.linalg.matrix_rank(c.T_l) == 3
    assert np.linalg.matrix_rank(c.T_u1) == 3


def test_collapsed_layout_is_rank_deficient():
    collapsed = dataclasses.replace(layout, chamber_centers_lower=(0.0,) * 8,
                                    chamber_centers_upper=(0.0,) * 8)
    with pytest.raises(LayoutError, match="rank"):
        coupling_matrices(params, params, collapsed)
    with pytest.raises(LayoutError, match="overlap"):
        build_layout(collapsed)


def test_modulus_scaling():
    c1 = coupling_matrices(params, params, layout)
    c2 = coupling_matrices(params.scaled_modulus(2.0), params.scaled_modulus(2.0), layout)
    assert np.allclose(c2.scalars, c1.scalars / 2, rtol=1e-14)
    assert np.array_equal(c1.T_xy_lower, c2.T_xy_lower)
    assert np.array_equal(c1.T_Tz, c2.T_Tz)
    assert np.array_equal(c1.T_Fz, c2.T_Fz)


def test_gas_law_arithmetic():
    gas = ChamberGasState(p0=1.0e5, v0=1.0e-6)
    dp = pressure_from_volume(np.full(16, -1.0e-8), gas)
    assert np.allclose(dp, 1.0e3, rtol=1e-12)
    assert np.all(pressure_from_volume(np.zeros(16), gas) == 0)


def test_oracle_equivalence_with_single_load_cases(model, rng):
    W = random_wrenches(rng, 1000)
    got = model.volumes(W)
    lo, up = model.lower, model.upper
    g = model.geometry
    expected = np.empty_like(got)
    for n, (fx, fy, fz, tx, ty, tz) in enumerate(W):
        expected[n, :8] = (dv_normal_force(fz, lo, g, "lower") + dv_shear_force(fx, fy, lo, g, "lower")
                           + dv_torque_z(tz, lo, g, "lower") + dv_torque_xy(tx, ty, lo, g, "lower"))
        expected[n, 8:] = (dv_normal_force(fz, up, g, "upper") + dv_shear_force(fx, fy, up, g, "upper")
                           + dv_torque_z(tz, up, g, "upper") + dv_torque_xy(tx, ty, up, g, "upper"))
    scale = np.max(np.abs(got))
    assert np.max(np.abs(got - expected)) < 1e-12 * scale


def test_layer_selectivity_and_symmetries(model):
    assert np.all(model.pressures([3.0, -2.0, 0, 0, 0, 0.4])[:8] == 0)
    fz = model.pressures([0, 0, 20.0, 0, 0, 0])
    assert np.all(fz[:8] == fz[0]) and np.all(fz[8:] == fz[8])
    assert np.all(fz > 0)  # compression raises pressure
    tz = model.pressures([0, 0, 0, 0, 0, 1.0])
    assert abs(tz[8:].sum()) < 1e-9 * np.abs(tz).max()


def test_rotation_by_pitch_permutes_pattern(model, rng):
    W = random_wrenches(rng, 50)
    W[:, 5] = 0.0
    base = model.pressures(W)
    # a quarter turn of the load moves every pattern two chambers along both layers
    turned = model.pressures(rotate_inplane(W, math.pi / 2))
    assert np.allclose(turned[:, :8], np.roll(base[:, :8], 2, axis=1), atol=1e-9)
    assert np.allclose(turned[:, 8:], np.roll(base[:, 8:], 2, axis=1), atol=1e-9)
    # the even lower layout also permutes under its own pitch
    lower_only = W.copy()
    lower_only[:, [0, 1]] = 0
    b = model.pressures(lower_only)[:, :8]
    t = model.pressures(rotate_inplane(lower_only, math.pi / 4))[:, :8]
    assert np.allclose(t, np.roll(b, 1, axis=1), atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=6, max_size=6),
       st.lists(st.floats(-50, 50), min_size=6, max_size=6),
       st.floats(-3, 3))
def test_superposition_property(a, b, s):
    model = SensorModel()
    a, b = np.array(a), np.array(b)
    lhs = model.pressures(s * a + b)
    rhs = s * model.pressures(a) + model.pressures(b)
    scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1.0)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


def test_wrench_order_helpers():
    w = Wrench(1, 2, 3, 4, 5, 6)
    assert w.sensor_order().tolist() == [1, 2, 6, 3, 4, 5]
    assert np.array_equal(w.sensor_order()[CANONICAL_FROM_SENSOR], w.as_array())
    assert np.array_equal(w.as_array()[SENSOR_ORDER], w.sensor_order())
    assert (w + w * 2).as_array().tolist() == [3, 6, 9, 12, 15, 18]
    assert not Wrench(fz=60).within_capacity()


def test_strains_linear_in_load():
    w = Wrench(3.0, 4.0, 10.0, 0.2, 0.1, 0.3)
    s1 = deformation_strains(w, params, layout)
    s2 = deformation_strains(w * 2, params, layout)
    for name in ("eps_zz", "eps_zx", "gamma_shear", "gamma1", "gamma2", "eps_edge", "gamma_tilt"):
        assert getattr(s2, name) == pytest.approx(2 * getattr(s1, name))
    assert s1.shear_direction == pytest.approx(math.atan2(4, 3))


def test_model_dict_round_trip(model):
    again = SensorModel.from_dict(model.to_dict())
    assert again.fingerprint() == model.fingerprint()
    assert np.array_equal(again.pressure_matrix, model.pressure_matrix)
    with pytest.raises(ValueError, match="schema_version"):
        SensorModel.from_dict({**model.to_dict(), "schema_version": 99})
