"""Forward physics of the two-layer, 16-chamber pneumatic force/torque sensor.

Each layer holds eight air chambers arranged around a central pillar.  The
lower (reinforced) layer only deforms under Fz, Tx and Ty; the upper (soft)
layer deforms under all six wrench components.  Every load case maps
linearly to per-chamber volume changes, and the linearised ideal-gas law maps
volume changes to pressure changes.

Wrenches are stored in canonical order ``(fx, fy, fz, tx, ty, tz)``.  The
decoupling matrix rows use the sensor order ``(fx, fy, tz, fz, tx, ty)``;
``SENSOR_ORDER`` converts between the two.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "AXES",
    "SENSOR_AXES",
    "SENSOR_ORDER",
    "CANONICAL_FROM_SENSOR",
    "N_CHANNELS",
    "LayoutError",
    "Wrench",
    "SensorGeometry",
    "MaterialParams",
    "ChamberGasState",
    "CouplingMatrices",
    "DeformationStrains",
    "SensorModel",
    "build_layout",
    "direction_matrix_txy",
    "dv_normal_force",
    "dv_shear_force",
    "dv_torque_z",
    "dv_torque_xy",
    "coupling_matrices",
    "volumes_from_wrench",
    "pressure_from_volume",
    "deformation_strains",
    "to_sensor_order",
    "from_sensor_order",
]

AXES = ("fx", "fy", "fz", "tx", "ty", "tz")
SENSOR_AXES = ("fx", "fy", "tz", "fz", "tx", "ty")
# sensor_vector = canonical_vector[SENSOR_ORDER]
SENSOR_ORDER = np.array([0, 1, 5, 2, 3, 4])
# canonical_vector = sensor_vector[CANONICAL_FROM_SENSOR]
CANONICAL_FROM_SENSOR = np.argsort(SENSOR_ORDER)
N_CHANNELS = 16
N_PER_LAYER = 8

# Disjointness check slack for arcs that merely touch.
_ARC_EPS = 1e-12


class LayoutError(ValueError):
    """Raised for inconsistent chamber geometry or a degenerate layout."""


def to_sensor_order(w):
    """Reorder the last axis from (fx,fy,fz,tx,ty,tz) to (fx,fy,tz,fz,tx,ty)."""
    return np.asarray(w)[..., SENSOR_ORDER]


def from_sensor_order(w):
    return np.asarray(w)[..., CANONICAL_FROM_SENSOR]


@dataclass(frozen=True)
class Wrench:
    """Six-axis load: forces in N, torques in N*m."""

    fx: float = 0.0
    fy: float = 0.0
    fz: float = 0.0
    tx: float = 0.0
    ty: float = 0.0
    tz: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_array()):
            raise ValueError(f"wrench components must be finite: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.fx, self.fy, self.fz, self.tx, self.ty, self.tz], dtype=float)

    def sensor_order(self) -> np.ndarray:
        return self.as_array()[SENSOR_ORDER]

    @classmethod
    def from_array(cls, values) -> "Wrench":
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.shape != (6,):
            raise ValueError(f"expected 6 wrench components, got {values.shape[0]}")
        return cls(*(float(v) for v in values))

    def __add__(self, other: "Wrench") -> "Wrench":
        return Wrench.from_array(self.as_array() + other.as_array())

    def __mul__(self, s: float) -> "Wrench":
        return Wrench.from_array(self.as_array() * s)

    __rmul__ = __mul__

    def within_capacity(self, force: float = 50.0, torque: float = 1.0) -> bool:
        a = np.abs(self.as_array())
        return bool(np.all(a[:3] <= force) and np.all(a[3:] <= torque))


@dataclass(frozen=True)
class SensorGeometry:
    """Chamber geometry shared by both layers (SI units, angles in rad).

    ``chamber_centers_lower``/``chamber_centers_upper`` may be left as
    ``None``; :func:`build_layout` fills in the default arrangement: eight
    evenly spaced lower chambers and four adjacent upper pairs.
    """

    outer_radius: float = 0.040
    pillar_radius: float = 0.006
    layer_height: float = 0.008
    lower_arc_span: float = math.pi / 8
    upper_arc_span: float = math.pi / 8
    upper_pair_half_gap: float = math.pi / 8
    chamber_centers_lower: Optional[tuple] = None
    chamber_centers_upper: Optional[tuple] = None
    upper_pairing: tuple = (1, -1, 1, -1, 1, -1, 1, -1)

    def __post_init__(self):
        if not (0 < self.pillar_radius < self.outer_radius):
            raise LayoutError(
                f"need 0 < pillar_radius < outer_radius, got r0={self.pillar_radius}, "
                f"R0={self.outer_radius}"
            )
        if self.layer_height <= 0:
            raise LayoutError("layer_height must be positive")
        if self.lower_arc_span <= 0 or self.upper_arc_span <= 0:
            raise LayoutError("arc spans must be positive")
        for name in ("chamber_centers_lower", "chamber_centers_upper", "upper_pairing"):
            value = getattr(self, name)
            if value is not None:
                value = tuple(float(v) for v in value)
                if len(value) != N_PER_LAYER:
                    raise LayoutError(f"{name} needs {N_PER_LAYER} entries, got {len(value)}")
                object.__setattr__(self, name, value)
        pairing = self.upper_pairing
        if any(p not in (1.0, -1.0) for p in pairing):
            raise LayoutError(f"upper_pairing entries must be +1 or -1, got {pairing}")
        if sum(1 for p in pairing if p > 0) != 4:
            raise LayoutError("upper_pairing must contain four +1 and four -1 entries")

    @property
    def mean_radius(self) -> float:
        return 0.5 * (self.outer_radius + self.pillar_radius)

    @property
    def is_built(self) -> bool:
        return self.chamber_centers_lower is not None and self.chamber_centers_upper is not None

    def arcs(self, layer: str) -> np.ndarray:
        """(8, 2) array of chamber arc bounds [theta1, theta2] for ``layer``."""
        if not self.is_built:
            raise LayoutError("geometry has no chamber centers; call build_layout first")
        if layer == "lower":
            centers, span = self.chamber_centers_lower, self.lower_arc_span
        elif layer == "upper":
            centers, span = self.chamber_centers_upper, self.upper_arc_span
        else:
            raise ValueError(f"unknown layer {layer!r}")
        c = np.asarray(centers)
        return np.column_stack([c - span / 2, c + span / 2])

    def rotated(self, angle: float) -> "SensorGeometry":
        """Same geometry with every chamber turned by ``angle`` about z."""
        g = build_layout(self)
        return dataclasses.replace(
            g,
            chamber_centers_lower=tuple(np.asarray(g.chamber_centers_lower) + angle),
            chamber_centers_upper=tuple(np.asarray(g.chamber_centers_upper) + angle),
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SensorGeometry":
        return cls(**d)


def _check_disjoint(centers, span, label):
    c = np.mod(np.asarray(centers, dtype=float), 2 * math.pi)
    if len(c) * span > 2 * math.pi + _ARC_EPS:
        raise LayoutError(
            f"{label} chamber arcs overlap: {len(c)} arcs of span {span:.4f} rad exceed a full turn"
        )
    order = np.sort(c)
    gaps = np.diff(np.append(order, order[0] + 2 * math.pi))
    if np.any(gaps < span - _ARC_EPS):
        raise LayoutError(f"{label} chamber arcs overlap (minimum center spacing {gaps.min():.4f} rad)")


def build_layout(geometry: SensorGeometry | None = None) -> SensorGeometry:
    """Fill in default chamber positions and validate the arrangement.

    Lower chambers sit at ``k*pi/4``.  Upper chambers come in four pairs
    centred at ``j*pi/2``; each pair straddles its center by
    ``+/- upper_pair_half_gap``.  Raises :class:`LayoutError` when any two
    arcs within a layer overlap.
    """
    g = geometry if geometry is not None else SensorGeometry()
    lower = g.chamber_centers_lower
    upper = g.chamber_centers_upper
    if lower is None:
        lower = tuple(k * math.pi / 4 for k in range(N_PER_LAYER))
    if upper is None:
        upper = []
        for j in range(4):
            mid = j * math.pi / 2
            upper += [mid - g.upper_pair_half_gap, mid + g.upper_pair_half_gap]
        upper = tuple(upper)
    _check_disjoint(lower, g.lower_arc_span, "lower")
    _check_disjoint(upper, g.upper_arc_span, "upper")
    return dataclasses.replace(g, chamber_centers_lower=tuple(lower), chamber_centers_upper=tuple(upper))


def direction_matrix_txy(layout: SensorGeometry, layer: str = "lower") -> np.ndarray:
    """Integral of [cos t, sin t] over each chamber arc, shape (8, 2)."""
    arcs = layout.arcs(layer)
    t1, t2 = arcs[:, 0], arcs[:, 1]
    return np.column_stack([np.sin(t2) - np.sin(t1), np.cos(t1) - np.cos(t2)])


@dataclass(frozen=True)
class MaterialParams:
    """Elastic constants and load-bearing areas for one layer.

    ``pillar_area`` carries normal stress (Fz), ``pillar_shear_area`` shear
    and bending (Fx/Fy, Tx/Ty); ``shear_moduli``/``shear_areas`` are the
    two surfaces strained in opposite senses by Tz.
    """

    youngs_modulus: float = 0.5e6
    poisson_ratio: float = 0.49
    pillar_area: float = math.pi * 0.006**2
    pillar_shear_area: float = math.pi * 0.006**2
    shear_moduli: tuple = (0.5e6 / (2 * 1.49), 0.5e6 / (2 * 1.49))
    shear_areas: tuple = (math.pi * 0.006**2, math.pi * 0.006**2 / 16)

    def __post_init__(self):
        object.__setattr__(self, "shear_moduli", tuple(float(v) for v in self.shear_moduli))
        object.__setattr__(self, "shear_areas", tuple(float(v) for v in self.shear_areas))
        if len(self.shear_moduli) != 2 or len(self.shear_areas) != 2:
            raise ValueError("shear_moduli and shear_areas need two entries each")
        positives = (
            self.youngs_modulus,
            self.pillar_area,
            self.pillar_shear_area,
            *self.shear_moduli,
            *self.shear_areas,
        )
        if any(not (v > 0) for v in positives):
            raise ValueError(f"material constants must be positive: {self}")
        if not (0 < self.poisson_ratio < 0.5):
            raise ValueError(f"poisson_ratio must lie in (0, 0.5), got {self.poisson_ratio}")

    @classmethod
    def for_geometry(cls, geometry: SensorGeometry, youngs_modulus=0.5e6, poisson_ratio=0.49,
                     shear_area_ratio=16.0) -> "MaterialParams":
        """Defaults derived from the pillar radius: S = Sp = pi r0^2, G = E/(2(1+nu))."""
        area = math.pi * geometry.pillar_radius**2
        g = youngs_modulus / (2 * (1 + poisson_ratio))
        return cls(
            youngs_modulus=youngs_modulus,
            poisson_ratio=poisson_ratio,
            pillar_area=area,
            pillar_shear_area=area,
            shear_moduli=(g, g),
            shear_areas=(area, area / shear_area_ratio),
        )

    def scaled_modulus(self, factor: float) -> "MaterialParams":
        """Copy with every modulus multiplied by ``factor``."""
        return dataclasses.replace(
            self,
            youngs_modulus=self.youngs_modulus * factor,
            shear_moduli=tuple(g * factor for g in self.shear_moduli),
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ChamberGasState:
    """Initial absolute pressure (Pa) and volume (m^3) of the 16 chambers."""

    p0: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        p0 = np.broadcast_to(np.asarray(self.p0, dtype=float), (N_CHANNELS,)).copy()
        v0 = np.broadcast_to(np.asarray(self.v0, dtype=float), (N_CHANNELS,)).copy()
        if np.any(~(p0 > 0)) or np.any(~(v0 > 0)):
            raise ValueError("initial pressures and volumes must be positive")
        p0.flags.writeable = False
        v0.flags.writeable = False
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "v0", v0)

    @property
    def kappa(self) -> np.ndarray:
        return -self.p0 / self.v0

    @classmethod
    def for_geometry(cls, geometry: SensorGeometry, p0: float = 101325.0) -> "ChamberGasState":
        """Atmospheric fill; volumes are the chamber section swept over its arc."""
        g = geometry
        section = (g.outer_radius - g.pillar_radius) * g.layer_height
        v_lower = section * g.mean_radius * g.lower_arc_span
        v_upper = section * g.mean_radius * g.upper_arc_span
        v0 = np.r_[np.full(N_PER_LAYER, v_lower), np.full(N_PER_LAYER, v_upper)]
        return cls(p0=np.full(N_CHANNELS, p0), v0=v0)

    def to_dict(self) -> dict:
        return {"p0": self.p0.tolist(), "v0": self.v0.tolist()}


def _alpha(params: MaterialParams, g: SensorGeometry, span: float) -> float:
    # uniform compression; span*r sweeps the chamber arc (pi/8 by default)
    E, nu = params.youngs_modulus, params.poisson_ratio
    return span * g.mean_radius * g.layer_height * (g.outer_radius + nu * g.pillar_radius) / (
        E * params.pillar_area
    )


def _beta(params: MaterialParams, g: SensorGeometry) -> float:
    E, nu = params.youngs_modulus, params.poisson_ratio
    return (1 + nu) * g.mean_radius * g.layer_height**2 / (E * params.pillar_shear_area)


def _xi(params: MaterialParams, g: SensorGeometry) -> float:
    (g1, g2), (s1, s2) = params.shear_moduli, params.shear_areas
    R0, r0, h0 = g.outer_radius, g.pillar_radius, g.layer_height
    return 0.25 * (R0 - r0) * r0 * h0 * (1.0 / (g2 * s2) - 1.0 / (g1 * s1))


def _lambda(params: MaterialParams, g: SensorGeometry) -> float:
    R0, r0 = g.outer_radius, g.pillar_radius
    return g.mean_radius * g.layer_height * (R0**2 - r0**2) / (
        2 * params.youngs_modulus * params.pillar_shear_area * R0**2
    )


def _layout_for(layout):
    return layout if layout.is_built else build_layout(layout)


def _span(layout: SensorGeometry, layer: str) -> float:
    return layout.lower_arc_span if layer == "lower" else layout.upper_arc_span


def dv_normal_force(fz, params: MaterialParams, layout: SensorGeometry, layer: str = "lower") -> np.ndarray:
    """Volume change of one layer's chambers under a normal force (all equal, compressive)."""
    layout = _layout_for(layout)
    alpha = _alpha(params, layout, _span(layout, layer))
    return -alpha * np.ones(N_PER_LAYER) * float(fz)


def dv_shear_force(fx, fy, params: MaterialParams, layout: SensorGeometry, layer: str = "upper") -> np.ndarray:
    """Volume change under an in-plane shear force.  The reinforced lower layer does not respond."""
    if layer == "lower":
        return np.zeros(N_PER_LAYER)
    layout = _layout_for(layout)
    return _beta(params, layout) * direction_matrix_txy(layout, layer) @ np.array([fx, fy], dtype=float)


def dv_torque_z(tz, params: MaterialParams, layout: SensorGeometry, layer: str = "upper") -> np.ndarray:
    """Volume change under twist about z: paired chambers move in opposite senses."""
    if layer == "lower":
        return np.zeros(N_PER_LAYER)
    layout = _layout_for(layout)
    return _xi(params, layout) * np.asarray(layout.upper_pairing) * float(tz)


def dv_torque_xy(tx, ty, params: MaterialParams, layout: SensorGeometry, layer: str = "lower") -> np.ndarray:
    """Volume change under tilting torque; one side compresses while the other expands."""
    layout = _layout_for(layout)
    return _lambda(params, layout) * direction_matrix_txy(layout, layer) @ np.array([tx, ty], dtype=float)


@dataclass(frozen=True)
class DeformationStrains:
    """Linearised strains of one layer under a given wrench (all dimensionless)."""

    eps_zz: float
    eps_zx: float
    gamma_shear: float
    gamma1: float
    gamma2: float
    eps_edge: float
    gamma_tilt: float
    shear_direction: float
    tilt_direction: float


def deformation_strains(wrench: Wrench, params: MaterialParams, geometry: SensorGeometry) -> DeformationStrains:
    E, nu = params.youngs_modulus, params.poisson_ratio
    (g1, g2), (s1, s2) = params.shear_moduli, params.shear_areas
    f_shear = math.hypot(wrench.fx, wrench.fy)
    t_tilt = math.hypot(wrench.tx, wrench.ty)
    # edge strain chosen so that h0*eps/R0 == h0*T/(E*Sp*R0^2)
    eps_edge = t_tilt / (E * params.pillar_shear_area * geometry.outer_radius)
    return DeformationStrains(
        eps_zz=wrench.fz / (E * params.pillar_area),
        eps_zx=-nu * wrench.fz / (E * params.pillar_area),
        gamma_shear=2 * (1 + nu) * f_shear / (E * params.pillar_shear_area),
        gamma1=wrench.tz / (g1 * s1),
        gamma2=wrench.tz / (g2 * s2),
        eps_edge=eps_edge,
        gamma_tilt=geometry.layer_height * eps_edge / geometry.outer_radius,
        shear_direction=math.atan2(wrench.fy, wrench.fx),
        tilt_direction=math.atan2(wrench.ty, wrench.tx),
    )


@dataclass(frozen=True)
class CouplingMatrices:
    """Per-layer sensitivity scalars and the assembled 8x3 transfer blocks.

    ``T_l`` maps (fz, tx, ty) to lower volumes, ``T_u1`` maps (fx, fy, tz)
    and ``T_u2`` maps (fz, tx, ty) to upper volumes.
    """

    T_Fz: np.ndarray
    T_xy_lower: np.ndarray
    T_xy_upper: np.ndarray
    T_Tz: np.ndarray
    alpha_l: float
    lambda_l: float
    beta_u: float
    xi_u: float
    alpha_u: float
    lambda_u: float
    T_l: np.ndarray
    T_u1: np.ndarray
    T_u2: np.ndarray

    @property
    def scalars(self) -> np.ndarray:
        """(alpha_l, lambda_l, beta_u, xi_u, alpha_u, lambda_u)."""
        return np.array([self.alpha_l, self.lambda_l, self.beta_u, self.xi_u, self.alpha_u, self.lambda_u])

    @property
    def volume_matrix(self) -> np.ndarray:
        """(16, 6) map from a canonical wrench to stacked lower/upper volume changes."""
        M = np.zeros((N_CHANNELS, 6))
        # canonical columns: fx fy fz tx ty tz
        M[:8, [2, 3, 4]] = self.T_l
        M[8:, [0, 1, 5]] = self.T_u1
        M[8:, [2, 3, 4]] = self.T_u2
        return M


SCALAR_NAMES = ("alpha_l", "lambda_l", "beta_u", "xi_u", "alpha_u", "lambda_u")


def assemble_blocks(scalars: Sequence[float], layout: SensorGeometry):
    """Build (T_l, T_u1, T_u2) from the six sensitivity scalars and the layout."""
    a_l, l_l, b_u, x_u, a_u, l_u = (float(s) for s in scalars)
    layout = _layout_for(layout)
    ones = np.ones((N_PER_LAYER, 1))
    txy_l = direction_matrix_txy(layout, "lower")
    txy_u = direction_matrix_txy(layout, "upper")
    t_tz = np.asarray(layout.upper_pairing, dtype=float)[:, None]
    T_l = np.hstack([-a_l * ones, l_l * txy_l])
    T_u1 = np.hstack([b_u * txy_u, x_u * t_tz])
    # Fz column uses the all-ones pattern: uniform compression loads every chamber equally
    T_u2 = np.hstack([-a_u * ones, l_u * txy_u])
    return T_l, T_u1, T_u2


def coupling_matrices(lower: MaterialParams, upper: MaterialParams, layout: SensorGeometry,
                      check_rank: bool = True) -> CouplingMatrices:
    layout = _layout_for(layout)
    scalars = (
        _alpha(lower, layout, layout.lower_arc_span),
        _lambda(lower, layout),
        _beta(upper, layout),
        _xi(upper, layout),
        _alpha(upper, layout, layout.upper_arc_span),
        _lambda(upper, layout),
    )
    T_l, T_u1, T_u2 = assemble_blocks(scalars, layout)
    if check_rank:
        for name, block in (("T_l", T_l), ("T_u1", T_u1)):
            rank = np.linalg.matrix_rank(block)
            if rank < 3:
                raise LayoutError(f"degenerate layout: rank({name}) = {rank} < 3")
    return CouplingMatrices(
        T_Fz=np.ones(N_PER_LAYER),
        T_xy_lower=direction_matrix_txy(layout, "lower"),
        T_xy_upper=direction_matrix_txy(layout, "upper"),
        T_Tz=np.asarray(layout.upper_pairing, dtype=float),
        alpha_l=scalars[0],
        lambda_l=scalars[1],
        beta_u=scalars[2],
        xi_u=scalars[3],
        alpha_u=scalars[4],
        lambda_u=scalars[5],
        T_l=T_l,
        T_u1=T_u1,
        T_u2=T_u2,
    )


def pressure_from_volume(dv, gas: ChamberGasState) -> np.ndarray:
    """Linearised isothermal ideal gas: dp_k = -(p0_k / v0_k) * dv_k."""
    return gas.kappa * np.asarray(dv, dtype=float)


@dataclass(frozen=True)
class SensorModel:
    """Geometry, per-layer materials and gas state; immutable and thread-safe."""

    geometry: SensorGeometry = field(default_factory=lambda: build_layout(SensorGeometry()))
    lower: MaterialParams = field(default_factory=MaterialParams)
    upper: MaterialParams = field(default_factory=MaterialParams)
    gas: Optional[ChamberGasState] = None
    force_capacity: float = 50.0
    torque_capacity: float = 1.0

    SCHEMA_VERSION = 1

    def __post_init__(self):
        object.__setattr__(self, "geometry", build_layout(self.geometry))
        if self.gas is None:
            object.__setattr__(self, "gas", ChamberGasState.for_geometry(self.geometry))
        if self.force_capacity <= 0 or self.torque_capacity <= 0:
            raise ValueError("capacities must be positive")

    @cached_property
    def coupling(self) -> CouplingMatrices:
        return coupling_matrices(self.lower, self.upper, self.geometry)

    @property
    def full_scale(self) -> np.ndarray:
        """Per-axis capacity in canonical order."""
        return np.array([self.force_capacity] * 3 + [self.torque_capacity] * 3)

    @cached_property
    def pressure_matrix(self) -> np.ndarray:
        """(16, 6) map from canonical wrench to chamber pressure change (Pa)."""
        return self.gas.kappa[:, None] * self.coupling.volume_matrix

    def volumes(self, wrench) -> np.ndarray:
        return volumes_from_wrench(wrench, self)

    def pressures(self, wrench) -> np.ndarray:
        """Pressure change for one wrench (6,) or a batch (n, 6)."""
        return pressure_from_volume(volumes_from_wrench(wrench, self), self.gas)

    def true_k(self) -> np.ndarray:
        """Decoupling matrix implied by the model, rows in sensor order."""
        from .calibration import assemble_k

        return assemble_k(self.coupling.scalars, self.geometry, self.gas.kappa)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.SCHEMA_VERSION,
            "geometry": self.geometry.to_dict(),
            "lower": self.lower.to_dict(),
            "upper": self.upper.to_dict(),
            "gas": self.gas.to_dict(),
            "capacity": {"force": self.force_capacity, "torque": self.torque_capacity},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SensorModel":
        version = d.get("schema_version")
        if version != cls.SCHEMA_VERSION:
            raise ValueError(f"unsupported model schema_version {version!r}")
        geometry = SensorGeometry.from_dict(d.get("geometry", {}))
        gas = d.get("gas")
        cap = d.get("capacity", {})
        return cls(
            geometry=geometry,
            lower=MaterialParams(**d["lower"]) if "lower" in d else MaterialParams.for_geometry(geometry),
            upper=MaterialParams(**d["upper"]) if "upper" in d else MaterialParams.for_geometry(geometry),
            gas=ChamberGasState(**gas) if gas else None,
            force_capacity=cap.get("force", 50.0),
            torque_capacity=cap.get("torque", 1.0),
        )

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def volumes_from_wrench(wrench, model: SensorModel) -> np.ndarray:
    """Stacked (lower 8, upper 8) volume change for a wrench or batch of wrenches."""
    if isinstance(wrench, Wrench):
        wrench = wrench.as_array()
    w = np.asarray(wrench, dtype=float)
    c = model.coupling
    low = w[..., [2, 3, 4]]
    up = w[..., [0, 1, 5]]
    lower = low @ c.T_l.T
    upper = up @ c.T_u1.T + low @ c.T_u2.T
    return np.concatenate([lower, upper], axis=-1)
