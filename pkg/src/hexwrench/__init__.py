"""Simulation, calibration and evaluation toolkit for a two-layer pneumatic six-axis force/torque sensor."""

from .calibration import (
    BlockCalibrator,
    CalibrationResult,
    DenseCalibrator,
    StructuredCalibrator,
    assemble_k,
    calibrate_log,
)
from .decoupler import Decoupler, tare
from .metrics import EvalReport, evaluate
from .model import AXES, SENSOR_AXES, SensorGeometry, SensorModel, Wrench, build_layout
from .simulation import (
    NoiseConfig,
    ProfileSpec,
    SimLog,
    Waveform,
    default_profile_spec,
    generate_profile,
    simulate,
    upload_download_spec,
)
from .sysid import FirstOrderModel, bode_points, fit_first_order

__version__ = "0.1.0"
