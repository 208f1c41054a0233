"""Command-line entry point: ``hexwrench {simulate|calibrate|decouple|evaluate|sysid}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .calibration import STRATEGIES, CalibrationResult, baseline_rows, make_calibrator
from .decoupler import Decoupler, tare
from .metrics import evaluate
from .model import AXES, SensorModel
from .simulation import NoiseConfig, ProfileSpec, default_profile_spec, simulate
from .sysid import IdentificationError, bode_points, fit_first_order

log = logging.getLogger("hexwrench")

CONFIG_ENV = "HEXWRENCH_CONFIG"
BODE_FREQS = np.geomspace(0.1, 1000.0, 121)


class CLIError(Exception):
    pass


def _load_config(path):
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    cfg = io.read_json(path)
    if not isinstance(cfg, dict):
        raise CLIError(f"{path}: config must be a JSON object")
    return cfg


def _section(args, cfg, name):
    """A config section from its own file (``--<name> FILE``) or the shared config."""
    path = getattr(args, name, None)
    if path:
        return io.read_json(path)
    return cfg.get(name)


def _model(args, cfg) -> SensorModel:
    d = _section(args, cfg, "model")
    return SensorModel.from_dict(d) if d else SensorModel()


def cmd_simulate(args, cfg):
    model = _model(args, cfg)
    prof = _section(args, cfg, "profile")
    spec = ProfileSpec.from_dict(prof) if prof else default_profile_spec(
        force=model.force_capacity, torque=model.torque_capacity)
    noise_d = _section(args, cfg, "noise")
    if args.clean:
        noise = NoiseConfig.clean()
    else:
        noise = NoiseConfig.from_dict(noise_d) if noise_d else NoiseConfig()
    seed = args.seed if args.seed is not None else cfg.get("seed")
    if seed is not None:
        noise = NoiseConfig.from_dict({**noise.to_dict(), "seed": int(seed)})
    sim = simulate(spec, model, noise)
    io.write_log(sim, args.output)
    log.info("wrote %d rows to %s", len(sim), args.output)


def cmd_calibrate(args, cfg):
    sim = io.read_log(args.log)
    rows = baseline_rows(sim.t, sim.wrench, args.tare_seconds)
    baseline = tare(sim.pressure[rows])
    kwargs = {}
    if args.strategy == "structured":
        model = _model(args, cfg)
        kwargs["layout"] = model.geometry
    elif args.ridge:
        kwargs["ridge"] = args.ridge
    est = make_calibrator(args.strategy, **kwargs).fit(sim.pressure - baseline, sim.wrench)
    result = est.result(baseline=baseline)
    io.write_json(result.to_dict(), args.output)
    if result.flagged:
        log.warning("design condition number %.3g exceeds 1e8", result.condition_number)


def cmd_decouple(args, cfg):
    cal = CalibrationResult.from_dict(io.read_json(args.calibration))
    sim = io.read_log(args.log, strict=False)
    dec = Decoupler.from_calibration(cal, smoothing_window=args.smoothing)
    if args.tare_seconds is not None:
        rows = (sim.t - sim.t[0] < args.tare_seconds) & np.all(np.isfinite(sim.pressure), axis=1)
        dec.fit(sim.pressure[rows])
    elif cal.baseline is None:
        raise CLIError("calibration file has no baseline; pass --tare-seconds")
    res = dec.decouple_stream(sim.pressure)
    for idx, reason in res.rejected:
        log.warning("row %d (line %d) rejected: %s", idx, idx + 2, reason)
    if res.n_rejected:
        log.warning("%d of %d rows rejected", res.n_rejected, len(sim))
    io.write_wrenches(sim.t[res.index], res.wrench, args.output)


def _aligned(meas_path, ref_path, resample):
    tm, wm = io.read_wrenches(meas_path)
    tr, wr = io.read_wrenches(ref_path)
    same = tm.shape == tr.shape and np.allclose(tm, tr, rtol=0, atol=1e-9)
    if not same:
        if not resample:
            raise CLIError("measured and reference time stamps differ; pass --resample to interpolate")
        wm = np.column_stack([np.interp(tr, tm, wm[:, i]) for i in range(6)])
    return tr, wm, wr


def cmd_evaluate(args, cfg):
    t, meas, ref = _aligned(args.measured, args.reference, args.resample)
    model = _model(args, cfg)
    report = evaluate(meas, ref, full_scale=tuple(model.full_scale))
    io.write_json(report.to_dict(), args.output)
    if not args.no_plots:
        from .plots import emit

        outdir = args.plots or Path(args.output).with_suffix("").as_posix() + "_plots"
        emit(outdir, t, meas, ref, label=args.label)


def cmd_sysid(args, cfg):
    t, out, inp = _aligned(args.output_series, args.input_series, args.resample)
    dt = float(np.median(np.diff(t)))
    axes = {}
    bode = [BODE_FREQS]
    header = ["f"]
    for i, a in enumerate(AXES):
        try:
            gain, tau, rms = fit_first_order(inp[:, i], out[:, i], dt)
        except IdentificationError as exc:
            log.info("axis %s skipped: %s", a, exc)
            continue
        axes[a] = {"gain": gain, "tau": tau, "rms": rms}
        mag, phase = bode_points(gain, tau, BODE_FREQS)
        bode += [mag, phase]
        header += [f"mag_db_{a}", f"phase_deg_{a}"]
    if not axes:
        raise CLIError("no axis has a non-constant input")
    io.write_json({"schema_version": 1, "dt": dt, "axes": axes}, args.output)
    bode_path = args.bode or Path(args.output).with_suffix("").as_posix() + "_bode.csv"
    io._write_rows(bode_path, header, np.column_stack(bode))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON config (default: ${CONFIG_ENV})")
    common.add_argument("--seed", type=int, help="override the noise seed")
    common.add_argument("--model", help="sensor model JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hexwrench", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="generate a synthetic sensor log")
    s.add_argument("--profile", help="load profile JSON")
    s.add_argument("--noise", help="noise config JSON")
    s.add_argument("--clean", action="store_true", help="disable every imperfection")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("calibrate", parents=[common], help="fit a decoupling matrix")
    s.add_argument("log")
    s.add_argument("--strategy", choices=sorted(STRATEGIES), default="structured")
    s.add_argument("--ridge", type=float, default=0.0)
    s.add_argument("--tare-seconds", type=float, default=0.5)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("decouple", parents=[common], help="convert pressures to wrenches")
    s.add_argument("log")
    s.add_argument("--calibration", "-c", required=True)
    s.add_argument("--tare-seconds", type=float, help="re-tare on the first S seconds of the log")
    s.add_argument("--smoothing", type=int, default=1, help="moving-average window (samples)")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_decouple)

    s = sub.add_parser("evaluate", parents=[common], help="error metrics against a reference")
    s.add_argument("measured")
    s.add_argument("reference")
    s.add_argument("--resample", action="store_true")
    s.add_argument("--plots", help="directory for plot data (default: <output>_plots)")
    s.add_argument("--no-plots", action="store_true")
    s.add_argument("--label", default="run", help="tag for the hysteresis files, e.g. LF/MF/HF")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sysid", parents=[common], help="identify first-order dynamics per axis")
    s.add_argument("input_series", help="reference (input) wrench CSV")
    s.add_argument("output_series", help="measured (output) wrench CSV")
    s.add_argument("--resample", action="store_true")
    s.add_argument("--bode", help="Bode CSV path (default: <output>_bode.csv)")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_sysid)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="hexwrench: %(message)s")
    try:
        cfg = _load_config(args.config)
        args.func(args, cfg)
    except (CLIError, ValueError, OSError, KeyError, TypeError) as exc:
        # ValueError covers schema, excitation, profile, layout and metric errors
        print(f"hexwrench {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
