"""Command-line entry point.

Subcommands: simulate, steady, metrics, calibrate, sweep, analyze-bending.
Exit codes: 0 success, 1 usage error, 2 bad input data, 3 numerical
failure, 4 partial sweep failure.
"""

import argparse
import sys

from . import calibrate as _calibrate
from . import fileio
from .errors import (
    MetricError,
    NumericalError,
    PhotothermError,
    StabilityError,
    ValidationError,
)
from .metrics import (
    FinalConvention,
    MeasurementSeries,
    cooling_fit,
    cycle_degradation,
    cycle_peaks,
    normalize_curve,
    plateau_value,
    response_time_63,
)
from .model import KELVIN_OFFSET, WallKind, steady_state
from .simulate import SimConfig, run

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL = 4

_CONVENTIONS = {
    "window-final": FinalConvention.WINDOW_FINAL,
    "plateau": FinalConvention.PLATEAU,
    "supplied": FinalConvention.SUPPLIED,
}


def _emit(key: str, value) -> None:
    if isinstance(value, float):
        print(f"{key}={value:.6f}")
    else:
        print(f"{key}={value}")


def _emit_temperature(key: str, kelvin: float) -> None:
    _emit(f"{key}_K", kelvin)
    _emit(f"{key}_C", kelvin - KELVIN_OFFSET)


def _load_scenario(args) -> fileio.RunConfig:
    if args.preset:
        return fileio.load_config(fileio.preset_path(args.preset))
    return fileio.load_config(args.config)


def _add_scenario_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", help="bundled preset name (see README)")
    group.add_argument("--config", help="path to a scenario config file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phototherm",
        description="Lumped photothermal heating simulator for soft-actuator walls")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a scenario and write a trajectory CSV")
    _add_scenario_options(p)
    p.add_argument("--duration", type=float, help="override simulated span, s")
    p.add_argument("--dt", type=float, help="override time step, s")
    p.add_argument("--record-stride", type=int, help="keep every Nth step")
    p.add_argument("--schedule", help="override light schedule, 'start:end:scale,...'")
    p.add_argument("--out", help="output CSV path (default: stdout)")

    p = sub.add_parser("steady", help="print steady-state temperatures")
    _add_scenario_options(p)
    p.add_argument("--scale", type=float, default=1.0, help="drive scale (default 1)")

    p = sub.add_parser("metrics", help="response metrics of a series or trajectory CSV")
    p.add_argument("file", help="series or trajectory CSV")
    p.add_argument("--channel", default="auto",
                   choices=["auto", "theta_s", "theta_L", "value"])
    p.add_argument("--convention", default="window-final", choices=sorted(_CONVENTIONS))
    p.add_argument("--window", type=float, default=300.0,
                   help="final-value window for window-final, s (default 300)")
    p.add_argument("--final", type=float, help="final value for the supplied convention")
    p.add_argument("--plateau-threshold", type=float, help="plateau value range bound")
    p.add_argument("--plateau-window", type=float, help="plateau window length, s")
    p.add_argument("--ambient", type=float, default=298.0,
                   help="ambient for the cooling fit, K (default 298)")

    p = sub.add_parser("calibrate", help="fit model parameters to a measured series")
    _add_scenario_options(p)
    p.add_argument("--target", required=True, help="measured temperature CSV")
    p.add_argument("--param", action="append", required=True, metavar="NAME:LO:HI:INIT",
                   help="free parameter spec; repeatable")
    p.add_argument("--channel", default=None,
                   help="trajectory channel compared against the target")

    p = sub.add_parser("sweep", help="evaluate outputs over a parameter sweep")
    _add_scenario_options(p)
    p.add_argument("--param", required=True,
                   help="parameter to sweep (alpha_s, alpha_L, h_se, h_Le, Q_h, "
                        "scale, distance)")
    p.add_argument("--values", help="comma-separated parameter values")
    p.add_argument("--distances", help="comma-separated working distances, m")
    p.add_argument("--d-ref", type=float, help="reference distance, m")
    p.add_argument("--exponent", type=float, default=1.0,
                   help="illuminance falloff exponent (default 1)")
    p.add_argument("--outputs", default="t63",
                   help="comma-separated subset of t63,peak,steady,plateau")
    p.add_argument("--out", help="output CSV path (default: stdout)")

    p = sub.add_parser("analyze-bending", help="normalize and describe a bending series")
    p.add_argument("file", help="bending-angle series CSV")
    p.add_argument("--plateau-threshold", type=float, required=True)
    p.add_argument("--plateau-window", type=float, required=True)
    p.add_argument("--out", help="write the normalized curve CSV here")
    p.add_argument("--peaks", help="comma-separated per-cycle peak values; "
                                   "autodetected from the series when omitted")
    return parser


def _parse_floats(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ValidationError(f"{what} must be comma-separated numbers, got {text!r}") from None


def _cmd_simulate(args) -> int:
    cfg = _load_scenario(args)
    sim = cfg.sim
    if args.duration is not None or args.dt is not None or args.record_stride is not None:
        sim = SimConfig(duration=args.duration if args.duration is not None else sim.duration,
                        dt=args.dt if args.dt is not None else sim.dt,
                        record_stride=args.record_stride if args.record_stride is not None
                        else sim.record_stride,
                        metric_window=sim.metric_window)
    schedule = cfg.schedule
    if args.schedule is not None:
        schedule = fileio.parse_intervals(args.schedule, "--schedule")
    trajectory = run(cfg.assembly, cfg.source, schedule, cfg.env, sim)
    if args.out:
        fileio.write_trajectory(trajectory, args.out)
    else:
        sys.stdout.write(fileio.TRAJECTORY_HEADER + "\n")
        bilayer = trajectory.kind is WallKind.BILAYER
        for s in trajectory.samples:
            lig = f"{s.lig_temperature:.6f}" if bilayer else ""
            sys.stdout.write(f"{s.time:.6f},{s.silicone_temperature:.6f},{lig}\n")
    return EXIT_OK


def _cmd_steady(args) -> int:
    cfg = _load_scenario(args)
    state = steady_state(cfg.assembly, cfg.source, cfg.env, args.scale)
    _emit_temperature("theta_s", state.silicone_temperature)
    if state.lig_temperature is not None:
        _emit_temperature("theta_L", state.lig_temperature)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    series = fileio.read_series(args.file, column=args.channel)
    convention = _CONVENTIONS[args.convention]
    report = response_time_63(series, convention, window=args.window,
                              final=args.final,
                              plateau_threshold=args.plateau_threshold)
    is_kelvin = series.unit == "K"

    def emit_value(key, value):
        if is_kelvin:
            _emit_temperature(key, value)
        else:
            _emit(key, value)

    emit_value("baseline", report.baseline)
    emit_value("final", report.final)
    _emit("final_convention", report.final_convention.value)
    _emit("t63_s", report.t63)
    emit_value("peak", report.peak_value)
    _emit("peak_time_s", report.peak_time)

    if args.plateau_threshold is not None and args.plateau_window is not None:
        value, reach = plateau_value(series, args.plateau_threshold, args.plateau_window)
        emit_value("plateau", value)
        _emit("plateau_reach_s", reach)

    if is_kelvin:
        # cooling fit on the decaying tail after the peak, when there is one
        peak_idx = series.values.index(report.peak_value)
        tail_t = series.times[peak_idx:]
        tail_v = series.values[peak_idx:]
        if len(tail_t) >= 2 and tail_v[-1] < tail_v[0]:
            try:
                tau, r2 = cooling_fit(MeasurementSeries(tail_t, tail_v, unit="K"),
                                      args.ambient)
                _emit("cooling_tau_s", tau)
                _emit("cooling_r2", r2)
            except (ValidationError, MetricError):
                pass
    return EXIT_OK


def _parse_param_spec(text: str) -> _calibrate.ParamSpec:
    bits = text.split(":")
    if len(bits) != 4:
        raise ValidationError(f"--param must be NAME:LO:HI:INIT, got {text!r}")
    name = bits[0].strip()
    try:
        lo, hi, init = (float(b) for b in bits[1:])
    except ValueError:
        raise ValidationError(f"--param bounds must be numbers, got {text!r}") from None
    return _calibrate.ParamSpec(name=name, lower=lo, upper=hi, initial=init)


def _cmd_calibrate(args) -> int:
    cfg = _load_scenario(args)
    target = fileio.read_series(args.target)
    specs = tuple(_parse_param_spec(text) for text in args.param)
    problem = _calibrate.CalibrationProblem(
        target=target, free=specs, assembly=cfg.assembly, source=cfg.source,
        env=cfg.env, schedule=cfg.schedule, config=cfg.sim,
        channel=args.channel if args.channel is not None else cfg.channel)
    result = _calibrate.fit(problem)
    for name, value in result.values.items():
        _emit(name, value)
    _emit("sse_K2", result.sse)
    _emit("rmse_K", result.rmse)
    _emit("iterations", result.iterations)
    _emit("converged", "true" if result.converged else "false")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load_scenario(args)
    outputs = tuple(o.strip() for o in args.outputs.split(",") if o.strip())
    values = _parse_floats(args.values, "--values") if args.values else None
    distances = _parse_floats(args.distances, "--distances") if args.distances else None
    spec = fileio.SweepSpec(param=args.param, values=values, distances=distances,
                            d_ref=args.d_ref, exponent=args.exponent, outputs=outputs)
    result = fileio.run_sweep(cfg, spec)
    csv_text = result.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if result.failures:
        print(f"{result.failures} of {len(result.rows)} sweep points failed",
              file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_analyze_bending(args) -> int:
    series = fileio.read_series(args.file)
    plateau, reach = plateau_value(series, args.plateau_threshold, args.plateau_window)
    normalized = normalize_curve(series, plateau)
    if args.out:
        fileio.write_series(normalized, args.out)
    report = response_time_63(series, FinalConvention.PLATEAU,
                              window=args.plateau_window,
                              plateau_threshold=args.plateau_threshold)
    _emit("baseline", report.baseline)
    _emit("plateau", plateau)
    _emit("plateau_reach_s", reach)
    _emit("t63_s", report.t63)
    _emit("peak", report.peak_value)
    _emit("peak_time_s", report.peak_time)

    if args.peaks:
        peaks = list(_parse_floats(args.peaks, "--peaks"))
    else:
        try:
            peaks = cycle_peaks(series)
        except ValidationError:
            peaks = []  # recovery-only records never rise above the start
        if len(peaks) < 2:
            peaks = []
    if peaks:
        ratios = cycle_degradation(peaks)
        _emit("cycle_peaks", ",".join(f"{p:.4f}" for p in peaks))
        _emit("cycle_ratios", ",".join(f"{r:.4f}" for r in ratios))
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "steady": _cmd_steady,
    "metrics": _cmd_metrics,
    "calibrate": _cmd_calibrate,
    "sweep": _cmd_sweep,
    "analyze-bending": _cmd_analyze_bending,
}


def cli_main(argv) -> int:
    """Run one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (StabilityError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, MetricError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except PhotothermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
