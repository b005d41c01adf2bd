"""Config files, CSV data formats, bundled presets and scenario sweeps.

Configs are flat INI files, one section per model piece, hand-editable and
strictly validated: unknown sections or keys are rejected with the file
line. Series files are two-column CSV (`time_s,value`) with an optional
`# unit: K|C|deg` comment; trajectory files are three-column CSV and always
kelvin. Every emitted file is re-ingestible by the matching reader.
"""

import configparser
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .calibrate import apply_named_parameter
from .errors import ConfigError, PhotothermError, SeriesFormatError, ValidationError
from .metrics import (
    FinalConvention,
    MeasurementSeries,
    plateau_value,
    response_time_63,
    series_from_trajectory,
)
from .model import (
    Environment,
    HeatSource,
    KELVIN_OFFSET,
    SourceMode,
    ThermalLayer,
    WallAssembly,
    WallKind,
    steady_state,
)
from .simulate import LightSchedule, SimConfig, Trajectory, run

TRAJECTORY_HEADER = "t_s,theta_s_K,theta_L_K"
SERIES_HEADER = "time_s,value"

_LAYER_KEYS = ("specific_heat", "density", "thickness", "area", "emissivity",
               "absorptance", "conductivity", "conv_coeff")
_SECTION_KEYS = {
    "assembly": {"kind"},
    "silicone": set(_LAYER_KEYS) | {"conv_faces"},
    "lig": set(_LAYER_KEYS) | {"conv_faces"},
    "source": {"mode", "power", "source_temperature", "source_emissivity"},
    "environment": {"ambient_temperature"},
    "schedule": {"intervals"},
    "sim": {"duration", "dt", "record_stride", "metric_window"},
    "metrics": {"plateau_window", "plateau_threshold", "channel"},
}

SWEEP_OUTPUTS = ("t63", "peak", "steady", "plateau")
_OUTPUT_COLUMNS = {
    "t63": ("t63_s",),
    "peak": ("peak_K", "peak_time_s"),
    "steady": ("steady_theta_s_K", "steady_theta_L_K"),
    "plateau": ("plateau_K", "plateau_reach_s"),
}


def illuminance_scale(d: float, d_ref: float, p: float = 1.0) -> float:
    """Drive scale at working distance d relative to d_ref: (d_ref / d) ** p.

    The default exponent 1 matches a beam lamp whose illuminance doubles
    when the distance halves; p = 2 covers point-like sources.
    """
    if not (d > 0.0 and d_ref > 0.0):
        raise ValidationError("distances must be strictly positive")
    return (d_ref / d) ** p


@dataclass(frozen=True)
class RunConfig:
    """Fully validated scenario: wall, source, environment, schedule and
    integration settings, plus the metric choices used downstream."""

    assembly: WallAssembly
    source: HeatSource
    env: Environment
    schedule: LightSchedule
    sim: SimConfig
    plateau_window: float | None = None
    plateau_threshold: float | None = None
    channel: str = "auto"


def preset_directory() -> Path:
    """Directory holding bundled presets; PHOTOTHERM_PRESETS overrides it."""
    override = os.environ.get("PHOTOTHERM_PRESETS")
    if override:
        return Path(override)
    return Path(str(resources.files("phototherm") / "presets"))


def available_presets() -> list[str]:
    directory = preset_directory()
    if not directory.is_dir():
        return []
    return sorted(p.stem for p in directory.glob("*.ini"))


def preset_path(name: str) -> Path:
    path = preset_directory() / f"{name}.ini"
    if not path.is_file():
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(available_presets()) or 'none'}")
    return path


def _key_lines(text: str) -> dict:
    """Map (section, key) and (section, None) to 1-based line numbers."""
    mapping: dict = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            mapping[(section, None)] = lineno
        elif "=" in line and section is not None:
            key = line.split("=", 1)[0].strip()
            mapping[(section, key)] = lineno
    return mapping


def load_config(path) -> RunConfig:
    """Parse and validate a scenario config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: config must be UTF-8: {exc}") from exc
    return parse_config(text, origin=str(path))


def parse_config(text: str, origin: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: parse error: {exc}") from exc
    lines = _key_lines(text)

    def where(section: str, key: str | None = None) -> str:
        lineno = lines.get((section, key)) or lines.get((section, None))
        return f"{origin}:{lineno}" if lineno else origin

    for section in cp.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"{where(section)}: unknown section [{section}]")
        extra = set(cp.options(section)) - _SECTION_KEYS[section]
        if extra:
            key = sorted(extra)[0]
            raise ConfigError(f"{where(section, key)}: unknown key {key!r} in [{section}]")

    def need_section(section: str) -> None:
        if not cp.has_section(section):
            raise ConfigError(f"{origin}: missing section [{section}]")

    _REQUIRED = object()

    def get_raw(section: str, key: str, default=_REQUIRED) -> str:
        if not cp.has_option(section, key):
            if default is _REQUIRED:
                raise ConfigError(f"{where(section)}: [{section}] missing key {key!r}")
            return default
        return cp.get(section, key).strip()

    def get_float(section: str, key: str, default=_REQUIRED) -> float:
        raw = get_raw(section, key, default)
        if raw is default and raw is not _REQUIRED:
            return default
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ConfigError(
                f"{where(section, key)}: [{section}] {key}: not a number: {raw!r}") from None

    def get_int(section: str, key: str, default=_REQUIRED) -> int:
        raw = get_raw(section, key, default)
        if raw is default and raw is not _REQUIRED:
            return default
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ConfigError(
                f"{where(section, key)}: [{section}] {key}: not an integer: {raw!r}") from None

    def build_layer(section: str) -> ThermalLayer:
        need_section(section)
        kwargs = {key: get_float(section, key) for key in _LAYER_KEYS}
        if cp.has_option(section, "conv_faces"):
            kwargs["conv_faces"] = get_int(section, "conv_faces")
        try:
            return ThermalLayer(**kwargs)
        except ValidationError as exc:
            key = str(exc).split()[0]
            key = key if key in _SECTION_KEYS[section] else None
            raise ConfigError(f"{where(section, key)}: [{section}] {exc}") from exc

    need_section("assembly")
    kind_raw = get_raw("assembly", "kind")
    try:
        kind = WallKind(kind_raw)
    except ValueError:
        raise ConfigError(
            f"{where('assembly', 'kind')}: [assembly] kind must be "
            f"'single_layer' or 'bilayer', got {kind_raw!r}") from None

    silicone = build_layer("silicone")
    if kind is WallKind.BILAYER:
        lig = build_layer("lig")
        try:
            assembly = WallAssembly.bilayer(silicone, lig)
        except ValidationError as exc:
            raise ConfigError(f"{origin}: {exc}") from exc
    else:
        if cp.has_section("lig"):
            raise ConfigError(
                f"{where('lig')}: [lig] section is not valid for a single-layer assembly")
        assembly = WallAssembly.single(silicone)

    need_section("source")
    mode_raw = get_raw("source", "mode")
    try:
        mode = SourceMode(mode_raw)
    except ValueError:
        raise ConfigError(
            f"{where('source', 'mode')}: [source] mode must be 'constant_flux' "
            f"or 'radiative_body', got {mode_raw!r}") from None
    try:
        if mode is SourceMode.CONSTANT_FLUX:
            for key in ("source_temperature", "source_emissivity"):
                if cp.has_option("source", key):
                    raise ConfigError(
                        f"{where('source', key)}: [source] {key} is not valid in constant_flux mode")
            source = HeatSource.constant_flux(get_float("source", "power"))
        else:
            if cp.has_option("source", "power"):
                raise ConfigError(
                    f"{where('source', 'power')}: [source] power is not valid in radiative_body mode")
            source = HeatSource.radiative(get_float("source", "source_temperature"),
                                          get_float("source", "source_emissivity"))
    except ValidationError as exc:
        raise ConfigError(f"{where('source')}: [source] {exc}") from exc

    need_section("environment")
    try:
        env = Environment(get_float("environment", "ambient_temperature"))
    except ValidationError as exc:
        raise ConfigError(f"{where('environment', 'ambient_temperature')}: "
                          f"[environment] {exc}") from exc

    if cp.has_section("schedule") and cp.has_option("schedule", "intervals"):
        schedule = parse_intervals(get_raw("schedule", "intervals", ""),
                                   where("schedule", "intervals"))
    else:
        schedule = LightSchedule.off()

    need_section("sim")
    try:
        sim = SimConfig(duration=get_float("sim", "duration"),
                        dt=get_float("sim", "dt", 0.01),
                        record_stride=get_int("sim", "record_stride", 1),
                        metric_window=get_float("sim", "metric_window", 300.0))
    except ValidationError as exc:
        raise ConfigError(f"{where('sim')}: [sim] {exc}") from exc

    plateau_window = get_float("metrics", "plateau_window", None) \
        if cp.has_section("metrics") else None
    plateau_threshold = get_float("metrics", "plateau_threshold", None) \
        if cp.has_section("metrics") else None
    channel = get_raw("metrics", "channel", "auto") if cp.has_section("metrics") else "auto"
    if channel not in ("auto", "theta_s", "theta_L"):
        raise ConfigError(f"{where('metrics', 'channel')}: [metrics] channel must be "
                          f"auto, theta_s or theta_L, got {channel!r}")

    return RunConfig(assembly=assembly, source=source, env=env, schedule=schedule,
                     sim=sim, plateau_window=plateau_window,
                     plateau_threshold=plateau_threshold, channel=channel)


def parse_intervals(text: str, where: str = "<schedule>") -> LightSchedule:
    """Parse 'start:end:scale, start:end:scale, ...'; 'inf' ends are allowed
    and an empty string means the light stays off."""
    text = text.strip()
    if not text:
        return LightSchedule.off()
    triples = []
    for part in text.split(","):
        bits = [b.strip() for b in part.strip().split(":")]
        if len(bits) != 3:
            raise ConfigError(f"{where}: interval must be start:end:scale, got {part.strip()!r}")
        try:
            triples.append(tuple(float(b) for b in bits))
        except ValueError:
            raise ConfigError(f"{where}: non-numeric interval {part.strip()!r}") from None
    try:
        return LightSchedule(tuple(triples))
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def read_series(path, column: str = "auto", label: str | None = None) -> MeasurementSeries:
    """Read a measurement CSV or a trajectory CSV as one series.

    Plain series files carry `time_s,value` plus an optional leading
    `# unit: K|C|deg` comment (default K); Celsius values are converted to
    kelvin on ingest. Trajectory files carry `t_s,theta_s_K,theta_L_K` and
    `column` picks the channel: 'theta_s', 'theta_L', or 'auto' for the
    liquid-contact channel (theta_L when populated, else theta_s).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SeriesFormatError(f"{path}: cannot read series: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise SeriesFormatError(f"{path}: series must be UTF-8: {exc}") from exc

    unit = "K"
    header = None
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.lower().startswith("unit:"):
                unit = body.split(":", 1)[1].strip()
            continue
        if header is None:
            header = line
            continue
        rows.append((lineno, [c.strip() for c in line.split(",")]))

    if header is None:
        raise SeriesFormatError(f"{path}: empty file, expected a header row")

    if header == SERIES_HEADER:
        if column not in ("auto", "value"):
            raise SeriesFormatError(
                f"{path}: plain series files have no {column!r} column")
        value_idx, n_cols = 1, 2
    elif header == TRAJECTORY_HEADER:
        unit = "K"
        n_cols = 3
        if column in ("auto", "theta_L"):
            has_lig = any(len(cells) > 2 and cells[2] for _, cells in rows)
            if column == "theta_L" and not has_lig:
                raise SeriesFormatError(f"{path}: trajectory has no theta_L data")
            value_idx = 2 if has_lig else 1
        elif column in ("value", "theta_s"):
            value_idx = 1
        else:
            raise SeriesFormatError(f"{path}: unknown column {column!r}")
    else:
        raise SeriesFormatError(
            f"{path}:1: unrecognized header {header!r}; expected "
            f"{SERIES_HEADER!r} or {TRAJECTORY_HEADER!r}")

    if unit not in ("K", "C", "deg"):
        raise SeriesFormatError(f"{path}: unit must be K, C or deg, got {unit!r}")

    times: list[float] = []
    values: list[float] = []
    for lineno, cells in rows:
        if len(cells) != n_cols:
            raise SeriesFormatError(f"{path}:{lineno}: expected {n_cols} columns, got {len(cells)}")
        try:
            t = float(cells[0])
            v = float(cells[value_idx])
        except ValueError:
            raise SeriesFormatError(f"{path}:{lineno}: non-numeric row") from None
        if math.isnan(t) or math.isnan(v):
            raise SeriesFormatError(f"{path}:{lineno}: NaN is not allowed")
        if times and t <= times[-1]:
            raise SeriesFormatError(
                f"{path}:{lineno}: time stamps must be strictly increasing")
        times.append(t)
        values.append(v)

    if len(times) < 2:
        raise SeriesFormatError(f"{path}: need at least 2 data rows, got {len(times)}")
    if unit == "C":
        values = [v + KELVIN_OFFSET for v in values]
        unit = "K"
    try:
        return MeasurementSeries(tuple(times), tuple(values), unit=unit,
                                 label=label if label is not None else path.stem)
    except ValidationError as exc:
        raise SeriesFormatError(f"{path}: {exc}") from exc


def write_trajectory(trajectory: Trajectory, path) -> None:
    """Write a trajectory as CSV with 6-decimal fixed formatting and LF
    endings; the theta_L column stays empty for single-layer runs."""
    bilayer = trajectory.kind is WallKind.BILAYER
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for s in trajectory.samples:
            lig = f"{s.lig_temperature:.6f}" if bilayer else ""
            fh.write(f"{s.time:.6f},{s.silicone_temperature:.6f},{lig}\n")


def write_series(series: MeasurementSeries, path) -> None:
    """Write a series as `time_s,value` CSV with a `# unit:` comment."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# unit: {series.unit}\n")
        fh.write(SERIES_HEADER + "\n")
        for t, v in zip(series.times, series.values):
            fh.write(f"{t:.6f},{v:.6f}\n")


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter: an explicit value list, or working distances
    mapped to drive scales through illuminance_scale."""

    param: str
    values: tuple[float, ...] | None = None
    distances: tuple[float, ...] | None = None
    d_ref: float | None = None
    exponent: float = 1.0
    outputs: tuple[str, ...] = ("t63",)

    def __post_init__(self):
        if self.param == "distance":
            if self.distances is None or self.values is not None:
                raise ValidationError("distance sweeps need distances, not values")
            if not self.distances:
                raise ValidationError("need at least one sweep point")
            if any(not d > 0.0 for d in self.distances):
                raise ValidationError("distances must be strictly positive")
            if self.d_ref is None or not self.d_ref > 0.0:
                raise ValidationError("distance sweeps need a positive d_ref")
        else:
            from .calibrate import PARAM_RANGES
            if self.param not in PARAM_RANGES:
                raise ValidationError(
                    f"unknown sweep parameter {self.param!r}; choose from "
                    f"{sorted(PARAM_RANGES) + ['distance']}")
            if self.values is None or self.distances is not None:
                raise ValidationError(f"{self.param} sweeps need values, not distances")
            if not self.values:
                raise ValidationError("need at least one sweep point")
        unknown = set(self.outputs) - set(SWEEP_OUTPUTS)
        if unknown:
            raise ValidationError(
                f"unknown sweep outputs {sorted(unknown)}; choose from {SWEEP_OUTPUTS}")
        if not self.outputs:
            raise ValidationError("need at least one requested output")

    @property
    def points(self) -> tuple[float, ...]:
        return self.distances if self.param == "distance" else self.values


@dataclass(frozen=True)
class SweepResult:
    columns: tuple[str, ...]
    rows: tuple[dict, ...]
    failures: int

    def to_csv(self) -> str:
        def cell(row, col):
            value = row.get(col)
            if value is None:
                return ""
            if isinstance(value, float):
                return f"{value:.6f}" if col not in ("value", "scale") else f"{value:.6g}"
            return str(value)

        out = [",".join(self.columns)]
        for row in self.rows:
            out.append(",".join(cell(row, c) for c in self.columns))
        return "\n".join(out) + "\n"


def run_sweep(config: RunConfig, sweep: SweepSpec) -> SweepResult:
    """Evaluate the requested outputs at every sweep point.

    Rows keep the input order; a point that fails validation or simulation
    is marked failed and the sweep continues.
    """
    if "plateau" in sweep.outputs and (config.plateau_threshold is None
                                       or config.plateau_window is None):
        raise ConfigError("plateau output needs plateau_threshold and plateau_window "
                          "in the [metrics] config section")

    columns = ["index", "param", "value", "scale", "status"]
    for output in sweep.outputs:
        columns.extend(_OUTPUT_COLUMNS[output])

    needs_run = any(o in sweep.outputs for o in ("t63", "peak", "plateau"))
    rows = []
    failures = 0
    for index, point in enumerate(sweep.points):
        row = {"index": index, "param": sweep.param, "value": point, "status": "ok"}
        try:
            assembly, source = config.assembly, config.source
            if sweep.param == "distance":
                scale = illuminance_scale(point, sweep.d_ref, sweep.exponent)
            elif sweep.param == "scale":
                scale = point
            else:
                scale = 1.0
                assembly, source, _ = apply_named_parameter(
                    assembly, source, config.schedule, sweep.param, point)
            row["scale"] = scale
            schedule = config.schedule.scaled(scale)

            if needs_run:
                trajectory = run(assembly, source, schedule, config.env, config.sim)
                series = series_from_trajectory(trajectory, config.channel)
                if "t63" in sweep.outputs:
                    report = response_time_63(series, FinalConvention.WINDOW_FINAL,
                                              window=config.sim.metric_window)
                    row["t63_s"] = report.t63
                if "peak" in sweep.outputs:
                    peak_idx = max(range(len(series.values)),
                                   key=series.values.__getitem__)
                    row["peak_K"] = series.values[peak_idx]
                    row["peak_time_s"] = series.times[peak_idx]
                if "plateau" in sweep.outputs:
                    value, reach = plateau_value(series, config.plateau_threshold,
                                                 config.plateau_window)
                    row["plateau_K"] = value
                    row["plateau_reach_s"] = reach
            if "steady" in sweep.outputs:
                state = steady_state(assembly, source, config.env, scale)
                row["steady_theta_s_K"] = state.silicone_temperature
                row["steady_theta_L_K"] = state.lig_temperature
        except PhotothermError:
            failures += 1
            row = {"index": index, "param": sweep.param, "value": point,
                   "status": "failed"}
        rows.append(row)
    return SweepResult(tuple(columns), tuple(rows), failures)
