"""Explicit time integration of the wall model under a light schedule.

The integrator is plain forward Euler, T(t + dt) = T(t) + dt * rate(T(t)),
with a hard stability guard: the step must not exceed the smallest lumped
time constant of the assembly (the thin absorber film is by far the
stiffest node). Schedule interval boundaries are snapped to the nearest
step; within a step the drive scale is the value at the step start.
"""

import math
from dataclasses import dataclass

from .errors import KindMismatchError, NumericalError, StabilityError, ValidationError
from .model import (
    Environment,
    HeatSource,
    SourceMode,
    ThermalState,
    WallAssembly,
    WallKind,
    _bilayer_rates,
    _single_rate,
    _source_input,
    convective_conductance,
    coupling_conductance,
    heat_capacity,
    rhs_bilayer,
    rhs_single,
)


@dataclass(frozen=True)
class LightSchedule:
    """Piecewise-constant drive schedule.

    intervals is a sorted, non-overlapping list of (start_s, end_s, scale)
    with scale >= 0 multiplying the source power. Gaps between intervals
    mean the light is off (scale 0); an empty schedule keeps it off for the
    whole run. The last interval may end at infinity.
    """

    intervals: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        cleaned = tuple((float(s), float(e), float(sc)) for s, e, sc in self.intervals)
        object.__setattr__(self, "intervals", cleaned)
        prev_end = 0.0
        for start, end, scale in cleaned:
            if not (start >= 0.0 and math.isfinite(start)):
                raise ValidationError(f"interval start must be finite and >= 0, got {start!r}")
            if not end > start:
                raise ValidationError(f"interval ({start}, {end}) must have start < end")
            if math.isnan(end):
                raise ValidationError("interval end must not be NaN")
            if start < prev_end:
                raise ValidationError("intervals must be sorted and non-overlapping")
            if not (scale >= 0.0 and math.isfinite(scale)):
                raise ValidationError(f"interval scale must be finite and >= 0, got {scale!r}")
            prev_end = end

    @classmethod
    def always_on(cls, scale: float = 1.0) -> "LightSchedule":
        return cls(intervals=((0.0, math.inf, scale),))

    @classmethod
    def off(cls) -> "LightSchedule":
        return cls(intervals=())

    def scale_at(self, t: float) -> float:
        """Drive scale at time t; intervals are half-open [start, end)."""
        for start, end, scale in self.intervals:
            if start <= t < end:
                return scale
        return 0.0

    def scaled(self, factor: float) -> "LightSchedule":
        """New schedule with every interval scale multiplied by factor."""
        if not (factor >= 0.0 and math.isfinite(factor)):
            raise ValidationError(f"scale factor must be finite and >= 0, got {factor!r}")
        return LightSchedule(tuple((s, e, sc * factor) for s, e, sc in self.intervals))


@dataclass(frozen=True)
class SimConfig:
    """Integration settings."""

    duration: float  # s
    dt: float = 0.01  # s
    record_stride: int = 1  # keep every Nth step
    metric_window: float = 300.0  # s, "final value" window used downstream

    def __post_init__(self):
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValidationError(f"dt must be finite and > 0, got {self.dt!r}")
        if not (self.duration > 0.0 and math.isfinite(self.duration)):
            raise ValidationError(f"duration must be finite and > 0, got {self.duration!r}")
        if self.duration < self.dt:
            raise ValidationError("duration must be at least dt")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ValidationError(f"record_stride must be an integer >= 1, got {self.record_stride!r}")
        if not (self.metric_window > 0.0 and math.isfinite(self.metric_window)):
            raise ValidationError(f"metric_window must be finite and > 0, got {self.metric_window!r}")


@dataclass(frozen=True)
class Trajectory:
    """Recorded temperature samples, uniformly spaced dt * record_stride."""

    samples: tuple[ThermalState, ...]
    kind: WallKind

    def __post_init__(self):
        if not self.samples:
            raise ValidationError("trajectory must hold at least one sample")
        times = [s.time for s in self.samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError("trajectory time stamps must be strictly increasing")

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(s.time for s in self.samples)

    @property
    def silicone(self) -> tuple[float, ...]:
        return tuple(s.silicone_temperature for s in self.samples)

    @property
    def lig(self) -> tuple[float, ...]:
        if self.kind is not WallKind.BILAYER:
            raise KindMismatchError("single-layer trajectory has no lig channel")
        return tuple(s.lig_temperature for s in self.samples)

    @property
    def final(self) -> ThermalState:
        return self.samples[-1]


def _stability_detail(assembly: WallAssembly) -> tuple[float, str]:
    sil = assembly.silicone
    if assembly.kind is WallKind.SINGLE_LAYER:
        g = convective_conductance(sil)
        if g <= 0.0:
            return math.inf, "silicone"
        return heat_capacity(sil) / g, "silicone"
    k = coupling_conductance(sil)
    tau_s = heat_capacity(sil) / (convective_conductance(sil) + k)
    tau_l = heat_capacity(assembly.lig) / (convective_conductance(assembly.lig) + k)
    if tau_l <= tau_s:
        return tau_l, "lig"
    return tau_s, "silicone"


def stability_limit(assembly: WallAssembly, env: Environment) -> float:
    """Largest safe explicit step: the smallest lumped time constant, in s.

    Each layer's time constant is its heat capacity over the total linear
    loss conductance acting on it (convection plus interlayer coupling).
    """
    return _stability_detail(assembly)[0]


def euler_step(state: ThermalState, assembly: WallAssembly, source: HeatSource,
               env: Environment, scale: float, dt: float) -> ThermalState:
    """One forward-Euler step of length dt."""
    if not dt > 0.0:
        raise ValidationError(f"dt must be > 0, got {dt!r}")
    if assembly.kind is WallKind.SINGLE_LAYER:
        rate = rhs_single(state, assembly, source, env, scale)
        return ThermalState(state.time + dt,
                            state.silicone_temperature + dt * rate)
    d_s, d_l = rhs_bilayer(state, assembly, source, env, scale)
    return ThermalState(state.time + dt,
                        state.silicone_temperature + dt * d_s,
                        state.lig_temperature + dt * d_l)


def _segments(schedule: LightSchedule, n_steps: int, dt: float):
    """Schedule as contiguous (start_step, end_step, scale) runs over [0, n)."""
    runs = []
    cursor = 0
    for start, end, scale in schedule.intervals:
        i0 = int(round(start / dt))
        i1 = n_steps if math.isinf(end) else int(round(end / dt))
        i0, i1 = max(i0, cursor), min(i1, n_steps)
        if i1 <= i0:
            continue
        if i0 > cursor:
            runs.append((cursor, i0, 0.0))
        runs.append((i0, i1, scale))
        cursor = i1
        if cursor >= n_steps:
            break
    if cursor < n_steps:
        runs.append((cursor, n_steps, 0.0))
    return runs


def run(assembly: WallAssembly, source: HeatSource, schedule: LightSchedule,
        env: Environment, config: SimConfig,
        initial: ThermalState | None = None) -> Trajectory:
    """Integrate the wall temperatures over [0, duration].

    Starts from ambient temperature unless an explicit initial state is
    given (its time stamp is ignored; integration always starts at t = 0).
    Recording keeps every record_stride-th step, first sample at t = 0.
    Rejects dt above the stability limit, naming the limiting layer.
    Identical inputs produce bit-identical trajectories.
    """
    limit, limiting = _stability_detail(assembly)
    dt = config.dt
    if dt > limit:
        raise StabilityError(
            f"dt={dt:g} s exceeds the stability limit {limit:.6g} s "
            f"set by the {limiting} layer", limit, limiting)

    bilayer = assembly.kind is WallKind.BILAYER
    theta_e = env.ambient_temperature
    if initial is None:
        ts = tl = theta_e
    else:
        if bilayer and initial.lig_temperature is None:
            raise KindMismatchError("bilayer run needs an initial lig_temperature")
        ts = initial.silicone_temperature
        tl = initial.lig_temperature if bilayer else theta_e

    sil = assembly.silicone
    cap_s = heat_capacity(sil)
    g_s = convective_conductance(sil)
    if bilayer:
        lig = assembly.lig
        cap_l = heat_capacity(lig)
        g_l = convective_conductance(lig)
        k = coupling_conductance(sil)

    n_steps = int(math.floor(config.duration / dt + 1e-9))
    stride = config.record_stride
    constant_flux = source.mode is SourceMode.CONSTANT_FLUX

    samples = []

    def record(step: int) -> None:
        t = step * dt
        if not (math.isfinite(ts) and ts > 0.0) or (
                bilayer and not (math.isfinite(tl) and tl > 0.0)):
            raise NumericalError(
                f"temperature became non-finite or non-positive at t={t:g} s")
        samples.append(ThermalState(t, ts, tl) if bilayer else ThermalState(t, ts))

    record(0)
    for i0, i1, scale in _segments(schedule, n_steps, dt):
        if constant_flux:
            q_s = _source_input(source, sil, scale, ts)
            if bilayer:
                q_l = _source_input(source, lig, scale, tl)
        for i in range(i0, i1):
            if not constant_flux:
                q_s = _source_input(source, sil, scale, ts)
                if bilayer:
                    q_l = _source_input(source, lig, scale, tl)
            if bilayer:
                d_s, d_l = _bilayer_rates(ts, tl, theta_e, q_s, q_l,
                                          g_s, g_l, k, cap_s, cap_l)
                ts = ts + dt * d_s
                tl = tl + dt * d_l
            else:
                ts = ts + dt * _single_rate(ts, theta_e, q_s, g_s, cap_s)
            if (i + 1) % stride == 0:
                record(i + 1)

    return Trajectory(tuple(samples), assembly.kind)
