"""Descriptors of measured or simulated response curves.

Covers the quantities used to compare runs against bench data: 63% response
time with a configurable "final value" convention, plateau detection over a
sliding window, curve normalization, exponential cooling fits, and
peak-degradation ratios across repeated actuation cycles.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    KindMismatchError,
    MetricError,
    NoCrossingError,
    NoPlateauError,
    ValidationError,
)
from .simulate import Trajectory
from .model import WallKind

#: level fraction defining the response time: baseline + 0.632 * (final - baseline)
RESPONSE_FRACTION = 0.632

#: tolerance for window-span bookkeeping on floating time stamps, in s
_TIME_EPS = 1e-9

_UNITS = ("K", "C", "deg")


class FinalConvention(Enum):
    WINDOW_FINAL = "window_final"  # value at the end of a finite window
    PLATEAU = "plateau"  # detected plateau value
    SUPPLIED = "supplied"  # caller-provided final value


@dataclass(frozen=True)
class MeasurementSeries:
    """Time-stamped samples of one scalar channel."""

    times: tuple[float, ...]
    values: tuple[float, ...]
    unit: str = "K"
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.times) != len(self.values):
            raise ValidationError("times and values must have equal length")
        if len(self.times) < 2:
            raise ValidationError("series needs at least 2 points")
        if any(not math.isfinite(t) for t in self.times):
            raise ValidationError("series times must be finite")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValidationError("series times must be strictly increasing")
        if any(not math.isfinite(v) for v in self.values):
            raise ValidationError("series values must be finite (no NaN)")
        if self.unit not in _UNITS:
            raise ValidationError(f"unit must be one of {_UNITS}, got {self.unit!r}")

    @property
    def span(self) -> float:
        return self.times[-1] - self.times[0]


@dataclass(frozen=True)
class ResponseReport:
    """Result of a 63% response-time analysis."""

    baseline: float
    final: float
    final_convention: FinalConvention
    t63: float  # s, linearly interpolated crossing time
    peak_value: float
    peak_time: float  # s


def series_from_trajectory(trajectory: Trajectory, channel: str = "auto",
                           label: str = "") -> MeasurementSeries:
    """View one trajectory channel as a measurement series.

    channel "auto" picks the liquid-contact surface: the absorber film when
    present, otherwise the silicone wall itself.
    """
    if channel == "auto":
        channel = "theta_L" if trajectory.kind is WallKind.BILAYER else "theta_s"
    if channel == "theta_s":
        values = trajectory.silicone
    elif channel == "theta_L":
        values = trajectory.lig
    else:
        raise KindMismatchError(f"unknown trajectory channel {channel!r}")
    return MeasurementSeries(trajectory.times, values, unit="K",
                             label=label or channel)


def _interp_at(series: MeasurementSeries, t: float) -> float:
    return float(np.interp(t, series.times, series.values))


def response_time_63(series: MeasurementSeries,
                     convention: FinalConvention = FinalConvention.WINDOW_FINAL,
                     window: float | None = None,
                     final: float | None = None,
                     plateau_threshold: float | None = None) -> ResponseReport:
    """Earliest time the series covers 63.2% of its baseline-to-final swing.

    The baseline is the first sample. The final value comes from the chosen
    convention: the (interpolated) value at baseline time + window, a
    detected plateau, or an explicitly supplied value. The crossing time is
    linearly interpolated between the bracketing samples, and falling series
    are handled symmetrically (crossing downward toward a lower final).
    """
    baseline = series.values[0]
    if convention is FinalConvention.WINDOW_FINAL:
        if window is None:
            raise ValidationError("window_final convention requires a window")
        end = series.times[0] + window
        if end > series.times[-1] + _TIME_EPS:
            raise ValidationError(
                f"window {window:g} s exceeds the series span {series.span:g} s")
        final_value = _interp_at(series, min(end, series.times[-1]))
    elif convention is FinalConvention.PLATEAU:
        if window is None or plateau_threshold is None:
            raise ValidationError("plateau convention requires window and plateau_threshold")
        final_value, _ = plateau_value(series, plateau_threshold, window)
    elif convention is FinalConvention.SUPPLIED:
        if final is None:
            raise ValidationError("supplied convention requires a final value")
        final_value = float(final)
    else:
        raise ValidationError(f"unknown convention {convention!r}")

    if final_value == baseline:
        raise NoCrossingError("final equals baseline: no response to time")
    level = baseline + RESPONSE_FRACTION * (final_value - baseline)
    rising = final_value > baseline

    values = series.values
    t63 = None
    for i in range(1, len(values)):
        crossed = values[i] >= level if rising else values[i] <= level
        if crossed:
            v0, v1 = values[i - 1], values[i]
            t0, t1 = series.times[i - 1], series.times[i]
            t63 = t0 + (level - v0) * (t1 - t0) / (v1 - v0)
            break
    if t63 is None:
        raise NoCrossingError(
            f"series never reaches the {RESPONSE_FRACTION:.1%} level {level:g}")

    peak_idx = int(np.argmax(values))
    return ResponseReport(baseline=baseline, final=final_value,
                          final_convention=convention, t63=t63,
                          peak_value=values[peak_idx],
                          peak_time=series.times[peak_idx])


def plateau_value(series: MeasurementSeries, threshold: float,
                  window: float) -> tuple[float, float]:
    """Earliest window of the given length whose value range stays under
    the threshold; returns (mean over that window, window start time).

    Windows are anchored at sample times and include every sample in
    [t, t + window].
    """
    if not threshold > 0.0:
        raise ValidationError(f"threshold must be > 0, got {threshold!r}")
    if not window > 0.0:
        raise ValidationError(f"window must be > 0, got {window!r}")
    if series.span + _TIME_EPS < window:
        raise ValidationError(
            f"series span {series.span:g} s is shorter than the window {window:g} s")

    times = np.asarray(series.times)
    values = np.asarray(series.values)
    last_anchor = series.times[-1] - window
    for i, t0 in enumerate(series.times):
        if t0 > last_anchor + _TIME_EPS:
            break
        j = int(np.searchsorted(times, t0 + window + _TIME_EPS, side="right"))
        chunk = values[i:j]
        if float(chunk.max()) - float(chunk.min()) < threshold:
            return float(chunk.mean()), t0
    raise NoPlateauError(
        f"no {window:g} s window stays within {threshold:g}")


def normalize_curve(series: MeasurementSeries, plateau: float) -> MeasurementSeries:
    """Affine rescale sending the first sample to 0 and the plateau to 1."""
    start = series.values[0]
    swing = plateau - start
    if swing == 0.0:
        raise ValidationError("plateau equals the initial value: normalization degenerate")
    values = tuple((v - start) / swing for v in series.values)
    label = f"{series.label} (normalized)" if series.label else "normalized"
    return MeasurementSeries(series.times, values, unit=series.unit, label=label)


def cooling_fit(series: MeasurementSeries, ambient: float) -> tuple[float, float]:
    """Newton-cooling fit of a decaying series: least squares on
    log(value - ambient) against time. Returns (tau_s, r_squared)."""
    values = np.asarray(series.values)
    if not np.all(values > ambient):
        raise ValidationError(
            "all values must sit strictly above ambient for a log-domain fit")
    times = np.asarray(series.times)
    logs = np.log(values - ambient)
    slope, intercept = np.polyfit(times, logs, 1)
    if slope >= 0.0:
        raise MetricError("series is not decaying toward ambient")
    residuals = logs - (slope * times + intercept)
    ss_tot = float(((logs - logs.mean()) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - float((residuals ** 2).sum()) / ss_tot
    return -1.0 / float(slope), r_squared


def cycle_degradation(peak_angles) -> list[float]:
    """Per-cycle peaks normalized by the first cycle's peak."""
    peaks = [float(p) for p in peak_angles]
    if not peaks:
        raise ValidationError("peak list must not be empty")
    if peaks[0] <= 0.0:
        raise ValidationError(f"first peak must be > 0, got {peaks[0]!r}")
    first = peaks[0]
    return [p / first for p in peaks]


def angular_change_ratio(series: MeasurementSeries, reference: float) -> float:
    """Final sample divided by a caller-supplied reference value."""
    if not reference > 0.0:
        raise ValidationError(f"reference must be > 0, got {reference!r}")
    return series.values[-1] / reference


def cycle_peaks(series: MeasurementSeries, rise_fraction: float = 0.5,
                return_fraction: float = 0.1) -> list[float]:
    """Peak value of each actuation cycle in a multi-cycle series.

    A cycle opens when the signal climbs above baseline + rise_fraction of
    the global swing and closes when it falls back below baseline +
    return_fraction of the swing. Intended for repeated on/off records
    where the signal returns near its starting value between cycles.
    """
    if not 0.0 < return_fraction < rise_fraction < 1.0:
        raise ValidationError("need 0 < return_fraction < rise_fraction < 1")
    baseline = series.values[0]
    swing = max(series.values) - baseline
    if swing <= 0.0:
        raise ValidationError("series never rises above its first sample")
    rise_level = baseline + rise_fraction * swing
    return_level = baseline + return_fraction * swing

    peaks: list[float] = []
    current: float | None = None
    for v in series.values:
        if current is None:
            if v >= rise_level:
                current = v
        else:
            current = max(current, v)
            if v <= return_level:
                peaks.append(current)
                current = None
    if current is not None:
        peaks.append(current)
    return peaks
