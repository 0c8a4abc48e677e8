"""Cusp extraction, scaling fits, and ridge location for sweep grids.

The first suppression time T_s is the time of the first cusp — a local
minimum whose discrete second difference stands out from the series —
after an initial transient window.  T_s grows linearly with the chain
size at the ballistic rate N/(2 v_g), which ``linear_fit`` quantifies;
``maximum_ridge`` tracks where a swept measure peaks at each time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TimeSeries",
    "SweepGrid",
    "first_suppression_time",
    "suppression_times",
    "linear_fit",
    "maximum_ridge",
]

#: Default transient window excluded from cusp detection (units 1/J).
DEFAULT_SKIP = 5.0
#: A local minimum counts as a cusp when its |second difference|
#: exceeds this multiple of the series median.
CUSP_THRESHOLD_RATIO = 3.0

_UNIFORMITY_TOL = 1e-12


@dataclass(frozen=True)
class TimeSeries:
    """A measure sampled on a uniform, strictly ascending time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1 or times.size != values.size:
            raise ValueError(
                f"times and values must be equal-length vectors, got "
                f"{times.shape} and {values.shape}"
            )
        if times.size >= 2 and np.min(np.diff(times)) <= 0.0:
            raise ValueError("times must be strictly ascending")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dt(self) -> float:
        if self.times.size < 2:
            raise ValueError("a single sample has no spacing")
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class SweepGrid:
    """Measure values on a (time × swept parameter) grid;
    ``values[it, ix]`` belongs to (t_axis[it], x_axis[ix])."""

    x_axis: np.ndarray
    t_axis: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        x_axis = np.asarray(self.x_axis, dtype=float)
        t_axis = np.asarray(self.t_axis, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (t_axis.size, x_axis.size):
            raise ValueError(
                f"values shape {values.shape} does not match axes "
                f"({t_axis.size}, {x_axis.size})"
            )
        object.__setattr__(self, "x_axis", x_axis)
        object.__setattr__(self, "t_axis", t_axis)
        object.__setattr__(self, "values", values)


def _check_uniform(times: np.ndarray) -> None:
    spacing = np.diff(times)
    if np.max(np.abs(spacing - spacing[0])) > _UNIFORMITY_TOL:
        raise ValueError("time grid must be uniform within 1e-12")


def suppression_times(
    series: TimeSeries, skip: float = DEFAULT_SKIP, min_separation: float = 0.0
) -> list[float]:
    """Times of every cusp (local minimum with an outlier second
    difference) after the transient window, in ascending order.

    A revival event is typically surrounded by a train of shallower
    ripple minima.  With ``min_separation`` > 0, cusps closer than that
    to their predecessor are grouped into one event, represented by the
    deepest member (earliest on a tie); ``min_separation = 0`` returns
    every raw cusp.
    """
    if series.times.size < 50:
        raise ValueError(
            f"need at least 50 samples for cusp detection, got {series.times.size}"
        )
    _check_uniform(series.times)
    values = series.values
    times = series.times
    second = values[2:] - 2.0 * values[1:-1] + values[:-2]
    interior_t = times[1:-1]
    kept = interior_t >= skip
    if not np.any(kept):
        return []
    threshold = CUSP_THRESHOLD_RATIO * float(np.median(np.abs(second[kept])))
    is_minimum = (values[1:-1] < values[:-2]) & (values[1:-1] <= values[2:])
    cusp = kept & is_minimum & (np.abs(second) > threshold)
    raw_times = interior_t[cusp]
    if min_separation <= 0.0 or raw_times.size == 0:
        return [float(t) for t in raw_times]
    raw_values = values[1:-1][cusp]
    events = []
    group_start = 0
    for index in range(1, raw_times.size + 1):
        ends = index == raw_times.size or (
            raw_times[index] - raw_times[index - 1] >= min_separation
        )
        if ends:
            group = slice(group_start, index)
            deepest = group_start + int(np.argmin(raw_values[group]))
            events.append(float(raw_times[deepest]))
            group_start = index
    return events


def first_suppression_time(series: TimeSeries, skip: float = DEFAULT_SKIP) -> float | None:
    """Time of the first cusp after ``skip``, or None if there is none."""
    found = suppression_times(series, skip=skip)
    return found[0] if found else None


def linear_fit(x, y) -> tuple[float, float, float]:
    """Ordinary least squares: returns (slope, intercept, r²).

    A constant-y input fits exactly (r² = 1 by convention); constant x
    is degenerate and raises ``ValueError``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3 or y.size != x.size:
        raise ValueError(f"need at least 3 paired points, got {x.size} and {y.size}")
    x_mean = float(np.mean(x))
    y_mean = float(np.mean(y))
    x_var = float(np.sum((x - x_mean) ** 2))
    if x_var == 0.0:
        raise ValueError("x values are degenerate (zero variance)")
    slope = float(np.sum((x - x_mean) * (y - y_mean))) / x_var
    intercept = y_mean - slope * x_mean
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - y_mean) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r_squared


def maximum_ridge(grid: SweepGrid) -> list[tuple[float, float]]:
    """Per-time location of the maximum over the swept axis.

    Returns (t, x_at_max) for every time row; ties keep the smallest x
    (first occurrence along the ascending axis).
    """
    if grid.values.size == 0:
        raise ValueError("empty sweep grid")
    result = []
    for it, t in enumerate(grid.t_axis):
        ix = int(np.argmax(grid.values[it]))
        result.append((float(t), float(grid.x_axis[ix])))
    return result
