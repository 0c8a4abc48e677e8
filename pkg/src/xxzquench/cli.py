"""Command-line front end: experiment orchestration and CSV emission.

Subcommands
-----------
``ground``
    Solve the self-consistency at one parameter point and dump the
    converged Υ values plus the full quasiparticle mode table.
``quench``
    Time series of two-site discord and concurrence after a sudden
    parameter change, with cusp and shape summaries appended.
``sweep``
    Measures on a (swept quench parameter × time) grid, long format,
    with ridge summaries appended.
``scaling``
    First-suppression-time scaling over a list of chain sizes with a
    linear fit against the ballistic prediction.
``oracle-compare``
    Mean-field pipeline vs exact diagonalization on a small chain.

Configuration is a flat ``key = value`` text file (``#`` comments and
blank lines allowed) merged with ``key=value`` command-line overrides;
overrides win.  Every run writes one CSV whose leading ``#`` comments
record the artifact version and the resolved configuration (execution
details — thread count and output path — are excluded so repeated runs
are byte-comparable).  Floats are written as shortest round-trip
decimals and complex quantities as adjacent ``_re``/``_im`` columns.

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 analysis failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__, analysis, gaussian, measures, oracle, quench
from .errors import (
    AnalysisError,
    ConfigError,
    ConvergenceError,
    PhysicalityError,
    ResourceError,
    SingularModeError,
)
from .meanfield import MeanFieldSolution, solve_self_consistent
from .model import ModelParams
from .quench import CorrelatorBlock

__all__ = ["main"]

logger = logging.getLogger(__name__)

#: Marker value for keys resolved from other parameters when absent.
_AUTO = "auto"

#: Fraction of the measure range a rise/drop must exceed to count.
_SHAPE_FRACTION = 0.2
#: Largest late-window band (fraction of range) still called saturated.
_SATURATION_FRACTION = 0.6
#: Default t_max for a quench, in units of the ballistic revival time.
_T_MAX_FACTOR = 3.0
#: Default cusp-grouping window, in units of the ballistic revival time.
_MIN_SEPARATION_FACTOR = 0.45
#: Largest chain size accepted by the exact-diagonalization comparison.
_MAX_COMPARE_SITES = 12


# ---------------------------------------------------------------------------
# Configuration schema and parsing


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"value must be finite, got {text!r}")
    return value


def _parse_str(text: str) -> str:
    return text


def _parse_int_list(text: str) -> tuple[int, ...]:
    items = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(int(piece, 10) for piece in items)


def _parse_float_or_auto(text: str) -> float | None:
    if text.strip().lower() == _AUTO:
        return None
    return _parse_float(text)


_PARSERS: dict[str, Callable[[str], object]] = {
    "int": _parse_int,
    "float": _parse_float,
    "str": _parse_str,
    "int_list": _parse_int_list,
    "float_or_auto": _parse_float_or_auto,
}


def _format_value(kind: str, value: object) -> str:
    """Canonical textual form of a resolved config value."""
    if value is None:
        return _AUTO
    if kind == "int_list":
        return ",".join(str(item) for item in value)
    if kind in ("float", "float_or_auto"):
        return repr(float(value))
    return str(value)


_SOLVER_KEYS: dict[str, tuple[str, object]] = {
    "mixing": ("float", 0.5),
    "tol": ("float", 1e-12),
    "max_iter": ("int", 10_000),
}

_MEASURE_KEYS: dict[str, tuple[str, object]] = {
    "grid_theta": ("int", 65),
    "grid_phi": ("int", 129),
    "refine_tol": ("float", 1e-7),
}

_EXECUTION_KEYS: dict[str, tuple[str, object]] = {
    "threads": ("int", 1),
}

#: Keys describing execution rather than the experiment; excluded from
#: the CSV header so reruns with different resources compare equal.
_HEADER_EXCLUDED = frozenset({"threads", "output"})


def _schema(command: str) -> dict[str, tuple[str, object]]:
    base: dict[str, tuple[str, object]] = {"j": ("float", 1.0)}
    if command == "ground":
        base.update(
            n=("int", 512),
            delta=("float", 1.0),
            h=("float", 0.0),
        )
        base.update(_SOLVER_KEYS)
        base["output"] = ("str", "ground.csv")
    elif command == "quench":
        base.update(
            n=("int", 100),
            delta_initial=("float", 0.98),
            delta_final=("float", 1.0),
            h_initial=("float", 0.0),
            h_final=("float", 0.0),
            t_max=("float_or_auto", None),
            dt=("float", 0.02),
            m_list=("int_list", (1,)),
            skip=("float", 5.0),
            min_separation=("float_or_auto", None),
        )
        base.update(_SOLVER_KEYS)
        base.update(_MEASURE_KEYS)
        base["output"] = ("str", "quench.csv")
    elif command == "sweep":
        base.update(
            mode=("str", "delta"),
            n=("int", 400),
            t_max=("float", 40.0),
            dt=("float", 0.1),
            m_list=("int_list", (1,)),
            delta_initial=("float", 0.0),
            h=("float", 0.0),
            delta=("float", 0.5),
            h_final=("float", 0.0),
            sweep_start=("float_or_auto", None),
            sweep_stop=("float_or_auto", None),
            sweep_step=("float_or_auto", None),
        )
        base.update(_SOLVER_KEYS)
        base.update(_MEASURE_KEYS)
        base["output"] = ("str", "sweep.csv")
    elif command == "scaling":
        base.update(
            n_list=("int_list", (100, 200, 400, 800)),
            delta_initial=("float", 0.98),
            delta_final=("float", 1.0),
            h=("float", 0.0),
            dt=("float", 0.02),
            t_max_factor=("float", 2.6),
            skip=("float", 5.0),
            min_separation_factor=("float", _MIN_SEPARATION_FACTOR),
            m=("int", 1),
        )
        base.update(_SOLVER_KEYS)
        base.update(_MEASURE_KEYS)
        base["output"] = ("str", "scaling.csv")
    elif command == "oracle-compare":
        base.update(
            n=("int", 10),
            delta_initial=("float", 0.98),
            delta_final=("float", 1.0),
            h_initial=("float", 0.0),
            h_final=("float", 0.0),
            t_max=("float", 20.0),
            dt=("float", 0.5),
            m=("int", 1),
        )
        base.update(_SOLVER_KEYS)
        base.update(_MEASURE_KEYS)
        base["output"] = ("str", "oracle_compare.csv")
    else:  # pragma: no cover - guarded by argparse choices
        raise ValueError(f"unknown command {command!r}")
    base.update(_EXECUTION_KEYS)
    return base


def _read_config_file(path: Path) -> dict[str, str]:
    """Parse a flat ``key = value`` file into raw strings."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(
                f"{path}:{lineno}: expected key=value, got {raw.strip()!r}"
            )
        mapping[key.strip()] = value.strip()
    return mapping


def _apply_entries(
    schema: dict[str, tuple[str, object]],
    config: dict[str, object],
    entries: dict[str, str],
    source: str,
) -> None:
    for key, text in entries.items():
        if key not in schema:
            known = ", ".join(sorted(schema))
            raise ConfigError(f"{source}: unknown key {key!r} (known keys: {known})")
        kind = schema[key][0]
        try:
            config[key] = _PARSERS[kind](text)
        except ValueError as exc:
            raise ConfigError(f"{source}: bad value for {key!r}: {exc}") from exc


def _resolve_config(
    command: str, config_path: str | None, overrides: Sequence[str]
) -> tuple[dict[str, tuple[str, object]], dict[str, object]]:
    """Merge defaults, config file, and overrides (overrides win)."""
    schema = _schema(command)
    config = {key: default for key, (_, default) in schema.items()}
    if config_path is not None:
        _apply_entries(schema, config, _read_config_file(Path(config_path)), config_path)
    cli_entries: dict[str, str] = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        cli_entries[key.strip()] = value.strip()
    _apply_entries(schema, config, cli_entries, "command line")
    return schema, config


# ---------------------------------------------------------------------------
# CSV emission


def _format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, complex):
        raise TypeError("complex cells must be split into _re/_im columns")
    return repr(float(value))


def complex_columns(name: str) -> list[str]:
    """Column names for one complex quantity (re/im convention)."""
    return [f"{name}_re", f"{name}_im"]


def write_csv(
    path: Path,
    command: str,
    schema: dict[str, tuple[str, object]],
    config: dict[str, object],
    columns: Sequence[str],
    rows: Sequence[Sequence[object]],
    summary: Sequence[tuple[str, object]] = (),
) -> None:
    """Emit one run as a CSV with a reproducibility header.

    Leading ``#`` comments carry the artifact version, the command, and
    the resolved configuration in sorted key order; trailing ``#``
    comments carry derived summary values.
    """
    lines = [f"# xxzquench {__version__}", f"# command={command}"]
    for key in sorted(config):
        if key in _HEADER_EXCLUDED:
            continue
        lines.append(f"# {key}={_format_value(schema[key][0], config[key])}")
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} != column count {len(columns)}")
        lines.append(",".join(_format_cell(cell) for cell in row))
    for key, value in summary:
        lines.append(f"# {key}={_format_cell(value)}")
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Shared numeric helpers


def _solve(config: dict[str, object], delta: float, h: float, n: int) -> MeanFieldSolution:
    params = ModelParams(
        coupling_j=config["j"], anisotropy=delta, field=h, n_sites=n
    )
    return solve_self_consistent(
        params,
        mixing=config["mixing"],
        tol=config["tol"],
        max_iter=config["max_iter"],
    )


def _time_grid(t_max: float, dt: float) -> np.ndarray:
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt!r}")
    if t_max < dt:
        raise ConfigError(f"t_max must be at least dt, got {t_max!r}")
    count = int(math.floor(t_max / dt + 1e-9)) + 1
    return dt * np.arange(count)


def _axis_grid(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0.0:
        raise ConfigError(f"sweep_step must be positive, got {step!r}")
    if stop < start:
        raise ConfigError(f"sweep_stop {stop!r} below sweep_start {start!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _check_m_list(m_list: Sequence[int]) -> tuple[int, ...]:
    if len(set(m_list)) != len(m_list):
        raise ConfigError(f"m_list has duplicate entries: {list(m_list)!r}")
    for m in m_list:
        if m < 1:
            raise ConfigError(f"distances must be at least 1, got {m!r}")
    return tuple(m_list)


def _ordered_map(threads: int, func, items):
    """Map preserving order; thread pool only when threads > 1.

    Work items are pure functions of their inputs, so the scheduling
    has no effect on the values and output stays byte-identical for
    any thread count.
    """
    if threads < 1:
        raise ConfigError(f"threads must be at least 1, got {threads!r}")
    if threads == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _measure_series(
    setup,
    m_list: Sequence[int],
    times: np.ndarray,
    config: dict[str, object],
    threads: int = 1,
):
    """Discord/concurrence series per distance, plus raw correlators.

    Returns ``(discord, concurrence, hop, pair)`` where the measure
    arrays are indexed ``[k, it]`` for ``m_list[k]`` and the correlator
    arrays follow :func:`xxzquench.quench.correlator_series`.
    """
    m_max = max(m_list)
    hop, pair = quench.correlator_series(setup, m_max, times)
    grid = (config["grid_theta"], config["grid_phi"])
    refine_tol = config["refine_tol"]

    def one_time(it: int):
        block = CorrelatorBlock(time=float(times[it]), hop=hop[it], pair=pair[it])
        out = []
        for m in m_list:
            state = gaussian.two_site_state(block, m)
            result = measures.quantum_discord(state, grid=grid, refine_tol=refine_tol)
            out.append((result.discord, result.concurrence))
        return out

    per_time = _ordered_map(threads, one_time, range(times.size))
    discord = np.array([[row[k][0] for row in per_time] for k in range(len(m_list))])
    concurrence = np.array([[row[k][1] for row in per_time] for k in range(len(m_list))])
    return discord, concurrence, hop, pair


def _shape_flags(values: np.ndarray) -> dict[str, bool]:
    """Qualitative shape of a measure series.

    ``rises_to_maximum``: the global maximum sits after t = 0 and
    exceeds the initial value by a fixed fraction of the range.
    ``drops_after_peak``: the series later falls below the peak by the
    same fraction.  ``late_saturation``: the last-quarter band is
    narrow compared with the full range.
    """
    spread = float(np.max(values) - np.min(values))
    if spread <= 0.0:
        return {
            "rises_to_maximum": False,
            "drops_after_peak": False,
            "late_saturation": True,
        }
    peak = int(np.argmax(values))
    rises = peak > 0 and float(values[peak] - values[0]) > _SHAPE_FRACTION * spread
    drops = (
        float(values[peak] - np.min(values[peak:])) > _SHAPE_FRACTION * spread
    )
    tail = values[-(values.size // 4 or 1) :]
    saturates = float(np.max(tail) - np.min(tail)) < _SATURATION_FRACTION * spread
    return {
        "rises_to_maximum": rises,
        "drops_after_peak": drops,
        "late_saturation": saturates,
    }


# ---------------------------------------------------------------------------
# Commands


def cmd_ground(schema: dict, config: dict) -> int:
    """Solve one parameter point and write the mode table."""
    solution = _solve(config, config["delta"], config["h"], config["n"])
    v_g, q_star = quench.group_velocity_max(solution)
    q, a, b, eps, theta = solution.positive_mode_arrays()
    columns = [
        "row_type", "q", "a", "b", "eps", "theta",
        "u1", "u2", "u3", "residual", "iterations", "v_g", "q_star",
    ]
    rows: list[list[object]] = [[
        "summary", None, None, None, None, None,
        solution.mf.u1, solution.mf.u2, solution.mf.u3,
        solution.residual, solution.iterations, v_g, q_star,
    ]]
    for k in range(q.size):
        rows.append([
            "mode", q[k], a[k], b[k], eps[k], theta[k],
            None, None, None, None, None, None, None,
        ])
    write_csv(Path(config["output"]), "ground", schema, config, columns, rows)
    return 0


def cmd_quench(schema: dict, config: dict) -> int:
    """Write the measure time series for one quench."""
    m_list = _check_m_list(config["m_list"])
    n = config["n"]
    pre = _solve(config, config["delta_initial"], config["h_initial"], n)
    post = _solve(config, config["delta_final"], config["h_final"], n)
    setup = quench.prepare_quench(pre, post)
    v_g, _ = quench.group_velocity_max(post)
    revival = quench.predicted_suppression_time(n, v_g)
    if config["t_max"] is None:
        config["t_max"] = _T_MAX_FACTOR * revival
    if config["min_separation"] is None:
        config["min_separation"] = _MIN_SEPARATION_FACTOR * revival
    times = _time_grid(config["t_max"], config["dt"])
    discord, concurrence, hop, pair = _measure_series(
        setup, m_list, times, config, threads=config["threads"]
    )

    columns = ["t"]
    for m in m_list:
        columns += [f"q_m{m}", f"c_m{m}", f"t_m{m}"] + complex_columns(f"p_m{m}")
    rows = []
    for it in range(times.size):
        row: list[object] = [times[it]]
        for k, m in enumerate(m_list):
            row += [
                discord[k, it], concurrence[k, it], hop[it, m],
                pair[it, m - 1].real, pair[it, m - 1].imag,
            ]
        rows.append(row)

    summary: list[tuple[str, object]] = [
        ("v_g", v_g),
        ("predicted_t_s", revival),
    ]
    for k, m in enumerate(m_list):
        series = analysis.TimeSeries(times, discord[k])
        try:
            events = analysis.suppression_times(
                series, skip=config["skip"], min_separation=config["min_separation"]
            )
        except (ValueError, AnalysisError):
            events = []
        summary.append((f"t_s_m{m}", events[0] if events else None))
        summary.append((f"n_events_m{m}", len(events)))
        summary.append(
            (f"events_m{m}", ";".join(repr(float(t)) for t in events))
        )
        for name, flag in _shape_flags(discord[k]).items():
            summary.append((f"{name}_q_m{m}", flag))
        for name, flag in _shape_flags(concurrence[k]).items():
            summary.append((f"{name}_c_m{m}", flag))
    write_csv(
        Path(config["output"]), "quench", schema, config, columns, rows, summary
    )
    return 0


_SWEEP_DEFAULTS = {
    "delta": ("delta_final", 0.2, 3.0, 0.05),
    "field": ("h_initial", 0.2, 2.0, 0.2),
}


def cmd_sweep(schema: dict, config: dict) -> int:
    """Write the measure grid over a swept quench parameter."""
    mode = config["mode"]
    if mode not in _SWEEP_DEFAULTS:
        raise ConfigError(f"mode must be 'delta' or 'field', got {mode!r}")
    axis_name, start0, stop0, step0 = _SWEEP_DEFAULTS[mode]
    if config["sweep_start"] is None:
        config["sweep_start"] = start0
    if config["sweep_stop"] is None:
        config["sweep_stop"] = stop0
    if config["sweep_step"] is None:
        config["sweep_step"] = step0
    axis = _axis_grid(config["sweep_start"], config["sweep_stop"], config["sweep_step"])
    m_list = _check_m_list(config["m_list"])
    times = _time_grid(config["t_max"], config["dt"])
    n = config["n"]

    # The end of the quench that does not depend on the swept value is
    # solved once and shared across all grid points.
    if mode == "delta":
        shared = _solve(config, config["delta_initial"], config["h"], n)
    else:
        shared = _solve(config, config["delta"], config["h_final"], n)

    def one_point(x: float):
        if mode == "delta":
            pre, post = shared, _solve(config, float(x), config["h"], n)
        else:
            pre, post = _solve(config, config["delta"], float(x), n), shared
        setup = quench.prepare_quench(pre, post)
        discord, concurrence, _, _ = _measure_series(setup, m_list, times, config)
        return discord, concurrence

    per_x = _ordered_map(config["threads"], one_point, axis)

    columns = [axis_name, "t"]
    for m in m_list:
        columns += [f"q_m{m}", f"c_m{m}"]
    rows = []
    for ix, x in enumerate(axis):
        discord, concurrence = per_x[ix]
        for it in range(times.size):
            row: list[object] = [x, times[it]]
            for k in range(len(m_list)):
                row += [discord[k, it], concurrence[k, it]]
            rows.append(row)

    summary: list[tuple[str, object]] = []
    late = times > 0.5 * float(times[-1])
    for k, m in enumerate(m_list):
        for label, index in (("q", 0), ("c", 1)):
            values = np.array([per_x[ix][index][k] for ix in range(axis.size)]).T
            grid = analysis.SweepGrid(axis, times, values)
            ridge = np.array([x for _, x in analysis.maximum_ridge(grid)])
            summary.append(
                (f"ridge_{label}_m{m}_late_median", float(np.median(ridge[late])))
            )
    write_csv(
        Path(config["output"]), "sweep", schema, config, columns, rows, summary
    )
    return 0


def cmd_scaling(schema: dict, config: dict) -> int:
    """Write the suppression-time scaling table and fit."""
    n_list = config["n_list"]
    if len(set(n_list)) != len(n_list):
        raise ConfigError(f"n_list has duplicate entries: {list(n_list)!r}")
    m = config["m"]
    if m < 1:
        raise ConfigError(f"m must be at least 1, got {m!r}")

    def one_size(n: int):
        pre = _solve(config, config["delta_initial"], config["h"], n)
        post = _solve(config, config["delta_final"], config["h"], n)
        setup = quench.prepare_quench(pre, post)
        v_g, _ = quench.group_velocity_max(post)
        revival = quench.predicted_suppression_time(n, v_g)
        times = _time_grid(config["t_max_factor"] * revival, config["dt"])
        discord, _, _, _ = _measure_series(setup, [m], times, config)
        series = analysis.TimeSeries(times, discord[0])
        try:
            events = analysis.suppression_times(
                series,
                skip=config["skip"],
                min_separation=config["min_separation_factor"] * revival,
            )
        except (ValueError, AnalysisError):
            events = []
        return events, revival, v_g

    per_size = _ordered_map(config["threads"], one_size, n_list)

    columns = ["n", "t_s", "n_events", "predicted_t_s"]
    rows = []
    for n, (events, revival, _) in zip(n_list, per_size):
        rows.append([n, events[0] if events else None, len(events), revival])

    summary: list[tuple[str, object]] = []
    for n, (events, _, _) in zip(n_list, per_size):
        summary.append((f"events_n{n}", ";".join(repr(float(t)) for t in events)))
    failed = [n for n, (events, _, _) in zip(n_list, per_size) if not events]
    fitted = [(n, events[0]) for n, (events, _, _) in zip(n_list, per_size) if events]
    if not failed and len(fitted) >= 3:
        slope, intercept, r_squared = analysis.linear_fit(
            [n for n, _ in fitted], [t for _, t in fitted]
        )
        v_g = per_size[-1][2]
        predicted_slope = 1.0 / (2.0 * v_g)
        summary += [
            ("slope", slope),
            ("intercept", intercept),
            ("r_squared", r_squared),
            ("v_g", v_g),
            ("predicted_slope", predicted_slope),
            ("relative_deviation", (slope - predicted_slope) / predicted_slope),
        ]
    write_csv(
        Path(config["output"]), "scaling", schema, config, columns, rows, summary
    )
    if failed:
        logger.error("no suppression event detected for n in %s", failed)
        return 4
    return 0


_X_POSITIONS = frozenset(
    {(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)}
)


def _off_x_leakage(rho: np.ndarray) -> float:
    """Largest entry outside the diagonal and anti-diagonal."""
    return max(
        abs(rho[i, j]) for i in range(4) for j in range(4)
        if (i, j) not in _X_POSITIONS
    )


def cmd_oracle_compare(schema: dict, config: dict) -> int:
    """Write mean-field vs exact-diagonalization measure series."""
    n = config["n"]
    if n > _MAX_COMPARE_SITES:
        raise ConfigError(
            f"the comparison runs exact diagonalization; n must be at most "
            f"{_MAX_COMPARE_SITES}, got {n}"
        )
    m = config["m"]
    if m < 1:
        raise ConfigError(f"m must be at least 1, got {m!r}")
    times = _time_grid(config["t_max"], config["dt"])
    grid = (config["grid_theta"], config["grid_phi"])
    refine_tol = config["refine_tol"]

    pre = _solve(config, config["delta_initial"], config["h_initial"], n)
    post = _solve(config, config["delta_final"], config["h_final"], n)
    setup = quench.prepare_quench(pre, post)
    mf_discord, mf_concurrence, _, _ = _measure_series(
        setup, [m], times, config, threads=config["threads"]
    )

    def model(delta: float, h: float) -> ModelParams:
        return ModelParams(
            coupling_j=config["j"], anisotropy=delta, field=h, n_sites=n
        )

    ham_pre = oracle.build_hamiltonian(model(config["delta_initial"], config["h_initial"]))
    ham_post = oracle.build_hamiltonian(model(config["delta_final"], config["h_final"]))
    ham_post.eigensystem  # materialize once before any worker threads
    ground = oracle.ground_state(ham_pre)

    def one_time(t: float):
        evolved = oracle.ed_evolve(ground, ham_post, float(t))
        rho = oracle.reduced_two_site(evolved, 0, m)
        q_ed = oracle.generic_discord(rho, grid=grid, refine_tol=refine_tol)
        c_ed = oracle.generic_concurrence(rho)
        xstate = gaussian.xstate_from_matrix(rho, m)
        q_x = measures.quantum_discord(xstate, grid=grid, refine_tol=refine_tol)
        return q_ed, c_ed, abs(q_x.discord - q_ed), _off_x_leakage(rho)

    per_time = _ordered_map(config["threads"], one_time, times)

    columns = [
        "t", "q_meanfield", "q_ed", "c_meanfield", "c_ed", "q_xagree", "x_leakage",
    ]
    rows = []
    for it in range(times.size):
        q_ed, c_ed, q_xagree, x_leak = per_time[it]
        rows.append([
            times[it], mf_discord[0, it], q_ed,
            mf_concurrence[0, it], c_ed, q_xagree, x_leak,
        ])

    ed_q = np.array([entry[0] for entry in per_time])
    ed_c = np.array([entry[1] for entry in per_time])
    summary: list[tuple[str, object]] = [
        ("max_abs_discord_deviation", float(np.max(np.abs(mf_discord[0] - ed_q)))),
        ("max_abs_concurrence_deviation", float(np.max(np.abs(mf_concurrence[0] - ed_c)))),
        ("max_xstate_agreement_gap", float(max(entry[2] for entry in per_time))),
        ("max_x_leakage", float(max(entry[3] for entry in per_time))),
    ]
    if np.std(mf_discord[0]) > 0.0 and np.std(ed_q) > 0.0:
        summary.append(
            ("pearson_discord", float(np.corrcoef(mf_discord[0], ed_q)[0, 1]))
        )
    write_csv(
        Path(config["output"]), "oracle-compare", schema, config, columns, rows, summary
    )
    return 0


# ---------------------------------------------------------------------------
# Entry point


_COMMANDS: dict[str, Callable[[dict, dict], int]] = {
    "ground": cmd_ground,
    "quench": cmd_quench,
    "sweep": cmd_sweep,
    "scaling": cmd_scaling,
    "oracle-compare": cmd_oracle_compare,
}

_HELP = {
    "ground": "solve the self-consistency and dump the mode table",
    "quench": "measure time series after a sudden parameter change",
    "sweep": "measure grid over a swept quench parameter",
    "scaling": "suppression-time scaling over chain sizes",
    "oracle-compare": "mean-field pipeline vs exact diagonalization",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxzquench",
        description="Quench dynamics and two-site quantum correlations "
        "of the mean-field XXZ chain.",
    )
    parser.add_argument(
        "--version", action="version", version=f"xxzquench {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _HELP.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument(
            "--config", default=None, metavar="FILE",
            help="flat key=value configuration file",
        )
        sub.add_argument(
            "overrides", nargs="*", metavar="KEY=VALUE",
            help="configuration overrides (win over the file)",
        )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and translate failures into exit codes."""
    args = _build_parser().parse_args(argv)
    try:
        schema, config = _resolve_config(args.command, args.config, args.overrides)
        return _COMMANDS[args.command](schema, config)
    except (ConfigError, ResourceError, ValueError) as exc:
        print(f"xxzquench {args.command}: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, SingularModeError, PhysicalityError) as exc:
        print(f"xxzquench {args.command}: solver failure: {exc}", file=sys.stderr)
        return 3
    except AnalysisError as exc:
        print(f"xxzquench {args.command}: analysis failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
