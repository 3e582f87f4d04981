"""
Flat key-value run configuration for the command-line front end.

Format: UTF-8 text, one `key = value` pair per line, dotted keys
(e.g. ``bath1.r = 0.3``), ``#`` comments, blank lines ignored.  No
environment-variable fallbacks: everything lives in the file or on the
command line, so runs are reproducible by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .gaussian import BathSpec, SystemParams

__all__ = ["ConfigError", "AxisSpec", "SweepGrid", "RunConfig", "parse_config"]

MODES = ("steady", "sweep", "tc", "labframe", "oracle")
SWEEP_AXES = ("r1", "r2", "phi1", "phi2", "J", "T")
FRAMES = ("rotating", "lab")
CRITERIA = ("mean", "min", "max")


class ConfigError(Exception):
    """Malformed configuration; message names the offending line or key."""


@dataclass(frozen=True)
class AxisSpec:
    """One linear sweep axis: parameter name, range and point count."""

    name: str
    min: float
    max: float
    count: int

    def values(self) -> list[float]:
        step = (self.max - self.min) / (self.count - 1)
        return [self.min + i * step for i in range(self.count)]


@dataclass(frozen=True)
class SweepGrid:
    """Up to two linear axes; rows are emitted with the first axis slowest."""

    axes: tuple[AxisSpec, ...]
    frame: str = "rotating"


@dataclass
class RunConfig:
    """Parsed run configuration for all CLI modes."""

    mode: str
    sys: SystemParams = field(default_factory=SystemParams)
    bath1: BathSpec = field(default_factory=BathSpec)
    bath2: BathSpec = field(default_factory=BathSpec)
    temperature: float = 0.0
    grid: SweepGrid | None = None
    out: str | None = None
    seed: int = 0
    # tc mode
    tc_r_min: float = 0.0
    tc_r_max: float = 1.0
    tc_r_count: int = 101
    tc_J_list: tuple[float, ...] = (0.7,)
    tc_frame: str = "rotating"
    tc_criterion: str = "mean"
    tc_tol: float = 1e-4
    # labframe mode
    lab_dt_per_period: int = 512
    lab_eps_ps: float = 1e-9
    lab_max_periods: int = 10_000
    # oracle mode
    oracle_n_traj: int = 100_000
    oracle_dt: float | None = None
    oracle_t_end: float | None = None
    oracle_raw_N: tuple[float, float] | None = None
    oracle_raw_M: tuple[complex, complex] | None = None


def _parse_lines(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _get_float(pairs: dict[str, str], key: str, default: float) -> float:
    if key not in pairs:
        return default
    value = pairs.pop(key)
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {value!r}") from None


def _get_int(pairs: dict[str, str], key: str, default: int) -> int:
    if key not in pairs:
        return default
    value = pairs.pop(key)
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: not an integer: {value!r}") from None


def _get_choice(pairs: dict[str, str], key: str, default: str, choices: tuple) -> str:
    value = pairs.pop(key, default)
    if value not in choices:
        raise ConfigError(f"key {key!r}: must be one of {choices}, got {value!r}")
    return value


def _parse_axis(pairs: dict[str, str], prefix: str) -> AxisSpec | None:
    name = pairs.pop(f"{prefix}.name", None)
    if name is None:
        return None
    if name not in SWEEP_AXES:
        raise ConfigError(f"key '{prefix}.name': must be one of {SWEEP_AXES}, got {name!r}")
    lo = _get_float(pairs, f"{prefix}.min", math.nan)
    hi = _get_float(pairs, f"{prefix}.max", math.nan)
    count = _get_int(pairs, f"{prefix}.count", 0)
    if math.isnan(lo) or math.isnan(hi):
        raise ConfigError(f"axis {prefix}: needs both '{prefix}.min' and '{prefix}.max'")
    if count < 2:
        raise ConfigError(f"key '{prefix}.count': must be >= 2, got {count}")
    if not hi > lo:
        raise ConfigError(f"axis {prefix}: max ({hi}) must exceed min ({lo})")
    return AxisSpec(name=name, min=lo, max=hi, count=count)


def parse_config(text: str) -> RunConfig:
    """Parse configuration text, enforcing all physical invariants at parse time."""
    pairs = _parse_lines(text)

    mode = pairs.pop("mode", None)
    if mode is None:
        raise ConfigError("missing required key 'mode'")
    if mode not in MODES:
        raise ConfigError(f"key 'mode': must be one of {MODES}, got {mode!r}")

    try:
        sys = SystemParams(
            omega1=_get_float(pairs, "sys.omega1", 1.0),
            omega2=_get_float(pairs, "sys.omega2", 1.0),
            J=_get_float(pairs, "sys.J", 0.0),
            gamma1=_get_float(pairs, "sys.gamma1", 0.5),
            gamma2=_get_float(pairs, "sys.gamma2", 0.5),
        )
    except ValueError as exc:
        raise ConfigError(f"sys: {exc}") from None

    temperature = _get_float(pairs, "temperature", 0.0)
    if temperature < 0.0:
        raise ConfigError(f"key 'temperature': must be >= 0, got {temperature}")

    baths = []
    for label in ("bath1", "bath2"):
        nbar = _get_float(pairs, f"{label}.nbar", math.nan)
        if math.isnan(nbar):
            from .analytic import nbar_from_temperature

            nbar = nbar_from_temperature(sys.omega1, temperature)
        try:
            baths.append(
                BathSpec(
                    nbar=nbar,
                    r=_get_float(pairs, f"{label}.r", 0.0),
                    phi=_get_float(pairs, f"{label}.phi", 0.0),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{label}: {exc}") from None

    grid = None
    axis1 = _parse_axis(pairs, "grid.axis1")
    axis2 = _parse_axis(pairs, "grid.axis2")
    frame = _get_choice(pairs, "grid.frame", "rotating", FRAMES)
    if axis1 is not None:
        axes = (axis1,) if axis2 is None else (axis1, axis2)
        grid = SweepGrid(axes=axes, frame=frame)
    elif axis2 is not None:
        raise ConfigError("grid.axis2 given without grid.axis1")
    elif mode == "sweep":
        raise ConfigError("mode 'sweep' requires at least grid.axis1")

    j_list_raw = pairs.pop("tc.J_list", None)
    if j_list_raw is None:
        tc_j_list: tuple[float, ...] = (sys.J,) if sys.J > 0 else (0.7,)
    else:
        try:
            tc_j_list = tuple(float(v) for v in j_list_raw.split(","))
        except ValueError:
            raise ConfigError(f"key 'tc.J_list': expected comma-separated numbers, got {j_list_raw!r}") from None
        if any(j < 0 for j in tc_j_list):
            raise ConfigError("key 'tc.J_list': J values must be >= 0")

    raw_n = pairs.pop("oracle.raw_N", None)
    raw_m = pairs.pop("oracle.raw_M", None)
    oracle_raw_n = oracle_raw_m = None
    if (raw_n is None) != (raw_m is None):
        raise ConfigError("oracle.raw_N and oracle.raw_M must be given together")
    if raw_n is not None:
        try:
            oracle_raw_n = tuple(float(v) for v in raw_n.split(","))
            oracle_raw_m = tuple(complex(v) for v in raw_m.split(","))
        except ValueError:
            raise ConfigError("oracle.raw_N / oracle.raw_M: expected two comma-separated values each") from None
        if len(oracle_raw_n) != 2 or len(oracle_raw_m) != 2:
            raise ConfigError("oracle.raw_N / oracle.raw_M: expected two comma-separated values each")

    cfg = RunConfig(
        mode=mode,
        sys=sys,
        bath1=baths[0],
        bath2=baths[1],
        temperature=temperature,
        grid=grid,
        out=pairs.pop("out", None),
        seed=_get_int(pairs, "seed", 0),
        tc_r_min=_get_float(pairs, "tc.r_min", 0.0),
        tc_r_max=_get_float(pairs, "tc.r_max", 1.0),
        tc_r_count=_get_int(pairs, "tc.r_count", 101),
        tc_J_list=tc_j_list,
        tc_frame=_get_choice(pairs, "tc.frame", "rotating", FRAMES),
        tc_criterion=_get_choice(pairs, "tc.criterion", "mean", CRITERIA),
        tc_tol=_get_float(pairs, "tc.tol", 1e-4),
        lab_dt_per_period=_get_int(pairs, "labframe.steps_per_period", 512),
        lab_eps_ps=_get_float(pairs, "labframe.eps_ps", 1e-9),
        lab_max_periods=_get_int(pairs, "labframe.max_periods", 10_000),
        oracle_n_traj=_get_int(pairs, "oracle.n_traj", 100_000),
        oracle_dt=(None if "oracle.dt" not in pairs else _get_float(pairs, "oracle.dt", 0.0)),
        oracle_t_end=(None if "oracle.t_end" not in pairs else _get_float(pairs, "oracle.t_end", 0.0)),
        oracle_raw_N=oracle_raw_n,
        oracle_raw_M=oracle_raw_m,
    )
    if cfg.lab_dt_per_period < 200:
        raise ConfigError(f"key 'labframe.steps_per_period': must be >= 200, got {cfg.lab_dt_per_period}")
    if cfg.tc_r_count < 2 or not cfg.tc_r_max > cfg.tc_r_min:
        raise ConfigError("tc.r_min/tc.r_max/tc.r_count: need count >= 2 and max > min")
    if pairs:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(pairs))}")
    return cfg


def serialize_config(cfg: RunConfig) -> str:
    """Canonical key-value text for cfg; parse(serialize(parse(x))) == parse(x)."""
    lines = [f"mode = {cfg.mode}"]
    s = cfg.sys
    lines += [
        f"sys.omega1 = {s.omega1!r}",
        f"sys.omega2 = {s.omega2!r}",
        f"sys.J = {s.J!r}",
        f"sys.gamma1 = {s.gamma1!r}",
        f"sys.gamma2 = {s.gamma2!r}",
        f"temperature = {cfg.temperature!r}",
    ]
    for label, bath in (("bath1", cfg.bath1), ("bath2", cfg.bath2)):
        lines += [
            f"{label}.nbar = {bath.nbar!r}",
            f"{label}.r = {bath.r!r}",
            f"{label}.phi = {bath.phi!r}",
        ]
    if cfg.grid is not None:
        for i, axis in enumerate(cfg.grid.axes, start=1):
            lines += [
                f"grid.axis{i}.name = {axis.name}",
                f"grid.axis{i}.min = {axis.min!r}",
                f"grid.axis{i}.max = {axis.max!r}",
                f"grid.axis{i}.count = {axis.count}",
            ]
        lines.append(f"grid.frame = {cfg.grid.frame}")
    if cfg.out is not None:
        lines.append(f"out = {cfg.out}")
    lines.append(f"seed = {cfg.seed}")
    if cfg.mode == "tc":
        lines += [
            f"tc.r_min = {cfg.tc_r_min!r}",
            f"tc.r_max = {cfg.tc_r_max!r}",
            f"tc.r_count = {cfg.tc_r_count}",
            "tc.J_list = " + ",".join(repr(j) for j in cfg.tc_J_list),
            f"tc.frame = {cfg.tc_frame}",
            f"tc.criterion = {cfg.tc_criterion}",
            f"tc.tol = {cfg.tc_tol!r}",
        ]
    if cfg.mode in ("labframe", "tc"):
        lines += [
            f"labframe.steps_per_period = {cfg.lab_dt_per_period}",
            f"labframe.eps_ps = {cfg.lab_eps_ps!r}",
            f"labframe.max_periods = {cfg.lab_max_periods}",
        ]
    if cfg.mode == "oracle":
        lines.append(f"oracle.n_traj = {cfg.oracle_n_traj}")
        if cfg.oracle_dt is not None:
            lines.append(f"oracle.dt = {cfg.oracle_dt!r}")
        if cfg.oracle_t_end is not None:
            lines.append(f"oracle.t_end = {cfg.oracle_t_end!r}")
        if cfg.oracle_raw_N is not None:
            lines.append("oracle.raw_N = " + ",".join(repr(v) for v in cfg.oracle_raw_N))
            lines.append("oracle.raw_M = " + ",".join(str(v) for v in cfg.oracle_raw_M))
    return "\n".join(lines) + "\n"
