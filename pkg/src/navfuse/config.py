"""Run configuration: TOML loading, validation, defaults, serialization.

One structured config file drives everything; unknown keys are an error so
typos cannot silently fall back to defaults. Flat keys cover the common
run parameters, optional sections override the fusion table, the speed
schedule, the lane oracle and the full scenario geometry.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .depth import gaussian_kernel
from .fusion import ControlParams, FusionTable, PipelineMode, SpeedSchedule
from .harness import TrialParams
from .sensor import TofModel
from .vision import LanePath, OracleParams, SteeringClass
from .world import DronePose, Rect, ScenarioParams, Section, World, build_scenario

MODE_NAMES = {m.value: m for m in PipelineMode}
_YAW_WORDS = {"0": 0.0, "+half": 0.5, "-half": -0.5, "+full": 1.0, "-full": -1.0}
_ZONE_KEYS = ("left_turn", "no_turn", "right_turn")


class ConfigError(ValueError):
    """Invalid or unparseable run configuration."""


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "S1"          # S1 | S2 | S3 | custom (with [geometry])
    mode: str = "fused"           # global | local | fused
    trials: int = 5
    seed: int = 42
    v_t: float = 1.5              # target forward speed, m/s
    yaw_t: float = 60.0           # target yaw rate, deg/s
    eta: float = 0.1              # steering discretization threshold
    noise_sigma: float = 20.0     # range noise, mm
    t_max: float = 120.0          # trial timeout, s
    kernel_sigma: float = 1.0     # smoothing Gaussian sigma, cells
    telemetry_stride: int = 1     # record every Nth tick
    out: str = "results"
    oracle: dict = field(default_factory=dict)    # lookahead, camera_fov
    lut: dict = field(default_factory=dict)       # cell -> yaw word
    schedule: list = field(default_factory=list)  # [bound_mm, fraction] rows
    geometry: dict = field(default_factory=dict)  # custom world description

    def __post_init__(self):
        if self.scenario not in ("S1", "S2", "S3", "custom"):
            raise ConfigError(f"scenario: unknown value {self.scenario!r}")
        if self.mode not in MODE_NAMES:
            raise ConfigError(f"mode: unknown value {self.mode!r}")
        if self.trials < 1:
            raise ConfigError("trials: must be at least 1")
        for name in ("v_t", "yaw_t", "t_max", "kernel_sigma"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name}: must be strictly positive")
        if not 0.0 < self.eta < 1.0:
            raise ConfigError("eta: must lie in (0, 1)")
        if self.noise_sigma < 0.0:
            raise ConfigError("noise_sigma: must be non-negative")
        if self.telemetry_stride < 1:
            raise ConfigError("telemetry_stride: must be at least 1")
        if self.scenario == "custom" and not self.geometry:
            raise ConfigError("scenario: 'custom' requires a [geometry] section")
        if self.geometry and self.scenario != "custom":
            raise ConfigError("geometry: only allowed with scenario = 'custom'")


_FLAT_KEYS = {f.name for f in fields(RunConfig)} - {"oracle", "lut", "schedule", "geometry"}
_SECTION_KEYS = {"oracle", "lut", "schedule", "geometry"}
_ORACLE_KEYS = {"lookahead", "camera_fov"}
_GEOMETRY_KEYS = {"walls", "obstacles", "lane", "start", "end_region",
                  "straight_sections", "turn_sections"}


def config_from_dict(data: dict) -> RunConfig:
    """Validate a parsed mapping; unknown keys anywhere are an error."""
    kwargs: dict = {}
    for key, value in data.items():
        if key in _FLAT_KEYS:
            kwargs[key] = value
        elif key in _SECTION_KEYS:
            continue
        else:
            raise ConfigError(f"unknown config key {key!r}")

    oracle = dict(data.get("oracle", {}))
    for key in oracle:
        if key not in _ORACLE_KEYS:
            raise ConfigError(f"oracle.{key}: unknown key")
        if oracle[key] <= 0:
            raise ConfigError(f"oracle.{key}: must be positive")

    lut = dict(data.get("lut", {}))
    for key, word in lut.items():
        sc, _, zone = key.partition("_")
        zone_ok = zone in _ZONE_KEYS
        if sc not in (s.value for s in SteeringClass) or not zone_ok:
            raise ConfigError(f"lut.{key}: unknown cell, use <class>_<zone>")
        if word not in _YAW_WORDS:
            raise ConfigError(f"lut.{key}: yaw must be one of {sorted(_YAW_WORDS)}")

    schedule = [list(map(float, row)) for row in data.get("schedule", [])]
    for row in schedule:
        if len(row) != 2:
            raise ConfigError("schedule: rows must be [bound_mm, fraction]")

    geometry = dict(data.get("geometry", {}))
    for key in geometry:
        if key not in _GEOMETRY_KEYS:
            raise ConfigError(f"geometry.{key}: unknown key")

    try:
        return RunConfig(oracle=oracle, lut=lut, schedule=schedule,
                         geometry=geometry, **kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def dump_config(cfg: RunConfig) -> str:
    """Serialize so that load(dump(cfg)) round-trips exactly."""
    lines = []
    for f in fields(cfg):
        if f.name in _SECTION_KEYS:
            continue
        lines.append(f"{f.name} = {_toml_value(getattr(cfg, f.name))}")
    if cfg.schedule:
        lines.append(f"schedule = {_toml_value(cfg.schedule)}")
    for section in ("oracle", "lut", "geometry"):
        mapping = getattr(cfg, section)
        if mapping:
            lines.append(f"\n[{section}]")
            lines.extend(f"{k} = {_toml_value(v)}" for k, v in mapping.items())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# factories: config -> runtime objects
# ---------------------------------------------------------------------------

def fusion_table(cfg: RunConfig) -> FusionTable:
    entries = dict(FusionTable().entries)
    for key, word in cfg.lut.items():
        sc_name, _, zone = key.partition("_")
        sc = SteeringClass(sc_name)
        agree, _ = entries[(sc, zone)]
        entries[(sc, zone)] = (agree, _YAW_WORDS[word])
    return FusionTable(entries=entries)


def speed_schedule(cfg: RunConfig) -> SpeedSchedule:
    if not cfg.schedule:
        return SpeedSchedule()
    return SpeedSchedule(steps=tuple((b, f) for b, f in cfg.schedule))


def oracle_params(cfg: RunConfig) -> OracleParams:
    kwargs = {}
    if "lookahead" in cfg.oracle:
        kwargs["lookahead_m"] = float(cfg.oracle["lookahead"])
    if "camera_fov" in cfg.oracle:
        kwargs["camera_fov_deg"] = float(cfg.oracle["camera_fov"])
    return OracleParams(**kwargs)


def trial_params(cfg: RunConfig) -> TrialParams:
    control = ControlParams(kernel=gaussian_kernel(cfg.kernel_sigma),
                            v_t=cfg.v_t, yaw_t=cfg.yaw_t, eta=cfg.eta,
                            schedule=speed_schedule(cfg),
                            table=fusion_table(cfg))
    tof = TofModel(noise_sigma_mm=cfg.noise_sigma)
    return TrialParams(control=control, tof=tof, oracle=oracle_params(cfg),
                       t_max=cfg.t_max, telemetry_stride=cfg.telemetry_stride)


def world_from_geometry(geom: dict) -> World:
    """Build a World from the [geometry] config section."""
    try:
        walls = [tuple(map(float, w)) for w in geom["walls"]]
        lane = LanePath(geom["lane"])
        sx, sy, heading_deg = geom["start"]
        start = DronePose(float(sx), float(sy), math.radians(float(heading_deg)))
        xmin, ymin, xmax, ymax = map(float, geom["end_region"])
        end = Rect((xmin + xmax) / 2.0, (ymin + ymax) / 2.0,
                   (xmax - xmin) / 2.0, (ymax - ymin) / 2.0)
    except KeyError as exc:
        raise ConfigError(f"geometry: missing key {exc}") from exc

    obstacles = []
    for row in geom.get("obstacles", []):
        cx, cy, w, h, angle_deg = map(float, row)
        obstacles.append(Rect(cx, cy, w / 2.0, h / 2.0, math.radians(angle_deg)))

    sections = []
    for row in geom.get("turn_sections", []):
        xmin, ymin, xmax, ymax = map(float, row)
        sections.append((Section.TURN, Rect((xmin + xmax) / 2.0, (ymin + ymax) / 2.0,
                                            (xmax - xmin) / 2.0, (ymax - ymin) / 2.0)))
    for row in geom.get("straight_sections", []):
        xmin, ymin, xmax, ymax = map(float, row)
        sections.append((Section.STRAIGHT, Rect((xmin + xmax) / 2.0, (ymin + ymax) / 2.0,
                                                (xmax - xmin) / 2.0, (ymax - ymin) / 2.0)))
    return World(walls, obstacles, lane, start, end, sections)


def build_world(cfg: RunConfig, scenario: str | None = None) -> World:
    if cfg.scenario == "custom":
        return world_from_geometry(cfg.geometry)
    return build_scenario(scenario or cfg.scenario, ScenarioParams())


def apply_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """Replace fields with CLI flag values (None means keep)."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **changes) if changes else cfg
