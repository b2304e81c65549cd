"""Scenario documents: a scripted world plus agent parameters.

Scenarios are TOML files with sections [topology], [sectors.<id>.keyframes],
[visual], [commands] and [params]. Sensor and visual series are sparse
keyframes with hold-last interpolation: each field keeps its value until a
later keyframe overrides it.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .agents.camera import CameraParams
from .agents.robot import RobotParams
from .agents.sector import SectorParams
from .errors import ParseError, TopologyError
from .model import (
    CameraSpec,
    LockdownCommand,
    Message,
    RobotMode,
    RobotTask,
    SectorId,
    SensorReading,
    Tick,
    Topology,
    Waypoint,
    validate_topology,
)

READING_FIELDS = {"temperature": float, "humidity": float, "motion": bool, "button": bool}
VISUAL_FIELDS = {"flames": bool, "person": bool}
READING_DEFAULTS = {"temperature": 22.0, "humidity": 50.0, "motion": False, "button": False}
VISUAL_DEFAULTS = {"flames": False, "person": False}


@dataclass(frozen=True)
class EngineParams:
    """Agent parameters; every field is overridable from [params]."""

    baseline_window: int = 5
    baseline_min: int = 3
    temp_delta: float = 10.0
    humidity_delta: float = 15.0
    suspicion_timeout: int = 2
    rotation_rate: float = 90.0
    dwell_ticks: int = 2
    surveil_ticks: int = 2
    search_ticks: int = 1
    extinguish_ticks: int = 3
    camera_reaction_delays: tuple[tuple[str, int], ...] = ()

    def sector_params(self) -> SectorParams:
        return SectorParams(
            baseline_window=self.baseline_window,
            baseline_min=self.baseline_min,
            temp_delta=self.temp_delta,
            humidity_delta=self.humidity_delta,
            suspicion_timeout=self.suspicion_timeout,
        )

    def camera_params(self) -> CameraParams:
        return CameraParams(rotation_rate=self.rotation_rate, dwell_ticks=self.dwell_ticks)

    def robot_params(self) -> RobotParams:
        return RobotParams(
            surveil_ticks=self.surveil_ticks,
            search_ticks=self.search_ticks,
            extinguish_ticks=self.extinguish_ticks,
        )

    def delay_of(self, camera: str) -> int:
        return dict(self.camera_reaction_delays).get(camera, 0)


Keyframes = tuple[tuple[Tick, Mapping[str, Any]], ...]


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    duration: int
    keyframes: tuple[tuple[SectorId, Keyframes], ...] = ()
    visual: tuple[tuple[SectorId, Keyframes], ...] = ()
    commands: tuple[tuple[Tick, Message], ...] = ()
    params: EngineParams = EngineParams()
    name: str = "scenario"


class WorldCursor:
    """Hold-last sampler over a scenario's keyframe series."""

    def __init__(self, scenario: Scenario):
        self._readings = {s: dict(READING_DEFAULTS) for s in scenario.topology.sectors}
        self._visual = {s: dict(VISUAL_DEFAULTS) for s in scenario.topology.sectors}
        self._reading_frames = {s: dict(kf) for s, kf in scenario.keyframes}
        self._visual_frames = {s: dict(kf) for s, kf in scenario.visual}

    def sample(self, now: Tick, sectors: tuple[SectorId, ...]) -> dict[SectorId, SensorReading]:
        out = {}
        for sector in sectors:
            frame = self._reading_frames.get(sector, {}).get(now)
            if frame:
                self._readings[sector].update(frame)
            values = self._readings[sector]
            out[sector] = SensorReading(sector=sector, tick=now, **values)
        return out

    def look(self, sector: SectorId, now: Tick) -> dict[str, bool]:
        frame = self._visual_frames.get(sector, {}).get(now)
        if frame:
            self._visual[sector].update(frame)
        return dict(self._visual[sector])


def _require(table: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in table:
        raise ParseError(f"missing required key {key!r}", where)
    return table[key]


def _coerce(value: Any, kind: type, where: str) -> Any:
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"expected a number, got {value!r}", where)
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"expected an integer, got {value!r}", where)
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ParseError(f"expected a boolean, got {value!r}", where)
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ParseError(f"expected a string, got {value!r}", where)
        return value
    raise AssertionError(kind)


def _parse_topology(table: Mapping[str, Any]) -> Topology:
    sectors = tuple(
        _coerce(s, str, "topology.sectors") for s in _require(table, "sectors", "topology")
    )
    cameras = []
    for i, cam in enumerate(table.get("cameras", ())):
        where = f"topology.cameras[{i}]"
        name = _coerce(_require(cam, "name", where), str, where + ".name")
        covers = tuple(_coerce(s, str, where + ".covers") for s in _require(cam, "covers", where))
        angles = tuple(
            (sector, _coerce(angle, float, where + ".angles"))
            for sector, angle in _require(cam, "angles", where).items()
        )
        heading = _coerce(cam.get("initial_heading", 0.0), float, where + ".initial_heading")
        cameras.append(
            CameraSpec(camera=name, coverage=covers, angles=angles, initial_heading=heading)
        )
    circuit = []
    for i, stop in enumerate(_require(table, "circuit", "topology")):
        where = f"topology.circuit[{i}]"
        if not isinstance(stop, (list, tuple)) or len(stop) != 2:
            raise ParseError("each circuit stop is a [waypoint, cost] pair", where)
        circuit.append(Waypoint(_coerce(stop[0], str, where), _coerce(stop[1], int, where)))
    names = [wp.name for wp in circuit]
    parking = names.index("Parking") if "Parking" in names else 0
    return Topology(sectors=sectors, cameras=tuple(cameras), circuit=tuple(circuit), parking=parking)


def _parse_keyframes(
    table: Mapping[str, Any], allowed: Mapping[str, type], where: str
) -> Keyframes:
    frames = []
    for raw_tick, values in table.items():
        try:
            tick = int(raw_tick)
        except (TypeError, ValueError):
            raise ParseError(f"keyframe key {raw_tick!r} is not a tick", where) from None
        if tick < 0:
            raise ParseError(f"negative keyframe tick {tick}", where)
        if not isinstance(values, Mapping):
            raise ParseError("keyframe value must be a table", f"{where}.{raw_tick}")
        cleaned = {}
        for key, value in values.items():
            if key not in allowed:
                raise ParseError(f"unknown keyframe field {key!r}", f"{where}.{raw_tick}")
            cleaned[key] = _coerce(value, allowed[key], f"{where}.{raw_tick}.{key}")
        frames.append((tick, cleaned))
    frames.sort(key=lambda pair: pair[0])
    return tuple(frames)


def _parse_command(table: Mapping[str, Any], duration: int, where: str) -> tuple[Tick, Message]:
    tick = _coerce(_require(table, "tick", where), int, where + ".tick")
    if not 0 <= tick < duration:
        raise ParseError(f"command tick {tick} outside run of {duration} ticks", where)
    if "lockdown" in table:
        scope = frozenset(
            _coerce(s, str, where + ".lockdown") for s in table["lockdown"]
        )
        return tick, LockdownCommand(scope=scope)
    if "task" in table:
        task = table["task"]
        mode = _coerce(_require(task, "mode", where + ".task"), str, where + ".task.mode")
        sector = _coerce(_require(task, "sector", where + ".task"), str, where + ".task.sector")
        try:
            return tick, RobotTask(mode=RobotMode(mode), sector=sector)
        except ValueError:
            raise ParseError(f"unknown robot mode {mode!r}", where + ".task.mode") from None
    raise ParseError("command needs a 'lockdown' or 'task' payload", where)


def _parse_params(table: Mapping[str, Any]) -> EngineParams:
    params = EngineParams()
    fields = {
        "baseline_window": int,
        "baseline_min": int,
        "temp_delta": float,
        "humidity_delta": float,
        "suspicion_timeout": int,
        "rotation_rate": float,
        "dwell_ticks": int,
        "surveil_ticks": int,
        "search_ticks": int,
        "extinguish_ticks": int,
    }
    updates: dict[str, Any] = {}
    for key, value in table.items():
        if key == "camera_reaction_delays":
            if not isinstance(value, Mapping):
                raise ParseError("camera_reaction_delays must be a table", "params")
            updates["camera_reaction_delays"] = tuple(
                sorted((cam, _coerce(d, int, f"params.camera_reaction_delays.{cam}")) for cam, d in value.items())
            )
        elif key in fields:
            updates[key] = _coerce(value, fields[key], f"params.{key}")
        else:
            raise ParseError(f"unknown parameter {key!r}", "params")
    return replace(params, **updates)


def parse_scenario(data: Mapping[str, Any], name: str = "scenario") -> Scenario:
    """Validate a decoded document into a Scenario; the topology must pass
    its own invariant validation."""
    duration = _require(data, "duration", "document")
    duration = _coerce(duration, int, "duration")
    if duration < 0:
        raise ParseError("duration must be non-negative", "duration")
    topology = _parse_topology(_require(data, "topology", "document"))
    violations = validate_topology(topology)
    if violations:
        raise TopologyError(violations)

    keyframes = []
    for sector, body in data.get("sectors", {}).items():
        if sector not in topology.sectors:
            raise ParseError(f"keyframes reference unknown sector {sector!r}", f"sectors.{sector}")
        frames = _parse_keyframes(
            body.get("keyframes", {}), READING_FIELDS, f"sectors.{sector}.keyframes"
        )
        keyframes.append((sector, frames))

    visual = []
    for sector, body in data.get("visual", {}).items():
        if sector not in topology.sectors:
            raise ParseError(f"visual facts reference unknown sector {sector!r}", f"visual.{sector}")
        visual.append((sector, _parse_keyframes(body, VISUAL_FIELDS, f"visual.{sector}")))

    commands = []
    for i, table in enumerate(data.get("commands", ())):
        commands.append(_parse_command(table, duration, f"commands[{i}]"))
    commands.sort(key=lambda pair: pair[0])

    params = _parse_params(data.get("params", {}))
    known_cameras = topology.camera_ids()
    for camera, _ in params.camera_reaction_delays:
        if camera not in known_cameras:
            raise ParseError(
                f"reaction delay for unknown camera {camera!r}", "params.camera_reaction_delays"
            )

    return Scenario(
        topology=topology,
        duration=duration,
        keyframes=tuple(keyframes),
        visual=tuple(visual),
        commands=tuple(commands),
        params=params,
        name=name,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc), str(path)) from exc
    return parse_scenario(data, name=path.stem)
