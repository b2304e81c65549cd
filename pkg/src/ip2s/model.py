"""Shared domain vocabulary: identifiers, topology, readings, messages, timeline records.

Everything here is an immutable value object; agents and the engine exchange
these types without sharing mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import UnknownSector

# Logical simulation step. One tick is one scheduler round; bus messages
# published at tick t are delivered at t + 1.
Tick = int

# Short identifier strings ("Sector3", "Camera1", "Robot", "Alarm").
SectorId = str
CameraId = str
AgentId = str

PARKING_WAYPOINT = "Parking"


def valid_identifier(name: str) -> bool:
    """Identifiers appear in topic paths, so no whitespace or '/'."""
    return bool(name) and not any(c.isspace() or c == "/" for c in name)


class Priority(Enum):
    ROUTINE = "Routine"
    EMERGENCY = "Emergency"

    def __lt__(self, other: "Priority") -> bool:
        order = {Priority.ROUTINE: 0, Priority.EMERGENCY: 1}
        return order[self] < order[other]


class Cause(Enum):
    MOTION = "Motion"
    FIRE_SUSPICION = "FireSuspicion"
    INTRUDER = "Intruder"


def priority_for_cause(cause: Cause) -> Priority:
    """Emergency iff the cause is fire suspicion or an intruder."""
    if cause in (Cause.FIRE_SUSPICION, Cause.INTRUDER):
        return Priority.EMERGENCY
    return Priority.ROUTINE


class AlarmKind(Enum):
    FIRE = "Fire"
    INTRUDER = "Intruder"


class RobotMode(Enum):
    SURVEILLANCE = "Surveillance"
    FIREFIGHTING = "Firefighting"


class Severity(Enum):
    INFO = "info"
    WARNING = "warning"
    CRITICAL = "critical"


# ---------------------------------------------------------------------------
# Topology


@dataclass(frozen=True)
class CameraSpec:
    """One camera: its coverage set and per-sector angular positions (degrees)."""

    camera: CameraId
    coverage: tuple[SectorId, ...]
    angles: tuple[tuple[SectorId, float], ...]
    initial_heading: float = 0.0

    def angle_of(self, sector: SectorId) -> float:
        for name, angle in self.angles:
            if name == sector:
                return angle
        raise UnknownSector(f"{self.camera} has no angle for {sector}")


@dataclass(frozen=True)
class Waypoint:
    """Circuit stop plus the travel cost (in edge-ticks) to the next stop."""

    name: str
    cost_to_next: int = 1


@dataclass(frozen=True)
class Topology:
    """Sectored floor layout: camera coverage plus the robot's ring circuit.

    The circuit is cyclic and unidirectional; it visits every sector exactly
    once and contains exactly one parking waypoint.
    """

    sectors: tuple[SectorId, ...]
    cameras: tuple[CameraSpec, ...]
    circuit: tuple[Waypoint, ...]
    parking: int = 0

    def camera_ids(self) -> tuple[CameraId, ...]:
        return tuple(c.camera for c in self.cameras)

    def waypoint_index(self, name: str) -> int:
        for i, wp in enumerate(self.circuit):
            if wp.name == name:
                return i
        raise UnknownSector(f"no circuit waypoint for {name}")


@dataclass(frozen=True)
class Violation:
    """One topology invariant violation; validation returns these as data."""

    code: str
    subject: str

    def __str__(self) -> str:
        return f"{self.code}({self.subject})"


def validate_topology(t: Topology) -> list[Violation]:
    """Return every invariant violation; an empty list means valid."""
    out: list[Violation] = []
    seen: set[str] = set()
    for s in t.sectors:
        if not valid_identifier(s):
            out.append(Violation("BadIdentifier", s))
        if s in seen:
            out.append(Violation("DuplicateSector", s))
        seen.add(s)

    covered: set[SectorId] = set()
    for cam in t.cameras:
        if not valid_identifier(cam.camera):
            out.append(Violation("BadIdentifier", cam.camera))
        for s in cam.coverage:
            if s not in t.sectors:
                out.append(Violation("CoverageOutsideSectors", f"{cam.camera}:{s}"))
            covered.add(s)
    for s in t.sectors:
        if s not in covered:
            out.append(Violation("UncoveredSector", s))

    names = [wp.name for wp in t.circuit]
    for s in t.sectors:
        n = names.count(s)
        if n == 0:
            out.append(Violation("CircuitIncomplete", s))
        elif n > 1:
            out.append(Violation("CircuitRepeatsSector", s))
    parking_count = names.count(PARKING_WAYPOINT)
    if parking_count != 1:
        out.append(Violation("ParkingCount", str(parking_count)))
    for wp in t.circuit:
        if wp.name != PARKING_WAYPOINT and wp.name not in t.sectors:
            out.append(Violation("UnknownWaypoint", wp.name))
        if wp.cost_to_next < 1:
            out.append(Violation("BadEdgeCost", f"{wp.name}:{wp.cost_to_next}"))
    if not (0 <= t.parking < len(t.circuit)) or (
        t.circuit and t.circuit[t.parking].name != PARKING_WAYPOINT
    ):
        if parking_count == 1:
            out.append(Violation("ParkingIndexMismatch", str(t.parking)))
    return out


def covering_cameras(t: Topology, s: SectorId) -> list[CameraId]:
    """All cameras whose coverage contains ``s``, in declaration order."""
    if s not in t.sectors:
        raise UnknownSector(s)
    return [c.camera for c in t.cameras if s in c.coverage]


# ---------------------------------------------------------------------------
# Sensor readings


@dataclass(frozen=True)
class SensorReading:
    """Per-tick sample of one sector's sensor bundle."""

    sector: SectorId
    tick: Tick
    temperature: float
    humidity: float
    motion: bool = False
    button: bool = False

    def __post_init__(self):
        if not math.isfinite(self.temperature):
            raise ValueError("temperature must be finite")
        if not 0.0 <= self.humidity <= 100.0:
            raise ValueError("humidity must be within [0, 100]")


# ---------------------------------------------------------------------------
# Bus message payloads


@dataclass(frozen=True)
class AttentionRequest:
    sector: SectorId
    cause: Cause

    @property
    def priority(self) -> Priority:
        return priority_for_cause(self.cause)


@dataclass(frozen=True)
class CameraClaim:
    camera: CameraId
    sector: SectorId


@dataclass(frozen=True)
class FireConfirmation:
    camera: CameraId
    sector: SectorId


@dataclass(frozen=True)
class NoConfirmation:
    camera: CameraId
    sector: SectorId


@dataclass(frozen=True)
class AlarmTrigger:
    sector: SectorId
    kind: AlarmKind


@dataclass(frozen=True)
class RobotTask:
    mode: RobotMode
    sector: SectorId


@dataclass(frozen=True)
class LockdownCommand:
    scope: frozenset[SectorId]


@dataclass(frozen=True)
class Notification:
    text: str
    severity: Severity


Message = Union[
    AttentionRequest,
    CameraClaim,
    FireConfirmation,
    NoConfirmation,
    AlarmTrigger,
    RobotTask,
    LockdownCommand,
    Notification,
]

_ENUM_FIELDS = {"cause": Cause, "kind": AlarmKind, "mode": RobotMode, "severity": Severity}


def message_to_dict(msg: Message, sender: AgentId, tick: Tick) -> dict:
    """Wire shape used by the bridge and the bus trace: JSON-safe dict."""
    out: dict = {"kind": type(msg).__name__, "sender": sender, "tick": tick}
    for name in msg.__dataclass_fields__:
        value = getattr(msg, name)
        if isinstance(value, Enum):
            value = value.value
        elif isinstance(value, frozenset):
            value = sorted(value)
        out[name] = value
    if isinstance(msg, AttentionRequest):
        out["priority"] = msg.priority.value
    return out


def message_from_dict(data: dict) -> Message:
    """Inverse of :func:`message_to_dict`; ignores sender/tick/priority extras."""
    kinds = {
        cls.__name__: cls
        for cls in (
            AttentionRequest,
            CameraClaim,
            FireConfirmation,
            NoConfirmation,
            AlarmTrigger,
            RobotTask,
            LockdownCommand,
            Notification,
        )
    }
    cls = kinds.get(data.get("kind", ""))
    if cls is None:
        raise ValueError(f"unknown message kind: {data.get('kind')!r}")
    kwargs = {}
    for name in cls.__dataclass_fields__:
        if name not in data:
            raise ValueError(f"{cls.__name__} payload missing field {name!r}")
        value = data[name]
        if name in _ENUM_FIELDS:
            value = _ENUM_FIELDS[name](value)
        elif name == "scope":
            value = frozenset(value)
        kwargs[name] = value
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# Timeline vocabulary
#
# TriggerCode and ActionCode are the canonical vocabulary of golden timeline
# files. Members below the "engine micro-steps" markers record rotation,
# transit and phase progress in the full timeline; they are excluded from
# golden comparison by COMPARABLE_ACTIONS.


class TriggerCode(Enum):
    MOTION_DETECTED = "MOTION_DETECTED"
    ABNORMAL_READINGS = "ABNORMAL_READINGS"
    ATTENTION_REQUESTS = "ATTENTION_REQUESTS"
    ATTENTION_REQUESTS_AND_CLAIM = "ATTENTION_REQUESTS_AND_CLAIM"
    LOCKDOWN_SIGNAL = "LOCKDOWN_SIGNAL"
    SECTOR_TRIGGER = "SECTOR_TRIGGER"
    ACTIVATION = "ACTIVATION"
    FLAMES_DETECTED = "FLAMES_DETECTED"
    FIRE_CONFIRMATION = "FIRE_CONFIRMATION"
    BUTTON_PRESSED = "BUTTON_PRESSED"
    READINGS_NORMALIZED = "READINGS_NORMALIZED"
    # engine micro-steps (non-comparable)
    TARGET_SET = "TARGET_SET"
    DWELL_COMPLETE = "DWELL_COMPLETE"
    PERSON_DETECTED = "PERSON_DETECTED"
    RING_PROGRESS = "RING_PROGRESS"
    PHASE_COMPLETE = "PHASE_COMPLETE"


class ActionCode(Enum):
    REQUEST_ATTENTION = "REQUEST_ATTENTION"
    CLAIM_AND_MOVE = "CLAIM_AND_MOVE"
    TRIGGER_INTRUDER_ALARM = "TRIGGER_INTRUDER_ALARM"
    TRIGGER_FIRE_ALARM = "TRIGGER_FIRE_ALARM"
    CHANGE_REACTION_STATE = "CHANGE_REACTION_STATE"
    ACTIVATE_INTRUDER_MEASURES = "ACTIVATE_INTRUDER_MEASURES"
    ACTIVATE_FIRE_MEASURES = "ACTIVATE_FIRE_MEASURES"
    DISPATCH_ROBOT = "DISPATCH_ROBOT"
    MOVE_TO_SURVEIL = "MOVE_TO_SURVEIL"
    UPDATE_COURSE = "UPDATE_COURSE"
    SEND_FIRE_CONFIRMATION = "SEND_FIRE_CONFIRMATION"
    TRIGGER_SUPPRESSORS = "TRIGGER_SUPPRESSORS"
    CLEAR_SUSPICION = "CLEAR_SUSPICION"
    NOTIFY = "NOTIFY"
    # engine micro-steps (non-comparable)
    ROTATE_TOWARD = "ROTATE_TOWARD"
    SURVEY = "SURVEY"
    REPORT_NO_FIRE = "REPORT_NO_FIRE"
    PASS_WAYPOINT = "PASS_WAYPOINT"
    BEGIN_SEARCH = "BEGIN_SEARCH"
    BEGIN_EXTINGUISH = "BEGIN_EXTINGUISH"
    REPORT_FIRE_OUT = "REPORT_FIRE_OUT"
    PARK = "PARK"


# Paper-level actions matched against golden timelines. DISPATCH_ROBOT,
# TRIGGER_SUPPRESSORS and NOTIFY are canonical vocabulary but record side
# activity the case-study tables fold into other rows, so they are excluded.
COMPARABLE_ACTIONS = frozenset(
    {
        ActionCode.REQUEST_ATTENTION,
        ActionCode.CLAIM_AND_MOVE,
        ActionCode.TRIGGER_INTRUDER_ALARM,
        ActionCode.TRIGGER_FIRE_ALARM,
        ActionCode.CHANGE_REACTION_STATE,
        ActionCode.ACTIVATE_INTRUDER_MEASURES,
        ActionCode.ACTIVATE_FIRE_MEASURES,
        ActionCode.MOVE_TO_SURVEIL,
        ActionCode.UPDATE_COURSE,
        ActionCode.SEND_FIRE_CONFIRMATION,
        ActionCode.CLEAR_SUSPICION,
    }
)


@dataclass(frozen=True)
class Action:
    """ActionCode plus its rendered parameters, e.g. REQUEST_ATTENTION(Sector2, Motion)."""

    code: ActionCode
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.code.value
        return f"{self.code.value}({', '.join(self.args)})"

    @classmethod
    def parse(cls, text: str) -> "Action":
        text = text.strip()
        if "(" in text:
            if not text.endswith(")"):
                raise ValueError(f"unbalanced action parameters: {text!r}")
            name, _, rest = text.partition("(")
            args = tuple(a.strip() for a in rest[:-1].split(",") if a.strip())
        else:
            name, args = text, ()
        try:
            code = ActionCode(name.strip())
        except ValueError:
            raise ValueError(f"unknown action code: {name.strip()!r}") from None
        return cls(code, args)


@dataclass(frozen=True)
class TimelineEntry:
    """One (agent, trigger, action) row; the comparable unit for golden timelines."""

    step: int
    agent: AgentId
    trigger: TriggerCode
    action: Action
    tick: Tick

    @property
    def comparable(self) -> bool:
        return self.action.code in COMPARABLE_ACTIONS

    def row(self) -> tuple[AgentId, TriggerCode, Action]:
        return (self.agent, self.trigger, self.action)

    def __str__(self) -> str:
        return f"{self.step}|{self.tick}|{self.agent}|{self.trigger.value}|{self.action}"


@dataclass(frozen=True)
class NotificationRecord:
    """Append-only feed line: tick|severity|source|text."""

    tick: Tick
    severity: Severity
    source: AgentId
    text: str

    def __str__(self) -> str:
        return f"{self.tick}|{self.severity.value}|{self.source}|{self.text}"


def case_study_topology() -> Topology:
    """The bundled four-sector layout: center camera covering everything, a
    side camera limited to Sector2/Sector3, and the ring circuit with the
    parking station between Sector1 and Sector4."""
    sectors = ("Sector1", "Sector2", "Sector3", "Sector4")
    return Topology(
        sectors=sectors,
        cameras=(
            CameraSpec(
                camera="Camera1",
                coverage=sectors,
                angles=(("Sector1", 0.0), ("Sector2", 90.0), ("Sector3", 180.0), ("Sector4", 270.0)),
                initial_heading=0.0,
            ),
            CameraSpec(
                camera="Camera2",
                coverage=("Sector2", "Sector3"),
                angles=(("Sector2", 60.0), ("Sector3", 120.0)),
                initial_heading=60.0,
            ),
        ),
        circuit=(
            Waypoint(PARKING_WAYPOINT, 1),
            Waypoint("Sector1", 1),
            Waypoint("Sector2", 1),
            Waypoint("Sector3", 1),
            Waypoint("Sector4", 1),
        ),
        parking=0,
    )
