"""Alarm agent (global alarm state, measure activation, robot dispatch) and
the notification feed it shares with every other agent."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Protocol

from ..errors import SinkError
from ..model import (
    Action,
    ActionCode,
    AlarmKind,
    AlarmTrigger,
    Message,
    Notification,
    NotificationRecord,
    RobotMode,
    RobotTask,
    SectorId,
    Severity,
    Tick,
    TimelineEntry,
    TriggerCode,
)

AGENT_ID = "Alarm"


class SystemMode(Enum):
    NORMAL = "Normal"
    ALARM_ACTIVE = "AlarmActive"


@dataclass(frozen=True)
class AlarmState:
    active_alarms: frozenset[tuple[SectorId, AlarmKind]] = frozenset()

    @property
    def system_mode(self) -> SystemMode:
        # AlarmActive iff any alarm is active, by construction
        return SystemMode.ALARM_ACTIVE if self.active_alarms else SystemMode.NORMAL


def handle_trigger(
    state: AlarmState, trig: AlarmTrigger, now: Tick
) -> tuple[AlarmState, list[Message], list[TimelineEntry]]:
    """Activate measures and dispatch the robot once per distinct alarm."""
    key = (trig.sector, trig.kind)
    if key in state.active_alarms:
        return state, [], []
    new_state = replace(state, active_alarms=state.active_alarms | {key})
    if trig.kind is AlarmKind.INTRUDER:
        task = RobotTask(mode=RobotMode.SURVEILLANCE, sector=trig.sector)
        measure = Action(ActionCode.ACTIVATE_INTRUDER_MEASURES, (trig.sector,))
        text = f"intruder alarm in {trig.sector}; robot dispatched to surveil"
    else:
        task = RobotTask(mode=RobotMode.FIREFIGHTING, sector=trig.sector)
        measure = Action(ActionCode.ACTIVATE_FIRE_MEASURES, (trig.sector,))
        text = f"fire alarm in {trig.sector}; robot dispatched to extinguish"
    messages: list[Message] = [task, Notification(text=text, severity=Severity.CRITICAL)]
    entries = [
        TimelineEntry(step=0, agent=AGENT_ID, trigger=TriggerCode.SECTOR_TRIGGER,
                      action=measure, tick=now),
        TimelineEntry(
            step=0,
            agent=AGENT_ID,
            trigger=TriggerCode.SECTOR_TRIGGER,
            action=Action(ActionCode.DISPATCH_ROBOT, (task.mode.value, trig.sector)),
            tick=now,
        ),
    ]
    return new_state, messages, entries


def clear_alarm(state: AlarmState, sector: SectorId, kind: AlarmKind) -> AlarmState:
    """De-escalation hook for multi-scenario runs; absent alarms are a no-op."""
    key = (sector, kind)
    if key not in state.active_alarms:
        return state
    return replace(state, active_alarms=state.active_alarms - {key})


class NotificationSink(Protocol):
    def append(self, record: NotificationRecord) -> int: ...


@dataclass
class MemorySink:
    """Default sink: the run's in-memory, append-only notification log."""

    records: list[NotificationRecord] = field(default_factory=list)

    def append(self, record: NotificationRecord) -> int:
        self.records.append(record)
        return len(self.records) - 1


def notify(sink: NotificationSink, record: NotificationRecord) -> int:
    """Append to the audited feed; a failing sink aborts the simulation."""
    try:
        return sink.append(record)
    except Exception as exc:  # noqa: BLE001 - any sink failure is fatal
        raise SinkError(str(exc)) from exc
