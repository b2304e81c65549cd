"""Per-sector hybrid agent.

Keeps a baseline of recent normal readings, raises attention requests on
motion and on abnormal temperature/humidity, escalates motion to an intruder
alarm under lockdown, fires suppressors only on camera confirmation, and
clears a fire suspicion after readings normalize.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

from ..errors import StaleReading, WrongSector
from ..model import (
    Action,
    ActionCode,
    AlarmKind,
    AlarmTrigger,
    AttentionRequest,
    Cause,
    FireConfirmation,
    LockdownCommand,
    Message,
    NoConfirmation,
    SectorId,
    SensorReading,
    Tick,
    TimelineEntry,
    TriggerCode,
)


class SectorMode(Enum):
    NORMAL = "Normal"
    LOCKDOWN = "Lockdown"


class SectorCondition(Enum):
    IDLE = "Idle"
    FIRE_SUSPICION = "FireSuspicion"
    FIRE_ALARMED = "FireAlarmed"
    INTRUDER_ALARMED = "IntruderAlarmed"


@dataclass(frozen=True)
class SectorParams:
    """Detection thresholds; the defaults are scenario-overridable."""

    baseline_window: int = 5
    baseline_min: int = 3
    temp_delta: float = 10.0
    humidity_delta: float = 15.0
    suspicion_timeout: int = 2


@dataclass(frozen=True)
class SectorState:
    sector: SectorId
    mode: SectorMode = SectorMode.NORMAL
    condition: SectorCondition = SectorCondition.IDLE
    suspicion_since: Tick | None = None
    baseline: tuple[SensorReading, ...] = ()
    suppressors_active: bool = False
    last_tick: Tick = -1
    normal_streak: int = 0


def _entry(state: SectorState, trigger: TriggerCode, action: Action, tick: Tick) -> TimelineEntry:
    return TimelineEntry(step=0, agent=state.sector, trigger=trigger, action=action, tick=tick)


def detect_abnormal(
    window: Sequence[SensorReading],
    reading: SensorReading,
    temp_delta: float,
    humidity_delta: float,
    min_baseline: int = 3,
) -> bool:
    """True iff the reading is abnormally hot AND dry versus the baseline mean.

    Both conditions are required jointly; with fewer than ``min_baseline``
    readings there is no baseline to compare against, so the answer is False.
    """
    if len(window) < min_baseline:
        return False
    mean_temp = sum(r.temperature for r in window) / len(window)
    mean_hum = sum(r.humidity for r in window) / len(window)
    return (
        reading.temperature > mean_temp + temp_delta
        and reading.humidity < mean_hum - humidity_delta
    )


def ingest_reading(
    state: SectorState, reading: SensorReading, params: SectorParams
) -> tuple[SectorState, list[Message], list[TimelineEntry]]:
    """Process one sensor sample; returns (state, outbound messages, entries)."""
    if reading.sector != state.sector:
        raise WrongSector(f"{state.sector} got reading for {reading.sector}")
    if reading.tick <= state.last_tick:
        raise StaleReading(f"tick {reading.tick} after tick {state.last_tick}")

    messages: list[Message] = []
    entries: list[TimelineEntry] = []
    abnormal = detect_abnormal(
        state.baseline, reading, params.temp_delta, params.humidity_delta, params.baseline_min
    )
    condition = state.condition
    suspicion_since = state.suspicion_since

    if reading.button and condition != SectorCondition.FIRE_ALARMED:
        # Manual activation is authoritative for the alarm, but suppressors
        # still wait for a camera confirmation.
        messages.append(AlarmTrigger(sector=state.sector, kind=AlarmKind.FIRE))
        entries.append(
            _entry(
                state,
                TriggerCode.BUTTON_PRESSED,
                Action(ActionCode.TRIGGER_FIRE_ALARM, (state.sector,)),
                reading.tick,
            )
        )
        condition = SectorCondition.FIRE_ALARMED

    if abnormal and condition == SectorCondition.IDLE:
        # Entering suspicion raises one Emergency request; further abnormal
        # readings hold the condition without re-broadcasting.
        messages.append(AttentionRequest(sector=state.sector, cause=Cause.FIRE_SUSPICION))
        entries.append(
            _entry(
                state,
                TriggerCode.ABNORMAL_READINGS,
                Action(ActionCode.REQUEST_ATTENTION, (state.sector, Cause.FIRE_SUSPICION.value)),
                reading.tick,
            )
        )
        condition = SectorCondition.FIRE_SUSPICION
        suspicion_since = reading.tick

    if reading.motion:
        if state.mode == SectorMode.LOCKDOWN:
            messages.append(AttentionRequest(sector=state.sector, cause=Cause.INTRUDER))
            messages.append(AlarmTrigger(sector=state.sector, kind=AlarmKind.INTRUDER))
            entries.append(
                _entry(
                    state,
                    TriggerCode.MOTION_DETECTED,
                    Action(ActionCode.TRIGGER_INTRUDER_ALARM, (state.sector,)),
                    reading.tick,
                )
            )
            if condition not in (SectorCondition.FIRE_ALARMED, SectorCondition.FIRE_SUSPICION):
                condition = SectorCondition.INTRUDER_ALARMED
        else:
            messages.append(AttentionRequest(sector=state.sector, cause=Cause.MOTION))
            entries.append(
                _entry(
                    state,
                    TriggerCode.MOTION_DETECTED,
                    Action(ActionCode.REQUEST_ATTENTION, (state.sector, Cause.MOTION.value)),
                    reading.tick,
                )
            )

    # Abnormal readings stay out of the baseline so a slow-developing fire
    # cannot shift the mean it is detected against.
    baseline = state.baseline
    if not abnormal:
        baseline = (baseline + (reading,))[-params.baseline_window :]

    new_state = replace(
        state,
        condition=condition,
        suspicion_since=suspicion_since if condition == SectorCondition.FIRE_SUSPICION else None,
        baseline=baseline,
        last_tick=reading.tick,
        normal_streak=0 if abnormal else state.normal_streak + 1,
    )
    return new_state, messages, entries


def handle_confirmation(
    state: SectorState, msg: FireConfirmation | NoConfirmation, now: Tick
) -> tuple[SectorState, list[Message], list[TimelineEntry]]:
    """React to a camera verdict. NoConfirmation never mutates state: clearing
    a suspicion is driven by the sector's own readings."""
    if msg.sector != state.sector or isinstance(msg, NoConfirmation):
        return state, [], []
    if state.condition not in (SectorCondition.IDLE, SectorCondition.FIRE_SUSPICION):
        return state, [], []
    entries = [
        _entry(
            state,
            TriggerCode.FIRE_CONFIRMATION,
            Action(ActionCode.TRIGGER_FIRE_ALARM, (state.sector,)),
            now,
        ),
        _entry(
            state,
            TriggerCode.FIRE_CONFIRMATION,
            Action(ActionCode.TRIGGER_SUPPRESSORS, (state.sector,)),
            now,
        ),
    ]
    messages: list[Message] = [AlarmTrigger(sector=state.sector, kind=AlarmKind.FIRE)]
    new_state = replace(
        state,
        condition=SectorCondition.FIRE_ALARMED,
        suppressors_active=True,
        suspicion_since=None,
    )
    return new_state, messages, entries


def check_suspicion_timeout(
    state: SectorState, now: Tick, timeout: int
) -> tuple[SectorState, list[TimelineEntry]]:
    """Clear a fire suspicion once ``timeout`` consecutive readings were normal."""
    if state.condition != SectorCondition.FIRE_SUSPICION or state.normal_streak < timeout:
        return state, []
    entry = _entry(
        state,
        TriggerCode.READINGS_NORMALIZED,
        Action(ActionCode.CLEAR_SUSPICION, (state.sector,)),
        now,
    )
    return replace(state, condition=SectorCondition.IDLE, suspicion_since=None), [entry]


def apply_lockdown(
    state: SectorState, cmd: LockdownCommand, now: Tick
) -> tuple[SectorState, list[TimelineEntry]]:
    """Enter lockdown if addressed; idempotent re-application records nothing."""
    if state.sector not in cmd.scope or state.mode == SectorMode.LOCKDOWN:
        return state, []
    entry = _entry(
        state,
        TriggerCode.LOCKDOWN_SIGNAL,
        Action(ActionCode.CHANGE_REACTION_STATE, ("lockdown",)),
        now,
    )
    return replace(state, mode=SectorMode.LOCKDOWN), [entry]
