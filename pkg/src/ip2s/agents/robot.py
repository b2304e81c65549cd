"""Mobile agent on the unidirectional ring circuit.

Tasks queue firefighting-first (stable within each class). The robot travels
the ring in its fixed direction only — a single-line follower cannot reverse
— dwells through timed surveillance / search / extinguish phases, and
returns to the parking station when the queue drains.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from ..errors import UnknownSector
from ..model import (
    Action,
    ActionCode,
    Message,
    Notification,
    RobotMode,
    RobotTask,
    SectorId,
    Severity,
    Tick,
    TimelineEntry,
    Topology,
    TriggerCode,
)

AGENT_ID = "Robot"


class RobotPhase(Enum):
    PARKED = "Parked"
    TRANSIT = "Transit"
    SURVEILLING = "Surveilling"
    SEARCHING = "Searching"
    EXTINGUISHING = "Extinguishing"


class Speed(Enum):
    FAST = "Fast"
    SLOW = "Slow"


DWELL_PHASES = (RobotPhase.SURVEILLING, RobotPhase.SEARCHING, RobotPhase.EXTINGUISHING)


@dataclass(frozen=True)
class RobotParams:
    surveil_ticks: int = 2
    search_ticks: int = 1
    extinguish_ticks: int = 3


@dataclass(frozen=True)
class RobotState:
    waypoint: int = 0
    progress: int = 0
    phase: RobotPhase = RobotPhase.PARKED
    phase_remaining: int = 0
    queue: tuple[RobotTask, ...] = ()
    speed: Speed = Speed.FAST
    stride: int = 0


def _entry(trigger: TriggerCode, action: Action, tick: Tick) -> TimelineEntry:
    return TimelineEntry(step=0, agent=AGENT_ID, trigger=trigger, action=action, tick=tick)


def _insert(queue: tuple[RobotTask, ...], task: RobotTask, pin_head: bool) -> tuple[RobotTask, ...]:
    """Firefighting-first, stable within class. A dwell in progress pins the
    head task: new work slots in behind it."""
    head: tuple[RobotTask, ...] = ()
    rest = list(queue)
    if pin_head and rest:
        head = (rest[0],)
        rest = rest[1:]
    if task.mode is RobotMode.FIREFIGHTING:
        split = 0
        while split < len(rest) and rest[split].mode is RobotMode.FIREFIGHTING:
            split += 1
        rest.insert(split, task)
    else:
        rest.append(task)
    return head + tuple(rest)


def enqueue_task(
    state: RobotState, task: RobotTask, topology: Topology, now: Tick
) -> tuple[RobotState, list[Message], list[TimelineEntry]]:
    """Accept a dispatched task; duplicates of a queued (mode, sector) drop."""
    if task.sector not in topology.sectors:
        raise UnknownSector(task.sector)
    if task in state.queue:
        return state, [], []

    was_head = state.queue[0] if state.queue else None
    pin_head = state.phase in DWELL_PHASES
    queue = _insert(state.queue, task, pin_head)
    new_state = replace(state, queue=queue)
    entries: list[TimelineEntry] = []
    messages: list[Message] = []

    if state.phase is RobotPhase.PARKED:
        new_state = replace(new_state, phase=RobotPhase.TRANSIT, speed=Speed.FAST)
        action = (
            Action(ActionCode.MOVE_TO_SURVEIL, (task.sector,))
            if task.mode is RobotMode.SURVEILLANCE
            else Action(ActionCode.UPDATE_COURSE, (task.mode.value, task.sector))
        )
        entries.append(_entry(TriggerCode.ACTIVATION, action, now))
        messages.append(
            Notification(
                text=f"robot dispatched: {task.mode.value.lower()} at {task.sector}",
                severity=Severity.INFO,
            )
        )
    elif state.phase is RobotPhase.TRANSIT and queue[0] != was_head:
        entries.append(
            _entry(
                TriggerCode.ACTIVATION,
                Action(ActionCode.UPDATE_COURSE, (task.mode.value, task.sector)),
                now,
            )
        )
        messages.append(
            Notification(
                text=f"robot course updated: {task.mode.value.lower()} at {task.sector}",
                severity=Severity.INFO,
            )
        )
    return new_state, messages, entries


def _destination(state: RobotState, topology: Topology) -> int:
    if state.queue:
        return topology.waypoint_index(state.queue[0].sector)
    return topology.parking


def _pop_task(
    state: RobotState, topology: Topology, now: Tick
) -> tuple[RobotState, list[Message], list[TimelineEntry]]:
    """Finish the head task; continue to the next one or head home."""
    queue = state.queue[1:]
    state = replace(state, queue=queue)
    if queue:
        return replace(state, phase=RobotPhase.TRANSIT, speed=Speed.FAST), [], []
    if state.waypoint == topology.parking and state.progress == 0:
        parked = replace(state, phase=RobotPhase.PARKED, speed=Speed.FAST)
        entry = _entry(TriggerCode.RING_PROGRESS, Action(ActionCode.PARK), now)
        note = Notification(text="robot parked", severity=Severity.INFO)
        return parked, [note], [entry]
    return replace(state, phase=RobotPhase.TRANSIT, speed=Speed.FAST), [], []


def _arrive(
    state: RobotState, topology: Topology, params: RobotParams, now: Tick
) -> tuple[RobotState, list[Message], list[TimelineEntry]]:
    """Reached the head task's waypoint: start its timed phase."""
    task = state.queue[0]
    if task.mode is RobotMode.FIREFIGHTING:
        new_state = replace(
            state, phase=RobotPhase.SEARCHING, phase_remaining=params.search_ticks
        )
        entry = _entry(TriggerCode.RING_PROGRESS, Action(ActionCode.BEGIN_SEARCH, (task.sector,)), now)
    else:
        new_state = replace(
            state,
            phase=RobotPhase.SURVEILLING,
            phase_remaining=params.surveil_ticks,
            speed=Speed.SLOW,
        )
        entry = _entry(TriggerCode.RING_PROGRESS, Action(ActionCode.SURVEY, (task.sector,)), now)
    note = Notification(
        text=f"robot arrived at {task.sector} ({task.mode.value.lower()})", severity=Severity.INFO
    )
    return new_state, [note], [entry]


def navigate_step(
    state: RobotState, topology: Topology, params: RobotParams, now: Tick
) -> tuple[RobotState, list[Message], list[TimelineEntry]]:
    """Advance the robot by one tick: ring travel or phase countdown."""
    if state.phase is RobotPhase.PARKED:
        return state, [], []

    if state.phase is RobotPhase.TRANSIT:
        destination = _destination(state, topology)
        if state.waypoint == destination and state.progress == 0:
            if state.queue:
                return _arrive(state, topology, params, now)
            return _pop_return_home(state, now)
        # Slow speed covers an edge-tick every second tick.
        if state.speed is Speed.SLOW and state.stride == 0:
            return replace(state, stride=1), [], []
        state = replace(state, progress=state.progress + 1, stride=0)
        if state.progress < topology.circuit[state.waypoint].cost_to_next:
            return state, [], []
        state = replace(state, waypoint=(state.waypoint + 1) % len(topology.circuit), progress=0)
        if state.waypoint == destination:
            if state.queue:
                return _arrive(state, topology, params, now)
            return _pop_return_home(state, now)
        entry = _entry(
            TriggerCode.RING_PROGRESS,
            Action(ActionCode.PASS_WAYPOINT, (topology.circuit[state.waypoint].name,)),
            now,
        )
        return state, [], [entry]

    # timed phases
    remaining = state.phase_remaining - 1
    if remaining > 0:
        return replace(state, phase_remaining=remaining), [], []
    if state.phase is RobotPhase.SEARCHING:
        new_state = replace(
            state, phase=RobotPhase.EXTINGUISHING, phase_remaining=params.extinguish_ticks
        )
        entry = _entry(
            TriggerCode.PHASE_COMPLETE,
            Action(ActionCode.BEGIN_EXTINGUISH, (state.queue[0].sector,)),
            now,
        )
        return new_state, [], [entry]
    if state.phase is RobotPhase.EXTINGUISHING:
        sector = state.queue[0].sector
        entry = _entry(
            TriggerCode.PHASE_COMPLETE, Action(ActionCode.REPORT_FIRE_OUT, (sector,)), now
        )
        note = Notification(text=f"fire extinguished at {sector}", severity=Severity.WARNING)
        new_state, messages, entries = _pop_task(
            replace(state, phase_remaining=0), topology, now
        )
        return new_state, [note] + messages, [entry] + entries
    # Surveilling complete
    sector = state.queue[0].sector
    note = Notification(text=f"surveillance round complete at {sector}", severity=Severity.INFO)
    new_state, messages, entries = _pop_task(replace(state, phase_remaining=0), topology, now)
    return new_state, [note] + messages, entries


def _pop_return_home(
    state: RobotState, now: Tick
) -> tuple[RobotState, list[Message], list[TimelineEntry]]:
    """At the parking waypoint with nothing queued: park."""
    parked = replace(state, phase=RobotPhase.PARKED, speed=Speed.FAST)
    entry = _entry(TriggerCode.RING_PROGRESS, Action(ActionCode.PARK), now)
    note = Notification(text="robot parked", severity=Severity.INFO)
    return parked, [note], [entry]


def eta(state: RobotState, topology: Topology, params: RobotParams, sector: SectorId) -> int:
    """Exact tick count until the robot stands at ``sector``'s waypoint.

    Computed by simulating navigation on a copy with a phantom surveillance
    task appended, so the answer exists even when the current queue would
    never route past the sector (e.g. an empty queue while parked).
    """
    if sector not in topology.sectors:
        raise UnknownSector(sector)
    goal = topology.waypoint_index(sector)
    sim = state
    if all(t.sector != sector for t in sim.queue):
        pin = sim.phase in DWELL_PHASES
        sim = replace(sim, queue=_insert(sim.queue, RobotTask(RobotMode.SURVEILLANCE, sector), pin))
    if sim.phase is RobotPhase.PARKED:
        sim = replace(sim, phase=RobotPhase.TRANSIT)
    if sim.waypoint == goal and sim.progress == 0:
        return 0
    total_cost = sum(wp.cost_to_next for wp in topology.circuit)
    per_task = params.surveil_ticks + params.search_ticks + params.extinguish_ticks
    bound = (len(sim.queue) + 2) * (2 * total_cost + per_task) + 4
    for ticks in range(1, bound + 1):
        sim, _, _ = navigate_step(sim, topology, params, now=0)
        if sim.waypoint == goal and sim.progress == 0:
            return ticks
    raise RuntimeError(f"eta({sector}) did not converge within {bound} ticks")
