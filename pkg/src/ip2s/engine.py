"""Deterministic tick loop.

Phase order within one tick — the engine's central ordering contract:

  1. world update (sample keyframes, advance visual ground truth)
  2. bus advance (deliver everything published at tick - 1)
  3. injected command schedule (delivered to recipients this same tick)
  4. sector agents: lockdowns, confirmations, reading, suspicion timeout
     (sectors under lockdown are stepped first, then declaration order)
  5. camera agents: merge batch, arbitrate when the reaction delay elapsed,
     otherwise rotate or observe
  6. alarm agent
  7. robot agent: enqueue delivered tasks, then one navigation step
  8. notification flush

Every publication during a tick is buffered for delivery at the next one, so
no agent observes a message in the tick it was sent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable

from .agents import alarm as alarm_agent
from .agents import camera as camera_agent
from .agents import robot as robot_agent
from .agents import sector as sector_agent
from .agents.alarm import AlarmState, MemorySink, NotificationSink, notify
from .agents.camera import CameraState, DetectorVerdict
from .agents.robot import RobotState
from .agents.sector import SectorMode, SectorState
from .bus import (
    TOPIC_ALARM_TRIGGER,
    TOPIC_LOCKDOWN,
    TOPIC_NOTIFY,
    TOPIC_ROBOT_TASK,
    Envelope,
    MessageBus,
    attention_topic,
    claim_topic,
    confirmation_topic,
)
from .errors import TopologyError
from .model import (
    AgentId,
    AlarmTrigger,
    AttentionRequest,
    CameraClaim,
    CameraId,
    FireConfirmation,
    LockdownCommand,
    Message,
    NoConfirmation,
    Notification,
    NotificationRecord,
    RobotTask,
    SectorId,
    Severity,
    Tick,
    TimelineEntry,
    validate_topology,
)
from .scenario import Scenario, WorldCursor

NOTIFIER_ID: AgentId = "Notification"
OPERATOR_ID: AgentId = "Operator"

Detector = Callable[[CameraId, SectorId, Tick], DetectorVerdict]


@dataclass(frozen=True)
class Timeline:
    """A run's ordered entries plus its notification feed."""

    entries: tuple[TimelineEntry, ...]
    notifications: tuple[NotificationRecord, ...]

    def comparable_entries(self) -> tuple[TimelineEntry, ...]:
        return tuple(e for e in self.entries if e.comparable)

    def lines(self) -> list[str]:
        return [str(e) for e in self.entries]

    def notification_lines(self) -> list[str]:
        return [str(n) for n in self.notifications]


def _topic_for(message: Message) -> str:
    if isinstance(message, AttentionRequest):
        return attention_topic(message.sector)
    if isinstance(message, CameraClaim):
        return claim_topic(message.camera)
    if isinstance(message, (FireConfirmation, NoConfirmation)):
        return confirmation_topic(message.camera)
    if isinstance(message, AlarmTrigger):
        return TOPIC_ALARM_TRIGGER
    if isinstance(message, RobotTask):
        return TOPIC_ROBOT_TASK
    if isinstance(message, LockdownCommand):
        return TOPIC_LOCKDOWN
    if isinstance(message, Notification):
        return TOPIC_NOTIFY
    raise TypeError(f"unroutable message: {message!r}")


class Engine:
    """Owns the bus, the agent states and the world cursor for one run."""

    def __init__(
        self,
        scenario: Scenario,
        detector: Detector | None = None,
        sink: NotificationSink | None = None,
        bridge=None,
    ):
        violations = validate_topology(scenario.topology)
        if violations:
            raise TopologyError(violations)
        self.scenario = scenario
        self.topology = scenario.topology
        self.params = scenario.params
        self.cursor = WorldCursor(scenario)
        self.detector: Detector = detector or self._scenario_detector
        self.sink: NotificationSink = sink if sink is not None else MemorySink()
        self.bridge = bridge
        self.tick: Tick = 0
        self.entries: list[TimelineEntry] = []
        self.notifications: list[NotificationRecord] = []
        self._step = 0
        self._injected: list[tuple[Tick, Message]] = list(scenario.commands)

        self.bus = MessageBus()
        self.sectors: dict[SectorId, SectorState] = {}
        for sector in self.topology.sectors:
            self.sectors[sector] = SectorState(sector=sector)
            self.bus.subscribe(sector, "ip2s/camera/+/confirmation")
            self.bus.subscribe(sector, TOPIC_LOCKDOWN)
        self.cameras: dict[CameraId, CameraState] = {}
        for spec in self.topology.cameras:
            self.cameras[spec.camera] = CameraState(
                camera=spec.camera,
                coverage=spec.coverage,
                angles=spec.angles,
                heading=spec.initial_heading,
                reaction_delay=self.params.delay_of(spec.camera),
            )
            self.bus.subscribe(spec.camera, "ip2s/sector/+/attention")
            self.bus.subscribe(spec.camera, "ip2s/camera/+/claim")
        self.alarm = AlarmState()
        self.bus.subscribe(alarm_agent.AGENT_ID, TOPIC_ALARM_TRIGGER)
        self.robot = RobotState(waypoint=self.topology.parking)
        self.bus.subscribe(robot_agent.AGENT_ID, TOPIC_ROBOT_TASK)
        self.bus.subscribe(NOTIFIER_ID, TOPIC_NOTIFY)

    # -- helpers -----------------------------------------------------------

    def _scenario_detector(self, camera: CameraId, sector: SectorId, now: Tick) -> DetectorVerdict:
        facts = self.cursor.look(sector, now)
        return DetectorVerdict(flames=facts["flames"], person=facts["person"])

    def _emit(self, entries: Iterable[TimelineEntry]) -> None:
        for entry in entries:
            self._step += 1
            self.entries.append(replace(entry, step=self._step))

    def _publish(self, sender: AgentId, messages: Iterable[Message]) -> None:
        for message in messages:
            self.bus.publish(sender, _topic_for(message), message, self.tick)

    # -- one tick ----------------------------------------------------------

    def step(self) -> list[TimelineEntry]:
        now = self.tick
        first_entry = len(self.entries)

        # (1) world
        readings = self.cursor.sample(now, self.topology.sectors)

        # (2) bus
        batches = self.bus.advance(now)

        # (3) injected commands bypass bus latency: visible this same tick
        lockdowns_now: list[LockdownCommand] = []
        robot_tasks_now: list[RobotTask] = []
        for tick, message in self._injected:
            if tick != now:
                continue
            self.bus.record(OPERATOR_ID, _topic_for(message), message, now)
            if isinstance(message, LockdownCommand):
                lockdowns_now.append(message)
            elif isinstance(message, RobotTask):
                robot_tasks_now.append(message)

        # (4) sectors: lockdown mode is serviced first (high alert), then
        # declaration order
        ordered = sorted(
            self.topology.sectors,
            key=lambda s: (self.sectors[s].mode is not SectorMode.LOCKDOWN,
                           self.topology.sectors.index(s)),
        )
        sector_params = self.params.sector_params()
        for sector in ordered:
            state = self.sectors[sector]
            batch = batches.get(sector, [])
            for env in batch:
                if isinstance(env.message, LockdownCommand):
                    state, entries = sector_agent.apply_lockdown(state, env.message, now)
                    self._emit(entries)
            for cmd in lockdowns_now:
                state, entries = sector_agent.apply_lockdown(state, cmd, now)
                self._emit(entries)
            for env in batch:
                if isinstance(env.message, (FireConfirmation, NoConfirmation)):
                    state, messages, entries = sector_agent.handle_confirmation(
                        state, env.message, now
                    )
                    self._publish(sector, messages)
                    self._emit(entries)
            state, messages, entries = sector_agent.ingest_reading(
                state, readings[sector], sector_params
            )
            self._publish(sector, messages)
            self._emit(entries)
            state, entries = sector_agent.check_suspicion_timeout(
                state, now, sector_params.suspicion_timeout
            )
            self._emit(entries)
            self.sectors[sector] = state

        # (5) cameras, in declaration order
        camera_params = self.params.camera_params()
        for camera in self.topology.camera_ids():
            state = self.cameras[camera]
            batch = [(env.message, env.published_at) for env in batches.get(camera, [])]
            state, _ = camera_agent.update_priorities(state, batch, now)
            broadcast = False
            if state.round_due is not None and now >= state.round_due:
                state, claim, entries = camera_agent.arbitrate(state, now, camera_params)
                if claim is not None:
                    self._publish(camera, [claim])
                    broadcast = True
                self._emit(entries)
            elif state.batch_had_claim:
                state, claim, entries = camera_agent.recheck_claims(state, now, camera_params)
                if claim is not None:
                    self._publish(camera, [claim])
                    broadcast = True
                self._emit(entries)
            if not broadcast and state.target is not None:
                if not state.arrived:
                    state, _, entries = camera_agent.rotate_step(state, camera_params, now)
                    self._emit(entries)
                elif state.dwell_remaining > 0:
                    verdict = self.detector(camera, state.target, now)
                    state, messages, entries = camera_agent.observe(
                        state, verdict, now, camera_params
                    )
                    self._publish(camera, messages)
                    self._emit(entries)
            self.cameras[camera] = state

        # (6) alarm
        for env in batches.get(alarm_agent.AGENT_ID, []):
            if isinstance(env.message, AlarmTrigger):
                self.alarm, messages, entries = alarm_agent.handle_trigger(
                    self.alarm, env.message, now
                )
                self._publish(alarm_agent.AGENT_ID, messages)
                self._emit(entries)

        # (7) robot: deliveries first, then one navigation step
        robot_params = self.params.robot_params()
        delivered_tasks = [
            env.message
            for env in batches.get(robot_agent.AGENT_ID, [])
            if isinstance(env.message, RobotTask)
        ]
        for task in delivered_tasks + robot_tasks_now:
            self.robot, messages, entries = robot_agent.enqueue_task(
                self.robot, task, self.topology, now
            )
            self._publish(robot_agent.AGENT_ID, messages)
            self._emit(entries)
        self.robot, messages, entries = robot_agent.navigate_step(
            self.robot, self.topology, robot_params, now
        )
        self._publish(robot_agent.AGENT_ID, messages)
        self._emit(entries)

        # (8) notification flush: records carry the tick the event was raised
        for env in batches.get(NOTIFIER_ID, []):
            if isinstance(env.message, Notification):
                record = NotificationRecord(
                    tick=env.published_at,
                    severity=env.message.severity,
                    source=env.sender,
                    text=env.message.text,
                )
                notify(self.sink, record)
                self.notifications.append(record)

        if self.bridge is not None:
            self._sync_bridge(batches, now)

        self.tick += 1
        return self.entries[first_entry:]

    def _sync_bridge(self, batches: dict[AgentId, list[Envelope]], now: Tick) -> None:
        from .errors import BridgeDown

        seen: set[int] = set()
        unique: list[Envelope] = []
        for batch in batches.values():
            for env in batch:
                if id(env) not in seen:
                    seen.add(id(env))
                    unique.append(env)
        unique.sort(key=Envelope.order_key)
        try:
            self.bridge.mirror(unique)
            result = self.bridge.sync()
        except BridgeDown:
            # best-effort: drop the bridge, keep simulating
            self.bridge = None
            record = NotificationRecord(
                tick=now, severity=Severity.WARNING, source=NOTIFIER_ID, text="bridge lost"
            )
            notify(self.sink, record)
            self.notifications.append(record)
            return
        for message in result.inbound:
            if isinstance(message, (LockdownCommand, RobotTask)):
                self._injected.append((now + 1, message))

    def run(self) -> Timeline:
        while self.tick < self.scenario.duration:
            self.step()
        return Timeline(entries=tuple(self.entries), notifications=tuple(self.notifications))


def run_scenario(
    scenario: Scenario,
    detector: Detector | None = None,
    sink: NotificationSink | None = None,
    bridge=None,
) -> Timeline:
    """Run a scenario end to end; two runs of one scenario are identical."""
    return Engine(scenario, detector=detector, sink=sink, bridge=bridge).run()


def trace_lines(engine: Engine) -> list[str]:
    """bus_trace.log lines: every published or injected envelope in order."""
    from json import dumps

    from .model import message_to_dict

    out = []
    for env in engine.bus.trace:
        payload = dumps(message_to_dict(env.message, env.sender, env.published_at), sort_keys=True)
        out.append(f"{env.published_at}|{env.sender}|{env.topic}|{env.seq}|{payload}")
    return out
