"""Collaborative camera agent.

A camera merges attention requests into a priority list, arbitrates a target
once its reaction delay elapses, yields a peer-claimed sector only when an
equal-priority unclaimed alternative exists inside its own coverage, rotates
toward the target, dwells, and reports what the detector sees.

Round semantics: every delivered batch containing an in-coverage attention
request (re)starts the reaction timer; arbitration fires when the timer
elapses. Peer claims never start a round — they trigger a silent re-check
that broadcasts only if it changes the target (a yield). A tick spent
broadcasting a claim is consumed by reorientation: rotation and observation
resume the following tick.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from ..errors import NoTarget, NotOnTarget
from ..model import (
    Action,
    ActionCode,
    AttentionRequest,
    CameraClaim,
    CameraId,
    Cause,
    FireConfirmation,
    Message,
    NoConfirmation,
    Notification,
    Priority,
    SectorId,
    Severity,
    Tick,
    TimelineEntry,
    TriggerCode,
)


@dataclass(frozen=True)
class CameraParams:
    rotation_rate: float = 90.0
    dwell_ticks: int = 2


@dataclass(frozen=True)
class DetectorVerdict:
    flames: bool = False
    person: bool = False


@dataclass(frozen=True)
class PendingRequest:
    sector: SectorId
    cause: Cause
    tick: Tick

    @property
    def priority(self) -> Priority:
        return AttentionRequest(self.sector, self.cause).priority


def _pending_key(req: PendingRequest) -> tuple[int, int, str]:
    # priority class desc, request tick desc, sector id asc
    return (0 if req.priority is Priority.EMERGENCY else 1, -req.tick, req.sector)


@dataclass(frozen=True)
class CameraState:
    camera: CameraId
    coverage: tuple[SectorId, ...]
    angles: tuple[tuple[SectorId, float], ...]
    heading: float = 0.0
    reaction_delay: int = 0
    pending: tuple[PendingRequest, ...] = ()
    peer_claims: tuple[tuple[CameraId, SectorId], ...] = ()
    target: SectorId | None = None
    arrived: bool = False
    dwell_remaining: int = 0
    round_due: Tick | None = None
    batch_had_claim: bool = False
    person_reported: bool = False

    def angle_of(self, sector: SectorId) -> float:
        for name, angle in self.angles:
            if name == sector:
                return angle
        raise NoTarget(f"{self.camera} has no angle for {sector}")

    def claimed_sectors(self) -> frozenset[SectorId]:
        return frozenset(sector for _, sector in self.peer_claims)


def _entry(state: CameraState, trigger: TriggerCode, action: Action, tick: Tick) -> TimelineEntry:
    return TimelineEntry(step=0, agent=state.camera, trigger=trigger, action=action, tick=tick)


def update_priorities(
    state: CameraState, batch: Iterable[tuple[Message, Tick]], now: Tick
) -> tuple[CameraState, list[TimelineEntry]]:
    """Merge a delivered batch: requests dedupe per (sector, cause) with the
    newest winning; peer claims overwrite that peer's previous claim."""
    pending = {(r.sector, r.cause): r for r in state.pending}
    claims = dict(state.peer_claims)
    merged_request = False
    saw_claim = state.batch_had_claim
    for message, tick in batch:
        if isinstance(message, AttentionRequest):
            if message.sector not in state.coverage:
                continue
            key = (message.sector, message.cause)
            if key not in pending or pending[key].tick <= tick:
                pending[key] = PendingRequest(message.sector, message.cause, tick)
            merged_request = True
        elif isinstance(message, CameraClaim) and message.camera != state.camera:
            claims[message.camera] = message.sector
            saw_claim = True
    new_state = replace(
        state,
        pending=tuple(sorted(pending.values(), key=_pending_key)),
        peer_claims=tuple(sorted(claims.items())),
        round_due=now + state.reaction_delay if merged_request else state.round_due,
        batch_had_claim=saw_claim,
    )
    return new_state, []


def _choose(state: CameraState) -> PendingRequest | None:
    """Head of the priority list, with the yield rule applied: a peer-claimed
    head is abandoned only for an unclaimed same-priority alternative."""
    if not state.pending:
        return None
    candidate = state.pending[0]
    claimed = state.claimed_sectors()
    if candidate.sector in claimed:
        for alt in state.pending[1:]:
            if alt.priority is candidate.priority and alt.sector not in claimed:
                return alt
    return candidate


def _adopt(
    state: CameraState, choice: PendingRequest, trigger: TriggerCode, now: Tick, params: CameraParams
) -> tuple[CameraState, CameraClaim, list[TimelineEntry]]:
    retarget = choice.sector != state.target
    new_state = replace(
        state,
        target=choice.sector,
        arrived=False if retarget else state.arrived,
        # re-claiming the current target while on station restarts the dwell
        dwell_remaining=0
        if retarget
        else (params.dwell_ticks if state.arrived else state.dwell_remaining),
        person_reported=False if retarget else state.person_reported,
        round_due=None,
        batch_had_claim=False,
    )
    claim = CameraClaim(camera=state.camera, sector=choice.sector)
    entry = _entry(new_state, trigger, Action(ActionCode.CLAIM_AND_MOVE, (choice.sector,)), now)
    return new_state, claim, [entry]


def arbitrate(
    state: CameraState, now: Tick, params: CameraParams
) -> tuple[CameraState, CameraClaim | None, list[TimelineEntry]]:
    """Run one arbitration round; always broadcasts when something is pending."""
    choice = _choose(state)
    if choice is None:
        return (
            replace(state, target=None, arrived=False, dwell_remaining=0, round_due=None,
                    batch_had_claim=False),
            None,
            [],
        )
    trigger = (
        TriggerCode.ATTENTION_REQUESTS_AND_CLAIM
        if state.batch_had_claim
        else TriggerCode.ATTENTION_REQUESTS
    )
    return _adopt(state, choice, trigger, now, params)


def recheck_claims(
    state: CameraState, now: Tick, params: CameraParams
) -> tuple[CameraState, CameraClaim | None, list[TimelineEntry]]:
    """Re-evaluate after peer claims arrive outside a round. Only a target
    that is now claimed by a peer is reconsidered, and a broadcast happens
    only when the decision changes (a yield); staying put is silent."""
    if state.target is None or state.target not in state.claimed_sectors():
        return replace(state, batch_had_claim=False), None, []
    choice = _choose(state)
    if choice is None or choice.sector == state.target:
        return replace(state, batch_had_claim=False), None, []
    return _adopt(state, choice, TriggerCode.ATTENTION_REQUESTS_AND_CLAIM, now, params)


def rotate_step(
    state: CameraState, params: CameraParams, now: Tick = 0
) -> tuple[CameraState, bool, list[TimelineEntry]]:
    """Advance the heading toward the target along the shorter arc; arrival
    starts the dwell."""
    if state.target is None:
        raise NoTarget(state.camera)
    goal = state.angle_of(state.target)
    delta = ((goal - state.heading + 180.0) % 360.0) - 180.0
    if abs(delta) <= params.rotation_rate:
        heading = goal
        arrived = True
    else:
        step = params.rotation_rate if delta > 0 else -params.rotation_rate
        heading = (state.heading + step) % 360.0
        arrived = False
    new_state = replace(
        state,
        heading=heading,
        arrived=arrived,
        dwell_remaining=params.dwell_ticks if arrived else 0,
        person_reported=False if arrived else state.person_reported,
    )
    micro = _entry(
        state,
        TriggerCode.TARGET_SET,
        Action(ActionCode.SURVEY if arrived else ActionCode.ROTATE_TOWARD, (state.target,)),
        now,
    )
    return new_state, arrived, [micro]


def observe(
    state: CameraState, verdict: DetectorVerdict, now: Tick, params: CameraParams
) -> tuple[CameraState, list[Message], list[TimelineEntry]]:
    """One dwell tick at the target sector.

    Flames confirm immediately and end the dwell (the camera stays put,
    watching the confirmed fire). A person during an intruder request holds
    the dwell open for tracking. An exhausted dwell reports no fire, drops
    every request for the examined sector and re-arbitrates.
    """
    if not state.arrived or state.target is None:
        raise NotOnTarget(state.camera)
    if state.dwell_remaining <= 0:
        raise NotOnTarget(f"{state.camera} dwell exhausted")
    target = state.target

    if verdict.flames:
        message = FireConfirmation(camera=state.camera, sector=target)
        entry = _entry(
            state,
            TriggerCode.FLAMES_DETECTED,
            Action(ActionCode.SEND_FIRE_CONFIRMATION, (target,)),
            now,
        )
        new_state = replace(
            state,
            dwell_remaining=0,
            pending=tuple(r for r in state.pending if r.sector != target),
        )
        return new_state, [message], [entry]

    under_intruder_request = any(
        r.sector == target and r.cause is Cause.INTRUDER for r in state.pending
    )
    if verdict.person and under_intruder_request:
        messages: list[Message] = []
        entries: list[TimelineEntry] = []
        if not state.person_reported:
            messages.append(
                Notification(
                    text=f"{state.camera} sees a person in {target}", severity=Severity.CRITICAL
                )
            )
            entries.append(
                _entry(
                    state,
                    TriggerCode.PERSON_DETECTED,
                    Action(ActionCode.NOTIFY, (Severity.CRITICAL.value,)),
                    now,
                )
            )
        # keep tracking: the dwell does not run down while the person is visible
        new_state = replace(state, dwell_remaining=params.dwell_ticks, person_reported=True)
        return new_state, messages, entries

    remaining = state.dwell_remaining - 1
    if remaining > 0:
        return replace(state, dwell_remaining=remaining), [], []

    messages = [NoConfirmation(camera=state.camera, sector=target)]
    entries = [
        _entry(state, TriggerCode.DWELL_COMPLETE, Action(ActionCode.REPORT_NO_FIRE, (target,)), now)
    ]
    cleared = replace(
        state,
        dwell_remaining=0,
        arrived=False,
        target=None,
        person_reported=False,
        pending=tuple(r for r in state.pending if r.sector != target),
    )
    choice = _choose(cleared)
    if choice is not None:
        new_state, claim, claim_entries = _adopt(
            cleared, choice, TriggerCode.ATTENTION_REQUESTS, now, params
        )
        messages.append(claim)
        entries.extend(claim_entries)
        return new_state, messages, entries
    return cleared, messages, entries
