"""Topic-based publish/subscribe with MQTT 3.1.1 filter semantics.

The in-process bus is single-logical-thread and driven by the simulation
loop: everything published at tick t becomes visible to matching subscribers
at the start of tick t + 1, exactly once, ordered by (publisher id, seq).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ClockError, InvalidFilter, InvalidTopic
from .model import AgentId, Message, Tick

# Canonical topic scheme. Agents and the bridge agree on these paths.
TOPIC_ALARM_TRIGGER = "ip2s/alarm/trigger"
TOPIC_ROBOT_TASK = "ip2s/robot/task"
TOPIC_LOCKDOWN = "ip2s/cmd/lockdown"
TOPIC_NOTIFY = "ip2s/notify"


def reading_topic(sector: str) -> str:
    return f"ip2s/sector/{sector}/reading"


def attention_topic(sector: str) -> str:
    return f"ip2s/sector/{sector}/attention"


def claim_topic(camera: str) -> str:
    return f"ip2s/camera/{camera}/claim"


def confirmation_topic(camera: str) -> str:
    return f"ip2s/camera/{camera}/confirmation"


def validate_topic(topic: str) -> None:
    """Publish topics: nonempty '/'-separated segments, no wildcards."""
    segments = topic.split("/")
    if not topic or any(not s for s in segments):
        raise InvalidTopic(f"empty segment in topic {topic!r}")
    if any(s in ("+", "#") or "+" in s or "#" in s for s in segments):
        raise InvalidTopic(f"wildcard in publish topic {topic!r}")


def validate_filter(pattern: str) -> None:
    """Filters allow '+' for one whole segment and a trailing '#'."""
    segments = pattern.split("/")
    if not pattern or any(not s for s in segments):
        raise InvalidFilter(f"empty segment in filter {pattern!r}")
    for i, seg in enumerate(segments):
        if "#" in seg:
            if seg != "#" or i != len(segments) - 1:
                raise InvalidFilter(f"'#' must be the final segment: {pattern!r}")
        elif "+" in seg and seg != "+":
            raise InvalidFilter(f"'+' must occupy a whole segment: {pattern!r}")


def topic_matches(pattern: str, topic: str) -> bool:
    """MQTT 3.1.1 matching; '#' also matches its parent level."""
    fparts = pattern.split("/")
    tparts = topic.split("/")
    for i, fseg in enumerate(fparts):
        if fseg == "#":
            # also matches the parent level: "a/#" matches "a"
            return True
        if i >= len(tparts):
            return False
        if fseg != "+" and fseg != tparts[i]:
            return False
    return len(tparts) == len(fparts)


@dataclass(frozen=True)
class Envelope:
    """A published message with its per-publisher sequence number."""

    topic: str
    message: Message
    sender: AgentId
    seq: int
    published_at: Tick

    def order_key(self) -> tuple[str, int]:
        return (self.sender, self.seq)


@dataclass(frozen=True)
class Subscription:
    agent: AgentId
    pattern: str


@dataclass
class MessageBus:
    """Deterministic one-tick-latency bus.

    ``advance(now)`` hands out exactly the envelopes published at ``now - 1``,
    grouped per subscriber and ordered by (publisher id, seq); duplicates from
    overlapping filters are collapsed so delivery is exactly-once.
    """

    subscriptions: list[Subscription] = field(default_factory=list)
    pending: list[Envelope] = field(default_factory=list)
    trace: list[Envelope] = field(default_factory=list)
    _seq: dict[AgentId, int] = field(default_factory=dict)
    _last_advanced: Tick = -1

    def subscribe(self, agent: AgentId, pattern: str) -> Subscription:
        validate_filter(pattern)
        sub = Subscription(agent, pattern)
        self.subscriptions.append(sub)
        return sub

    def publish(self, sender: AgentId, topic: str, message: Message, now: Tick) -> Envelope:
        validate_topic(topic)
        seq = self._seq.get(sender, 0) + 1
        self._seq[sender] = seq
        env = Envelope(topic=topic, message=message, sender=sender, seq=seq, published_at=now)
        self.pending.append(env)
        self.trace.append(env)
        return env

    def record(self, sender: AgentId, topic: str, message: Message, now: Tick) -> Envelope:
        """Trace an externally injected message without queueing it for
        delivery (the engine hands it to its recipient directly)."""
        validate_topic(topic)
        seq = self._seq.get(sender, 0) + 1
        self._seq[sender] = seq
        env = Envelope(topic=topic, message=message, sender=sender, seq=seq, published_at=now)
        self.trace.append(env)
        return env

    def advance(self, now: Tick) -> dict[AgentId, list[Envelope]]:
        if now <= self._last_advanced:
            raise ClockError(f"advance({now}) after advance({self._last_advanced})")
        self._last_advanced = now
        due = [e for e in self.pending if e.published_at == now - 1]
        self.pending = [e for e in self.pending if e.published_at >= now]
        batches: dict[AgentId, list[Envelope]] = {}
        for env in due:
            delivered_to: set[AgentId] = set()
            for sub in self.subscriptions:
                if sub.agent in delivered_to:
                    continue
                if topic_matches(sub.pattern, env.topic):
                    batches.setdefault(sub.agent, []).append(env)
                    delivered_to.add(sub.agent)
        for batch in batches.values():
            batch.sort(key=Envelope.order_key)
        return dict(sorted(batches.items()))
