"""Best-effort bridge between the in-process bus and an external broker.

The simulation loop talks to the bridge only through two ordered handoff
queues: ``mirror()`` enqueues delivered envelopes outbound, and ``sync()``
flushes them to the broker, then drains inbound traffic on the command
filter into injectable LockdownCommand / RobotTask messages. Transports
deliver inbound messages from their own execution context (for MQTT, the
client's network thread) into the thread-safe inbound queue.

Payloads are UTF-8 JSON objects mirroring the message fields, with a "kind"
discriminator plus "sender" and "tick".
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Protocol

from .bus import Envelope, topic_matches
from .errors import BridgeDown
from .model import LockdownCommand, Message, RobotTask, message_from_dict, message_to_dict

CANONICAL_PREFIX = "ip2s"


class BrokerTransport(Protocol):
    def publish(self, topic: str, payload: bytes) -> None: ...

    def poll(self) -> list[tuple[str, bytes]]: ...

    def close(self) -> None: ...


class MemoryBroker:
    """In-memory stand-in for an external broker, used for round-trip tests
    and loopback demos. ``inject()`` plays the role of a remote publisher."""

    def __init__(self):
        self.published: list[tuple[str, bytes]] = []
        self._inbound: deque[tuple[str, bytes]] = deque()
        self.closed = False

    def publish(self, topic: str, payload: bytes) -> None:
        self.published.append((topic, payload))

    def inject(self, topic: str, payload: bytes) -> None:
        self._inbound.append((topic, payload))

    def poll(self) -> list[tuple[str, bytes]]:
        out = list(self._inbound)
        self._inbound.clear()
        return out

    def close(self) -> None:
        self.closed = True


class MqttBroker:
    """Thin wrapper over the standard MQTT client; optional dependency."""

    def __init__(self, host: str, port: int = 1883, command_filter: str = "ip2s/cmd/#"):
        try:
            import paho.mqtt.client as mqtt
        except ImportError as exc:
            raise BridgeDown("paho-mqtt is not installed (pip install ip2s[mqtt])") from exc
        import queue

        self._inbound: "queue.Queue[tuple[str, bytes]]" = queue.Queue()
        self._client = mqtt.Client()
        self._client.on_message = lambda _c, _u, msg: self._inbound.put((msg.topic, msg.payload))
        try:
            self._client.connect(host, port, keepalive=30)
        except OSError as exc:
            raise BridgeDown(f"cannot reach broker at {host}:{port}: {exc}") from exc
        self._client.subscribe(command_filter)
        self._client.loop_start()

    def publish(self, topic: str, payload: bytes) -> None:
        result = self._client.publish(topic, payload)
        if result.rc != 0:
            raise BridgeDown(f"publish failed with rc={result.rc}")

    def poll(self) -> list[tuple[str, bytes]]:
        out = []
        while not self._inbound.empty():
            out.append(self._inbound.get_nowait())
        return out

    def close(self) -> None:
        self._client.loop_stop()
        self._client.disconnect()


def make_transport(uri: str, prefix: str = CANONICAL_PREFIX) -> BrokerTransport:
    """memory: → loopback broker; mqtt://host[:port] → standard client."""
    if uri in ("memory:", "memory://"):
        return MemoryBroker()
    if uri.startswith("mqtt://"):
        rest = uri[len("mqtt://") :]
        host, _, port_text = rest.partition(":")
        if not host:
            raise BridgeDown(f"bad broker URI {uri!r}")
        port = int(port_text) if port_text else 1883
        return MqttBroker(host, port, command_filter=f"{prefix}/cmd/#")
    raise BridgeDown(f"unsupported broker URI {uri!r}")


@dataclass
class SyncResult:
    mirrored_out: int
    injected_in: int
    inbound: list[Message]


class Bridge:
    """Mirrors delivered envelopes outward; injects inbound commands."""

    def __init__(self, transport: BrokerTransport, prefix: str = CANONICAL_PREFIX):
        self.transport = transport
        self.prefix = prefix
        self._outbound: deque[Envelope] = deque()
        self.command_filter = f"{prefix}/cmd/#"

    def external_topic(self, topic: str) -> str:
        if self.prefix != CANONICAL_PREFIX and topic.startswith(CANONICAL_PREFIX + "/"):
            return self.prefix + topic[len(CANONICAL_PREFIX) :]
        return topic

    def mirror(self, envelopes: Iterable[Envelope]) -> None:
        self._outbound.extend(envelopes)

    def sync(self) -> SyncResult:
        out_count = 0
        while self._outbound:
            env = self._outbound.popleft()
            payload = json.dumps(
                message_to_dict(env.message, env.sender, env.published_at), sort_keys=True
            ).encode("utf-8")
            self.transport.publish(self.external_topic(env.topic), payload)
            out_count += 1
        inbound: list[Message] = []
        for topic, payload in self.transport.poll():
            if not topic_matches(self.command_filter, topic):
                continue
            try:
                message = message_from_dict(json.loads(payload.decode("utf-8")))
            except (ValueError, UnicodeDecodeError):
                continue  # malformed external traffic is ignored, not fatal
            if isinstance(message, (LockdownCommand, RobotTask)):
                inbound.append(message)
        return SyncResult(mirrored_out=out_count, injected_in=len(inbound), inbound=inbound)

    def close(self) -> None:
        self.transport.close()
