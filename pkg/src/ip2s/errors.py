"""Exception taxonomy shared across the package."""

from __future__ import annotations


class IP2SError(Exception):
    """Base class for all package-specific failures."""


class UnknownSector(IP2SError):
    """A sector id is not part of the active topology."""


class InvalidTopic(IP2SError):
    """Publish topic is malformed (wildcard or empty segment)."""


class InvalidFilter(IP2SError):
    """Subscription filter violates the wildcard grammar."""


class ClockError(IP2SError):
    """Bus advanced with a non-monotone tick."""


class BridgeDown(IP2SError):
    """External broker is unreachable; bridging is best-effort."""


class StaleReading(IP2SError):
    """Sensor reading arrived with a tick not newer than the last one."""


class WrongSector(IP2SError):
    """Sensor reading routed to an agent of a different sector."""


class NoTarget(IP2SError):
    """Camera asked to rotate without a target sector."""


class NotOnTarget(IP2SError):
    """Camera asked to observe before completing its rotation."""


class SinkError(IP2SError):
    """Notification sink rejected a write; the run must abort."""


class ParseError(IP2SError):
    """Scenario or golden document is malformed.

    ``location`` pins the offending line number or field path when known.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(message if location is None else f"{location}: {message}")


class TopologyError(IP2SError):
    """Scenario topology failed invariant validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))
