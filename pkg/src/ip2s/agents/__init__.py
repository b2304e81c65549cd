"""Agent state machines: sector, camera, robot, alarm/notification."""

from . import alarm, camera, robot, sector

__all__ = ["alarm", "camera", "robot", "sector"]
