"""Render run artifacts as figures.

Two static charts accompany the delimited logs in the output directory:
``timeline.png`` (per-agent event lanes over ticks) and ``sensors.png``
(scripted temperature/humidity traces with event markers). matplotlib is
imported lazily so verification runs never pay for it.
"""

from __future__ import annotations

from pathlib import Path

from .engine import Timeline
from .model import ActionCode, COMPARABLE_ACTIONS, SensorReading
from .scenario import Scenario, WorldCursor

_CATEGORY_COLORS = {
    "attention": "#1f77b4",
    "claim": "#2ca02c",
    "alarm": "#d62728",
    "robot": "#9467bd",
    "plumbing": "#b0b0b0",
}

_ALARM_ACTIONS = {
    ActionCode.TRIGGER_FIRE_ALARM,
    ActionCode.TRIGGER_INTRUDER_ALARM,
    ActionCode.ACTIVATE_FIRE_MEASURES,
    ActionCode.ACTIVATE_INTRUDER_MEASURES,
    ActionCode.TRIGGER_SUPPRESSORS,
}
_ROBOT_ACTIONS = {
    ActionCode.MOVE_TO_SURVEIL,
    ActionCode.UPDATE_COURSE,
    ActionCode.DISPATCH_ROBOT,
    ActionCode.BEGIN_SEARCH,
    ActionCode.BEGIN_EXTINGUISH,
    ActionCode.REPORT_FIRE_OUT,
}


def _category(code: ActionCode) -> str:
    if code in (ActionCode.REQUEST_ATTENTION, ActionCode.CLEAR_SUSPICION):
        return "attention"
    if code in (ActionCode.CLAIM_AND_MOVE, ActionCode.SEND_FIRE_CONFIRMATION):
        return "claim"
    if code in _ALARM_ACTIONS:
        return "alarm"
    if code in _ROBOT_ACTIONS:
        return "robot"
    return "plumbing"


def render_timeline_figure(timeline: Timeline, scenario: Scenario, path: Path) -> Path:
    """Event lanes: one row per agent, one marker per timeline entry."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    agents: list[str] = list(scenario.topology.sectors)
    agents += list(scenario.topology.camera_ids())
    agents += ["Alarm", "Robot"]
    lanes = {agent: i for i, agent in enumerate(agents)}

    fig, ax = plt.subplots(figsize=(max(6.0, scenario.duration * 0.45), 0.6 * len(agents) + 1.5))
    for entry in timeline.entries:
        lane = lanes.get(entry.agent)
        if lane is None:
            continue
        cat = _category(entry.action.code)
        emphasized = entry.action.code in COMPARABLE_ACTIONS
        ax.scatter(
            entry.tick,
            lane,
            s=60 if emphasized else 22,
            color=_CATEGORY_COLORS[cat],
            alpha=1.0 if emphasized else 0.45,
            zorder=3 if emphasized else 2,
        )
        if emphasized:
            ax.annotate(
                entry.action.code.value,
                (entry.tick, lane),
                textcoords="offset points",
                xytext=(0, 7),
                fontsize=6,
                rotation=30,
                ha="left",
            )
    ax.set_yticks(range(len(agents)))
    ax.set_yticklabels(agents)
    ax.set_xlabel("tick")
    ax.set_xlim(-0.5, max(scenario.duration - 0.5, 0.5))
    ax.set_title(f"{scenario.name}: agent timeline")
    ax.grid(axis="x", linestyle=":", alpha=0.4)
    handles = [
        plt.Line2D([], [], marker="o", linestyle="", color=color, label=name)
        for name, color in _CATEGORY_COLORS.items()
    ]
    ax.legend(handles=handles, loc="upper right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_sensor_figure(scenario: Scenario, timeline: Timeline, path: Path) -> Path:
    """Scripted per-sector temperature and humidity, with motion ticks."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cursor = WorldCursor(scenario)
    ticks = list(range(scenario.duration))
    series: dict[str, list[SensorReading]] = {s: [] for s in scenario.topology.sectors}
    for now in ticks:
        sampled = cursor.sample(now, scenario.topology.sectors)
        for sector, reading in sampled.items():
            series[sector].append(reading)

    n = len(scenario.topology.sectors)
    fig, axes = plt.subplots(n, 1, figsize=(max(6.0, scenario.duration * 0.4), 1.8 * n), sharex=True)
    if n == 1:
        axes = [axes]
    for ax, sector in zip(axes, scenario.topology.sectors):
        temps = [r.temperature for r in series[sector]]
        hums = [r.humidity for r in series[sector]]
        ax.step(ticks, temps, where="post", color="#d62728", label="temperature (°C)")
        twin = ax.twinx()
        twin.step(ticks, hums, where="post", color="#1f77b4", label="humidity (%)")
        twin.set_ylim(0, 100)
        for r in series[sector]:
            if r.motion:
                ax.axvline(r.tick, color="#2ca02c", alpha=0.35, linestyle="--")
        ax.set_ylabel(sector, fontsize=8)
        ax.tick_params(labelsize=7)
        twin.tick_params(labelsize=7)
    axes[-1].set_xlabel("tick")
    fig.suptitle(f"{scenario.name}: scripted sensor series (motion dashed)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_run_figures(timeline: Timeline, scenario: Scenario, outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        render_timeline_figure(timeline, scenario, outdir / "timeline.png"),
        render_sensor_figure(scenario, timeline, outdir / "sensors.png"),
    ]
