"""Scenario files: plain declarative text, hand-editable and diff-able.

Format: ``[section]`` headers with ``key = value`` lines; the ``[events]``
section holds one whitespace-separated row per event.  Profiles are
breakpoint lists ``t:value`` separated by whitespace.

::

    [scenario]
    name = actuator_fault
    v0 = 20.0
    horizon = 10.0
    dt = 0.001
    controller = proposed

    [driver]
    steer = 0:0  3:0  3.75:0.065  5.25:-0.065  6:0
    pedal = 0:0
    brake = 6.5:0  6.6:6000  7.5:6000  7.6:0

    [events]
    # time  kind           target  factor
    1.0     effectiveness  T_rr    0.10
    4.0     friction       all     0.90

``[gains]`` and ``[allocator]`` sections may override individual controller
gains and allocator settings for the run.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from .controllers import DriverInput, PiecewiseLinear

CONTROLLERS = ("proposed", "baseline", "hybrid")

EVENT_KINDS = ("effectiveness", "friction", "elevation")

ACTUATOR_NAMES = ("d_fl", "d_fr", "d_rl", "d_rr",
                  "T_fl", "T_fr", "T_rl", "T_rr",
                  "fz_fl", "fz_fr", "fz_rl", "fz_rr")

TIRE_SETS = {
    "fl": (0,), "fr": (1,), "rl": (2,), "rr": (3,),
    "left": (0, 2), "right": (1, 3),
    "front": (0, 1), "rear": (2, 3),
    "all": (0, 1, 2, 3),
}


class ConfigError(Exception):
    """Raised for malformed or inconsistent scenario files."""


@dataclass(frozen=True)
class Event:
    """A timed change: actuator effectiveness, lateral friction, or a road
    elevation step, applied from `time` onward."""
    time: float
    kind: str
    target: str
    factor: float


@dataclass(frozen=True)
class Scenario:
    name: str
    v0: float
    horizon: float
    dt: float
    driver: DriverInput
    controller: str = "proposed"
    events: Tuple[Event, ...] = ()
    gain_overrides: Dict[str, float] = field(default_factory=dict)
    allocator_overrides: Dict[str, float] = field(default_factory=dict)

    def with_speed(self, v0: float) -> "Scenario":
        return replace(self, v0=v0)

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


def _parse_profile(text: str, where: str) -> PiecewiseLinear:
    points = []
    for token in text.split():
        try:
            t_str, v_str = token.split(":")
            points.append((float(t_str), float(v_str)))
        except ValueError as exc:
            raise ConfigError(f"{where}: bad breakpoint {token!r}") from exc
    if not points:
        raise ConfigError(f"{where}: empty profile")
    try:
        return PiecewiseLinear(tuple(points))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_event(line: str, lineno: int) -> Event:
    parts = line.split()
    if len(parts) != 4:
        raise ConfigError(f"line {lineno}: event rows are 't kind target factor'")
    t_str, kind, target, f_str = parts
    try:
        time = float(t_str)
        factor = float(f_str)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: bad number in event") from exc
    if kind not in EVENT_KINDS:
        raise ConfigError(f"line {lineno}: unknown event kind {kind!r}")
    if kind == "effectiveness":
        if target not in ACTUATOR_NAMES:
            raise ConfigError(f"line {lineno}: unknown actuator {target!r}")
        if not 0.0 < factor <= 1.0:
            raise ConfigError(f"line {lineno}: effectiveness must be in (0, 1]")
    else:
        if target not in TIRE_SETS:
            raise ConfigError(f"line {lineno}: unknown tire set {target!r}")
        if kind == "friction" and not 0.0 < factor <= 1.0:
            raise ConfigError(f"line {lineno}: friction factor must be in (0, 1]")
    if time < 0.0:
        raise ConfigError(f"line {lineno}: event time must be non-negative")
    return Event(time=time, kind=kind, target=target, factor=factor)


def parse_scenario(text: str, name: Optional[str] = None) -> Scenario:
    """Parse scenario text; raises ConfigError on any inconsistency."""
    section = None
    keyvals: Dict[str, Dict[str, str]] = {"scenario": {}, "driver": {},
                                          "gains": {}, "allocator": {}}
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("scenario", "driver", "events",
                               "gains", "allocator"):
                raise ConfigError(f"line {lineno}: unknown section {section!r}")
            continue
        if section is None:
            raise ConfigError(f"line {lineno}: content before any section")
        if section == "events":
            events.append(_parse_event(line, lineno))
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        keyvals[section][key.strip()] = value.strip()

    sc = keyvals["scenario"]
    try:
        v0 = float(sc["v0"])
        horizon = float(sc["horizon"])
        dt = float(sc["dt"])
    except KeyError as exc:
        raise ConfigError(f"[scenario] is missing {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(f"[scenario]: {exc}") from exc
    controller = sc.get("controller", "proposed")
    if controller not in CONTROLLERS:
        raise ConfigError(f"unknown controller {controller!r}")
    if dt <= 0.0 or horizon <= 0.0:
        raise ConfigError("dt and horizon must be positive")
    steps = horizon / dt
    if abs(steps - round(steps)) > 1.0e-6:
        raise ConfigError("dt must divide the horizon")
    if v0 < 0.0:
        raise ConfigError("v0 must be non-negative")

    drv = keyvals["driver"]
    driver = DriverInput(
        steer=_parse_profile(drv.get("steer", "0:0"), "steer"),
        pedal=_parse_profile(drv.get("pedal", "0:0"), "pedal"),
        brake=_parse_profile(drv.get("brake", "0:0"), "brake"),
    )

    if any(e1.time < e0.time for e0, e1 in zip(events, events[1:])):
        raise ConfigError("events must be listed in time order")

    def _floats(d: Dict[str, str], label: str) -> Dict[str, float]:
        out = {}
        for k, v in d.items():
            try:
                out[k] = float(v)
            except ValueError as exc:
                raise ConfigError(f"[{label}] {k}: not a number") from exc
        return out

    return Scenario(
        name=sc.get("name", name or "unnamed"),
        v0=v0, horizon=horizon, dt=dt,
        driver=driver, controller=controller,
        events=tuple(events),
        gain_overrides=_floats(keyvals["gains"], "gains"),
        allocator_overrides=_floats(keyvals["allocator"], "allocator"),
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    return parse_scenario(text, name=path.stem)
