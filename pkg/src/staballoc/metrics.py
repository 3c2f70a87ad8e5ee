"""Run metrics: side-slip extrema, spin classification, roll/pitch RMS and
obstacle-line clearance.  All metrics are pure functions of the log."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .logio import RunLog

OBSTACLE_X = 100.0            # m, obstacle line of the avoidance maneuver
SPIN_HEADING_ERR = math.pi / 2.0  # rad
SPIN_HOLD = 0.5               # s a heading error must persist to count


@dataclass(frozen=True)
class Metrics:
    max_beta: float           # rad
    spin: bool                # sustained heading error beyond 90 deg
    diverged: bool
    rms_roll: float           # rad
    rms_pitch: float          # rad
    lateral_offset: float     # |Y| when X first crosses the obstacle line;
                              # NaN if the line is never reached
    max_stable_speed: Optional[float] = None  # filled by speed sweeps


def _rms(values) -> float:
    if not values:
        return 0.0
    return math.sqrt(sum(v * v for v in values) / len(values))


def compute_metrics(log: RunLog, obstacle_x: float = OBSTACLE_X,
                    heading_err: float = SPIN_HEADING_ERR,
                    hold: float = SPIN_HOLD) -> Metrics:
    """Deterministic metrics of one run.

    The driver-intended heading is the integral of the yaw-rate reference;
    a spin is a heading error beyond `heading_err` sustained for `hold`
    seconds.
    """
    if len(log) == 0:
        raise ValueError("empty log")
    dt = log.dt
    psi = log.cols["psi"]
    beta = log.cols["beta"]

    psi_ref = 0.0
    hold_steps = max(1, int(round(hold / dt)))
    run = 0
    spin = False
    for k in range(len(log)):
        if abs(psi[k] - psi_ref) > heading_err:
            run += 1
            if run >= hold_steps:
                spin = True
                break
        else:
            run = 0
        psi_ref += log.r_ref[k] * dt

    lateral = float("nan")
    xs = log.cols["X"]
    ys = log.cols["Y"]
    for k in range(len(log)):
        if xs[k] >= obstacle_x:
            if k == 0 or xs[k] == xs[k - 1]:
                lateral = abs(ys[k])
            else:
                f = (obstacle_x - xs[k - 1]) / (xs[k] - xs[k - 1])
                lateral = abs(ys[k - 1] + f * (ys[k] - ys[k - 1]))
            break

    return Metrics(
        max_beta=max(abs(b) for b in beta),
        spin=spin,
        diverged=log.diverged,
        rms_roll=_rms(log.cols["phi"]),
        rms_pitch=_rms(log.cols["theta"]),
        lateral_offset=lateral,
    )
