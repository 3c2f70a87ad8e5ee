"""Virtual-control-input generation and the baseline controller.

The high-level controller turns driver commands and measurements into the
five-entry virtual control v = [F_c, F_yc, M_z, M_x, M_y]: a traction-force
PI, a side-slip lateral-force PI, a yaw moment built from a yaw-rate PI
plus a side-slip PI, and roll/pitch damping PIDs.  The baseline controller
is the classical alternative: speed-scheduled rear steering proportional to
the front command, traction split inversely proportional to the normal
loads, and independent roll/pitch suspension PIs.

Controller integrators advance by explicit Euler with clamping anti-windup.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Dict, Sequence, Tuple

import numpy as np

from .params import G, VehicleParams


@dataclass(frozen=True)
class PiecewiseLinear:
    """Piecewise-linear time profile; constant extrapolation past the ends."""
    points: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("profile needs at least one breakpoint")
        ts = [t for t, _ in self.points]
        if any(t1 < t0 for t0, t1 in zip(ts, ts[1:])):
            raise ValueError("breakpoints must be time-sorted")

    def __call__(self, t: float) -> float:
        pts = self.points
        if t <= pts[0][0]:
            return pts[0][1]
        if t >= pts[-1][0]:
            return pts[-1][1]
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                if t1 == t0:
                    return v1
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        return pts[-1][1]

    @classmethod
    def constant(cls, value: float) -> "PiecewiseLinear":
        return cls(((0.0, value),))


@dataclass(frozen=True)
class DriverInput:
    """Scripted driver: steering angle [rad], pedal and brake mapped to a
    traction-force demand [N] over the scenario horizon."""
    steer: PiecewiseLinear
    pedal: PiecewiseLinear
    brake: PiecewiseLinear

    def steer_at(self, t: float) -> float:
        d = self.steer(t)
        lim = math.radians(30.0)
        return max(-lim, min(lim, d))

    def force_ref(self, t: float) -> float:
        return self.pedal(t) - self.brake(t)


@dataclass(frozen=True)
class Gains:
    """Controller gains; defaults are the shipped tuned set.

    The stock vehicle has load-proportional cornering stiffness, so the
    understeer gradient defaults to neutral (0).
    """
    # traction force PI (virtual control entry 1)
    kp_f: float = 2.0
    ki_f: float = 8.0
    # yaw-rate moment PI (M1)
    kp_mz: float = 20000.0
    ki_mz: float = 40000.0
    # side-slip moment PI (M2)
    kp_beta_mz: float = 30000.0
    ki_beta_mz: float = 0.0
    # side-slip lateral-force PI
    kp_fy: float = 50000.0
    ki_fy: float = 100000.0
    # roll moment PID
    kp_roll: float = 300000.0
    kd_roll: float = 15000.0
    ki_roll: float = 500000.0
    # pitch moment PID
    kp_pitch: float = 400000.0
    kd_pitch: float = 30000.0
    ki_pitch: float = 600000.0
    # understeer gradient for the yaw-rate reference [s^2/m]
    k_understeer: float = 0.0
    # baseline rear-steer schedule: cornering gain per unit axle load
    # [1/rad]; places the sign-crossover speed of the rear-steer ratio
    # near 20 m/s for the stock vehicle
    c_alpha_rear_steer: float = 30.0
    # baseline suspension PIs (force units per rad); the corner force maps
    # to a moment through 2L (pitch) and 2w (roll), so these defaults give
    # the same static authority as the moment PIDs above
    kp_pitch_base: float = 80000.0
    ki_pitch_base: float = 120000.0
    kp_roll_base: float = 93750.0
    ki_roll_base: float = 156250.0
    # anti-windup accumulator bounds (per integrand, in its own units)
    i_max_f: float = 5000.0
    i_max_r: float = 0.5
    i_max_beta: float = 0.2
    i_max_roll: float = 0.5
    i_max_pitch: float = 0.5
    # demand limits per virtual-control channel [N, N, N m, N m, N m];
    # roughly the friction/actuator envelope of the stock vehicle
    v_max_f: float = 13000.0
    v_max_fy: float = 13000.0
    v_max_mz: float = 20000.0
    v_max_mx: float = 16000.0
    v_max_my: float = 25000.0

    def with_overrides(self, overrides: Dict[str, float]) -> "Gains":
        names = {f.name for f in fields(self)}
        unknown = set(overrides) - names
        if unknown:
            raise ValueError(f"unknown gain names: {sorted(unknown)}")
        return replace(self, **overrides)


@dataclass
class ControllerState:
    """Integrator accumulators, owned by one simulation instance."""
    i_force: float = 0.0
    i_yaw: float = 0.0
    i_beta_mz: float = 0.0
    i_beta_fy: float = 0.0
    i_roll: float = 0.0
    i_pitch: float = 0.0
    i_roll_base: float = 0.0
    i_pitch_base: float = 0.0


def _accumulate(acc: float, err: float, dt: float, bound: float) -> float:
    acc += err * dt
    if acc > bound:
        return bound
    if acc < -bound:
        return -bound
    return acc


def yaw_rate_reference(delta_in: float, v_x: float, g: Gains,
                       p: VehicleParams) -> float:
    """Steady-state yaw-rate reference from the linear single-track model,
    magnitude-limited by the friction circle mu*G/Vx."""
    v = max(v_x, 0.1)
    r_ref = v * delta_in / (p.L + g.k_understeer * v * v)
    limit = p.mu * G / v
    return max(-limit, min(limit, r_ref))


def virtual_control(delta_in: float, f_ref: float, meas: Dict[str, float],
                    g: Gains, cs: ControllerState, dt: float,
                    p: VehicleParams) -> Tuple[np.ndarray, float]:
    """One sample of the virtual control vector and the yaw-rate reference.

    meas must provide F (longitudinal force m*a_x), beta, r, Vx, phi, phid,
    theta, thetad.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    r_ref = yaw_rate_reference(delta_in, meas["Vx"], g, p)

    f_err = f_ref - meas["F"]
    cs.i_force = _accumulate(cs.i_force, f_err, dt, g.i_max_f)
    f_c = g.kp_f * f_err + g.ki_f * cs.i_force

    beta = meas["beta"]
    r_err = r_ref - meas["r"]
    cs.i_yaw = _accumulate(cs.i_yaw, r_err, dt, g.i_max_r)
    cs.i_beta_mz = _accumulate(cs.i_beta_mz, beta, dt, g.i_max_beta)
    m1 = g.kp_mz * r_err + g.ki_mz * cs.i_yaw
    m2 = g.kp_beta_mz * beta + g.ki_beta_mz * cs.i_beta_mz
    m_z = m1 + m2

    cs.i_beta_fy = _accumulate(cs.i_beta_fy, beta, dt, g.i_max_beta)
    f_yc = -g.kp_fy * beta - g.ki_fy * cs.i_beta_fy

    cs.i_roll = _accumulate(cs.i_roll, meas["phi"], dt, g.i_max_roll)
    m_x = -g.kp_roll * meas["phi"] - g.kd_roll * meas["phid"] \
        - g.ki_roll * cs.i_roll

    cs.i_pitch = _accumulate(cs.i_pitch, meas["theta"], dt, g.i_max_pitch)
    m_y = -g.kp_pitch * meas["theta"] - g.kd_pitch * meas["thetad"] \
        - g.ki_pitch * cs.i_pitch

    caps = (g.v_max_f, g.v_max_fy, g.v_max_mz, g.v_max_mx, g.v_max_my)
    v = np.array([f_c, f_yc, m_z, m_x, m_y])
    return np.clip(v, [-c for c in caps], caps), r_ref


def baseline_rear_steer(delta_f: float, v_x: float, n_front: float,
                        n_rear: float, p: VehicleParams,
                        c_alpha: float) -> float:
    """Rear steering proportional to the front command.

    The speed-scheduled ratio is negative at low speed (maneuverability) and
    positive at high speed (stability).
    """
    n_f = max(n_front, 1.0)
    n_r = max(n_rear, 1.0)
    mv2 = p.m * v_x * v_x
    k_s = ((mv2 * p.a - p.b * p.L * c_alpha * n_r)
           / (mv2 * p.b + p.a * p.L * c_alpha * n_f)) * (n_f / n_r)
    return k_s * delta_f


def baseline_traction(f_c: float, normals: Sequence[float],
                      p: VehicleParams) -> Tuple[float, float, float, float]:
    """Wheel torque split inversely proportional to the normal loads."""
    return tuple(f_c * p.weight / (4.0 * max(n, 1.0)) for n in normals)


def baseline_suspension(theta: float, phi: float, g: Gains,
                        cs: ControllerState, dt: float,
                        ) -> Tuple[float, float, float, float]:
    """Independent roll/pitch PI control mapped to the four corners."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    cs.i_pitch_base = _accumulate(cs.i_pitch_base, theta, dt, g.i_max_pitch)
    cs.i_roll_base = _accumulate(cs.i_roll_base, phi, dt, g.i_max_roll)
    f_pitch = -g.kp_pitch_base * theta - g.ki_pitch_base * cs.i_pitch_base
    f_roll = -g.kp_roll_base * phi - g.ki_roll_base * cs.i_roll_base
    return (-f_pitch + f_roll,
            -f_pitch - f_roll,
            f_pitch + f_roll,
            f_pitch - f_roll)
