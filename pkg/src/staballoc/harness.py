"""Closed-loop scenario driver and fault injection.

Per step: measurements are formed from the current state and the inputs
applied over the previous step (the IMU sees what actually happened), the
selected controller produces an actuator command, effectiveness faults
scale it element-wise, and the plant advances one fixed step with the
effective inputs held constant.

Controllers:
  proposed  - virtual control + adaptive allocation over all 12 actuators
  baseline  - driver front steer, speed-scheduled rear steer, normal-force
              proportional traction, independent suspension PIs
  hybrid    - proposed traction/steering channels with the baseline
              suspension controller (roll/pitch channels removed from the
              virtual control)
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .allocator import AdaptiveAllocator, AllocatorConfig, measured_net
from .controllers import (ControllerState, Gains, baseline_rear_steer,
                          baseline_suspension, baseline_traction,
                          virtual_control)
from .linmodel import build_bl, build_bn
from .logio import RunLog
from .metrics import compute_metrics
from .params import VehicleParams
from .plant import (PlantInputs, PlantState, STEER_LIMIT, SUSPENSION_LIMIT,
                    TORQUE_LIMIT, normal_forces, state_derivative, step_rk4)
from .scenario import Event, Scenario, TIRE_SETS, ACTUATOR_NAMES
from .tires import _reg

U_LIMITS = np.array([STEER_LIMIT] * 4 + [TORQUE_LIMIT] * 4
                    + [SUSPENSION_LIMIT] * 4)


def apply_faults(u_commanded: np.ndarray, events: Sequence[Event],
                 t: float) -> np.ndarray:
    """Element-wise effectiveness scaling of the active fault events."""
    u = np.array(u_commanded, dtype=float)
    for ev in events:
        if ev.kind == "effectiveness" and t >= ev.time:
            u[ACTUATOR_NAMES.index(ev.target)] *= ev.factor
    return u


def friction_scale(events: Sequence[Event], t: float,
                   ) -> Tuple[float, float, float, float]:
    """Per-tire lateral friction multipliers from the active events."""
    scale = [1.0, 1.0, 1.0, 1.0]
    for ev in events:
        if ev.kind == "friction" and t >= ev.time:
            for i in TIRE_SETS[ev.target]:
                scale[i] *= ev.factor
    return tuple(scale)


def road_elevation(events: Sequence[Event], t: float,
                   ) -> Tuple[float, float, float, float]:
    """Road elevation steps [m] accumulated from the active events."""
    z = [0.0, 0.0, 0.0, 0.0]
    for ev in events:
        if ev.kind == "elevation" and t >= ev.time:
            for i in TIRE_SETS[ev.target]:
                z[i] += ev.factor
    return tuple(z)


def measure(state: PlantState, prev_inputs: PlantInputs,
            p: VehicleParams) -> Dict[str, float]:
    """Sensor picture at the current state: body rates and angles, inertial
    accelerations realized under the previously applied inputs, side slip,
    and tire normal loads."""
    x = state.as_list()
    deriv = state_derivative(x, prev_inputs, p)
    r = state.r
    a_x = deriv[0] - r * state.Vy
    a_y = deriv[1] + r * state.Vx
    n = normal_forces((state.z_ufl, state.z_ufr, state.z_url, state.z_urr),
                      prev_inputs.z_road, p)
    return {
        "Vx": state.Vx,
        "beta": math.atan(state.Vy / _reg(state.Vx)),
        "r": r,
        "phi": state.phi, "phid": state.phid,
        "theta": state.theta, "thetad": state.thetad,
        "ax": a_x, "ay": a_y,
        "yaw_acc": deriv[2], "roll_acc": deriv[6], "pitch_acc": deriv[8],
        "F": p.m * a_x,
        "N_fl": n[0], "N_fr": n[1], "N_rl": n[2], "N_rr": n[3],
    }


@dataclass
class _Loop:
    """Mutable per-run controller assembly."""
    mode: str
    gains: Gains
    cs: ControllerState
    allocator: Optional[AdaptiveAllocator]
    c_alpha: float

    def command(self, t: float, delta_in: float, f_ref: float,
                meas: Dict[str, float], dt: float, p: VehicleParams,
                ) -> Tuple[np.ndarray, np.ndarray, float, float]:
        """Returns (u_commanded, v, r_ref, residual)."""
        normals = (meas["N_fl"], meas["N_fr"], meas["N_rl"], meas["N_rr"])
        if self.mode == "baseline":
            v, r_ref = virtual_control(delta_in, f_ref, meas, self.gains,
                                       self.cs, dt, p)
            f_c = v[0]
            d_r = baseline_rear_steer(delta_in, meas["Vx"],
                                      normals[0] + normals[1],
                                      normals[2] + normals[3],
                                      p, self.gains.c_alpha_rear_steer)
            torques = baseline_traction(f_c, normals, p)
            f_z = baseline_suspension(meas["theta"], meas["phi"],
                                      self.gains, self.cs, dt)
            u = np.array([delta_in, delta_in, d_r, d_r, *torques, *f_z])
            return np.clip(u, -U_LIMITS, U_LIMITS), np.zeros(5), r_ref, 0.0

        v, r_ref = virtual_control(delta_in, f_ref, meas, self.gains,
                                   self.cs, dt, p)
        if self.mode == "hybrid":
            v = v.copy()
            v[3] = 0.0
            v[4] = 0.0
        realized = measured_net(meas["ax"], meas["ay"], meas["yaw_acc"],
                                meas["roll_acc"], meas["pitch_acc"],
                                meas["Vx"], p)
        alloc = self.allocator
        steer_prev = tuple(alloc.prev_u_ca[0:4])
        bn = build_bn(steer_prev, normals, p)
        res = alloc.step(v, realized, bn, dt, delta_in=delta_in)
        u = res.u
        if self.mode == "hybrid":
            u = u.copy()
            u[8:12] = baseline_suspension(meas["theta"], meas["phi"],
                                          self.gains, self.cs, dt)
        return np.clip(u, -U_LIMITS, U_LIMITS), v, r_ref, res.residual


def run_scenario(scn: Scenario,
                 params: Optional[VehicleParams] = None,
                 gains: Optional[Gains] = None,
                 alloc_config: Optional[AllocatorConfig] = None,
                 controller: Optional[str] = None,
                 dt: Optional[float] = None) -> RunLog:
    """Simulate one scenario and return the per-step log.

    Explicit arguments override the scenario file; the run stops early with
    a partial log when the plant diverges.
    """
    p = params or VehicleParams()
    g = gains or Gains()
    if scn.gain_overrides:
        g = g.with_overrides(scn.gain_overrides)
    acfg = alloc_config or AllocatorConfig()
    if scn.allocator_overrides:
        for k in scn.allocator_overrides:
            if not hasattr(acfg, k):
                raise ValueError(f"unknown allocator setting {k!r}")
        acfg = dataclasses.replace(acfg, **scn.allocator_overrides)
    mode = controller or scn.controller
    dt = dt or scn.dt
    n_steps = int(round(scn.horizon / dt))

    allocator = None
    if mode in ("proposed", "hybrid"):
        allocator = AdaptiveAllocator(build_bl(p, acfg.c_alpha), acfg)
    loop = _Loop(mode=mode, gains=g, cs=ControllerState(),
                 allocator=allocator, c_alpha=acfg.c_alpha)

    state = PlantState.cruising(scn.v0, p)
    prev_inputs = PlantInputs(
        lat_scale=friction_scale(scn.events, 0.0),
        z_road=road_elevation(scn.events, 0.0))
    log = RunLog(scenario=scn.name, controller=mode, dt=dt)

    for k in range(n_steps):
        t = k * dt
        meas = measure(state, prev_inputs, p)
        delta_in = scn.driver.steer_at(t)
        f_ref = scn.driver.force_ref(t)
        u_cmd, v, r_ref, resid = loop.command(t, delta_in, f_ref, meas,
                                              dt, p)
        u_eff = apply_faults(u_cmd, scn.events, t)
        inputs = PlantInputs.from_u(
            u_eff,
            lat_scale=friction_scale(scn.events, t),
            z_road=road_elevation(scn.events, t))

        row = {
            "t": t, "Vx": state.Vx, "Vy": state.Vy, "r": state.r,
            "beta": meas["beta"], "z": state.z, "phi": state.phi,
            "theta": state.theta, "X": state.X, "Y": state.Y,
            "psi": state.psi,
            "d_fl": u_cmd[0], "d_fr": u_cmd[1], "d_rl": u_cmd[2],
            "d_rr": u_cmd[3],
            "T_fl": u_cmd[4], "T_fr": u_cmd[5], "T_rl": u_cmd[6],
            "T_rr": u_cmd[7],
            "fz_fl": u_cmd[8], "fz_fr": u_cmd[9], "fz_rl": u_cmd[10],
            "fz_rr": u_cmd[11],
            "N_fl": meas["N_fl"], "N_fr": meas["N_fr"],
            "N_rl": meas["N_rl"], "N_rr": meas["N_rr"],
            "v1": v[0], "v2": v[1], "v3": v[2], "v4": v[3], "v5": v[4],
            "resid": resid,
        }
        log.append(row, u_eff, r_ref)

        state = step_rk4(state, inputs, p, dt)
        if state.diverged:
            log.mark_diverged(t + dt, "non-finite or out-of-bound state "
                                      f"after step {k}")
            break
        prev_inputs = inputs
    return log


def sweep_max_speed(scn: Scenario, controller: str,
                    v_min: float, v_max: float,
                    resolution: float = 0.25,
                    beta_limit: float = math.radians(15.0),
                    params: Optional[VehicleParams] = None,
                    gains: Optional[Gains] = None,
                    alloc_config: Optional[AllocatorConfig] = None,
                    ) -> float:
    """Largest initial speed in [v_min, v_max] the controller survives.

    Survival: no spin flag, no divergence, and max |beta| below beta_limit.
    Bisection to the given resolution, assuming a single stability
    threshold in the range.  Returns NaN when even v_min fails.
    """
    if v_max < v_min:
        raise ValueError("empty speed range")

    def stable(v0: float) -> bool:
        log = run_scenario(scn.with_speed(v0), params=params, gains=gains,
                           alloc_config=alloc_config, controller=controller)
        m = compute_metrics(log)
        return (not m.spin) and (not m.diverged) and m.max_beta < beta_limit

    if not stable(v_min):
        return float("nan")
    if v_min == v_max or stable(v_max):
        return v_max
    lo, hi = v_min, v_max
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return lo
