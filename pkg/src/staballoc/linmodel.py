"""Allocation-oriented linear time-varying model and the exact factorization
of its input matrix.

The 17-state control model drops the wheel-spin states: wheel torque is
treated as a direct traction force T/R_w (quasi-static torque balance), so
the input matrix has the nonzero sensitivities the allocator needs.  The
input matrix B_u(t) factors as B_v * B_l * B_n(t), where B_n(t) carries all
time dependence (normal loads and steering angles) on its diagonal and B_l
is constant.  Moment-arm signs in B_y and B_l are taken from the yaw, roll
and pitch equations of the plant, so the identity B_y(t) = B_l * B_n(t)
holds exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .params import VehicleParams
from .plant import body_accelerations, normal_forces, \
    vertical_derivatives, yaw_acceleration
from .tires import magic_formula, slip_angles, wheel_frame_to_body

N_X = 17
N_U = 12
N_V = 5

# rows of the control state corresponding to heave and unsprung elevations;
# actuator sensitivities on these rows are zeroed so every input acts as a
# pure force/moment generator on (Vx, Vy, r, phi, theta)
ZEROED_ROWS = (3, 4, 9, 10, 11, 12, 13, 14, 15, 16)

C_ALPHA_DEFAULT = 8.0  # per-unit-normal-force cornering gain [1/rad]

BN_EPS = 1.0e-6  # diagonal entries below this flag B_n as non-invertible


def reduced_derivative(x: Sequence[float], u: Sequence[float],
                       p: VehicleParams) -> np.ndarray:
    """Control-oriented vector field on the 17 states.

    Wheels are eliminated quasi-statically: the traction force of wheel i is
    T_i/R_w, with rolling resistance deliberately left unmodeled here (the
    closed loop treats it as a disturbance).  Lateral forces use the full
    tire curve at the slip angles implied by the state.
    """
    v_x, v_y, r = x[0], x[1], x[2]
    steer = (u[0], u[1], u[2], u[3])
    torque = (u[4], u[5], u[6], u[7])
    f_z = (u[8], u[9], u[10], u[11])

    zu = (x[9], x[11], x[13], x[15])
    zroad = (0.0, 0.0, 0.0, 0.0)
    normals = normal_forces(zu, zroad, p)
    alphas = slip_angles(v_x, v_y, r, steer, p)

    fx_body = [0.0] * 4
    fy_body = [0.0] * 4
    for i in range(4):
        f_x = torque[i] / p.R_w
        f_y = magic_formula(alphas[i], p.B2, p.C2, p.E2, p.mu * normals[i])
        fx_body[i], fy_body[i] = wheel_frame_to_body(f_x, f_y, steer[i])

    a_x, a_y = body_accelerations(sum(fx_body), sum(fy_body), v_x, 0.0, p)
    rdot = yaw_acceleration(fx_body, fy_body, p)
    x24 = list(x) + [0.0] * 7
    zdd, thetadd, phidd, zudd_fl, zudd_fr, zudd_rl, zudd_rr = \
        vertical_derivatives(x24, f_z, a_x, a_y, zroad, p)

    return np.array([
        a_x + r * v_y,
        a_y - r * v_x,
        rdot,
        x[4], zdd,
        x[6], phidd,
        x[8], thetadd,
        x[10], zudd_fl, x[12], zudd_fr, x[14], zudd_rl, x[16], zudd_rr,
    ])


@dataclass(frozen=True)
class LinearModel:
    """x' = A x + B_u u + D around straight cruising at v0.

    A and D are held at the operating point; B_u is the input matrix at the
    operating point with heave and unsprung rows zeroed.  D is the vector
    field residual f(x0, 0), in deviation coordinates.
    """
    a: np.ndarray       # 17 x 17
    b_u: np.ndarray     # 17 x 12
    d: np.ndarray       # 17
    v0: float
    steer0: tuple
    normals0: tuple


def linearize(p: VehicleParams, v0: float,
              rel_step: float = 1.0e-6) -> LinearModel:
    """Central-difference linearization of the control-oriented model at
    straight driving with speed v0, zero steering and static normal loads."""
    if v0 <= 0.0:
        raise ValueError("v0 must be positive")
    x0 = np.zeros(N_X)
    x0[0] = v0
    u0 = np.zeros(N_U)

    a = np.zeros((N_X, N_X))
    for j in range(N_X):
        h = rel_step * max(1.0, abs(x0[j]))
        xp = x0.copy()
        xm = x0.copy()
        xp[j] += h
        xm[j] -= h
        a[:, j] = (reduced_derivative(xp, u0, p)
                   - reduced_derivative(xm, u0, p)) / (2.0 * h)

    b_u = np.zeros((N_X, N_U))
    for j in range(N_U):
        h = rel_step
        up = u0.copy()
        um = u0.copy()
        up[j] += h
        um[j] -= h
        b_u[:, j] = (reduced_derivative(x0, up, p)
                     - reduced_derivative(x0, um, p)) / (2.0 * h)
    b_u[list(ZEROED_ROWS), :] = 0.0

    d = reduced_derivative(x0, u0, p)
    normals = (p.N_front_static, p.N_front_static,
               p.N_rear_static, p.N_rear_static)
    return LinearModel(a=a, b_u=b_u, d=d, v0=v0,
                       steer0=(0.0,) * 4, normals0=normals)


def build_bv(p: VehicleParams) -> np.ndarray:
    """Map the 5 generalized efforts [F, Fy, Mz, Mx, My] onto the state rows
    (Vx', Vy', r', phid', thetad') with the inverse inertias."""
    b_v = np.zeros((N_X, N_V))
    b_v[0, 0] = 1.0 / p.m
    b_v[1, 1] = 1.0 / p.m
    b_v[2, 2] = 1.0 / p.I_z
    b_v[6, 3] = 1.0 / p.I_x
    b_v[8, 4] = 1.0 / p.I_y
    return b_v


def build_bl(p: VehicleParams, c_alpha: float = C_ALPHA_DEFAULT) -> np.ndarray:
    """Constant factor of the effort map, columns ordered as the actuator
    vector (4 steer, 4 torque, 4 suspension)."""
    a, b, w, rw, m = p.a, p.b, p.w, p.R_w, p.m
    cm4 = c_alpha * m / 4.0
    hw = 0.5 * w
    cols = [
        [0.0, cm4, a * cm4, 0.0, 0.0],       # d_fl
        [0.0, cm4, a * cm4, 0.0, 0.0],       # d_fr
        [0.0, cm4, -b * cm4, 0.0, 0.0],      # d_rl
        [0.0, cm4, -b * cm4, 0.0, 0.0],      # d_rr
        [1.0 / rw, 0.0, -hw, 0.0, 0.0],      # T_fl (left wheels: -w/2)
        [1.0 / rw, 0.0, hw, 0.0, 0.0],       # T_fr
        [1.0 / rw, 0.0, -hw, 0.0, 0.0],      # T_rl
        [1.0 / rw, 0.0, hw, 0.0, 0.0],       # T_rr
        [0.0, 0.0, 0.0, hw, -a],             # fz_fl
        [0.0, 0.0, 0.0, -hw, -a],            # fz_fr
        [0.0, 0.0, 0.0, hw, b],              # fz_rl
        [0.0, 0.0, 0.0, -hw, b],             # fz_rr
    ]
    return np.array(cols).T


def build_bn(steer: Sequence[float], normals: Sequence[float],
             p: VehicleParams) -> np.ndarray:
    """Diagonal of the time-varying factor: 4*N_i*cos(d_i)/m for the steering
    channels, cos(d_i) for the torque channels, 1 for suspension."""
    cd = [math.cos(s) for s in steer]
    return np.array([
        4.0 * normals[0] * cd[0] / p.m,
        4.0 * normals[1] * cd[1] / p.m,
        4.0 * normals[2] * cd[2] / p.m,
        4.0 * normals[3] * cd[3] / p.m,
        cd[0], cd[1], cd[2], cd[3],
        1.0, 1.0, 1.0, 1.0,
    ])


def bn_is_invertible(bn_diag: np.ndarray, eps: float = BN_EPS) -> bool:
    return bool(np.min(bn_diag) > eps)


def build_by(steer: Sequence[float], normals: Sequence[float],
             p: VehicleParams, c_alpha: float = C_ALPHA_DEFAULT) -> np.ndarray:
    """Time-varying effort map, columns written out explicitly.

    Steering columns generate lateral force c_alpha*N*cos(d) with yaw arm
    +a (front) / -b (rear); torque columns generate traction cos(d)/R_w
    with yaw arm -w/2 (left) / +w/2 (right); suspension columns generate
    roll/pitch moments with arms +-w/2 and -a / +b.
    """
    a, b, w, rw = p.a, p.b, p.w, p.R_w
    hw = 0.5 * w
    cd = [math.cos(s) for s in steer]
    cn = [c_alpha * normals[i] * cd[i] for i in range(4)]
    cols = [
        [0.0, cn[0], a * cn[0], 0.0, 0.0],
        [0.0, cn[1], a * cn[1], 0.0, 0.0],
        [0.0, cn[2], -b * cn[2], 0.0, 0.0],
        [0.0, cn[3], -b * cn[3], 0.0, 0.0],
        [cd[0] / rw, 0.0, -hw * cd[0], 0.0, 0.0],
        [cd[1] / rw, 0.0, hw * cd[1], 0.0, 0.0],
        [cd[2] / rw, 0.0, -hw * cd[2], 0.0, 0.0],
        [cd[3] / rw, 0.0, hw * cd[3], 0.0, 0.0],
        [0.0, 0.0, 0.0, hw, -a],
        [0.0, 0.0, 0.0, -hw, -a],
        [0.0, 0.0, 0.0, hw, b],
        [0.0, 0.0, 0.0, -hw, b],
    ]
    return np.array(cols).T


def build_d(v0: float, p: VehicleParams) -> np.ndarray:
    """Constant disturbance efforts at the linearization speed."""
    q = 0.5 * v0 * v0 * p.rho * p.C_d * p.A_f
    return np.array([q, 0.0, 0.0, -q, 0.0])
