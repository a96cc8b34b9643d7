"""6-DOF rigid body: Newton-Euler force/moment equations with an XZ plane of
symmetry (only the I_xz product of inertia is nonzero), integrated with
fixed-step RK4. Frames follow the aerospace NED convention, Z positive down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GRAVITY = 9.81  # m/s^2


@dataclass
class InertiaSet:
    m: float = 3.0
    i_x: float = 0.04
    i_y: float = 0.04
    i_z: float = 0.06
    i_xz: float = 0.0

    def __post_init__(self):
        if self.m <= 0 or self.i_x <= 0 or self.i_y <= 0 or self.i_z <= 0:
            raise ValueError("mass and principal inertias must be positive")
        if abs(self.i_x * self.i_z - self.i_xz**2) < 1e-15:
            raise ValueError("singular roll/yaw inertia coupling")


@dataclass
class RigidBodyState:
    """position (inertial, m), velocity (body, m/s), attitude (rad), rates (rad/s)."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rates: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity, self.attitude, self.rates])

    @staticmethod
    def from_vector(x: np.ndarray) -> "RigidBodyState":
        return RigidBodyState(x[0:3].copy(), x[3:6].copy(), x[6:9].copy(), x[9:12].copy())

    def altitude(self) -> float:
        return -float(self.position[2])

    def check_finite(self) -> None:
        if not np.all(np.isfinite(self.as_vector())):
            raise FloatingPointError("rigid body state diverged")


def dcm_inertial_to_body(phi: float, theta: float, psi: float) -> np.ndarray:
    """Z-Y-X Euler direction cosine matrix mapping inertial vectors into the body frame."""
    cph, sph = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cps, sps = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cth * cps, cth * sps, -sth],
            [sph * sth * cps - cph * sps, sph * sth * sps + cph * cps, sph * cth],
            [cph * sth * cps + sph * sps, cph * sth * sps - sph * cps, cph * cth],
        ]
    )


def _derivatives(x: np.ndarray, inertia: InertiaSet, forces: np.ndarray, moments: np.ndarray) -> np.ndarray:
    u, v, w = x[3:6]
    phi, theta, psi = x[6:9]
    p, q, r = x[9:12]

    # translational: F = m(dv/dt + omega x v), solved for dv/dt
    du = forces[0] / inertia.m - q * w + r * v
    dv = forces[1] / inertia.m - r * u + p * w
    dw = forces[2] / inertia.m - p * v + q * u

    # rotational: q decouples; (p, r) couple through I_xz
    dq = (moments[1] - r * p * (inertia.i_x - inertia.i_z) - inertia.i_xz * (p * p - r * r)) / inertia.i_y
    rhs_l = moments[0] - q * r * (inertia.i_z - inertia.i_y) + inertia.i_xz * p * q
    rhs_n = moments[2] - p * q * (inertia.i_y - inertia.i_x) - inertia.i_xz * q * r
    det = inertia.i_x * inertia.i_z - inertia.i_xz**2
    dp = (inertia.i_z * rhs_l + inertia.i_xz * rhs_n) / det
    dr = (inertia.i_xz * rhs_l + inertia.i_x * rhs_n) / det

    # Euler-angle kinematics
    tth = math.tan(theta)
    dphi = p + (q * math.sin(phi) + r * math.cos(phi)) * tth
    dtheta = q * math.cos(phi) - r * math.sin(phi)
    dpsi = (q * math.sin(phi) + r * math.cos(phi)) / math.cos(theta)

    # position: body velocity rotated into the inertial frame
    dcm = dcm_inertial_to_body(phi, theta, psi)
    dpos = dcm.T @ x[3:6]

    out = np.empty(12)
    out[0:3] = dpos
    out[3:6] = (du, dv, dw)
    out[6:9] = (dphi, dtheta, dpsi)
    out[9:12] = (dp, dq, dr)
    return out


def _wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


def rigid_body_step(
    state: RigidBodyState,
    inertia: InertiaSet,
    forces: np.ndarray,
    moments: np.ndarray,
    dt: float,
) -> RigidBodyState:
    """One RK4 step under zero-order-hold body-frame forces and moments."""
    forces = np.asarray(forces, dtype=float)
    moments = np.asarray(moments, dtype=float)
    x = state.as_vector()
    k1 = _derivatives(x, inertia, forces, moments)
    k2 = _derivatives(x + 0.5 * dt * k1, inertia, forces, moments)
    k3 = _derivatives(x + 0.5 * dt * k2, inertia, forces, moments)
    k4 = _derivatives(x + dt * k3, inertia, forces, moments)
    x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    x_new[6:9] = [_wrap_angle(a) for a in x_new[6:9]]
    new = RigidBodyState.from_vector(x_new)
    new.check_finite()
    return new


def kinetic_energy(state: RigidBodyState, inertia: InertiaSet) -> float:
    v = state.velocity
    p, q, r = state.rates
    rot = inertia.i_x * p * p + inertia.i_y * q * q + inertia.i_z * r * r - 2.0 * inertia.i_xz * p * r
    return 0.5 * inertia.m * float(np.dot(v, v)) + 0.5 * rot
