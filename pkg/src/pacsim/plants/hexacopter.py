"""Hexacopter plant: linear rotor mixing, quadratic thrust/torque law, inner
rate-stabilizing PIDs, 6-DOF rigid body.

The outer controller drives one channel (altitude thrust, or roll/pitch rate
reference); moving-mass CG-shift inputs are accepted for interface
compatibility but have no effect in this reduced model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..pid import PidConfig, PidController
from .disturbances import GustSpec, GustTracker
from .rigid_body import GRAVITY, InertiaSet, RigidBodyState, dcm_inertial_to_body, rigid_body_step


@dataclass
class HexacopterParams:
    inertia: InertiaSet = field(default_factory=InertiaSet)
    arm_length: float = 0.25  # m
    k_thrust: float = 1e-5  # N per (rad/s)^2
    k_torque: float = 2e-7  # N*m per (rad/s)^2
    rotor_speed_max: float = 1400.0  # rad/s
    # throttle channel: mixer thrust command = trim + gain * u
    thrust_gain: float = 10.0  # N per unit controller output
    thrust_trim: float | None = None  # None -> hover trim m*g
    # inner-loop rate PIDs (roll, pitch, yaw)
    rate_kp: float = 0.4
    rate_ki: float = 0.05
    rate_kd: float = 0.01
    # outer attitude-angle loop used when the test channel is altitude
    angle_kp: float = 6.0
    # rate reference scaling for attitude channels, rad/s per unit u
    rate_gain: float = 1.0

    def hover_thrust(self) -> float:
        return self.inertia.m * GRAVITY

    def max_total_thrust(self) -> float:
        return 6.0 * self.k_thrust * self.rotor_speed_max**2


# rotor layout: arms every 60 degrees, alternating spin direction
_ROTOR_ANGLES = np.deg2rad(np.arange(6) * 60.0)
_SPIN = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])


def _geometry(params: HexacopterParams):
    x = params.arm_length * np.cos(_ROTOR_ANGLES)
    y = params.arm_length * np.sin(_ROTOR_ANGLES)
    return x, y


@lru_cache(maxsize=8)
def _allocator(arm_length: float, kq_over_kt: float) -> np.ndarray:
    x = arm_length * np.cos(_ROTOR_ANGLES)
    y = arm_length * np.sin(_ROTOR_ANGLES)
    alloc = np.vstack([np.ones(6), -y, x, _SPIN * kq_over_kt])
    return np.linalg.pinv(alloc)


def hexacopter_mixing(
    thrust_cmd: float,
    roll_cmd: float,
    pitch_cmd: float,
    yaw_cmd: float,
    params: HexacopterParams,
) -> np.ndarray:
    """Allocate total thrust (N) and body moments (N*m) to six rotor speeds.

    Pseudo-inverse of the linear allocation in per-rotor thrust space, then
    converted to speeds through the quadratic law and clamped to [0, max].
    """
    pinv = _allocator(params.arm_length, params.k_torque / params.k_thrust)
    thrusts = pinv @ np.array([thrust_cmd, roll_cmd, pitch_cmd, yaw_cmd])
    speeds = np.sqrt(np.clip(thrusts, 0.0, None) / params.k_thrust)
    return np.clip(speeds, 0.0, params.rotor_speed_max)


def rotor_forces_moments(speeds: np.ndarray, params: HexacopterParams) -> tuple[np.ndarray, np.ndarray]:
    """Body-frame force and moment produced by the given rotor speeds."""
    x, y = _geometry(params)
    thrusts = params.k_thrust * speeds**2
    torques = params.k_torque * speeds**2
    total = float(thrusts.sum())
    roll = float(-(thrusts * y).sum())
    pitch = float((thrusts * x).sum())
    yaw = float((_SPIN * torques).sum())
    return np.array([0.0, 0.0, -total]), np.array([roll, pitch, yaw])


class Hexacopter:
    """Closed inner loops around the rigid body; exposes one outer channel.

    channel: 'altitude' (u scales thrust about hover trim), 'roll' or
    'pitch' (u is a body-rate reference for the inner PID while thrust
    holds the hover trim).
    """

    def __init__(
        self,
        params: HexacopterParams | None = None,
        channel: str = "altitude",
        gust: GustSpec | None = None,
    ):
        self.params = params or HexacopterParams()
        if channel not in ("altitude", "roll", "pitch"):
            raise ValueError(f"unknown hexacopter channel {channel!r}")
        self.channel = channel
        self.state = RigidBodyState()
        self.gust = GustTracker(gust) if gust else None
        self.t = 0.0
        p = self.params
        pid_cfg = PidConfig(kp=p.rate_kp, ki=p.rate_ki, kd=p.rate_kd, output_limits=(-5.0, 5.0))
        self._rate_pids = [PidController(pid_cfg) for _ in range(3)]

    def output(self) -> float:
        if self.channel == "altitude":
            return self.state.altitude()
        if self.channel == "roll":
            return float(self.state.attitude[0])
        return float(self.state.attitude[1])

    def step(self, u: float, dt: float) -> None:
        p = self.params
        trim = p.hover_thrust() if p.thrust_trim is None else p.thrust_trim

        if self.channel == "altitude":
            thrust_cmd = trim + p.thrust_gain * u
            rate_ref = np.array(
                [
                    p.angle_kp * (0.0 - self.state.attitude[0]),
                    p.angle_kp * (0.0 - self.state.attitude[1]),
                    0.0 - self.state.attitude[2],
                ]
            )
        else:
            thrust_cmd = trim
            axis = 0 if self.channel == "roll" else 1
            rate_ref = np.array(
                [
                    0.0,
                    0.0,
                    0.0 - self.state.attitude[2],
                ]
            )
            rate_ref[axis] = p.rate_gain * u
            other = 1 - axis
            rate_ref[other] = p.angle_kp * (0.0 - self.state.attitude[other])

        cmds = [pid.step(self.state.rates[i], rate_ref[i], dt) for i, pid in enumerate(self._rate_pids)]
        speeds = hexacopter_mixing(thrust_cmd, cmds[0], cmds[1], cmds[2], p)
        forces, moments = rotor_forces_moments(speeds, p)

        # gravity in the body frame
        phi, theta, psi = self.state.attitude
        dcm = dcm_inertial_to_body(phi, theta, psi)
        forces = forces + dcm @ np.array([0.0, 0.0, p.inertia.m * GRAVITY])

        if self.gust is not None:
            # additive body-x velocity perturbation ahead of the force computation
            wind = self.gust.advance(float(self.state.velocity[0]), self.t, dt)
            self.state.velocity[0] += wind
            self.state = rigid_body_step(self.state, p.inertia, forces, moments, dt)
            self.state.velocity[0] -= wind
        else:
            self.state = rigid_body_step(self.state, p.inertia, forces, moments, dt)
        self.t += dt
