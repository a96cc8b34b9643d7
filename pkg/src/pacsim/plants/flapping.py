"""Four-wing flapping MAV surrogate.

Wing aerodynamics are reduced to a cycle-averaged lift that is linear in the
flapping amplitude and quadratic in the flapping frequency; the fixed
center-of-pressure geometry turns per-wing forces into body moments. An
inner least-squares allocator trims the fore/aft CP asymmetry and
stabilizes attitude with differential amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..pid import PidConfig, PidController
from .disturbances import GustSpec, GustTracker
from .rigid_body import GRAVITY, InertiaSet, RigidBodyState, dcm_inertial_to_body, rigid_body_step

CG = np.zeros(3)
CP = np.array(
    [
        [0.08, 0.05, 0.0],
        [0.08, 0.05, 0.0],
        [0.08, -0.05, 0.0],
        [-0.08, -0.05, 0.0],
    ]
)


@dataclass
class FlapParams:
    """Flapping parameters; amplitude is the altitude-dominant control input."""

    stroke_plane_angle: float = 0.0  # rad
    frequency: float = 20.0  # Hz
    amplitude_max: float = 1.2  # rad
    mean_aoa: float = 0.3  # rad
    pitch_osc_amplitude: float = 0.2  # rad
    phase_difference: float = 0.5
    time_step: float = 0.01  # s
    inertia: InertiaSet = field(
        default_factory=lambda: InertiaSet(m=0.06, i_x=6e-4, i_y=6e-4, i_z=1e-3, i_xz=0.0)
    )
    lift_coeff: float | None = None  # None -> calibrated for hover at mid-range amplitude
    amplitude_gain: float = 0.06  # rad per unit controller output

    def hover_amplitude(self) -> float:
        return 0.5 * self.amplitude_max

    def k_lift(self) -> float:
        """Per-wing lift coefficient; hover occurs at mid-range amplitude."""
        if self.lift_coeff is not None:
            return self.lift_coeff
        return self.inertia.m * GRAVITY / (4.0 * self.frequency**2 * self.hover_amplitude())


def flapping_actuator(amplitude: float, frequency: float, params: FlapParams) -> np.ndarray:
    """Cycle-averaged force of one wing for the given flapping amplitude."""
    amplitude = float(np.clip(amplitude, 0.0, params.amplitude_max))
    return np.array([0.0, 0.0, -params.k_lift() * frequency**2 * amplitude])


def bifwmav_force_moment(
    actuator_forces: np.ndarray, attitude: tuple[float, float, float], mass: float
) -> tuple[np.ndarray, np.ndarray]:
    """Total body force (wing forces + gravity through the DCM) and moment.

    Per-wing moments use cross(CG - CP_i, F_i); summed over the four wings.
    """
    dcm = dcm_inertial_to_body(*attitude)
    gravity_body = dcm @ np.array([0.0, 0.0, mass * GRAVITY])
    f_total = actuator_forces.sum(axis=0) + gravity_body
    m_total = np.zeros(3)
    for i in range(4):
        m_total += np.cross(CG - CP[i], actuator_forces[i])
    return f_total, m_total


@lru_cache(maxsize=8)
def _allocation_pinv(k: float) -> np.ndarray:
    # lift f_i = k * a_i (downward -z); net moments after the stroke-plane
    # trim removes the collective-mean part: M_x = cy_i f_i (mean cy is 0),
    # M_y = -(cx_i - mean cx) f_i, so equal amplitudes carry zero moment
    cx_dev = CP[:, 0] - CP[:, 0].mean()
    rows = np.vstack([np.ones(4) * k, CP[:, 1] * k, -cx_dev * k])
    return np.linalg.pinv(rows)


def _amplitude_allocation(collective: float, m_x: float, m_y: float, params: FlapParams) -> np.ndarray:
    """Distribute per-wing amplitudes for a collective lift plus trim moments.

    Minimum-norm solution of the linear map from amplitudes to
    (sum, net M_x, net M_y); negative or over-range amplitudes are clamped.
    """
    k = params.k_lift() * params.frequency**2
    amps = _allocation_pinv(k) @ np.array([collective, m_x, m_y])
    return np.clip(amps, 0.0, params.amplitude_max)


def stroke_plane_trim_moment(wing_forces: np.ndarray) -> np.ndarray:
    """Counter-moment from the stroke-plane trim.

    The fixed CP table is fore/aft asymmetric, so a pure collective produces
    a standing pitch moment; on the vehicle this is trimmed by the stroke
    plane angle. The surrogate cancels exactly the collective-mean part,
    leaving differential amplitudes as the attitude control authority.
    """
    lift = -wing_forces[:, 2]
    mean_f = float(lift.mean())
    return -np.array([float(CP[:, 1].sum()) * mean_f, -float(CP[:, 0].sum()) * mean_f, 0.0])


class BiFwmav:
    """Altitude-channel flapping MAV: u commands collective amplitude about hover."""

    def __init__(self, params: FlapParams | None = None, gust: GustSpec | None = None):
        self.params = params or FlapParams()
        self.state = RigidBodyState()
        self.gust = GustTracker(gust) if gust else None
        self.t = 0.0
        pid_cfg = PidConfig(kp=0.015, ki=1e-3, kd=4.8e-3, output_limits=(-0.1, 0.1))
        self._att_pids = [PidController(pid_cfg) for _ in range(2)]

    def output(self) -> float:
        return self.state.altitude()

    def step(self, u: float, dt: float) -> None:
        p = self.params
        k = p.k_lift() * p.frequency**2
        collective = 4.0 * k * float(np.clip(p.hover_amplitude() + p.amplitude_gain * u, 0.0, p.amplitude_max))
        # attitude trim: drive roll/pitch moments toward level
        m_x = self._att_pids[0].step(self.state.attitude[0], 0.0, dt)
        m_y = self._att_pids[1].step(self.state.attitude[1], 0.0, dt)
        amps = _amplitude_allocation(collective, m_x, m_y, p)
        forces = np.array([flapping_actuator(a, p.frequency, p) for a in amps])
        f_total, m_total = bifwmav_force_moment(forces, tuple(self.state.attitude), p.inertia.m)
        m_total = m_total + stroke_plane_trim_moment(forces)

        if self.gust is not None:
            wind = self.gust.advance(float(self.state.velocity[0]), self.t, dt)
            self.state.velocity[0] += wind
            self.state = rigid_body_step(self.state, p.inertia, f_total, m_total, dt)
            self.state.velocity[0] -= wind
        else:
            self.state = rigid_body_step(self.state, p.inertia, f_total, m_total, dt)
        self.t += dt


class DoubleIntegrator:
    """Minimal test plant: d2y/dt2 = u with exact zero-order-hold discretization."""

    def __init__(self):
        self.y = 0.0
        self.v = 0.0

    def output(self) -> float:
        return self.y

    def step(self, u: float, dt: float) -> None:
        self.y += self.v * dt + 0.5 * u * dt * dt
        self.v += u * dt
