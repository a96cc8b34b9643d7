from .disturbances import GustSpec, GustTracker, ImpulseSpec, gust_velocity, impulse_noise
from .flapping import CG, CP, BiFwmav, DoubleIntegrator, FlapParams, bifwmav_force_moment, flapping_actuator
from .hexacopter import Hexacopter, HexacopterParams, hexacopter_mixing, rotor_forces_moments
from .rigid_body import (
    GRAVITY,
    InertiaSet,
    RigidBodyState,
    dcm_inertial_to_body,
    kinetic_energy,
    rigid_body_step,
)

__all__ = [
    "GustSpec",
    "GustTracker",
    "ImpulseSpec",
    "gust_velocity",
    "impulse_noise",
    "CG",
    "CP",
    "BiFwmav",
    "DoubleIntegrator",
    "FlapParams",
    "bifwmav_force_moment",
    "flapping_actuator",
    "Hexacopter",
    "HexacopterParams",
    "hexacopter_mixing",
    "rotor_forces_moments",
    "GRAVITY",
    "InertiaSet",
    "RigidBodyState",
    "dcm_inertial_to_body",
    "kinetic_energy",
    "rigid_body_step",
]
