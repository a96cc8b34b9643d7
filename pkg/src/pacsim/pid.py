"""PID baseline with conditional anti-windup.

Shares the (y, y_r, dt) -> u step interface with the fuzzy controller so the
harness can swap controllers by name.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class PidConfig:
    kp: float = 1.0
    ki: float = 0.0
    kd: float = 0.0
    output_limits: tuple[float, float] = (float("-inf"), float("inf"))


class PidController:
    def __init__(self, config: PidConfig | None = None):
        self.config = config or PidConfig()
        self.err_integral = 0.0
        self._e_prev: float | None = None

    def step(self, y: float, y_r: float, dt: float) -> float:
        if dt <= 0:
            raise ValueError("dt must be positive")
        c = self.config
        e = y_r - y
        e_dot = 0.0 if self._e_prev is None else (e - self._e_prev) / dt
        self._e_prev = e
        lo, hi = c.output_limits
        u_unclamped = c.kp * e + c.ki * (self.err_integral + e * dt) + c.kd * e_dot
        if lo <= u_unclamped <= hi:
            # integrate only while the output is unsaturated
            self.err_integral += e * dt
            return u_unclamped
        return hi if u_unclamped > hi else lo
