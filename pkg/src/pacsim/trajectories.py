"""Reference trajectory generators.

Every trajectory is a pure function of time. The canonical instances used in
the benchmark suites (constant hover heights, stepped heights, sum of sines,
square wave, staircase, attitude sinusoids) are provided as factory helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Constant:
    level: float

    def __call__(self, t: float) -> float:
        return self.level


@dataclass(frozen=True)
class Step:
    amplitude: float
    start: float

    def __call__(self, t: float) -> float:
        return self.amplitude if t >= self.start else 0.0


@dataclass(frozen=True)
class SharpSteps:
    """Piecewise-constant levels, each held for `dwell` seconds."""

    levels: tuple[float, ...]
    dwell: float

    def __call__(self, t: float) -> float:
        idx = min(int(t / self.dwell), len(self.levels) - 1)
        return self.levels[idx]


def _smoothstep(s: float) -> float:
    s = min(max(s, 0.0), 1.0)
    return s * s * (3.0 - 2.0 * s)


@dataclass(frozen=True)
class SmoothSteps:
    """Like SharpSteps but each level change is a cubic ramp of `ramp` seconds."""

    levels: tuple[float, ...]
    dwell: float
    ramp: float = 3.0

    def __call__(self, t: float) -> float:
        idx = min(int(t / self.dwell), len(self.levels) - 1)
        level = self.levels[idx]
        if idx == 0:
            return level
        prev = self.levels[idx - 1]
        s = _smoothstep((t - idx * self.dwell) / self.ramp)
        return prev + s * (level - prev)


@dataclass(frozen=True)
class SumOfSines:
    """Sum of (amplitude, angular frequency, bias) sine terms plus cosine terms."""

    sines: tuple[tuple[float, float, float], ...] = ()
    cosines: tuple[tuple[float, float, float], ...] = ()

    def __call__(self, t: float) -> float:
        total = 0.0
        for amp, freq, bias in self.sines:
            total += amp * math.sin(freq * t) + bias
        for amp, freq, bias in self.cosines:
            total += amp * math.cos(freq * t) + bias
        return total


@dataclass(frozen=True)
class SquareWave:
    low: float
    high: float
    freq_rad_s: float

    def __call__(self, t: float) -> float:
        return self.high if math.sin(self.freq_rad_s * t) >= 0.0 else self.low


@dataclass(frozen=True)
class Staircase:
    """Steps of the given heights at multiples of `dwell`, on top of `base`.

    The first `dwell` seconds hold the base level; step k lifts the level by
    step_heights[k] at t = (k+1)*dwell.
    """

    step_heights: tuple[float, ...]
    dwell: float
    base: float = 1.0

    def __call__(self, t: float) -> float:
        idx = min(int(t / self.dwell), len(self.step_heights))
        return self.base + sum(self.step_heights[:idx])


def reference(spec, t: float) -> float:
    """Evaluate a trajectory object at time t (kept for symmetry with configs)."""
    if t < 0:
        raise ValueError("time must be non-negative")
    return spec(t)


# --- canonical benchmark instances -------------------------------------------

def bifwmav_constant() -> Constant:
    return Constant(10.0)


def hexacopter_constant() -> Constant:
    return Constant(4.0)


def sharp_steps() -> SharpSteps:
    return SharpSteps(levels=(3.0, 6.0, 9.0, 6.0, 3.0), dwell=20.0)


def smooth_steps() -> SmoothSteps:
    return SmoothSteps(levels=(3.0, 8.0, 13.0, 8.0, 3.0), dwell=20.0, ramp=3.0)


def altitude_sum_of_sines() -> SumOfSines:
    # 4 sin(0.3 t) + 6 plus 3 cos(0.5 t): value 9 at t = 0, peak just above 11 m
    return SumOfSines(sines=((4.0, 0.3, 6.0),), cosines=((3.0, 0.5, 0.0),))


def square_wave() -> SquareWave:
    return SquareWave(low=1.0, high=11.0, freq_rad_s=0.2)


def staircase() -> Staircase:
    # three 3 m steps and one 2 m step on a 1 m base: peak 12 m
    return Staircase(step_heights=(3.0, 3.0, 3.0, 2.0), dwell=20.0, base=1.0)


def hexacopter_step() -> Step:
    return Step(amplitude=3.0, start=3.0)


def attitude_pitch() -> SumOfSines:
    return SumOfSines(sines=((0.3, 0.3, 0.0),), cosines=((0.5, 0.5, 0.0),))


def attitude_roll() -> SumOfSines:
    return SumOfSines(sines=((0.3, 0.3, 0.0),), cosines=((0.4, 0.5, 0.0),))


_FACTORIES = {
    "bifwmav_constant": bifwmav_constant,
    "hexacopter_constant": hexacopter_constant,
    "sharp_steps": sharp_steps,
    "smooth_steps": smooth_steps,
    "sum_of_sines": altitude_sum_of_sines,
    "square_wave": square_wave,
    "staircase": staircase,
    "hexacopter_step": hexacopter_step,
    "attitude_pitch": attitude_pitch,
    "attitude_roll": attitude_roll,
}

_CLASSES = {
    "constant": Constant,
    "step": Step,
    "sharp_steps": SharpSteps,
    "smooth_steps": SmoothSteps,
    "sum_of_sines": SumOfSines,
    "square_wave": SquareWave,
    "staircase": Staircase,
}


def from_config(spec: str | dict):
    """Build a trajectory from a name or a {kind: ..., params...} mapping."""
    if isinstance(spec, str):
        try:
            return _FACTORIES[spec]()
        except KeyError:
            raise ValueError(f"unknown trajectory {spec!r}") from None
    spec = dict(spec)
    kind = spec.pop("kind")
    try:
        cls = _CLASSES[kind]
    except KeyError:
        raise ValueError(f"unknown trajectory kind {kind!r}") from None
    for key in ("levels", "step_heights", "sines", "cosines"):
        if key in spec:
            value = spec[key]
            spec[key] = tuple(tuple(v) if isinstance(v, (list, tuple)) else v for v in value)
    return cls(**spec)
