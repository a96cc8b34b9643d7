"""Closed-loop parsimonious controller.

Combines the hyperplane-fuzzy network with sliding-mode weight adaptation
and the bias/variance structure learning. The control signal splits into a
robustifying term u_src = alpha1 * s_l (saturated) and the learned network
term, u = u_src - u_palm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import evolution, palm
from .palm import DIM, HyperplaneRule, PalmNetwork, extended_input, network_output


class ControllerFault(RuntimeError):
    """Raised when a non-finite value appears anywhere in the control step."""


@dataclass
class PMatrix:
    """Symmetric 2x2 Lyapunov weighting for the adaptation law."""

    p11: float
    p12: float
    p21: float
    p22: float

    def is_positive_definite(self) -> bool:
        return self.p11 > 0 and (self.p11 * self.p22 - self.p12 * self.p21) > 0


def p_matrix(alpha1: float, alpha2: float) -> PMatrix:
    """P for Q = I2 as published: p11 = a2/a1 + 1/(2 a2), p12 = 1/(2 a1),
    p22 = (1 + a1)/(2 a1 a2).

    Note: this published p11 solves the Lyapunov equation only when
    alpha1 == alpha2; see lyapunov_p_matrix for the exact solution. The
    adaptation law reads only p12 and p22, which the two agree on.
    """
    if alpha1 <= 0 or alpha2 <= 0:
        raise ValueError("sliding coefficients must be positive")
    p12 = 1.0 / (2.0 * alpha1)
    return PMatrix(
        p11=alpha2 / alpha1 + 1.0 / (2.0 * alpha2),
        p12=p12,
        p21=p12,
        p22=(1.0 + alpha1) / (2.0 * alpha1 * alpha2),
    )


def lyapunov_p_matrix(alpha1: float, alpha2: float) -> PMatrix:
    """Exact solution of A'P + PA = -I2 for A = [[0, 1], [-a1, -a2]]."""
    if alpha1 <= 0 or alpha2 <= 0:
        raise ValueError("sliding coefficients must be positive")
    p12 = 1.0 / (2.0 * alpha1)
    return PMatrix(
        p11=alpha2 / (2.0 * alpha1) + (1.0 + alpha1) / (2.0 * alpha2),
        p12=p12,
        p21=p12,
        p22=(1.0 + alpha1) / (2.0 * alpha1 * alpha2),
    )


@dataclass
class SlidingState:
    """Sliding coefficients, error integral, adaptation gain and limits.

    alpha1..alpha3 start at the small published values; when learn_rates are
    all zero the coefficients stay fixed (the default). With nonzero rates
    they self-evolve upward, clamped to [initial, alpha_max].
    """

    alpha1: float = 1e-2
    alpha2: float = 1e-3
    alpha3: float = 1e-9
    err_integral: float = 0.0
    gamma: float = 50.0
    learn_rates: tuple[float, float, float] = (0.0, 0.0, 0.0)
    alpha_max: tuple[float, float, float] = (1.0, 0.5, 0.01)
    sat_limit: float = 10.0

    def __post_init__(self):
        if self.alpha1 <= 0 or self.alpha2 <= 0:
            raise ValueError("alpha1 and alpha2 must be positive")
        self._alpha_initial = (self.alpha1, self.alpha2, self.alpha3)


@dataclass
class ControlStep:
    """Per-step diagnostics. u preserves the exact identity u_src - u_palm;
    the value applied to the plant is separately clamped to the actuator limit."""

    e: float
    e_dot: float
    s_l: float
    u_src: float
    u_palm: float
    u: float
    firing: palm.FiringVector
    bias2: float = 0.0
    variance: float = 0.0
    grew: bool = False
    pruned: bool = False


def sliding_value(e: float, e_dot: float, err_integral: float, s: SlidingState) -> float:
    """s_l = e + (a2/a1) de/dt + (a3/a1) int(e)."""
    return e + (s.alpha2 / s.alpha1) * e_dot + (s.alpha3 / s.alpha1) * err_integral


def robustifying_term(s_l: float, s: SlidingState) -> float:
    """alpha1 * s_l, saturated to suppress chattering."""
    return float(np.clip(s.alpha1 * s_l, -s.sat_limit, s.sat_limit))


def adapt_weights(
    net: PalmNetwork,
    step: ControlStep,
    s: SlidingState,
    P: PMatrix,
    x_e: np.ndarray,
    dt: float,
    weight_limit: float,
) -> None:
    """Sliding-mode update: w_j <- w_j - dt * gamma * (e p12 + de p22) * lam_j * x_e.

    psi_j = lam_j * x_e reproduces the defuzzified output u_palm = psi' w.
    Entries are clipped to the weight bound afterwards.
    """
    g = step.e * P.p12 + step.e_dot * P.p22
    scale = dt * s.gamma * g
    lam = step.firing.normalized
    for j, rule in enumerate(net.rules):
        rule.weights -= scale * lam[j] * x_e
        np.clip(rule.weights, -weight_limit, weight_limit, out=rule.weights)
    if not net.check_finite():
        raise ControllerFault("non-finite rule weights after adaptation")


def adapt_sliding_params(s: SlidingState, e: float, e_dot: float, s_l: float, dt: float) -> bool:
    """Self-evolve the sliding coefficients with dissimilar learning rates.

    a1 grows with |s_l||e|, a2 with |s_l||de|, a3 with |s_l||int(e)|, each
    clamped to [initial, alpha_max]. Returns True when any value changed.
    """
    r1, r2, r3 = s.learn_rates
    if r1 == 0.0 and r2 == 0.0 and r3 == 0.0:
        return False
    lo1, lo2, lo3 = s._alpha_initial
    hi1, hi2, hi3 = s.alpha_max
    a1 = min(hi1, max(lo1, s.alpha1 + dt * r1 * abs(s_l) * abs(e)))
    a2 = min(hi2, max(lo2, s.alpha2 + dt * r2 * abs(s_l) * abs(e_dot)))
    a3 = min(hi3, max(lo3, s.alpha3 + dt * r3 * abs(s_l) * abs(s.err_integral)))
    changed = (a1, a2, a3) != (s.alpha1, s.alpha2, s.alpha3)
    s.alpha1, s.alpha2, s.alpha3 = a1, a2, a3
    return changed


@dataclass
class ControllerConfig:
    eta: float = 5.0
    gamma: float = 50.0
    weight_limit: float = 10.0
    actuator_limit: float = float("inf")
    sat_limit: float = 10.0
    alpha1: float = 1e-2
    alpha2: float = 1e-3
    alpha3: float = 1e-9
    learn_rates: tuple[float, float, float] = (0.0, 0.0, 0.0)
    alpha_max: tuple[float, float, float] = (1.0, 0.5, 0.01)
    evolution_enabled: bool = True
    sigma_floor_rel: float = 0.2
    sigma_floor_abs: float = 0.01
    # restart the drift detectors after each structural edit (the underlying
    # process-control method re-baselines after a detection)
    detector_restart: bool = True
    grow_init: str = "interpolant"  # or "duplicate"
    # x_e fourth entry: the reference by default; "output" switches to the
    # measured plant output (a documented reading of the rule input).
    fourth_input: str = "reference"


class ParsimoniousController:
    """Evolving fuzzy controller with the step interface (y, y_r, dt) -> u."""

    def __init__(self, config: ControllerConfig | None = None):
        self.config = config or ControllerConfig()
        c = self.config
        if c.grow_init not in ("interpolant", "duplicate"):
            raise ValueError(f"unknown grow_init {c.grow_init!r}")
        if c.fourth_input not in ("reference", "output"):
            raise ValueError(f"unknown fourth_input {c.fourth_input!r}")
        self.net = PalmNetwork(eta=c.eta, rules=[HyperplaneRule(np.zeros(DIM))])
        self.sliding = SlidingState(
            alpha1=c.alpha1,
            alpha2=c.alpha2,
            alpha3=c.alpha3,
            gamma=c.gamma,
            learn_rates=tuple(c.learn_rates),
            alpha_max=tuple(c.alpha_max),
            sat_limit=c.sat_limit,
        )
        self.evo = evolution.EvolutionState(
            sigma_floor_rel=c.sigma_floor_rel, sigma_floor_abs=c.sigma_floor_abs
        )
        self.P = p_matrix(self.sliding.alpha1, self.sliding.alpha2)
        self._e_prev: float | None = None
        self.steps = 0
        self.events: list[tuple[float, str, int, float, float]] = []
        self._time = 0.0

    @property
    def rule_count(self) -> int:
        return self.net.rule_count

    @property
    def parameter_count(self) -> int:
        return self.net.parameter_count

    def step(self, y: float, y_r: float, dt: float) -> tuple[float, ControlStep]:
        if dt <= 0:
            raise ValueError("dt must be positive")
        c = self.config
        s = self.sliding

        e = y_r - y
        e_dot = 0.0 if self._e_prev is None else (e - self._e_prev) / dt
        self._e_prev = e
        s.err_integral += e * dt

        s_l = sliding_value(e, e_dot, s.err_integral, s)
        u_src = robustifying_term(s_l, s)

        fourth = y_r if c.fourth_input == "reference" else y
        x_e = extended_input(e, e_dot, fourth)
        u_palm, firing = network_output(x_e, self.net, y_r)
        u = u_src - u_palm

        if not math.isfinite(u):
            raise ControllerFault(f"non-finite control at step {self.steps}: u_palm={u_palm}")

        diag = ControlStep(e=e, e_dot=e_dot, s_l=s_l, u_src=u_src, u_palm=u_palm, u=u, firing=firing)

        if c.evolution_enabled:
            firing = self._evolve(diag, x_e, y_r, firing)
            diag.firing = firing

        adapt_weights(self.net, diag, s, self.P, x_e, dt, c.weight_limit)
        if adapt_sliding_params(s, e, e_dot, s_l, dt):
            self.P = p_matrix(s.alpha1, s.alpha2)

        self.steps += 1
        self._time += dt
        u_applied = float(np.clip(u, -c.actuator_limit, c.actuator_limit))
        return u_applied, diag

    def _evolve(self, diag: ControlStep, x_e: np.ndarray, y_r: float, firing: palm.FiringVector):
        """Structure learning: grow first, prune otherwise (never both)."""
        evolution.update_input_mean(self.evo, x_e)
        bias2, variance = evolution.network_bias_variance(self.net, self.evo, y_r)
        diag.bias2, diag.variance = bias2, variance
        bias = math.sqrt(bias2)
        grow = evolution.check_grow(self.evo, bias)
        prune = evolution.check_prune(self.evo, variance)
        changed = False
        if grow:
            if self.config.grow_init == "duplicate":
                evolution.grow_rule_duplicate(self.net, firing.normalized)
            else:
                evolution.grow_rule(self.net, x_e, y_r)
            self.evo.grow_count += 1
            diag.grew = changed = True
            self.events.append((self._time, "GROW", self.net.rule_count, bias, variance))
        elif prune and self.net.rule_count >= 2:
            evolution.prune_rule(self.net, self.evo)
            self.evo.prune_count += 1
            diag.pruned = changed = True
            self.events.append((self._time, "PRUNE", self.net.rule_count, bias, variance))
        if changed:
            if self.config.detector_restart:
                self.evo.restart_detectors()
            # refresh the firing vector so the adaptation sees the edited rule set
            _, firing = network_output(x_e, self.net, y_r)
        return firing

    def save_evolution_log(self, path) -> None:
        """Plain-text rows: time_s, event, rule_count, bias, variance."""
        with open(path, "w") as fh:
            for t, kind, count, bias, variance in self.events:
                fh.write(f"{t:.17g}, {kind}, {count}, {bias:.17g}, {variance:.17g}\n")
