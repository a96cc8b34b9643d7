"""Hyperplane-clustered fuzzy network (PALM core).

Each fuzzy rule is a single weight vector over the extended input
[1, e, de/dt, y_r]; the rule's hyperplane doubles as antecedent (via a
point-to-plane distance) and consequent (via a dot product), so there are
no separate premise parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

N_INPUTS = 3  # e, de/dt, y_r
DIM = N_INPUTS + 1  # leading intercept slot

# Normalization denominators below this are treated as total underflow and
# replaced with uniform firing. Unreachable for eta <= 100, kept defensive.
_UNDERFLOW = 1e-300


def extended_input(e: float, e_dot: float, y_r: float) -> np.ndarray:
    """Build the extended input vector [1, e, de/dt, y_r]."""
    return np.array([1.0, e, e_dot, y_r])


@dataclass
class HyperplaneRule:
    """One fuzzy rule: weights[0] is the plane intercept, weights[1:] the slopes."""

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (DIM,):
            raise ValueError(f"rule weights must have shape ({DIM},), got {self.weights.shape}")

    def copy(self) -> "HyperplaneRule":
        return HyperplaneRule(self.weights.copy())


@dataclass
class FiringVector:
    """Raw memberships and their normalized (sum-to-one) counterparts."""

    raw: np.ndarray
    normalized: np.ndarray


def point_to_plane_distance(x_e: np.ndarray, rule: HyperplaneRule, y_r: float) -> float:
    """Distance from the point (x_1..x_N, y_r) to the rule's hyperplane.

    The plane is z = sum(a_i * x_i) + b0 with b0 = weights[0] and
    a = weights[1:]; the numerator compares y_r against the plane height at
    the non-intercept input entries.
    """
    a = rule.weights[1:]
    plane = float(np.dot(a, x_e[1:])) + rule.weights[0]
    return abs(y_r - plane) / math.sqrt(1.0 + float(np.dot(a, a)))


def membership(d_j: float, d_max: float, eta: float) -> float:
    """exp(-eta * d_j / d_max); all planes through the point (d_max == 0) fire fully."""
    if d_max == 0.0:
        return 1.0
    return math.exp(-eta * d_j / d_max)


def rule_consequent(x_e: np.ndarray, rule: HyperplaneRule) -> float:
    """Hyperplane output: dot(extended input, rule weights)."""
    if x_e.shape != rule.weights.shape:
        raise ValueError("extended input and rule weights disagree in dimension")
    return float(np.dot(x_e, rule.weights))


@dataclass
class PalmNetwork:
    """Ordered rule set plus the fuzziness regulator eta (valid range [1, 100])."""

    eta: float = 5.0
    rules: list[HyperplaneRule] = field(default_factory=list)

    def __post_init__(self):
        if not (1.0 <= self.eta <= 100.0):
            raise ValueError(f"eta must lie in [1, 100], got {self.eta}")

    @property
    def rule_count(self) -> int:
        return len(self.rules)

    @property
    def parameter_count(self) -> int:
        return len(self.rules) * DIM

    def add_rule(self, rule: HyperplaneRule) -> None:
        self.rules.append(rule)

    def remove_rule(self, index: int) -> None:
        if len(self.rules) <= 1:
            raise ValueError("cannot remove the last rule")
        del self.rules[index]

    def weights_matrix(self) -> np.ndarray:
        return np.array([r.weights for r in self.rules])

    def check_finite(self) -> bool:
        return all(np.all(np.isfinite(r.weights)) for r in self.rules)


def network_output(x_e: np.ndarray, net: PalmNetwork, y_r: float) -> tuple[float, FiringVector]:
    """Defuzzified network output and the firing vector it was built from."""
    if net.rule_count < 1:
        raise ValueError("network has no rules")
    dists = np.array([point_to_plane_distance(x_e, r, y_r) for r in net.rules])
    d_max = float(dists.max())
    if d_max == 0.0:
        raw = np.ones(len(dists))
    else:
        raw = np.exp(-net.eta * dists / d_max)
    total = float(raw.sum())
    if total < _UNDERFLOW:
        normalized = np.full(len(raw), 1.0 / len(raw))
    else:
        normalized = raw / total
    consequents = np.array([rule_consequent(x_e, r) for r in net.rules])
    u_palm = float(np.dot(normalized, consequents))
    return u_palm, FiringVector(raw=raw, normalized=normalized)


def save_rules(net: PalmNetwork, path) -> None:
    """Write the rule set as plain-text rows: rule_index, w0, ..., wN."""
    with open(path, "w") as fh:
        for i, rule in enumerate(net.rules):
            row = ", ".join(f"{w:.17g}" for w in rule.weights)
            fh.write(f"{i}, {row}\n")


def load_rules(path) -> list[HyperplaneRule]:
    rules = []
    with open(path) as fh:
        for line in fh:
            parts = [p.strip() for p in line.split(",")]
            if not parts or parts[0] == "":
                continue
            rules.append(HyperplaneRule(np.array([float(v) for v in parts[1:]])))
    return rules
