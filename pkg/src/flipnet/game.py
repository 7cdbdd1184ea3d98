"""Local FlipIt game under periodic strategies: controlling fraction and
closed-form Nash equilibrium.

Both players move periodically with frequencies p_d (defender) and p_a
(attacker), each with a uniformly random phase; moves are stealthy and the
defender owns the resource at t = 0. The attacker's long-run controlling
fraction is

    alpha(p_d, p_a) = 0                 if p_a = 0,
                      p_a / (2 p_d)     if p_d >= p_a > 0,
                      1 - p_d / (2 p_a) if p_a > p_d >= 0,

which is continuous in both frequencies.

Per-node play reduces to one unified game with coverage s_tilde and loss
weight gamma_tilde. The defender minimizes

    (1 - s_tilde) gamma_tilde alpha + c_d p_d

while the attacker maximizes gamma_a alpha - c_a p_a. The unique
non-trivial equilibrium has two branches, split by which player's
benefit-to-cost rate dominates:

  E1 (gamma_a / (2 c_a) >= (1 - s_tilde) gamma_tilde / (2 c_d)):
      p_d = (1-s)^2 g^2 c_a / (2 gamma_a c_d^2),  p_a = (1-s) g / (2 c_d),
      defender cost (1-s) g, attacker utility gamma_a - (1-s) g c_a / c_d
  E2 (otherwise):
      p_d = gamma_a / (2 c_a),  p_a = gamma_a^2 c_d / (2 (1-s) g c_a^2),
      defender cost gamma_a c_d / c_a, attacker utility 0

with s = s_tilde, g = gamma_tilde. The cost/utility closed forms were
verified by substituting the frequencies back into the objectives; the
evaluator functions below let tests repeat that check. The trivial point
p_d = p_a = 0 is not an equilibrium for s_tilde < 1 and is never returned
there; at s_tilde = 1 the defender is indifferent and the E1 expressions
degenerate to zero frequencies (alpha = 0 by the p_a = 0 convention).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .network import InfluenceKernel


class Mode(enum.Enum):
    """Who buys coverage: each node for itself (D) or one global defender (C)."""

    D = "d"
    C = "c"


class Regime(enum.Enum):
    E1 = "E1"
    E2 = "E2"


@dataclass(frozen=True)
class NodeParams:
    """Per-node economics: loss scales (gamma) and per-move cost rates (c)."""

    gamma_d: float
    c_d: float
    gamma_a: float
    c_a: float

    def __post_init__(self):
        for name in ("gamma_d", "c_d", "gamma_a", "c_a"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v!r}")


@dataclass(frozen=True)
class UnifiedGameParams:
    """One node's local game after mode folding: coverage s_tilde and the
    effective loss weight gamma_tilde (gamma_d w*_nn in mode D, the
    gamma_d-weighted kernel column sum in mode C)."""

    s_tilde: float
    gamma_tilde: float
    c_d: float
    gamma_a: float
    c_a: float

    def __post_init__(self):
        if not 0.0 <= self.s_tilde <= 1.0:
            raise ValueError(f"s_tilde must be in [0, 1], got {self.s_tilde!r}")
        for name in ("gamma_tilde", "c_d", "gamma_a", "c_a"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v!r}")


@dataclass(frozen=True)
class EquilibriumResult:
    p_d: float
    p_a: float
    alpha: float
    regime: Regime
    defender_cost: float
    attacker_utility: float


def attacker_controlling_fraction(p_d: float, p_a: float) -> float:
    """Long-run fraction of time the attacker owns the node."""
    if p_d < 0 or p_a < 0:
        raise ValueError(f"frequencies must be nonnegative, got ({p_d}, {p_a})")
    if p_a == 0.0:
        return 0.0
    if p_d == 0.0:
        return 1.0
    if p_d >= p_a:
        return p_a / (2.0 * p_d)
    return 1.0 - p_d / (2.0 * p_a)


def unified_params(
    mode: Mode | str,
    node_index: int,
    params: list[NodeParams],
    kernel: InfluenceKernel,
    coverage: float,
) -> UnifiedGameParams:
    """Fold network structure and mode into one local game for node_index."""
    mode = Mode(mode) if not isinstance(mode, Mode) else mode
    n = node_index
    if not 0 <= n < len(params):
        raise IndexError(f"node index {n} out of range for {len(params)} nodes")
    node = params[n]
    if mode is Mode.D:
        gamma_tilde = node.gamma_d * kernel.entries[n, n]
    else:
        gamma_tilde = sum(p.gamma_d * kernel.entries[m, n] for m, p in enumerate(params))
    return UnifiedGameParams(
        s_tilde=coverage,
        gamma_tilde=gamma_tilde,
        c_d=node.c_d,
        gamma_a=node.gamma_a,
        c_a=node.c_a,
    )


def local_equilibrium(u: UnifiedGameParams) -> EquilibriumResult:
    """Closed-form Nash equilibrium of the unified local game."""
    residual = 1.0 - u.s_tilde
    attacker_rate = u.gamma_a / (2.0 * u.c_a)
    defender_rate = residual * u.gamma_tilde / (2.0 * u.c_d)

    if attacker_rate >= defender_rate:
        regime = Regime.E1
        p_a = defender_rate
        p_d = residual**2 * u.gamma_tilde**2 * u.c_a / (2.0 * u.gamma_a * u.c_d**2)
        cost = residual * u.gamma_tilde
        utility = u.gamma_a - residual * u.gamma_tilde * u.c_a / u.c_d
    else:
        # attacker_rate < defender_rate forces residual > 0, so the division
        # below cannot hit zero; s_tilde = 1 always lands in E1.
        assert residual > 0.0
        regime = Regime.E2
        p_d = attacker_rate
        p_a = u.gamma_a**2 * u.c_d / (2.0 * residual * u.gamma_tilde * u.c_a**2)
        cost = u.gamma_a * u.c_d / u.c_a
        utility = 0.0

    return EquilibriumResult(
        p_d=p_d,
        p_a=p_a,
        alpha=attacker_controlling_fraction(p_d, p_a),
        regime=regime,
        defender_cost=cost,
        attacker_utility=utility,
    )


def defender_cost(p_d: float, p_a: float, u: UnifiedGameParams) -> float:
    """Defender objective at an arbitrary frequency profile."""
    alpha = attacker_controlling_fraction(p_d, p_a)
    return (1.0 - u.s_tilde) * u.gamma_tilde * alpha + u.c_d * p_d


def attacker_utility(p_a: float, p_d: float, u: UnifiedGameParams) -> float:
    """Attacker objective at an arbitrary frequency profile."""
    alpha = attacker_controlling_fraction(p_d, p_a)
    return u.gamma_a * alpha - u.c_a * p_a
