"""Per-node insurance contracts for distributed defenders.

Each node's defender buys (or is refused) a contract (s_n, T_n) from a
profit-maximizing insurer who observes losses but not move frequencies.
Whether a node is insurable at all is decided by the ratio

    delta_n = gamma_a c_d / (gamma_d w*_nn c_a),

insurable iff delta_n >= 1/2 + sqrt(2)/4. When insurable the optimal
coverage is always exactly 1/2 and the premium extracts the defender's
whole surplus: T_n makes the insured total loss equal the uninsured one,
holding every other node's equilibrium fixed (coverage at one node never
moves frequencies elsewhere, so a single pass over nodes suffices - no
fixed point iteration).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import (
    EquilibriumResult,
    NodeParams,
    UnifiedGameParams,
    local_equilibrium,
)
from .network import InfluenceKernel, NetworkSpec, compute_kernel

INSURABILITY_THRESHOLD = 0.5 + math.sqrt(2.0) / 4.0
OPTIMAL_COVERAGE = 0.5


@dataclass(frozen=True)
class Contract:
    s: float
    T: float


@dataclass(frozen=True)
class InsuranceOutcome:
    insurable: bool
    contract: Contract | None
    delta: float
    insurer_profit: float
    equilibrium: EquilibriumResult
    defender_total_loss: float  # premium included
    defender_loss_no_premium: float
    attacker_utility: float


@dataclass(frozen=True)
class NetworkOutcomeD:
    outcomes: list[InsuranceOutcome]
    defender_loss_total: float
    defender_loss_no_premium_total: float
    attacker_utility_total: float
    insurer_profit_total: float
    premium_total: float


def insurability_ratio(node: NodeParams, w_star_nn: float) -> float:
    if not w_star_nn > 0:
        raise ValueError(f"w_star_nn must be positive, got {w_star_nn!r}")
    return node.gamma_a * node.c_d / (node.gamma_d * w_star_nn * node.c_a)


def feasible_coverage_interval(delta: float) -> tuple[float, float] | None:
    """Coverage levels admitting a mutually rational contract, low-risk case.

    Solves (s - 1/2)^2 <= 2 (delta - 1/2)^2 - 1/4 together with the insurer
    sign constraint s >= 1 - delta and s <= 1. Returns None when the interval
    is empty, which happens exactly for delta below the insurability
    threshold; otherwise the interval contains 1/2.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    disc = 2.0 * (delta - 0.5) ** 2 - 0.25
    if disc < 0.0:
        return None
    r = math.sqrt(disc)
    lo = max(1.0 - delta, 0.5 - r)
    hi = min(1.0, 0.5 + r)
    if lo > hi:
        # delta <= 1/2 - sqrt(2)/4 also makes disc >= 0, but there the
        # required s >= 1 - delta band misses [1/2 - r, 1/2 + r] entirely
        return None
    return lo, hi


def _unified(node: NodeParams, gamma_tilde: float, s: float) -> UnifiedGameParams:
    return UnifiedGameParams(
        s_tilde=s,
        gamma_tilde=gamma_tilde,
        c_d=node.c_d,
        gamma_a=node.gamma_a,
        c_a=node.c_a,
    )


def design_contract_d(
    node: NodeParams,
    kernel: InfluenceKernel,
    n: int,
    peer_alphas: np.ndarray,
) -> InsuranceOutcome:
    """Optimal contract for node n, peers' controlling fractions given.

    peer_alphas is indexed by node; the entry at position n is ignored (the
    node's own fraction follows from its equilibrium under the contract).
    """
    w_nn = float(kernel.entries[n, n])
    delta = insurability_ratio(node, w_nn)
    gamma_tilde = node.gamma_d * w_nn

    peers = np.asarray(peer_alphas, dtype=float)
    row = kernel.entries[n].copy()
    row[n] = 0.0
    cross = node.gamma_d * float(row @ peers)  # spillover loss rate from peers

    uninsured = local_equilibrium(_unified(node, gamma_tilde, 0.0))
    insurable = delta >= INSURABILITY_THRESHOLD
    if insurable:
        s = OPTIMAL_COVERAGE
        eq = local_equilibrium(_unified(node, gamma_tilde, s))
        premium = uninsured.defender_cost - eq.defender_cost + s * cross
        profit = premium - s * (gamma_tilde * eq.alpha + cross)
        contract = Contract(s=s, T=premium)
    else:
        s = 0.0
        eq = uninsured
        premium = 0.0
        profit = 0.0
        contract = None

    loss_bare = eq.defender_cost + (1.0 - s) * cross
    return InsuranceOutcome(
        insurable=insurable,
        contract=contract,
        delta=delta,
        insurer_profit=profit,
        equilibrium=eq,
        defender_total_loss=loss_bare + premium,
        defender_loss_no_premium=loss_bare,
        attacker_utility=eq.attacker_utility,
    )


def solve_network_d(spec: NetworkSpec, params: list[NodeParams]) -> NetworkOutcomeD:
    """Contracts for every node: insurability first, premiums second.

    Pass 1 fixes each node's coverage (1/2 or none) and equilibrium in
    isolation; pass 2 prices premiums and spillover losses against the full
    vector of controlling fractions from pass 1.
    """
    kernel = compute_kernel(spec)
    if len(params) != spec.node_count:
        raise ValueError(f"{len(params)} params for {spec.node_count} nodes")

    alphas = np.empty(len(params))
    for i, node in enumerate(params):
        delta = insurability_ratio(node, float(kernel.entries[i, i]))
        s = OPTIMAL_COVERAGE if delta >= INSURABILITY_THRESHOLD else 0.0
        eq = local_equilibrium(_unified(node, node.gamma_d * kernel.entries[i, i], s))
        alphas[i] = eq.alpha

    outcomes = [
        design_contract_d(node, kernel, i, alphas) for i, node in enumerate(params)
    ]
    return NetworkOutcomeD(
        outcomes=outcomes,
        defender_loss_total=sum(o.defender_total_loss for o in outcomes),
        defender_loss_no_premium_total=sum(o.defender_loss_no_premium for o in outcomes),
        attacker_utility_total=sum(o.attacker_utility for o in outcomes),
        insurer_profit_total=sum(o.insurer_profit for o in outcomes),
        premium_total=sum(o.contract.T for o in outcomes if o.contract is not None),
    )
