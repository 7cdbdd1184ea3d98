"""The single network-wide insurance contract for a centralized defender.

One defender operates every node and buys one coverage level s for the
whole network. Splitting the defender's problem per node (it is additively
separable) gives each node a local game whose loss weight is the
gamma_d-weighted kernel column sum, so the insurer maximizes

    F(s) = sum_n [ K_n(0) - K_n(s) - s gamma_tilde_n alpha_n(s) ]

over s in (0, 1], subject to F(s) >= 0. F is continuous and piecewise
smooth: node n switches equilibrium branch at b_n = 1 - gamma_a c_d /
(gamma_tilde_n c_a), and between consecutive breakpoints F is a sum of
concave pieces. The numeric solver therefore runs a golden-section search
inside every breakpoint cell and keeps the best cell.

When all nodes share identical parameters (and W is row stochastic, or
empty) the optimum collapses to a topology-independent closed form with
kappa = (1 - eta) gamma_a c_d / (gamma_d c_a):

    kappa >= 1:              s* = 1/2, T* = N gamma_d / (2 (1 - eta))
    threshold <= kappa < 1:  s* = 1/2, T* = N (c_d gamma_a / c_a
                                             - gamma_d / (2 (1 - eta)))
    kappa < threshold:       uninsurable

Dispatch between the two solvers is by exact parameter equality, never by
closeness, so it stays deterministic.
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
from .insurance_d import INSURABILITY_THRESHOLD, Contract
from .network import InfluenceKernel, NetworkSpec, compute_kernel

# objective value above which the network counts as insurable; absorbs
# floating-point noise at the kappa = threshold tangency
INSURABLE_OBJECTIVE_FLOOR = 1e-12
GOLDEN_TOL = 1e-9


@dataclass(frozen=True)
class CentralizedOutcome:
    insurable: bool
    contract: Contract | None
    per_node_equilibria: list[EquilibriumResult]
    insurer_profit: float
    defender_total_loss: float  # premium included
    defender_loss_no_premium: float
    solver: str  # "closed-form" or "numeric"
    objective_trace: np.ndarray | None = None


def gamma_tildes_c(params: list[NodeParams], kernel: InfluenceKernel) -> np.ndarray:
    """Effective loss weight per node seen by the centralized defender."""
    gammas = np.array([p.gamma_d for p in params])
    return gammas @ kernel.entries


def _unified(node: NodeParams, gamma_tilde: float, s: float) -> UnifiedGameParams:
    return UnifiedGameParams(
        s_tilde=s,
        gamma_tilde=gamma_tilde,
        c_d=node.c_d,
        gamma_a=node.gamma_a,
        c_a=node.c_a,
    )


def _objective_term(node: NodeParams, gt: float, base: float, s: float) -> float:
    """base - K_n(s) - s gamma_tilde alpha_n(s) for one node.

    Full coverage is a degenerate endpoint: the defender stops moving and the
    attacker owns the node outright, but the closed-form branch reports
    alpha = 0 there (zero attack frequency means no moves under the tie
    convention). The insurer still indemnifies the whole expected loss, so
    evaluate s = 1 by the continuity limit alpha -> 1, K -> 0.
    """
    if s >= 1.0:
        return base - gt
    eq = local_equilibrium(_unified(node, gt, s))
    return base - eq.defender_cost - s * gt * eq.alpha


def insurer_objective_c(
    s: float, params: list[NodeParams], kernel: InfluenceKernel
) -> float:
    """Insurer profit at coverage s with the premium priced tight."""
    gts = gamma_tildes_c(params, kernel)
    total = 0.0
    for node, gt in zip(params, gts):
        base = local_equilibrium(_unified(node, gt, 0.0)).defender_cost
        total += _objective_term(node, gt, base, s)
    return total


def golden_section_max(f, lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Maximize a unimodal scalar function on [lo, hi] to x-tolerance tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def design_contract_semi_homogeneous(
    shared: NodeParams, N: int, eta: float
) -> CentralizedOutcome:
    """Closed-form network contract when every node is identical."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N!r}")
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta!r}")
    gt = shared.gamma_d / (1.0 - eta)
    kappa = (1.0 - eta) * shared.gamma_a * shared.c_d / (shared.gamma_d * shared.c_a)

    if kappa >= 1.0:
        s = 0.5
        premium = N * shared.gamma_d / (2.0 * (1.0 - eta))
        profit = N * gt**2 * shared.c_a / (8.0 * shared.gamma_a * shared.c_d)
    elif kappa >= INSURABILITY_THRESHOLD:
        s = 0.5
        premium = N * (
            shared.c_d * shared.gamma_a / shared.c_a
            - shared.gamma_d / (2.0 * (1.0 - eta))
        )
        profit = N * (
            shared.gamma_a * shared.c_d / shared.c_a
            - gt
            + gt**2 * shared.c_a / (8.0 * shared.gamma_a * shared.c_d)
        )
    else:
        eq = local_equilibrium(_unified(shared, gt, 0.0))
        bare = N * eq.defender_cost
        return CentralizedOutcome(
            insurable=False,
            contract=None,
            per_node_equilibria=[eq] * N,
            insurer_profit=0.0,
            defender_total_loss=bare,
            defender_loss_no_premium=bare,
            solver="closed-form",
        )

    eq = local_equilibrium(_unified(shared, gt, s))
    bare = N * eq.defender_cost
    return CentralizedOutcome(
        insurable=True,
        contract=Contract(s=s, T=premium),
        per_node_equilibria=[eq] * N,
        insurer_profit=profit,
        defender_total_loss=bare + premium,
        defender_loss_no_premium=bare,
        solver="closed-form",
    )


def design_contract_c_numeric(
    params: list[NodeParams],
    kernel: InfluenceKernel,
    trace_points: int = 0,
) -> CentralizedOutcome:
    """Numerical contract design for heterogeneous nodes.

    Collects every node's regime breakpoint, golden-sections each cell of
    (0, 1], and takes the best cell (ties resolved toward smaller s).
    """
    gts = gamma_tildes_c(params, kernel)
    bases = [
        local_equilibrium(_unified(node, gt, 0.0)).defender_cost
        for node, gt in zip(params, gts)
    ]

    def objective(s: float) -> float:
        return sum(
            _objective_term(node, gt, base, s)
            for node, gt, base in zip(params, gts, bases)
        )

    breaks = sorted(
        {
            b
            for node, gt in zip(params, gts)
            if 0.0 < (b := 1.0 - node.gamma_a * node.c_d / (gt * node.c_a)) < 1.0
        }
    )
    edges = [0.0, *breaks, 1.0]

    best_s, best_obj = None, -math.inf
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, fx = golden_section_max(objective, lo, hi)
        # cell endpoints too; s = 0 itself is outside the feasible set
        for cand_s, cand_f in ((x, fx), (hi, objective(hi))):
            if cand_f > best_obj:
                best_s, best_obj = cand_s, cand_f

    trace = None
    if trace_points > 0:
        ss = np.linspace(0.0, 1.0, trace_points + 1)[1:]
        trace = np.column_stack([ss, [objective(s) for s in ss]])

    insurable = best_obj >= INSURABLE_OBJECTIVE_FLOOR
    if insurable:
        s = best_s
        equilibria = [
            local_equilibrium(_unified(node, gt, s)) for node, gt in zip(params, gts)
        ]
        premium = sum(base - eq.defender_cost for base, eq in zip(bases, equilibria))
        bare = sum(eq.defender_cost for eq in equilibria)
        return CentralizedOutcome(
            insurable=True,
            contract=Contract(s=s, T=premium),
            per_node_equilibria=equilibria,
            insurer_profit=best_obj,
            defender_total_loss=bare + premium,
            defender_loss_no_premium=bare,
            solver="numeric",
            objective_trace=trace,
        )

    equilibria = [
        local_equilibrium(_unified(node, gt, 0.0)) for node, gt in zip(params, gts)
    ]
    bare = sum(eq.defender_cost for eq in equilibria)
    return CentralizedOutcome(
        insurable=False,
        contract=None,
        per_node_equilibria=equilibria,
        insurer_profit=0.0,
        defender_total_loss=bare,
        defender_loss_no_premium=bare,
        solver="numeric",
        objective_trace=trace,
    )


def solve_network_c(spec: NetworkSpec, params: list[NodeParams]) -> CentralizedOutcome:
    """Network contract: closed form when nodes are identical, else numeric."""
    kernel = compute_kernel(spec)
    if len(params) != spec.node_count:
        raise ValueError(f"{len(params)} params for {spec.node_count} nodes")
    if all(p == params[0] for p in params):
        # an all-zero W is the unconnected network: no propagation, eta moot
        eta = 0.0 if not spec.weights.any() else spec.eta
        return design_contract_semi_homogeneous(params[0], len(params), eta)
    return design_contract_c_numeric(params, kernel)
