"""Independent verification oracles: event-level FlipIt simulation,
exponential loss sampling, best-response deviation scans, and a brute-force
contract grid search.

Nothing here reuses the closed-form equilibrium frequencies: the simulator
replays actual move timelines, the deviation scan probes objectives on a
raw frequency grid, and the contract oracle walks a 2-D (s, T) grid and
checks both rationality constraints numerically. These are the referees the
analytic modules are tested against.

RNG contract: one root seed feeds a numpy SeedSequence; each run spawns its
own child sequence driving a counter-based Philox stream. Runs are therefore
independent and the result is bit-identical whether runs execute serially or
in parallel, in any order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .game import (
    NodeParams,
    UnifiedGameParams,
    EquilibriumResult,
    attacker_utility,
    defender_cost,
    local_equilibrium,
)


@dataclass(frozen=True)
class SimulationConfig:
    horizon: float
    runs: int
    seed: int

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon!r}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs!r}")


@dataclass(frozen=True)
class SimulationResult:
    alpha_hat: float
    std_error: float
    runs: int


@dataclass(frozen=True)
class LossSample:
    """A batch of direct losses x and effective losses beta = (1 - s) x."""

    x: np.ndarray
    beta: np.ndarray


@dataclass(frozen=True)
class DeviationScan:
    """Largest unilateral objective improvement found for each player."""

    defender_improvement: float
    attacker_improvement: float


@dataclass(frozen=True)
class GridContractResult:
    s: float
    T: float
    profit: float


def simulate_run(
    phase_d: float, phase_a: float, p_d: float, p_a: float, horizon: float
) -> float:
    """Attacker-owned fraction for one run with explicit phases.

    Move times are phase + k/p on [0, horizon]. Exactly simultaneous moves
    cancel each other (ownership unchanged); otherwise the mover owns the
    node from its move onward, so after any surviving event the owner is
    that event's player. The attacker-owned set is then the union of
    [attacker move, next surviving defender move) intervals, clipped to the
    horizon; the defender owns everything before the first surviving
    attacker move because he owns the node at t = 0.
    """
    tau_d, tau_a = 1.0 / p_d, 1.0 / p_a
    count_d = int(np.floor((horizon - phase_d) / tau_d)) + 1 if phase_d <= horizon else 0
    count_a = int(np.floor((horizon - phase_a) / tau_a)) + 1 if phase_a <= horizon else 0
    d = phase_d + tau_d * np.arange(count_d)
    a = phase_a + tau_a * np.arange(count_a)

    # tie-cancel rule: exact float equality, pairs only (each player's own
    # move times are distinct within a run)
    if count_d and count_a:
        tied_a = np.isin(a, d)
        tied_d = np.isin(d, a)
        if tied_a.any():
            a = a[~tied_a]
            d = d[~tied_d]

    if a.size == 0:
        return 0.0
    next_d = np.append(d, np.inf)[np.searchsorted(d, a, side="right")]
    seg_end = np.minimum(next_d, np.append(a[1:], np.inf))
    attacker_time = np.sum(np.minimum(seg_end, horizon) - a)
    return float(attacker_time / horizon)


def simulate_flipit(p_d: float, p_a: float, cfg: SimulationConfig) -> SimulationResult:
    """Monte-Carlo estimate of the attacker's controlling fraction."""
    if not (p_d > 0 and p_a > 0):
        raise ValueError(f"frequencies must be positive, got ({p_d!r}, {p_a!r})")
    if cfg.horizon < 100.0 / min(p_d, p_a):
        warnings.warn(
            f"horizon {cfg.horizon} spans fewer than 100 periods of the slower "
            "player; transient bias may be visible",
            stacklevel=2,
        )
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.runs)
    alphas = np.empty(cfg.runs)
    for r, child in enumerate(children):
        gen = np.random.Generator(np.random.Philox(child))
        phase_d = gen.uniform(0.0, 1.0 / p_d)
        phase_a = gen.uniform(0.0, 1.0 / p_a)
        alphas[r] = simulate_run(phase_d, phase_a, p_d, p_a, cfg.horizon)
    alpha_hat = float(np.mean(alphas))
    std_error = float(np.std(alphas, ddof=1) / np.sqrt(cfg.runs)) if cfg.runs > 1 else 0.0
    return SimulationResult(alpha_hat=alpha_hat, std_error=std_error, runs=cfg.runs)


def sample_losses(
    gamma_d: float, R: float, s: float, count: int, seed: int
) -> tuple[LossSample, float]:
    """Draw direct losses X ~ Exp(mean = gamma_d R); beta = (1 - s) X.

    Returns the batch and the sample mean of X. The batch is vectorized
    (arrays, not per-draw records) because callers routinely ask for 1e6
    draws.
    """
    if not R > 0:
        raise ValueError(f"risk level R must be positive, got {R!r}")
    if not gamma_d > 0:
        raise ValueError(f"gamma_d must be positive, got {gamma_d!r}")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"coverage s must be in [0, 1], got {s!r}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count!r}")
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    x = gen.exponential(scale=gamma_d * R, size=count)
    sample = LossSample(x=x, beta=(1.0 - s) * x)
    return sample, float(x.mean())


def _log_grid(center: float, grid_size: int) -> np.ndarray:
    if center > 0:
        grid = np.geomspace(center * 1e-3, center * 1e3, grid_size)
    else:
        grid = np.geomspace(1e-6, 1e3, grid_size)
    return np.append(grid, center)


def deviation_scan(
    eq: EquilibriumResult, u: UnifiedGameParams, grid_size: int = 200
) -> DeviationScan:
    """Probe unilateral deviations on a log frequency grid around a profile.

    The grid spans [value/1e3, value*1e3] plus the profile point itself, so
    improvements are never negative; a true equilibrium scores <= 1e-9 for
    both players (up to grid resolution), a perturbed profile scores
    macroscopically positive for at least one.
    """
    if grid_size < 10:
        raise ValueError(f"grid_size must be >= 10, got {grid_size!r}")
    base_d = defender_cost(eq.p_d, eq.p_a, u)
    best_d = min(defender_cost(p, eq.p_a, u) for p in _log_grid(eq.p_d, grid_size))
    base_a = attacker_utility(eq.p_a, eq.p_d, u)
    best_a = max(attacker_utility(p, eq.p_d, u) for p in _log_grid(eq.p_a, grid_size))
    return DeviationScan(
        defender_improvement=max(0.0, base_d - best_d),
        attacker_improvement=max(0.0, best_a - base_a),
    )


def grid_contract_oracle(
    node: NodeParams, w_star_nn: float, s_steps: int, t_steps: int
) -> GridContractResult | None:
    """Brute-force search for the best feasible single-node contract.

    Scans s = k/s_steps over (0, 1]. For each s the premium candidates cover
    the sub-range of [0, T_upper] where the insurer constraint can hold at
    all, ending exactly at the defender's indifference premium; a uniform
    [0, T_upper] grid would alias that boundary and lose the argmax in
    discretization noise. Both rationality constraints are still checked
    explicitly on every candidate. Returns None when no (s, T) pair
    is feasible.
    """
    if s_steps < 100 or t_steps < 100:
        raise ValueError("step counts must be >= 100")
    gamma_tilde = node.gamma_d * w_star_nn

    def unified(s: float) -> UnifiedGameParams:
        return UnifiedGameParams(
            s_tilde=s,
            gamma_tilde=gamma_tilde,
            c_d=node.c_d,
            gamma_a=node.gamma_a,
            c_a=node.c_a,
        )

    cost_bare = local_equilibrium(unified(0.0)).defender_cost  # no-insurance cost
    fractions = np.arange(t_steps + 1) / t_steps
    best = None
    for k in range(1, s_steps + 1):
        s = k / s_steps
        if s >= 1.0:
            # degenerate endpoint: the defender stops moving and the attacker
            # owns the node, so the insurer indemnifies the whole expected
            # loss; the closed-form branch would report alpha = 0 here
            alpha, cost_s = 1.0, 0.0
        else:
            eq = local_equilibrium(unified(s))
            alpha, cost_s = eq.alpha, eq.defender_cost
        indemnity = s * gamma_tilde * alpha
        t_cap = cost_bare - cost_s
        if t_cap < indemnity:
            continue
        candidates = indemnity + (t_cap - indemnity) * fractions
        feasible = (cost_s + candidates <= cost_bare) & (
            candidates - indemnity >= 0.0
        )
        if not feasible.any():
            continue
        profits = np.where(feasible, candidates - indemnity, -np.inf)
        j = int(np.argmax(profits))
        if best is None or profits[j] > best.profit:
            best = GridContractResult(s=s, T=float(candidates[j]), profit=float(profits[j]))
    return best
