"""Equilibria and insurance contracts for networked FlipIt security games."""

from .game import (
    EquilibriumResult,
    Mode,
    NodeParams,
    Regime,
    UnifiedGameParams,
    attacker_controlling_fraction,
    local_equilibrium,
    unified_params,
)
from .insurance_c import (
    CentralizedOutcome,
    design_contract_c_numeric,
    design_contract_semi_homogeneous,
    insurer_objective_c,
    solve_network_c,
)
from .insurance_d import (
    INSURABILITY_THRESHOLD,
    Contract,
    InsuranceOutcome,
    NetworkOutcomeD,
    design_contract_d,
    feasible_coverage_interval,
    insurability_ratio,
    solve_network_d,
)
from .network import (
    InfluenceKernel,
    NetworkSpec,
    compute_kernel,
    network_from_json,
    risk_levels,
    validate_network,
)
from .simulate import (
    SimulationConfig,
    SimulationResult,
    deviation_scan,
    grid_contract_oracle,
    sample_losses,
    simulate_flipit,
)

__version__ = "0.1.0"

__all__ = [
    "CentralizedOutcome",
    "Contract",
    "EquilibriumResult",
    "INSURABILITY_THRESHOLD",
    "InfluenceKernel",
    "InsuranceOutcome",
    "Mode",
    "NetworkOutcomeD",
    "NetworkSpec",
    "NodeParams",
    "Regime",
    "SimulationConfig",
    "SimulationResult",
    "UnifiedGameParams",
    "attacker_controlling_fraction",
    "compute_kernel",
    "design_contract_c_numeric",
    "design_contract_d",
    "design_contract_semi_homogeneous",
    "deviation_scan",
    "feasible_coverage_interval",
    "grid_contract_oracle",
    "insurability_ratio",
    "insurer_objective_c",
    "local_equilibrium",
    "network_from_json",
    "risk_levels",
    "sample_losses",
    "simulate_flipit",
    "solve_network_c",
    "solve_network_d",
    "unified_params",
    "validate_network",
]
