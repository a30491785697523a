"""Zero-rating market model: allocation, payoffs, equilibria and sweeps."""

from ._core import (
    CapacityError,
    CheckState,
    ContractViolation,
    MarketConfig,
    Scenario,
    ScenarioError,
    StrategyMatrix,
    aggregate_signs,
    allocate,
    compare_worlds,
    cp_shares,
    default_delta_grid,
    discount_equilibrium,
    enumerate_zre,
    forced_cells,
    grid_sweep,
    hhi,
    is_zre,
    load_scenario,
    oracle_verify_zre,
    parse_scenario,
    payoffs,
    run_sweep,
    run_verify,
    select_zre,
)

__all__ = [name for name in dir() if not name.startswith("_")]
