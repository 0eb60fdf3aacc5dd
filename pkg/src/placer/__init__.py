"""Exact data placement and page placement for networks with few clients."""

from .dp_scaled import BlowupExceeded, ScaledInstance, check_lemma1, scale, solve_nu, verify_blowup
from .dp_uniform import normalize_capacities, solve
from .model import (
    Client,
    GuardExceeded,
    Infeasible,
    Instance,
    InvalidInstance,
    ObjectSpec,
    PlacerError,
    Solution,
    collective_capacity_feasible,
    config_cost,
    enumerate_configs,
    nearest_distance,
    score_solution,
    validate,
)
from .oracle import BudgetExceeded, OracleBudget, oracle_dp, oracle_pp, sample_feasible_assignments
from .page_placement import PPSolution, solve_pp, solve_pp_nu

__version__ = "0.1.0"
