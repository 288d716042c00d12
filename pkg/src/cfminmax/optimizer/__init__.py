"""Min-max interference beamforming: model, conic solve, binaries, audit."""

from .bnb import branch_and_bound
from .bounds import QosBounds, best_serving_ap, compute_bounds
from .feasibility import FeasibilityReport, check_feasibility, epigraph_gap
from .model import MinMaxModel, build_model, describe_model, reduce_phase_wlog
from .solver import (INFEASIBLE, ITERATION_LIMIT, NUMERICAL_FAILURE, OPTIMAL,
                     BeamformingSolution, solve_conic, solve_socp)

__all__ = [
    "QosBounds", "compute_bounds", "best_serving_ap",
    "MinMaxModel", "build_model", "reduce_phase_wlog", "describe_model",
    "BeamformingSolution", "solve_socp", "solve_conic",
    "branch_and_bound",
    "FeasibilityReport", "check_feasibility", "epigraph_gap",
    "OPTIMAL", "INFEASIBLE", "NUMERICAL_FAILURE", "ITERATION_LIMIT",
    "solve_minmax",
]


def solve_minmax(channels, assoc, bounds, strategy: str = "wlog") -> BeamformingSolution:
    """Build and solve the min-max program with the chosen binary strategy."""
    model = build_model(channels, assoc, bounds)
    if strategy == "wlog":
        return solve_socp(reduce_phase_wlog(model))
    if strategy == "bnb":
        return branch_and_bound(model)
    raise ValueError(f"unknown strategy {strategy!r}")
