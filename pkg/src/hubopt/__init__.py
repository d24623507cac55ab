"""Energy-hub capacity expansion: entity graph, layered scenarios, MILP compiler, solver and reporting."""

from hubopt.compiler import MILPInstance, compile_instance, compile_scenario
from hubopt.data import load_gls
from hubopt.model import EntityGraph, load_dataset, validate_graph
from hubopt.reporting import KPIReport, compute_kpis, emit_results
from hubopt.scenarios import ScenarioStack, builtin_scenarios, get_stack, view_for
from hubopt.solver import Solution, SolverConfig, Status, solve, solve_lp, solve_milp

__version__ = "0.1.0"

__all__ = [
    "EntityGraph", "KPIReport", "MILPInstance", "ScenarioStack", "Solution", "SolverConfig", "Status",
    "builtin_scenarios", "compile_instance", "compile_scenario", "compute_kpis", "emit_results", "get_stack",
    "load_dataset", "load_gls", "solve", "solve_lp", "solve_milp", "validate_graph", "view_for",
]
