from ._abc_rods import (
    InputError,
    Scenario,
    Simulation,
    SolverError,
    builtin_scenarios,
    closest_point,
    load_scenario,
    min_gauss_points,
    parse_scenario,
    penalty_ratio,
)

__all__ = [
    "InputError",
    "Scenario",
    "Simulation",
    "SolverError",
    "builtin_scenarios",
    "closest_point",
    "load_scenario",
    "min_gauss_points",
    "parse_scenario",
    "penalty_ratio",
]
