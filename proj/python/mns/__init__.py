"""Decoupled SAV solver for 2D micropolar Navier-Stokes flow."""

from ._core import (
    Config,
    ConfigError,
    Mesh,
    RunSpec,
    SolverError,
    Stepper,
    assemble,
    build_rect_mesh,
    exact_solution,
    execute,
    format_real,
    manufactured_forcing,
    parse_config,
    run_convergence,
    run_stability,
    run_stirring,
    stirring_config,
)

__all__ = [
    "Config",
    "ConfigError",
    "Mesh",
    "RunSpec",
    "SolverError",
    "Stepper",
    "assemble",
    "build_rect_mesh",
    "exact_solution",
    "execute",
    "format_real",
    "manufactured_forcing",
    "parse_config",
    "run_convergence",
    "run_stability",
    "run_stirring",
    "stirring_config",
]
