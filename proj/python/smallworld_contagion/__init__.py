"""Complex contagion routing and diffusion on Kleinberg small-world tori."""

from ._core import (
    ConfigError,
    ContractViolation,
    Directedness,
    Graph,
    ModelParams,
    count_at_distance,
    fit_exponent,
    generate_graph,
    nodes_at_distance,
    normalizing_constant,
    run_diffusion,
    run_routing,
    run_sweep,
    torus_distance,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "Directedness",
    "Graph",
    "ModelParams",
    "count_at_distance",
    "fit_exponent",
    "generate_graph",
    "nodes_at_distance",
    "normalizing_constant",
    "run_diffusion",
    "run_routing",
    "run_sweep",
    "torus_distance",
]
