from ._core import (
    ConfigError,
    Functional,
    Potential,
    __version__,
    exterior_weights,
    grid_points,
    run_experiment,
)

__all__ = [
    "ConfigError",
    "Functional",
    "Potential",
    "__version__",
    "exterior_weights",
    "grid_points",
    "run_experiment",
]
