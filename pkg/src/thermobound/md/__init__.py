from .system import MDSystem, MDTrajectory, Langevin, integrate
from .analysis import (
    green_kubo,
    local_statistics,
    velocity_autocorrelation,
)

__all__ = [
    "MDSystem",
    "MDTrajectory",
    "Langevin",
    "integrate",
    "velocity_autocorrelation",
    "green_kubo",
    "local_statistics",
]
