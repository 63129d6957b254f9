"""Numerical verification of thermal uncertainty bounds at desk scale.

Quantum-side checks run on dense exact diagonalization of small models
(truncated oscillators, spin-1/2 XY chains, classical Ising enumeration,
analytic Fermi gas); semi-classical checks run on a small Lennard-Jones /
harmonic molecular dynamics engine.  Every inequality evaluator emits a
BoundReport carrying (lhs, rhs, margin, satisfied, metadata).
"""

from .policy import NumericPolicy, policy
from .operator_core import DenseOperator, DensityMatrix, Eigendecomposition
from .thermal import ThermalContext, CanonicalEnsemble
from .bounds.report import BoundReport

__version__ = "0.1.0"

__all__ = [
    "NumericPolicy",
    "policy",
    "DenseOperator",
    "DensityMatrix",
    "Eigendecomposition",
    "ThermalContext",
    "CanonicalEnsemble",
    "BoundReport",
    "__version__",
]
