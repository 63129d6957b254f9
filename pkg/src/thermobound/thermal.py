"""Canonical-ensemble machinery: partition functions, thermal expectations,
effective and thermodynamic heat capacities, and closed-form special functions.

All Boltzmann exponentials are evaluated with the ground energy subtracted, so
beta * (spectral range) up to ~700 stays finite; beyond that the weights are a
ground-state projector anyway.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .operator_core import (
    ContractError,
    DenseOperator,
    DensityMatrix,
    Eigendecomposition,
    ShapeError,
    hermitian_eigh,
)


@dataclass(frozen=True)
class ThermalContext:
    """Temperature plus the two constants every bound mixes in."""

    T: float
    hbar: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        if self.T <= 0 or self.hbar <= 0 or self.k_B <= 0:
            raise ContractError("ThermalContext requires T, hbar, k_B > 0")

    @property
    def beta(self):
        return 1.0 / (self.k_B * self.T)

    def planckian_time(self):
        """hbar / (k_B T)."""
        return self.hbar / (self.k_B * self.T)

    def thermal_wavelength(self, m):
        """Non-relativistic thermal de Broglie wavelength sqrt(2 pi hbar^2 / (m k_B T))."""
        if m <= 0:
            raise ContractError("mass must be positive")
        return math.sqrt(2.0 * math.pi * self.hbar ** 2 / (m * self.k_B * self.T))


def planckian_time(ctx: ThermalContext) -> float:
    return ctx.planckian_time()


def thermal_wavelength(m: float, ctx: ThermalContext) -> float:
    return ctx.thermal_wavelength(m)


class CanonicalEnsemble:
    """Eigendecomposed Hamiltonian plus inverse temperature.

    Weights are exp(-beta (E_n - E_0)) normalized to one; the shifted partition
    value is cached along with log Z relative to the ground energy.
    """

    __slots__ = ("hamiltonian", "context", "weights", "log_z_shifted", "Z_shifted")

    def __init__(self, hamiltonian, context: ThermalContext):
        if isinstance(hamiltonian, DenseOperator):
            hamiltonian = hermitian_eigh(hamiltonian)
        if not isinstance(hamiltonian, Eigendecomposition):
            raise ContractError("hamiltonian must be a DenseOperator or Eigendecomposition")
        self.hamiltonian = hamiltonian
        self.context = context
        e = hamiltonian.eigenvalues
        x = -context.beta * (e - e[0])
        w = np.exp(x)
        z = w.sum()
        self.weights = w / z
        self.Z_shifted = float(z)
        self.log_z_shifted = float(np.log(z))
        assert abs(self.weights.sum() - 1.0) < 1e-12

    @property
    def dim(self):
        return self.hamiltonian.dim

    def log_partition(self):
        """log Z = log Z_shifted - beta E_0 (exact, no overflow)."""
        return self.log_z_shifted - self.context.beta * float(self.hamiltonian.eigenvalues[0])

    def mean_energy(self):
        return float(np.sum(self.weights * self.hamiltonian.eigenvalues))

    def energy_variance(self):
        e = self.hamiltonian.eigenvalues
        m = self.mean_energy()
        return float(np.sum(self.weights * (e - m) ** 2))


def canonical_density(e: CanonicalEnsemble) -> DensityMatrix:
    """rho = exp(-beta H) / Z as a DensityMatrix (commutes with H)."""
    u = e.hamiltonian.eigenvectors
    rho = (u * e.weights) @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(DenseOperator(rho, hermitian=True))


def thermal_expectation(e: CanonicalEnsemble, q: DenseOperator) -> float:
    """Tr(rho_canonical Q) = sum_n w_n <n|Q|n>."""
    if not q.hermitian:
        raise ContractError("thermal_expectation requires Hermitian q")
    if q.dim != e.dim:
        raise ShapeError(f"operator dim {q.dim} != ensemble dim {e.dim}")
    qe = e.hamiltonian.to_eigenbasis(q)
    val = np.sum(e.weights * np.diag(qe))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ContractError(f"thermal expectation has imaginary residue {val.imag:.3e}")
    return float(val.real)


def thermal_variance(e: CanonicalEnsemble, q: DenseOperator) -> float:
    """<Q^2> - <Q>^2 in the canonical state, clipped at zero."""
    if not q.hermitian:
        raise ContractError("thermal_variance requires Hermitian q")
    if q.dim != e.dim:
        raise ShapeError(f"operator dim {q.dim} != ensemble dim {e.dim}")
    qe = e.hamiltonian.to_eigenbasis(q)
    m1 = float(np.sum(e.weights * np.diag(qe)).real)
    m2 = float(np.sum(e.weights * np.diag(qe @ qe)).real)
    return max(m2 - m1 * m1, 0.0)


@dataclass(frozen=True)
class HeatCapacityResult:
    value: float          # energy / temperature
    variance: float       # the underlying Var(H_tilde), energy^2
    kind: str             # "effective-local" or "thermodynamic"
    metadata: dict = field(default_factory=dict)


def effective_heat_capacity(e: CanonicalEnsemble, h_local: DenseOperator,
                            kind="effective-local") -> HeatCapacityResult:
    """C = Var(h_local) / (k_B T^2): the effective local heat capacity.

    Passing the full Hamiltonian returns the thermodynamic heat capacity.
    """
    var = thermal_variance(e, h_local)
    ctx = e.context
    return HeatCapacityResult(
        value=var / (ctx.k_B * ctx.T ** 2),
        variance=var,
        kind=kind,
    )


def thermodynamic_heat_capacity(e: CanonicalEnsemble) -> HeatCapacityResult:
    var = e.energy_variance()
    ctx = e.context
    return HeatCapacityResult(value=var / (ctx.k_B * ctx.T ** 2),
                              variance=var, kind="thermodynamic")


def fermi_occupation(eps: float, mu: float, ctx: ThermalContext) -> float:
    """Fermi function 1 / (1 + exp(beta (eps - mu))), overflow-safe."""
    x = ctx.beta * (eps - mu)
    if x >= 0:
        z = math.exp(-x)
        return z / (1.0 + z)
    return 1.0 / (1.0 + math.exp(x))


def fermi_occupation_variance(eps: float, mu: float, ctx: ThermalContext) -> float:
    """Per-mode energy variance eps^2 f (1 - f): binomial occupancy statistics."""
    f = fermi_occupation(eps, mu, ctx)
    return eps * eps * f * (1.0 - f)
