"""Probe states: deliberately non-stationary density matrices.

Rate bounds are trivially zero in the canonical state, so the toolkit probes
them with (i) tilted-canonical states exp(-beta (H + eps V))/Z', which reduce
to canonical at eps = 0, and (ii) filtered random pure states supported on an
energy window.  Replica pairs feed the trajectory-divergence evaluator.
"""

from dataclasses import dataclass, field

import numpy as np

from .operator_core import (
    ContractError,
    DenseOperator,
    DensityMatrix,
    hermitian_eigh,
)
from .thermal import CanonicalEnsemble, ThermalContext, canonical_density


@dataclass
class ProbeState:
    kind: str
    rho: DensityMatrix
    metadata: dict = field(default_factory=dict)


def canonical_probe(ensemble: CanonicalEnsemble) -> ProbeState:
    return ProbeState(kind="canonical", rho=canonical_density(ensemble),
                      metadata={"beta": ensemble.context.beta})


def tilted_canonical_probe(hamiltonian: DenseOperator, tilt: DenseOperator,
                           epsilon: float, ctx: ThermalContext) -> ProbeState:
    """rho = exp(-beta (H + eps V)) / Z'.  Stationary under H + eps V, not H."""
    if not tilt.hermitian:
        raise ContractError("tilt operator must be Hermitian")
    h_tilted = hamiltonian + epsilon * tilt
    eig = hermitian_eigh(h_tilted)
    ens = CanonicalEnsemble(eig, ctx)
    return ProbeState(kind="tilted-canonical", rho=canonical_density(ens),
                      metadata={"epsilon": epsilon, "beta": ctx.beta})


def filtered_pure_probe(ensemble: CanonicalEnsemble, window, seed: int) -> ProbeState:
    """Random pure state supported on eigenstates with energy inside `window`."""
    lo, hi = window
    e = ensemble.hamiltonian.eigenvalues
    mask = (e >= lo) & (e <= hi)
    if not np.any(mask):
        raise ContractError(f"no eigenstates inside energy window [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    k = int(mask.sum())
    c = rng.normal(size=k) + 1j * rng.normal(size=k)
    c /= np.linalg.norm(c)
    psi = ensemble.hamiltonian.eigenvectors[:, mask] @ c
    rho = np.outer(psi, psi.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return ProbeState(kind="filtered-pure",
                      rho=DensityMatrix(DenseOperator(rho, hermitian=True)),
                      metadata={"window": (float(lo), float(hi)), "seed": seed,
                                "n_states": k})


def random_phase_equal_weight_state(eigenvalues, eigenvectors, rng):
    """|psi> = dim^{-1/2} sum_n e^{i theta_n} |n>, the ETH probe state."""
    dim = len(eigenvalues)
    theta = rng.uniform(0.0, 2.0 * np.pi, dim)
    return eigenvectors @ (np.exp(1j * theta) / np.sqrt(dim))


def replica_pair_probe(hamiltonian: DenseOperator, tilt: DenseOperator,
                       delta: float, ctx: ThermalContext):
    """Pair (rho_1, rho_2) tilted by +-delta: inputs for the divergence bound."""
    p1 = tilted_canonical_probe(hamiltonian, tilt, +delta, ctx)
    p2 = tilted_canonical_probe(hamiltonian, tilt, -delta, ctx)
    return p1, p2
