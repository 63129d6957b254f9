"""Builders for the concrete verification systems: truncated harmonic modes,
spin-1/2 XY chains, classical ferromagnetic Ising lattices, and the analytic
Fermi gas.

Spin operators use units where S^a has eigenvalues +-hbar/2, so spin bilinear
variances carry explicit hbar^4/16 factors.  Oscillator identities such as
[x, p] = i hbar hold only on the valid block: states with negligible weight
above n_max/2.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .operator_core import (
    CapacityError,
    ContractError,
    DenseOperator,
)
from .thermal import CanonicalEnsemble, ThermalContext, fermi_occupation, thermal_expectation


# ---------------------------------------------------------------------------
# truncated harmonic oscillator


@dataclass(frozen=True)
class OscillatorSpec:
    omega: float
    mass: float = 1.0
    n_max: int = 80
    hbar: float = 1.0

    def __post_init__(self):
        if self.omega <= 0 or self.mass <= 0:
            raise ContractError("oscillator requires omega, mass > 0")
        if self.n_max < 8:
            raise ContractError("oscillator truncation n_max must be >= 8")


@dataclass
class OscillatorModel:
    spec: OscillatorSpec
    terms: list                 # [("kinetic", K), ("potential", V)]
    x: DenseOperator
    p: DenseOperator
    n: DenseOperator
    hamiltonian: DenseOperator


def build_oscillator(spec: OscillatorSpec) -> OscillatorModel:
    """Ladder-operator construction on the n_max-level truncation."""
    nm = spec.n_max
    ladder = np.diag(np.sqrt(np.arange(1, nm, dtype=float)), 1)  # a
    adag = ladder.conj().T
    x0 = math.sqrt(spec.hbar / (2.0 * spec.mass * spec.omega))
    p0 = math.sqrt(spec.hbar * spec.mass * spec.omega / 2.0)
    x = DenseOperator(x0 * (ladder + adag), hermitian=True)
    p = DenseOperator(1j * p0 * (adag - ladder), hermitian=True)
    n = DenseOperator(np.diag(np.arange(nm, dtype=float)), hermitian=True)
    kin = DenseOperator(p.entries @ p.entries / (2.0 * spec.mass), hermitian=True)
    pot = DenseOperator(0.5 * spec.mass * spec.omega ** 2 * (x.entries @ x.entries),
                        hermitian=True)
    h = kin + pot
    return OscillatorModel(spec=spec, terms=[("kinetic", kin), ("potential", pot)],
                           x=x, p=p, n=n, hamiltonian=h)


def oscillator_partition(beta_hbar_omega: float) -> float:
    """Closed-form Z = e^{-x/2} / (1 - e^{-x}) with x = beta hbar omega."""
    x = beta_hbar_omega
    return math.exp(-0.5 * x) / (1.0 - math.exp(-x))


def oscillator_mean_n(beta_hbar_omega: float) -> float:
    """Bose function 1 / (e^x - 1)."""
    return 1.0 / math.expm1(beta_hbar_omega)


def oscillator_mean_n2(beta_hbar_omega: float) -> float:
    """<n^2> = (e^x + 1) / (e^x - 1)^2 for the thermal oscillator."""
    ex = math.exp(beta_hbar_omega)
    return (ex + 1.0) / (ex - 1.0) ** 2


def oscillator_kinetic_variance(beta_hbar_omega: float, hbar_omega: float) -> float:
    """Var(p^2/2m) = (hbar w)^2 / 8 * coth^2(beta hbar w / 2) = U^2 / 2."""
    c = 1.0 / math.tanh(0.5 * beta_hbar_omega)
    return hbar_omega ** 2 / 8.0 * c * c


def einstein_heat_capacity(beta_hbar_omega: float, k_B: float = 1.0) -> float:
    """C = k_B x^2 e^x / (e^x - 1)^2, the single-mode thermodynamic heat capacity."""
    x = beta_hbar_omega
    ex = math.exp(x)
    return k_B * x * x * ex / (ex - 1.0) ** 2


# ---------------------------------------------------------------------------
# spin-1/2 XY chain


@dataclass(frozen=True)
class XYChainSpec:
    N: int
    J: float = 1.0
    periodic: bool = True
    hbar: float = 1.0

    def __post_init__(self):
        if not (2 <= self.N <= 12):
            raise CapacityError("XY chain supports 2 <= N <= 12 sites (dense cap)")


@dataclass
class XYChainModel:
    spec: XYChainSpec
    terms: list                 # per-bond per-component: (("xx"|"yy", i, j), op)
    bonds: list
    site_ops: dict              # {"x": [S^x_i], "y": [...], "z": [...]}
    hamiltonian: DenseOperator

    def site(self, axis, i) -> DenseOperator:
        return self.site_ops[axis][i]

    def neighbors(self, i):
        return [j for (a, b) in self.bonds if i in (a, b) for j in (a, b) if j != i]


def _pauli_spin(hbar):
    sx = 0.5 * hbar * np.array([[0, 1], [1, 0]], dtype=complex)
    sy = 0.5 * hbar * np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = 0.5 * hbar * np.array([[1, 0], [0, -1]], dtype=complex)
    return sx, sy, sz


def _site_operator(op2, i, N):
    out = np.array([[1.0 + 0j]])
    eye = np.eye(2, dtype=complex)
    for j in range(N):
        out = np.kron(out, op2 if j == i else eye)
    return out


def build_xy_chain(spec: XYChainSpec) -> XYChainModel:
    """H = -J sum_<ij> (S^x_i S^x_j + S^y_i S^y_j), bonds split per component.

    The xx and yy parts of every bond are separate terms so the minimal
    commutator scan for Q = S^x_i lands on exactly the y-bilinears touching
    site i (and symmetrically for S^y_i).
    """
    N, J, hbar = spec.N, spec.J, spec.hbar
    sx, sy, sz = _pauli_spin(hbar)
    site_ops = {
        "x": [DenseOperator(_site_operator(sx, i, N), hermitian=True) for i in range(N)],
        "y": [DenseOperator(_site_operator(sy, i, N), hermitian=True) for i in range(N)],
        "z": [DenseOperator(_site_operator(sz, i, N), hermitian=True) for i in range(N)],
    }
    bonds = [(i, (i + 1) % N) for i in range(N if spec.periodic else N - 1)]
    terms = []
    for (i, j) in bonds:
        xx = -J * (site_ops["x"][i].entries @ site_ops["x"][j].entries)
        yy = -J * (site_ops["y"][i].entries @ site_ops["y"][j].entries)
        terms.append((("xx", i, j), DenseOperator(xx, hermitian=True)))
        terms.append((("yy", i, j), DenseOperator(yy, hermitian=True)))
    total = terms[0][1].entries.copy()
    for _, t in terms[1:]:
        total = total + t.entries
    h = DenseOperator(total, hermitian=True)
    return XYChainModel(spec=spec, terms=terms, bonds=bonds, site_ops=site_ops,
                        hamiltonian=h)


def xy_local_variance_from_correlators(model: XYChainModel, ensemble: CanonicalEnsemble,
                                       site: int, axis: str = "x"):
    """Assemble Var(H_tilde_i) for Q = S^axis_i from pair correlators alone.

    For the dual axis b (y for Q = S^x), H_tilde_i = -J S^b_i sum_nbr S^b_j and

        Var = J^2 [ z hbar^4/16 + (hbar^2/4) sum_{j != j'} <S^b_j S^b_j'>
                    - (sum_nbr <S^b_i S^b_j>)^2 ],

    with the j, j' ordered pairs running over the neighbors of i.  On a chain
    the cross pairs sit at distance 2 (the next-nearest correlator); the same
    enumeration covers the open-chain edges.  Returns (variance, correlators).
    """
    spec = model.spec
    dual = {"x": "y", "y": "x"}[axis]
    nbrs = [j for (a, b) in model.bonds if site in (a, b) for j in (a, b) if j != site]
    hbar, J = spec.hbar, spec.J
    s_dual = model.site_ops[dual]
    g_nn = {}
    for j in nbrs:
        op = DenseOperator(s_dual[site].entries @ s_dual[j].entries, hermitian=False)
        g_nn[j] = float(np.real(np.sum(ensemble.weights *
                                       np.diag(ensemble.hamiltonian.to_eigenbasis(op)))))
    cross = 0.0
    for j in nbrs:
        for jp in nbrs:
            if j == jp:
                continue
            op = DenseOperator(s_dual[j].entries @ s_dual[jp].entries, hermitian=False)
            cross += float(np.real(np.sum(ensemble.weights *
                                          np.diag(ensemble.hamiltonian.to_eigenbasis(op)))))
    z = len(nbrs)
    mean = -J * sum(g_nn.values())
    var = J * J * (z * hbar ** 4 / 16.0 + hbar ** 2 / 4.0 * cross) - mean * mean
    correlators = {"z": z, "nearest": g_nn, "cross_sum": cross}
    return var, correlators


# ---------------------------------------------------------------------------
# classical ferromagnetic Ising, exact enumeration


@dataclass(frozen=True)
class IsingLatticeSpec:
    shape: tuple                          # e.g. (3, 3)
    J: float = 1.0
    field: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        n = int(np.prod(self.shape))
        if n > 16:
            raise CapacityError("exact enumeration capped at 16 spins")
        if self.J < 0 or self.field < 0:
            raise ContractError("ferromagnetic audit requires J >= 0 and field >= 0 "
                                "(antiferromagnetic couplings are outside the Griffiths domain)")

    @property
    def n_spins(self):
        return int(np.prod(self.shape))


def ising_bonds(spec: IsingLatticeSpec):
    dims = spec.shape
    nd = len(dims)
    sites = list(np.ndindex(*dims))
    index = {s: k for k, s in enumerate(sites)}
    bonds = []
    for s in sites:
        for ax in range(nd):
            if spec.periodic or s[ax] + 1 < dims[ax]:
                t = list(s)
                t[ax] = (s[ax] + 1) % dims[ax]
                bonds.append((index[s], index[tuple(t)]))
    return bonds


def enumerate_ising(spec: IsingLatticeSpec, beta: float):
    """Exact 2^n enumeration.

    Returns (Z_shifted, bond covariance matrix, per-bond energies dict) where
    the covariance matrix is over the local bond Hamiltonians -J s_i s_j
    (plus the per-site field terms attached to no bond).
    """
    n = spec.n_spins
    bonds = ising_bonds(spec)
    states = np.array([[1 - 2 * ((k >> b) & 1) for b in range(n)]
                       for k in range(2 ** n)], dtype=float)
    bond_vals = np.stack([-spec.J * states[:, i] * states[:, j] for (i, j) in bonds],
                         axis=1)                       # (2^n, n_bonds)
    energy = bond_vals.sum(axis=1) - spec.field * states.sum(axis=1)
    w = np.exp(-beta * (energy - energy.min()))
    z = w.sum()
    w = w / z
    mean = w @ bond_vals
    centered = bond_vals - mean
    cov = (centered * w[:, None]).T @ centered
    total_mean = float(np.sum(w * energy))
    total_var = float(np.sum(w * (energy - total_mean) ** 2))
    info = {
        "bonds": bonds,
        "bond_means": mean,
        "total_energy_variance": total_var,
        "weights_sum": float(w.sum()),
    }
    return float(z), cov, info


# ---------------------------------------------------------------------------
# analytic Fermi gas


@dataclass(frozen=True)
class FermiGasSpec:
    effective_mass: float = 1.0
    mu: float = 1.0                     # chemical potential, fixed
    n_quad: int = 4096                  # quadrature nodes for the energy integral
    eps_max_factor: float = 60.0        # integrate to mu + factor * k_B T_max

    def __post_init__(self):
        if self.effective_mass <= 0:
            raise ContractError("effective mass must be positive")


def fermi_gas_rate_bound_inputs(spec: FermiGasSpec, ctx: ThermalContext):
    """Analytic sums over a dense energy grid for the free-fermion dispersion.

    Density of states g(eps) ~ sqrt(eps) (3d); returns the per-mode variance
    integrand sampled on the grid, total internal energy, and C_v at fixed mu
    computed from the closed form dU/dT = sum eps (eps - mu) f(1-f) / (k_B T^2).
    """
    mu, kT = spec.mu, ctx.k_B * ctx.T
    eps_max = mu + spec.eps_max_factor * kT
    # Gauss-Legendre on [0, eps_max]
    x, wq = np.polynomial.legendre.leggauss(spec.n_quad)
    eps = 0.5 * eps_max * (x + 1.0)
    wq = 0.5 * eps_max * wq
    dos = np.sqrt(np.clip(eps, 0.0, None))          # un-normalized g(eps)
    xarg = np.clip((eps - mu) / kT, -700, 700)
    f = 1.0 / (1.0 + np.exp(xarg))
    ff = f * (1.0 - f)
    occupancy_variance = eps ** 2 * ff              # per-mode Var(eps n)
    U = float(np.sum(wq * dos * eps * f))
    Cv = float(np.sum(wq * dos * eps * (eps - mu) * ff) / (ctx.k_B * ctx.T ** 2))
    return {
        "eps": eps,
        "dos_weight": wq * dos,
        "fermi_occupation": f,
        "occupancy_variance": occupancy_variance,
        "internal_energy": U,
        "C_v": Cv,
        "k_B_T2_Cv": ctx.k_B * ctx.T ** 2 * Cv,
    }


def fermi_gas_internal_energy(spec: FermiGasSpec, ctx: ThermalContext) -> float:
    return fermi_gas_rate_bound_inputs(spec, ctx)["internal_energy"]


# ---------------------------------------------------------------------------
# lattice safety parameters (Lindemann)


@dataclass(frozen=True)
class LatticeSafety:
    lattice_constant: float
    lindemann_ratio: float = 0.1

    def __post_init__(self):
        if self.lattice_constant <= 0:
            raise ContractError("lattice constant must be positive")
        if not (0.0 < self.lindemann_ratio < 1.0):
            raise ContractError("Lindemann ratio must lie in (0, 1)")

    @property
    def max_displacement(self):
        return self.lindemann_ratio * self.lattice_constant
