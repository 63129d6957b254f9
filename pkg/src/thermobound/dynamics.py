"""Heisenberg-picture dynamics: local-Hamiltonian selection, time derivatives,
autocorrelation functions, and exact finite-window / long-time averages.

Window averages never use numerical quadrature: with the eigenbasis in hand,
(1/T) int_0^T Tr(rho Q^H(t)) dt is the phase-factor sum
sum_nm rho_nm Q_mn (e^{i w_mn T} - 1)/(i w_mn T), diagonal terms exact.
"""

from dataclasses import dataclass, field

import numpy as np

from .operator_core import (
    ContractError,
    DegeneracyError,
    DenseOperator,
    DensityMatrix,
    Eigendecomposition,
    ShapeError,
    commutator,
)
from .policy import policy
from .thermal import CanonicalEnsemble, thermal_expectation


@dataclass
class LocalHamiltonianSelection:
    """Subset of Hamiltonian terms generating the dynamics of a target operator."""

    terms: list                     # list of (label, DenseOperator)
    selected: list                  # indices into terms
    mode: str                       # "minimal" or "augmented"
    operator: DenseOperator = None  # sum of selected terms

    @property
    def labels(self):
        return [self.terms[i][0] for i in self.selected]


def _sum_terms(terms):
    total = terms[0][1].entries.copy()
    for _, t in terms[1:]:
        total = total + t.entries
    return DenseOperator(total, hermitian=all(t.hermitian for _, t in terms))


def select_local_hamiltonian(terms, q: DenseOperator, mode="minimal",
                             hamiltonian: DenseOperator = None,
                             augment_labels=()) -> LocalHamiltonianSelection:
    """Pick the terms of H that fail to commute with q.

    terms: list of (label, DenseOperator) summing to the full Hamiltonian.
    In augmented mode, terms whose label is in augment_labels are merged into
    the selection even if they commute with q (e.g. a full mode Hamiltonian).
    """
    if mode not in ("minimal", "augmented"):
        raise ContractError(f"unknown selection mode {mode!r}")
    total = _sum_terms(terms)
    if hamiltonian is not None:
        dev = np.max(np.abs(total.entries - hamiltonian.entries))
        scale = max(np.max(np.abs(hamiltonian.entries)), 1e-300)
        if dev > policy.commute_atol * max(scale, 1.0):
            raise ContractError("terms do not sum to the supplied Hamiltonian")
    scale = max(max(np.max(np.abs(t.entries)) for _, t in terms), 1e-300)
    qscale = max(np.max(np.abs(q.entries)), 1e-300)
    selected = []
    for i, (label, t) in enumerate(terms):
        comm = t.entries @ q.entries - q.entries @ t.entries
        noncommuting = np.max(np.abs(comm)) > policy.commute_atol * scale * qscale
        if noncommuting or (mode == "augmented" and label in augment_labels):
            selected.append(i)
    if selected:
        h_tilde = _sum_terms([terms[i] for i in selected])
    else:
        h_tilde = DenseOperator(np.zeros_like(q.entries), hermitian=True)
    # the selection must reproduce [H, q]
    full_comm = total.entries @ q.entries - q.entries @ total.entries
    sel_comm = h_tilde.entries @ q.entries - q.entries @ h_tilde.entries
    if np.max(np.abs(full_comm - sel_comm)) > policy.selection_atol * max(scale * qscale, 1.0):
        raise ContractError("selected terms do not reproduce [H, Q]")
    return LocalHamiltonianSelection(terms=list(terms), selected=selected,
                                     mode=mode, operator=h_tilde)


def heisenberg_derivative(sel, q: DenseOperator, rho: DensityMatrix, hbar=1.0) -> float:
    """(i/hbar) Tr(rho [H_tilde, Q]), the instantaneous rate d<Q>/dt.

    Sign convention: dQ/dt = (i/hbar)[H_tilde, Q], so for H = (hbar w / 2) s_z
    and rho = |+x><+x| the rate of s_y is +w.
    """
    h_tilde = sel.operator if isinstance(sel, LocalHamiltonianSelection) else sel
    if h_tilde.dim != q.dim or q.dim != rho.dim:
        raise ShapeError("heisenberg_derivative shape mismatch")
    c = commutator(h_tilde, q)
    val = 1j / hbar * np.trace(rho.entries @ c.entries)
    return float(val.real)


@dataclass
class AutocorrelationSeries:
    """Sampled G(t) with optional first-zero-crossing metadata."""

    times: np.ndarray
    values: np.ndarray
    first_zero: float = None
    mean_subtracted: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if len(self.times) != len(self.values):
            raise ShapeError("times and values length mismatch")
        if len(self.times) and (self.times[0] < 0 or np.any(np.diff(self.times) <= 0)):
            raise ContractError("times must be strictly increasing and start at >= 0")


def detect_first_zero(times, values):
    """Smallest grid time with a sign change, refined by linear interpolation."""
    v = np.asarray(values, dtype=float)
    t = np.asarray(times, dtype=float)
    sign_change = np.nonzero((v[:-1] > 0) & (v[1:] <= 0))[0]
    if len(sign_change) == 0:
        return None
    k = sign_change[0]
    if v[k + 1] == 0.0:
        return float(t[k + 1])
    frac = v[k] / (v[k] - v[k + 1])
    return float(t[k] + frac * (t[k + 1] - t[k]))


def autocorrelation(e: CanonicalEnsemble, q: DenseOperator, grid,
                    subtract_mean=False) -> AutocorrelationSeries:
    """G(t) = Re Tr(rho_canonical Q^H(t) Q(0)) on the supplied time grid."""
    if not q.hermitian:
        raise ContractError("autocorrelation requires Hermitian q")
    grid = np.asarray(grid, dtype=float)
    qe = e.hamiltonian.to_eigenbasis(q)
    if subtract_mean:
        qe = qe - thermal_expectation(e, q) * np.eye(e.dim)
    energies = e.hamiltonian.eigenvalues
    omega = (energies[:, None] - energies[None, :]) / e.context.hbar  # w_nm
    # G(t) = sum_nm w_n e^{i w_nm t} |Q_nm|^2
    amp = e.weights[:, None] * np.abs(qe) ** 2
    values = np.array([np.sum(amp * np.cos(omega * t)) for t in grid])
    fz = detect_first_zero(grid, values)
    return AutocorrelationSeries(times=grid, values=values, first_zero=fz,
                                 mean_subtracted=subtract_mean)


def resolve_degeneracies(h: Eigendecomposition, q: DenseOperator) -> Eigendecomposition:
    """Rotate eigenvectors inside degenerate energy blocks so q is block-diagonalized.

    After this, sum_n rho_nn Q_nn equals the infinite-window average even in
    the presence of exact degeneracies.
    """
    e = h.eigenvalues
    u = np.array(h.eigenvectors, copy=True)
    gap_tol = policy.degeneracy_rtol * max(h.spectral_range(), 1e-300)
    start = 0
    for k in range(1, len(e) + 1):
        if k == len(e) or e[k] - e[k - 1] > gap_tol:
            if k - start > 1:
                block = u[:, start:k]
                qblk = block.conj().T @ q.entries @ block
                qblk = 0.5 * (qblk + qblk.conj().T)
                _, w = np.linalg.eigh(qblk)
                u[:, start:k] = block @ w
            start = k
    return Eigendecomposition(e, u)


def diagonal_ensemble_average(rho: DensityMatrix, q: DenseOperator,
                              h: Eigendecomposition) -> float:
    """sum_n rho_nn Q_nn in the eigenbasis of h.

    Requires a nondegenerate spectrum, or q already diagonal within degenerate
    blocks (use resolve_degeneracies first); otherwise the long-time average is
    not captured by the diagonal sum and a DegeneracyError is raised.
    """
    e = h.eigenvalues
    qe = h.to_eigenbasis(q)
    gap_tol = policy.degeneracy_rtol * max(h.spectral_range(), 1e-300)
    start = 0
    for k in range(1, len(e) + 1):
        if k == len(e) or e[k] - e[k - 1] > gap_tol:
            if k - start > 1:
                off = qe[start:k, start:k] - np.diag(np.diag(qe[start:k, start:k]))
                if np.max(np.abs(off)) > 1e-9 * max(np.max(np.abs(qe)), 1e-300):
                    raise DegeneracyError(
                        "degenerate energy block carries off-diagonal Q elements; "
                        "rotate with resolve_degeneracies first"
                    )
            start = k
    rho_e = h.eigenvectors.conj().T @ rho.entries @ h.eigenvectors
    return float(np.real(np.sum(np.diag(rho_e) * np.diag(qe))))


def windowed_average(rho: DensityMatrix, q: DenseOperator, h: Eigendecomposition,
                     window: float, hbar=1.0) -> float:
    """(1/T) int_0^T Tr(rho Q^H(t)) dt via the exact phase-factor sum."""
    if window <= 0:
        raise ContractError("window must be positive")
    u = h.eigenvectors
    rho_e = u.conj().T @ rho.entries @ u
    qe = h.to_eigenbasis(q)
    energies = h.eigenvalues
    omega_mn = (energies[:, None] - energies[None, :]) / hbar  # slot [m, n] = (E_m - E_n)/hbar
    x = omega_mn * window
    small = np.abs(x) < 1e-12
    safe = np.where(small, 1.0, x)
    phi = np.where(small, 1.0 + 0j, (np.exp(1j * safe) - 1.0) / (1j * safe))
    # Tr(rho Q^H(t)) = sum_nm rho_nm Q_mn e^{i w_mn t}
    val = np.sum(rho_e.T * qe * phi)
    return float(val.real)
