"""Dense finite-dimensional operator algebra.

Everything is double-precision complex and immutable after construction.
Hermiticity is an explicit validated flag, not something inferred per call,
so contract violations surface early.  All target dimensions stay below a
configurable cap (default 4096); there is deliberately no sparse path.
"""

import numpy as np

from .policy import policy


class ShapeError(ValueError):
    pass


class ContractError(ValueError):
    pass


class CapacityError(ValueError):
    pass


class DegeneracyError(ValueError):
    pass


class DenseOperator:
    """Square complex matrix with a validated Hermiticity flag."""

    __slots__ = ("entries", "dim", "hermitian")

    def __init__(self, entries, hermitian=False):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"operator must be square, got shape {a.shape}")
        if hermitian:
            scale = max(np.max(np.abs(a)), 1e-300)
            dev = np.max(np.abs(a - a.conj().T))
            if dev > policy.hermiticity_rtol * scale:
                raise ContractError(
                    f"hermitian flag set but max|A - A^dag| = {dev:.3e} "
                    f"exceeds {policy.hermiticity_rtol:.1e} * max|A|"
                )
            a = 0.5 * (a + a.conj().T)  # symmetrize residual round-off
        a.setflags(write=False)
        self.entries = a
        self.dim = a.shape[0]
        self.hermitian = bool(hermitian)

    # -- arithmetic helpers (results inherit Hermiticity where exact) --

    def __add__(self, other):
        return DenseOperator(self.entries + other.entries,
                             hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other):
        return DenseOperator(self.entries - other.entries,
                             hermitian=self.hermitian and other.hermitian)

    def __mul__(self, scalar):
        s = complex(scalar)
        herm = self.hermitian and s.imag == 0.0
        return DenseOperator(self.entries * s, hermitian=herm)

    __rmul__ = __mul__

    def __matmul__(self, other):
        # a product of Hermitians is not Hermitian in general
        return DenseOperator(self.entries @ other.entries, hermitian=False)

    def dagger(self):
        return DenseOperator(self.entries.conj().T, hermitian=self.hermitian)

    def as_hermitian(self):
        """Re-tag as Hermitian (validates)."""
        return DenseOperator(self.entries, hermitian=True)

    @staticmethod
    def identity(dim):
        return DenseOperator(np.eye(dim), hermitian=True)

    def __repr__(self):
        return f"DenseOperator(dim={self.dim}, hermitian={self.hermitian})"


class DensityMatrix:
    """Trace-one positive-semi-definite Hermitian operator."""

    __slots__ = ("op",)

    def __init__(self, op):
        if not isinstance(op, DenseOperator):
            op = DenseOperator(op, hermitian=True)
        if not op.hermitian:
            raise ContractError("density matrix requires a Hermitian operator")
        tr = np.trace(op.entries).real
        if abs(tr - 1.0) > policy.trace_atol:
            raise ContractError(f"density matrix trace {tr} deviates from 1")
        evals = np.linalg.eigvalsh(op.entries)
        if evals.min() < -policy.psd_atol:
            raise ContractError(
                f"density matrix has eigenvalue {evals.min():.3e} below -{policy.psd_atol:.1e}"
            )
        self.op = op

    @property
    def dim(self):
        return self.op.dim

    @property
    def entries(self):
        return self.op.entries

    def expectation(self, q: DenseOperator):
        return complex(np.trace(self.entries @ q.entries))

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


class Eigendecomposition:
    """Ascending eigenvalues and a unitary of eigenvector columns."""

    __slots__ = ("eigenvalues", "eigenvectors")

    def __init__(self, eigenvalues, eigenvectors, validate_against=None):
        e = np.asarray(eigenvalues, dtype=float)
        u = np.asarray(eigenvectors, dtype=complex)
        if np.any(np.diff(e) < 0):
            order = np.argsort(e, kind="stable")
            e, u = e[order], u[:, order]
        gram = u.conj().T @ u
        if np.max(np.abs(gram - np.eye(len(e)))) > policy.unitarity_atol:
            raise ContractError("eigenvector matrix is not unitary within tolerance")
        if validate_against is not None:
            rec = (u * e) @ u.conj().T
            scale = max(np.max(np.abs(validate_against)), 1e-300)
            if np.max(np.abs(rec - validate_against)) > policy.reconstruct_rtol * scale:
                raise ContractError("eigendecomposition does not reconstruct the operator")
        e.setflags(write=False)
        u.setflags(write=False)
        self.eigenvalues = e
        self.eigenvectors = u

    @property
    def dim(self):
        return len(self.eigenvalues)

    def spectral_range(self):
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def to_eigenbasis(self, q: DenseOperator):
        """Matrix of q in the eigenbasis, U^dag q U."""
        u = self.eigenvectors
        return u.conj().T @ q.entries @ u

    def __repr__(self):
        return f"Eigendecomposition(dim={self.dim})"


# ---------------------------------------------------------------------------
# operations


def tensor_product(a: DenseOperator, b: DenseOperator, dim_cap=None) -> DenseOperator:
    cap = policy.dim_cap if dim_cap is None else dim_cap
    if a.dim * b.dim > cap:
        raise CapacityError(f"tensor product dim {a.dim * b.dim} exceeds cap {cap}")
    return DenseOperator(np.kron(a.entries, b.entries),
                         hermitian=a.hermitian and b.hermitian)


def commutator(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    if a.dim != b.dim:
        raise ShapeError(f"commutator dims {a.dim} != {b.dim}")
    return DenseOperator(a.entries @ b.entries - b.entries @ a.entries, hermitian=False)


def hermitian_eigh(a: DenseOperator) -> Eigendecomposition:
    if not a.hermitian:
        raise ContractError("hermitian_eigh requires the hermitian flag")
    e, u = np.linalg.eigh(a.entries)
    return Eigendecomposition(e, u, validate_against=a.entries)


def evolve_unitary(q: DenseOperator, h: Eigendecomposition, t: float, hbar: float = 1.0) -> DenseOperator:
    """Heisenberg evolution U^dag(t) q U(t) with U = exp(-i H t / hbar)."""
    if q.dim != h.dim:
        raise ShapeError(f"operator dim {q.dim} != eigendecomposition dim {h.dim}")
    qe = h.to_eigenbasis(q)
    omega = h.eigenvalues / hbar
    phase = np.exp(1j * omega * t)
    evolved_eig = (phase[:, None] * qe) * phase.conj()[None, :]
    u = h.eigenvectors
    out = u @ evolved_eig @ u.conj().T
    if q.hermitian:
        out = 0.5 * (out + out.conj().T)
    return DenseOperator(out, hermitian=q.hermitian)


def partial_trace(rho: DensityMatrix, dims, keep) -> DensityMatrix:
    """Trace out all tensor factors except those in `keep`.

    dims: factor dimensions in tensor order; keep: iterable of factor indices.
    """
    dims = list(dims)
    if int(np.prod(dims)) != rho.dim:
        raise ShapeError(f"factor dims {dims} do not multiply to {rho.dim}")
    keep = sorted(set(keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise ShapeError(f"keep indices {keep} out of range for {n} factors")
    t = rho.entries.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for count, ax in enumerate(traced):
        t = np.trace(t, axis1=ax - count, axis2=ax - count + n - count)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    out = t.reshape(d_keep, d_keep)
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(DenseOperator(out, hermitian=True))


def purify(rho: DensityMatrix):
    """Pure state |psi> on the doubled space with Tr_ancilla |psi><psi| = rho.

    Spectral construction: |psi> = sum_c sqrt(p_c) |c> (x) |w_c> with |w_c>
    the computational ancilla basis.  Returns the state vector of length dim^2
    (system factor first).
    """
    e, u = np.linalg.eigh(rho.entries)
    e = np.clip(e, 0.0, None)
    dim = rho.dim
    psi = np.zeros(dim * dim, dtype=complex)
    for c in range(dim):
        if e[c] == 0.0:
            continue
        psi += np.sqrt(e[c]) * np.kron(u[:, c], _unit_vector(dim, c))
    psi /= np.linalg.norm(psi)
    return psi


def _unit_vector(dim, k):
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def operator_norm(a: DenseOperator) -> float:
    """Largest absolute eigenvalue (Hermitian operators only)."""
    if not a.hermitian:
        raise ContractError("operator_norm requires the hermitian flag")
    return float(np.max(np.abs(np.linalg.eigvalsh(a.entries))))


def variance(rho: DensityMatrix, q: DenseOperator) -> float:
    """Var_rho(q) for Hermitian q, clipped at zero from below."""
    if not q.hermitian:
        raise ContractError("variance requires Hermitian q")
    m1 = rho.expectation(q).real
    m2 = rho.expectation(DenseOperator(q.entries @ q.entries, hermitian=True)).real
    return max(m2 - m1 * m1, 0.0)
