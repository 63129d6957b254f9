"""Randomized verification of the foundational inequalities: the mixed-state
variance uncertainty relation, the trace Cauchy-Schwarz inequality, and the
deformed-density quadratic moment bound.  Each fuzz returns a BoundReport
whose rhs is the worst (most negative) margin seen across all draws.
"""

import numpy as np

from ..operator_core import DenseOperator, DensityMatrix
from .quantum import quadratic_moment_deformed_check
from .report import BoundReport


def random_density(rng, dim) -> DensityMatrix:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    m /= np.trace(m).real
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(DenseOperator(m, hermitian=True))


def random_hermitian(rng, dim) -> DenseOperator:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return DenseOperator(0.5 * (a + a.conj().T), hermitian=True)


def random_operator(rng, dim) -> DenseOperator:
    return DenseOperator(rng.normal(size=(dim, dim))
                         + 1j * rng.normal(size=(dim, dim)))


def uncertainty_fuzz(draws=1000, max_dim=8, seed=11, tol=1e-10,
                     name="uncertainty_fuzz") -> BoundReport:
    """Var(A) Var(B) - |<[A, B]>|^2 / 4 >= -tol for random mixed states."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(draws):
        dim = int(rng.integers(2, max_dim + 1))
        rho = random_density(rng, dim)
        a = random_hermitian(rng, dim)
        b = random_hermitian(rng, dim)
        var_a = _variance(rho, a)
        var_b = _variance(rho, b)
        comm = a.entries @ b.entries - b.entries @ a.entries
        margin = var_a * var_b - 0.25 * abs(np.trace(rho.entries @ comm)) ** 2
        worst = min(worst, margin)
    rep = BoundReport(name=name, lhs=worst, rhs=-tol, tolerance=0.0,
                      metadata={"draws": draws, "max_dim": max_dim, "seed": seed,
                                "worst_margin": worst})
    rep.satisfied = bool(worst >= -tol)
    return rep


def cauchy_schwarz_fuzz(draws=1000, max_dim=8, seed=12, tol=1e-10,
                        name="cauchy_schwarz_fuzz") -> BoundReport:
    """Tr(rho A A^dag) Tr(rho B^dag B) - |Tr(rho A B)|^2 >= -tol, general A, B."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(draws):
        dim = int(rng.integers(2, max_dim + 1))
        rho = random_density(rng, dim)
        a = random_operator(rng, dim)
        b = random_operator(rng, dim)
        lhs = (np.trace(rho.entries @ a.entries @ a.entries.conj().T).real
               * np.trace(rho.entries @ b.entries.conj().T @ b.entries).real)
        rhs = abs(np.trace(rho.entries @ a.entries @ b.entries)) ** 2
        worst = min(worst, lhs - rhs)
    rep = BoundReport(name=name, lhs=worst, rhs=-tol, tolerance=0.0,
                      metadata={"draws": draws, "max_dim": max_dim, "seed": seed,
                                "worst_margin": worst})
    rep.satisfied = bool(worst >= -tol)
    return rep


def deformed_quadratic_fuzz(draws=500, max_dim=64, seed=5, tol=1e-9,
                            name="deformed_quadratic_fuzz") -> BoundReport:
    """The deformed-density quadratic bound under fuzzing: zero violations."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    violations = 0
    for _ in range(draws):
        dim = int(rng.integers(2, max_dim + 1))
        rho = random_density(rng, dim)
        h = random_hermitian(rng, dim)
        q = random_hermitian(rng, dim)
        lhs, rhs = quadratic_moment_deformed_check(rho, h, q, hbar=1.0)
        margin = (lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)
        worst = min(worst, margin)
        if margin < -tol:
            violations += 1
    rep = BoundReport(name=name, lhs=worst, rhs=-tol, tolerance=0.0,
                      metadata={"draws": draws, "max_dim": max_dim, "seed": seed,
                                "violations": violations})
    rep.satisfied = bool(violations == 0)
    return rep


def _variance(rho: DensityMatrix, a: DenseOperator) -> float:
    m1 = np.trace(rho.entries @ a.entries).real
    m2 = np.trace(rho.entries @ a.entries @ a.entries).real
    return max(m2 - m1 * m1, 0.0)
