"""Velocity, displacement, acceleration/force, force-rate, and spatial-gradient
bound evaluators.

These mix quantum constants into classical statistics; semi-classical reports
carry zero violation tolerance plus an approximation-regime flag, so a miss
demotes to informational rather than failing a run.
"""

import math

import numpy as np

from ..models import LatticeSafety, OscillatorModel, einstein_heat_capacity
from ..operator_core import ContractError, DenseOperator, DensityMatrix, hermitian_eigh
from ..policy import policy
from ..thermal import ThermalContext
from .report import BoundReport


def _semiclassical(report: BoundReport) -> BoundReport:
    report.tolerance = 0.0
    report.satisfied = bool(report.margin >= 0.0)
    report.metadata["approximation_regime"] = True
    if not report.satisfied:
        report.status = "informational"
        report.satisfied = None
    return report


def displacement_floor_bound(position_variance_sum, d, mass, ctx: ThermalContext,
                             equipartition_ok=None,
                             name="displacement_floor_bound") -> BoundReport:
    """Mean-square displacement floor: sum_l <(dr_l)^2> >= d lambda_T^2 / (4 pi).

    position_variance_sum: measured per-particle sum over the d Cartesian
    components, in the same units as lambda_T.
    """
    if not equipartition_ok:
        raise ContractError("high-T displacement bound requires the supplier's "
                            "equipartition validity flag")
    lam = ctx.thermal_wavelength(mass)
    floor = d * lam ** 2 / (4.0 * math.pi)
    report = BoundReport(
        name=name, lhs=position_variance_sum, rhs=floor,
        metadata={"thermal_wavelength": lam, "d": d,
                  "ratio": position_variance_sum / floor},
    )
    return _semiclassical(report)


# ---------------------------------------------------------------------------
# harmonic-mode velocity budgets


def _long_time_average_of_squared_rate(rho: DensityMatrix, v_eig, energies, hbar):
    """lim (1/T) int (Tr(rho v^H(t)))^2 dt via the exact resonance sum.

    v_eig: operator matrix in the energy eigenbasis.  A(t) = sum_nm rho_nm
    v_mn e^{i w_mn t}; the infinite-window average of A^2 keeps only pairs of
    conjugate frequencies, giving sum_w |F(w)|^2.
    """
    u_rho = rho.entries
    coeff = {}
    dim = len(energies)
    scale = max(abs(energies[-1] - energies[0]), 1.0)
    for m in range(dim):
        for n in range(dim):
            c = u_rho[n, m] * v_eig[m, n]
            if c == 0:
                continue
            w = round((energies[m] - energies[n]) / hbar / (1e-10 * scale))
            coeff[w] = coeff.get(w, 0.0 + 0.0j) + c
    return float(sum(abs(c) ** 2 for c in coeff.values()).real)


def mode_velocity_bound(model: OscillatorModel, rho: DensityMatrix,
                        safety: LatticeSafety, ctx: ThermalContext,
                        name="mode_velocity_bound") -> BoundReport:
    """Long-time average of the squared mode-velocity expectation against the
    Lindemann-capped budgets.

    Budgets reported: the Einstein-capacity form (the tight one; used as lhs),
    the kinetic-variance form, and the high-T limit 2 (c_L a k_B T / hbar)^2.
    The probe's maximal position variance must respect (c_L a)^2.
    """
    spec = model.spec
    hbar, kT = ctx.hbar, ctx.k_B * ctx.T
    x = beta_hbar_omega = ctx.beta * hbar * spec.omega
    eig = hermitian_eigh(model.hamiltonian)
    v_op = DenseOperator(model.p.entries / spec.mass, hermitian=True)
    v_eig = eig.to_eigenbasis(v_op)
    measured = _long_time_average_of_squared_rate(rho, v_eig, eig.eigenvalues, hbar)

    # max_t Var_rho(x^H(t)) over one period
    from ..operator_core import evolve_unitary, variance
    period = 2.0 * math.pi / spec.omega
    max_var_x = max(variance(rho, evolve_unitary(model.x, eig, t, hbar))
                    for t in np.linspace(0.0, period, 33))
    cap = safety.max_displacement ** 2

    c_einstein = einstein_heat_capacity(beta_hbar_omega, ctx.k_B)
    budget_einstein = 4.0 * cap / hbar ** 2 * (ctx.k_B * ctx.T ** 2 * c_einstein)
    coth = 1.0 / math.tanh(0.5 * x)
    budget_kinetic = (spec.omega * safety.max_displacement) ** 2 / 2.0 * coth ** 2
    budget_high_t = 2.0 * (safety.max_displacement * kT / hbar) ** 2

    report = BoundReport(
        name=name, lhs=budget_einstein, rhs=measured,
        metadata={
            "budget_kinetic_form": budget_kinetic,
            "budget_high_T_form": budget_high_t,
            "beta_hbar_omega": beta_hbar_omega,
            "max_position_variance": max_var_x,
            "lindemann_cap_sq": cap,
            "lindemann_respected": bool(max_var_x <= cap * (1.0 + 1e-9)),
        },
    )
    if not report.metadata["lindemann_respected"]:
        report.status = "inconclusive"
        report.satisfied = None
    return report


def build_planar_rotor(inertia, hbar=1.0, m_max=60):
    """Free planar rotor: H = L_z^2/(2I) on |m| <= m_max; q = cos(phi)."""
    ms = np.arange(-m_max, m_max + 1, dtype=float)
    h = DenseOperator(np.diag((hbar * ms) ** 2 / (2.0 * inertia)), hermitian=True)
    dim = len(ms)
    c = np.zeros((dim, dim), dtype=complex)
    for k in range(dim - 1):
        c[k, k + 1] = 0.5
        c[k + 1, k] = 0.5
    q = DenseOperator(c, hermitian=True)
    return h, q


def compact_coordinate_bound(inertia, ctx: ThermalContext, m_max=60,
                             equipartition_ok=None,
                             name="compact_coordinate_bound") -> BoundReport:
    """<(dq/dt)^2> <= 2 (k_B T / hbar)^2 ||q||^2 for the compact coordinate
    q = cos(phi) of a free planar rotor (||q|| = 1)."""
    if not equipartition_ok:
        raise ContractError("compact-coordinate bound is high-T only; the caller "
                            "must pass the equipartition validity flag")
    from ..thermal import CanonicalEnsemble, thermal_expectation

    hbar, kT = ctx.hbar, ctx.k_B * ctx.T
    h, q = build_planar_rotor(inertia, hbar, m_max)
    ens = CanonicalEnsemble(h, ctx)
    comm = h.entries @ q.entries - q.entries @ h.entries
    dqdt = DenseOperator(1j / hbar * comm, hermitian=True)
    sq = DenseOperator(dqdt.entries @ dqdt.entries, hermitian=True)
    rhs = thermal_expectation(ens, sq)
    lhs = 2.0 * (kT / hbar) ** 2  # ||cos(phi)|| = 1
    rotational_quantum = hbar ** 2 / (2.0 * inertia)
    report = BoundReport(
        name=name, lhs=lhs, rhs=rhs,
        metadata={"rotational_quantum_over_kT": rotational_quantum / kT,
                  "semiclassical_value": 0.5 * kT / inertia},
    )
    return _semiclassical(report)


# ---------------------------------------------------------------------------
# acceleration / force


def acceleration_force_bound(stats_si, d, mass, ctx: ThermalContext,
                             interaction="second-moment",
                             name="acceleration_force_bound") -> BoundReport:
    """Squared-acceleration and squared-force budgets from the local potential.

    stats_si must carry per-component 'v2', 'v4', 'a2', 'f2' and the local
    potential moments 'Vi2', 'Vi_var', 'Vi_norm' (all SI).  interaction picks
    the budget scale M: 'bounded-norm' -> ||V_i||^2, 'second-moment' -> <V_i^2>,
    'variance' -> Var(V_i).  lhs = (4 / hbar^2) M <v_l^2>, rhs = <a_l^2>.
    """
    hbar, kT = ctx.hbar, ctx.k_B * ctx.T
    scales = {
        "bounded-norm": stats_si["Vi_norm"] ** 2,
        "second-moment": stats_si["Vi2"],
        "variance": stats_si["Vi_var"],
    }
    if interaction not in scales:
        raise ContractError(f"unknown interaction mode {interaction!r}")
    m_scale = scales[interaction]
    lhs = 4.0 / hbar ** 2 * m_scale * stats_si["v2"]
    rhs = stats_si["a2"]
    lam = ctx.thermal_wavelength(mass)
    force_budget = 4.0 * mass * kT * scales["bounded-norm"] / hbar ** 2
    kurtosis = stats_si["v4"] / stats_si["v2"] ** 2
    report = BoundReport(
        name=name, lhs=lhs, rhs=rhs,
        metadata={
            "interaction_mode": interaction,
            "budget_scales": scales,
            "force_sq_measured": stats_si["f2"],
            "force_sq_budget_bounded_norm": force_budget,
            "force_over_potential_ratio": stats_si["f2"] / scales["bounded-norm"]
            if scales["bounded-norm"] > 0 else math.inf,
            "gradient_scale_8pi_over_lambdaT2": 8.0 * math.pi / lam ** 2,
            "velocity_kurtosis": kurtosis,
            "equipartition_v2": kT / mass,
        },
    )
    return _semiclassical(report)


def force_rate_bound(relative_rate_sq_si, z, d, ctx: ThermalContext,
                     name="force_rate_bound") -> BoundReport:
    """Force components cannot fluctuate at a relative rate above
    sqrt(2 k) k_B T / hbar with k = z d kinetic terms driving them.

    relative_rate_sq_si: measured <(da/dt)^2> / Var(a), SI (1/s^2).
    """
    hbar, kT = ctx.hbar, ctx.k_B * ctx.T
    k = z * d
    lhs = 2.0 * k * (kT / hbar) ** 2
    report = BoundReport(
        name=name, lhs=lhs, rhs=relative_rate_sq_si,
        metadata={"k": k, "z": z, "d": d,
                  "kinetic_variance_budget": 0.5 * k * kT ** 2},
    )
    return _semiclassical(report)


# ---------------------------------------------------------------------------
# spatial gradients


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def momentum_power_variance_table(mass, ctx: ThermalContext, orders=(1, 2, 3, 4)):
    """Classical high-T variances of p^n: (2 m k_B T)^n (2n-1)!! for odd n and
    (2 m k_B T)^n ((2n-1)!! - ((n-1)!!)^2) for even n."""
    base = 2.0 * mass * ctx.k_B * ctx.T
    table = {}
    for n in orders:
        if n % 2:
            table[n] = base ** n * _double_factorial(2 * n - 1)
        else:
            table[n] = base ** n * (_double_factorial(2 * n - 1)
                                    - _double_factorial(n - 1) ** 2)
    return table


def gradient_bound(sampler, fspec, order, mass, ctx: ThermalContext,
                   n_samples=200_000, seed=0, equipartition_ok=None,
                   name="gradient_bound") -> BoundReport:
    """Relative gradient bound <d^{n+1} f>^2 / <(d^n f)^2> <= 8 pi / lambda_T^2.

    sampler(n, rng) draws scalar configurations from the classical Boltzmann
    weight; fspec.derivative(k) returns a callable for d^k f.  Requires the
    equipartition flag (the budget side is m k_B T).
    """
    if not equipartition_ok:
        raise ContractError("gradient bound is high-T only; pass the equipartition flag")
    rng = np.random.default_rng(seed)
    xs = sampler(n_samples, rng)
    d_hi = fspec.derivative(order + 1)(xs)
    d_lo = fspec.derivative(order)(xs)
    denom = float(np.mean(d_lo ** 2))
    if denom < 1e-14:
        raise ContractError(f"degenerate gradient denominator {denom:.3e}")
    rhs = float(np.mean(d_hi)) ** 2 / denom
    lam = ctx.thermal_wavelength(mass)
    lhs = 4.0 * mass * ctx.k_B * ctx.T / ctx.hbar ** 2
    report = BoundReport(
        name=name, lhs=lhs, rhs=rhs,
        metadata={
            "order": order,
            "thermal_wavelength": lam,
            "lhs_8pi_over_lambdaT2": 8.0 * math.pi / lam ** 2,
            "n_samples": n_samples,
            "seed": seed,
            "momentum_power_variances": momentum_power_variance_table(mass, ctx),
        },
    )
    return _semiclassical(report)


class FunctionSpec:
    """Scalar test function with analytic derivatives (fallback: none)."""

    def __init__(self, derivatives):
        self._derivatives = list(derivatives)

    def derivative(self, k):
        if k >= len(self._derivatives):
            raise ContractError(f"derivative order {k} not supplied")
        return self._derivatives[k]


def gaussian_function_spec(width):
    """f = exp(-x^2 / (2 w^2)) with its first two derivatives."""
    w2 = width * width

    def f0(x):
        return np.exp(-x * x / (2.0 * w2))

    def f1(x):
        return -x / w2 * f0(x)

    def f2(x):
        return (x * x / w2 - 1.0) / w2 * f0(x)

    return FunctionSpec([f0, f1, f2])
