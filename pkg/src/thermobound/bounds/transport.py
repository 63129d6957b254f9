"""Green-Kubo transport lower bounds: diffusion plus the generic evaluator
for shear/bulk viscosity and thermal conductivity observables.

All bounds constrain the first-zero-truncated integral (D_plus, gamma_plus);
the relation to the full transport coefficient goes through the A_D-style
order-unity constant recorded in metadata, never asserted.
"""

import math

import numpy as np

from ..dynamics import AutocorrelationSeries
from ..md.analysis import (
    green_kubo,
    local_hamiltonian_variance_md,
    scalar_autocorrelation,
    transport_frame_series,
)
from ..operator_core import ContractError
from ..thermal import ThermalContext
from .report import BoundReport

YSPECS = ("diffusion", "shear-viscosity", "bulk-viscosity", "thermal-conductivity")


def _diffusion_floor(g0, potential_second_moment, v4, hbar):
    """hbar G_v(0)^2 / (4 sqrt(<V_i^2> <v^4>)), the exact D_plus floor."""
    return hbar * g0 ** 2 / (4.0 * math.sqrt(potential_second_moment * v4))


def diffusion_lower_bound(series: AutocorrelationSeries, potential_stats, v4,
                          mass, ctx: ThermalContext, A_D=1.0, radius=None,
                          use_variance=False, name="diffusion_lower_bound") -> BoundReport:
    """D_plus >= hbar G_v(0)^2 / (4 sqrt(M <v^4>)) with M the local-potential
    second moment (or variance when use_variance, the tighter shifted form).

    Everything in SI.  Also emits the semi-classical closed form
    hbar k_B T / (4 sqrt(3) m sqrt(<V_i^2>)) and, when a particle radius is
    supplied, the Stokes-Einstein viscosity ceiling.
    """
    g0 = float(series.values[0])
    if g0 <= 0:
        raise ContractError(f"G_v(0) = {g0:.3e} must be positive")
    m_scale = potential_stats["Vi_var"] if use_variance else potential_stats["Vi2"]
    if m_scale <= 0:
        raise ContractError("degenerate local-potential scale")
    d_plus, info = green_kubo(series, upper="first_zero")
    floor = _diffusion_floor(g0, m_scale, v4, ctx.hbar)
    kT = ctx.k_B * ctx.T
    semiclassical_floor = ctx.hbar * kT / (4.0 * math.sqrt(3.0) * mass
                                           * math.sqrt(potential_stats["Vi2"]))
    peak_ok = bool(np.max(series.values) <= g0 * (1.0 + 1e-9))
    meta = {
        "G_v0": g0,
        "v4": v4,
        "potential_scale": m_scale,
        "use_variance": use_variance,
        "semiclassical_floor": semiclassical_floor,
        "first_zero": series.first_zero,
        "integration": info,
        "A_D": A_D,
        "D_full_estimate": green_kubo(series, upper="full")[0],
        "ratio_over_floor": d_plus / floor,
        "assumption_peak_at_zero": peak_ok,
    }
    if radius is not None:
        meta["stokes_einstein_eta_estimate"] = kT / (6.0 * math.pi * radius * d_plus)
        meta["stokes_einstein_eta_ceiling"] = (
            2.0 * mass * math.sqrt(potential_stats["Vi2"])
            / (ctx.hbar * radius * math.pi * math.sqrt(3.0)))
    report = BoundReport(name=name, lhs=d_plus, rhs=floor, metadata=meta)
    if not peak_ok or info["fallback"]:
        report.status = "informational"
        report.satisfied = None
    return report


def transport_lower_bound(traj, yspec, units, ctx: ThermalContext, max_lag=None,
                          d=3, gp_crosscheck=None,
                          name=None) -> BoundReport:
    """gamma_plus >= hbar G(0) |<Ydot_i Ydot>| / (4 sigma_{H~_i} sqrt(<Ydot_i^2 Ydot^2>)).

    traj is a reduced-unit LJ trajectory; `units` maps reduced onto SI where
    hbar enters.  The bulk-viscosity row accepts gp_crosscheck =
    {'dP_dT': ..., 'Cv': ...} (reduced) to compare G_P(0) against
    k_B T^2 (dP/dT)^2 / C_v.  Order-of-magnitude n-hbar floors go to metadata.
    """
    if yspec not in YSPECS:
        raise ContractError(f"yspec must be one of {YSPECS}")
    if name is None:
        name = f"transport_lower_bound[{yspec}]"
    if yspec == "diffusion":
        # single-particle observable: identical formula and code path as the
        # dedicated diffusion evaluator
        return diffusion_bound_from_trajectory(traj, units, ctx, max_lag=max_lag,
                                               name=name)
    kT_red = np.mean(traj.velocities ** 2) * traj.system.mass  # per component
    glob, per, extra = transport_frame_series(traj, yspec)
    sample_dt = traj.sample_dt
    if max_lag is None:
        max_lag = min(traj.n_frames // 4, 1200)
    subtract = yspec in ("bulk-viscosity", "thermal-conductivity")
    series = scalar_autocorrelation(glob, sample_dt, max_lag, subtract_mean=subtract)
    gamma_plus_red, info = green_kubo(series, upper="first_zero")

    if subtract:
        per = per - per.mean(axis=0, keepdims=True)
        glob_c = glob - glob.mean()
    else:
        glob_c = glob
    cross = float(np.mean(per * glob_c[:, None]))
    quartic = float(np.mean((per ** 2) * (glob_c ** 2)[:, None]))
    if yspec == "diffusion":
        var_h_red, _ = _diffusion_local_potential(traj)
    else:
        var_h_red, _ = local_hamiltonian_variance_md(traj)

    # reduced -> SI conversion factors
    tau = units.time
    u_y = {"diffusion": units.velocity,
           "shear-viscosity": units.pressure,
           "bulk-viscosity": units.pressure,
           "thermal-conductivity": units.pressure * units.velocity}[yspec]
    g0_si = float(series.values[0]) * u_y ** 2
    gamma_plus_si = gamma_plus_red * u_y ** 2 * tau
    cross_si = cross * u_y ** 2
    quartic_si = quartic * u_y ** 4
    var_h_si = var_h_red * units.epsilon ** 2
    floor = (ctx.hbar * g0_si * abs(cross_si)
             / (4.0 * math.sqrt(var_h_si) * math.sqrt(quartic_si)))

    n_si = traj.system.n / (traj.system.box * units.sigma) ** 3
    z_mean = float(np.mean(traj.neighbor_counts))
    meta = {
        "yspec": yspec,
        "G0_si": g0_si,
        "first_zero_reduced": series.first_zero,
        "integration": info,
        "gamma_plus_reduced": gamma_plus_red,
        "cross_correlator_si": cross_si,
        "quartic_correlator_si": quartic_si,
        "local_hamiltonian_variance_si": var_h_si,
        "n_hbar": n_si * ctx.hbar,
        "order_of_magnitude_floor_n_hbar": n_si * ctx.hbar
        * d ** -1.5 / math.sqrt(z_mean + 1.0),
        "z_mean": z_mean,
        "kT_reduced_check": float(kT_red),
    }
    if yspec in ("shear-viscosity", "bulk-viscosity"):
        vol_si = (traj.system.box * units.sigma) ** 3
        meta["coefficient_from_gamma_plus"] = gamma_plus_si * vol_si / (ctx.k_B * ctx.T)
    if yspec == "bulk-viscosity" and gp_crosscheck is not None:
        # k_B T^2 (dP/dT)_v^2 / C_v with k_B = 1 in reduced units
        gp_pred_red = kT_red ** 2 * gp_crosscheck["dP_dT"] ** 2 / gp_crosscheck["Cv"]
        meta["GP0_measured_reduced"] = float(series.values[0])
        meta["GP0_thermodynamic_reduced"] = gp_pred_red
        meta["GP0_ratio"] = float(series.values[0]) / gp_pred_red
    report = BoundReport(name=name, lhs=gamma_plus_si, rhs=floor, metadata=meta)
    if info["fallback"]:
        report.status = "informational"
        report.satisfied = None
    return report


def _diffusion_local_potential(traj):
    vals = traj.local_potentials
    return float(np.var(vals)), float(np.mean(vals))


def diffusion_bound_from_trajectory(traj, units, ctx: ThermalContext, max_lag=None,
                                    A_D=1.0, radius=None, **kw) -> BoundReport:
    """Convenience wrapper: VACF + local statistics -> SI diffusion bound."""
    from ..md.analysis import local_statistics, velocity_autocorrelation

    series_red = velocity_autocorrelation(traj, max_lag=max_lag)
    stats = local_statistics(traj)
    u_v, tau = units.velocity, units.time
    series = AutocorrelationSeries(
        times=series_red.times * tau,
        values=series_red.values * u_v ** 2,
        first_zero=None if series_red.first_zero is None
        else series_red.first_zero * tau,
    )
    potential_stats = {
        "Vi2": stats["Vi2"] * units.epsilon ** 2,
        "Vi_var": stats["Vi_var"] * units.epsilon ** 2,
    }
    v4 = stats["v4"] * u_v ** 4
    return diffusion_lower_bound(series, potential_stats, v4,
                                 mass=units.mass, ctx=ctx, A_D=A_D, radius=radius, **kw)
