"""Trajectory analysis: autocorrelations, Green-Kubo integrals, local moment
statistics with jackknife errors, and the per-frame series feeding the
transport evaluators.
"""

import numpy as np

from ..dynamics import AutocorrelationSeries, detect_first_zero


class ResolutionError(ValueError):
    pass


class EquilibrationError(ValueError):
    pass


def _acf_fft(series, max_lag):
    """Unbiased autocorrelation of a 1-d series up to max_lag via FFT."""
    m = len(series)
    nfft = 1
    while nfft < 2 * m:
        nfft *= 2
    f = np.fft.rfft(series, nfft)
    acf = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1].real
    counts = m - np.arange(max_lag + 1)
    return acf / counts


def _acf_direct(series, max_lag):
    m = len(series)
    return np.array([np.dot(series[: m - k], series[k:]) / (m - k)
                     for k in range(max_lag + 1)])


def velocity_autocorrelation(traj, max_lag=None, method="fft") -> AutocorrelationSeries:
    """Component- and particle-averaged G_v(t); G_v(0) = <v^2> per component."""
    v = traj.velocities
    n_frames = v.shape[0]
    if n_frames < 10_000:
        raise ResolutionError(f"velocity autocorrelation needs >= 1e4 samples, got {n_frames}")
    if max_lag is None:
        max_lag = min(n_frames // 4, 2000)
    acf_fn = _acf_fft if method == "fft" else _acf_direct
    total = np.zeros(max_lag + 1)
    n, d = v.shape[1], v.shape[2]
    for i in range(n):
        for a in range(d):
            total += acf_fn(np.ascontiguousarray(v[:, i, a]), max_lag)
    g = total / (n * d)
    times = traj.sample_dt * np.arange(max_lag + 1)
    return AutocorrelationSeries(times=times, values=g,
                                 first_zero=detect_first_zero(times, g))


def scalar_autocorrelation(series, sample_dt, max_lag, subtract_mean=True):
    s = np.asarray(series, dtype=float)
    if subtract_mean:
        s = s - s.mean()
    g = _acf_fft(s, max_lag)
    times = sample_dt * np.arange(max_lag + 1)
    return AutocorrelationSeries(times=times, values=g,
                                 first_zero=detect_first_zero(times, g),
                                 mean_subtracted=subtract_mean)


def green_kubo(series: AutocorrelationSeries, upper="first_zero"):
    """Trapezoidal integral of G to the first zero crossing or the grid end.

    Returns (integral, info): info records the actual upper limit and whether
    a first_zero-mode request fell back to the full grid.
    """
    t, g = series.times, series.values
    info = {"mode": upper, "fallback": False}
    if upper == "first_zero":
        if series.first_zero is None:
            info["fallback"] = True
            info["upper"] = float(t[-1])
            return float(np.trapezoid(g, t)), info
        tz = series.first_zero
        mask = t <= tz
        tt = np.append(t[mask], tz)
        gg = np.append(g[mask], 0.0)
        info["upper"] = float(tz)
        return float(np.trapezoid(gg, tt)), info
    if upper == "full":
        info["upper"] = float(t[-1])
        return float(np.trapezoid(g, t)), info
    raise ValueError(f"unknown upper mode {upper!r}")


def _jackknife(values, n_blocks=10):
    values = np.asarray(values, dtype=float)
    m = len(values) // n_blocks
    if m == 0:
        return float(values.mean()), float("nan")
    blocks = values[: m * n_blocks].reshape(n_blocks, m).mean(axis=1)
    mean = blocks.mean()
    leave_one = (blocks.sum() - blocks) / (n_blocks - 1)
    err = np.sqrt((n_blocks - 1) * np.mean((leave_one - leave_one.mean()) ** 2))
    return float(mean), float(err)


def local_statistics(traj, temperature=None):
    """Moment statistics of an equilibrated trajectory, with jackknife errors.

    Per-component velocity moments, local-potential moments (half-share
    convention from the integrator; the full-pair variant doubles them),
    force and acceleration second moments, the instantaneous virial pressure,
    and the time-averaged neighbor count.
    """
    v = traj.velocities
    n_frames, n, d = v.shape
    v2_series = np.mean(v ** 2, axis=(1, 2))
    half = n_frames // 2
    drift = abs(v2_series[:half].mean() - v2_series[half:].mean()) / v2_series.mean()
    if drift > 0.05:
        raise EquilibrationError(f"<v^2> drift {drift:.3f} between run halves exceeds 5%")

    m = traj.system.mass
    stats = {}
    stats["v2"], stats["v2_err"] = _jackknife(v2_series)
    v4_series = np.mean(v ** 4, axis=(1, 2))
    stats["v4"], stats["v4_err"] = _jackknife(v4_series)
    vloc = traj.local_potentials
    stats["Vi_mean"], stats["Vi_mean_err"] = _jackknife(vloc.mean(axis=1))
    stats["Vi2"], stats["Vi2_err"] = _jackknife(np.mean(vloc ** 2, axis=1))
    stats["Vi_var"] = stats["Vi2"] - np.mean(vloc) ** 2
    stats["Vi_norm_sampled"] = float(np.max(np.abs(vloc)))
    f2_series = np.mean(traj.forces ** 2, axis=(1, 2))
    stats["f2"], stats["f2_err"] = _jackknife(f2_series)
    stats["a2"] = stats["f2"] / m ** 2
    stats["z_mean"] = float(np.mean(traj.neighbor_counts))

    kin = traj.kinetic_energies()
    temp_inst = 2.0 * kin / (d * n)          # k_B = 1 in reduced units
    vir_p = (n * temp_inst + traj.virials / d) / traj.system.box ** 3
    stats["pressure"], stats["pressure_err"] = _jackknife(vir_p)
    stats["T_kinetic"] = float(np.mean(temp_inst))
    etot = traj.total_energies()
    stats["E_mean"], stats["E_mean_err"] = _jackknife(etot)
    stats["E_var"] = float(np.var(etot))
    if temperature is not None:
        stats["T_target"] = temperature
        stats["Cv_total"] = stats["E_var"] / temperature ** 2
    stats["n_frames"] = n_frames
    return stats


def pressure_temperature_derivative(system_factory, temperatures, equil_steps, steps,
                                    sample_every=10):
    """(dP/dT)_v by a central finite difference over paired thermostatted runs."""
    from .system import equilibrate_then_sample

    pressures = []
    for T in temperatures:
        traj = equilibrate_then_sample(system_factory(T), equil_steps, steps,
                                       sample_every=sample_every)
        pressures.append(local_statistics(traj, temperature=T)["pressure"])
    dT = temperatures[-1] - temperatures[0]
    return (pressures[-1] - pressures[0]) / dT, pressures


def position_variance(traj):
    """Mean per-particle, per-component position variance about the time mean."""
    pos = traj.positions
    return float(np.mean(np.var(pos, axis=0)))


def mean_square_displacement(traj, lag_frames):
    disp = traj.positions[lag_frames:] - traj.positions[:-lag_frames]
    return float(np.mean(np.sum(disp ** 2, axis=2)))


def acceleration_rate_statistics(traj):
    """Time-averaged (da/dt)^2 / Var(a) per particle-component, then averaged.

    da/dt comes from central differences of the sampled forces; too-short
    series raise ResolutionError.
    """
    f = traj.forces
    if f.shape[0] < 64:
        raise ResolutionError("force series too short for stable differentiation")
    m = traj.system.mass
    dt = traj.sample_dt
    adot = (f[2:] - f[:-2]) / (2.0 * dt * m)
    a = f[1:-1] / m
    adot2 = np.mean(adot ** 2, axis=0)
    avar = np.var(a, axis=0)
    ratio = adot2 / np.where(avar > 0, avar, np.inf)
    return {
        "relative_rate_sq": float(np.mean(ratio)),
        "adot2": float(np.mean(adot2)),
        "a_var": float(np.mean(avar)),
    }


# ---------------------------------------------------------------------------
# per-frame transport series (the Ydot observables behind Green-Kubo integrands)


def _pair_table(pos, box, eps, sigma, cutoff):
    rij = pos[:, None, :] - pos[None, :, :]
    rij -= box * np.rint(rij / box)
    r2 = np.sum(rij * rij, axis=2)
    np.fill_diagonal(r2, np.inf)
    mask = r2 < cutoff * cutoff
    inv_r2 = np.where(mask, sigma * sigma / np.where(mask, r2, 1.0), 0.0)
    inv_r6 = inv_r2 ** 3
    fmag_over_r2 = np.where(mask, 24.0 * eps * (2.0 * inv_r6 ** 2 - inv_r6)
                            / np.where(mask, r2, 1.0), 0.0)
    return rij, fmag_over_r2, mask


def transport_frame_series(traj, yspec):
    """Global Ydot(t) per frame plus the per-particle Ydot_i table.

    yspec: 'diffusion' | 'shear-viscosity' | 'bulk-viscosity' |
    'thermal-conductivity'.  Virial-type terms use the standard pair form
    sum_{i<j} r_ij f_ij, so periodic wrapping is immaterial.  Returns
    (global_series, per_particle, volume_prefactor_note).
    """
    sys_ = traj.system
    kind, params = sys_.potential
    if yspec == "diffusion":
        per_particle = traj.velocities[:, :, 0]
        return per_particle.mean(axis=1), per_particle, {}
    if kind != "lj":
        raise ValueError("transport series beyond diffusion need the LJ potential")
    eps, sigma, cutoff = params["epsilon"], params["sigma"], params["cutoff"]
    m = sys_.mass
    n_frames, n, d = traj.velocities.shape
    vol = sys_.box ** 3
    glob = np.empty(n_frames)
    per = np.empty((n_frames, n))
    for k in range(n_frames):
        pos = traj.positions[k]
        vel = traj.velocities[k]
        rij, f_over_r2, mask = _pair_table(pos, box=sys_.box, eps=eps, sigma=sigma,
                                           cutoff=cutoff)
        if yspec == "shear-viscosity":
            # off-diagonal stress: kinetic p_x p_y / m plus pair virial r_x f_y
            kin_i = m * vel[:, 0] * vel[:, 1]
            vir_i = 0.5 * np.sum(f_over_r2 * rij[:, :, 0] * rij[:, :, 1], axis=1)
            per[k] = kin_i + vir_i
            glob[k] = per[k].sum() / vol
        elif yspec == "bulk-viscosity":
            kin_i = m * np.sum(vel * vel, axis=1)
            vir_i = 0.5 * np.sum(f_over_r2 * np.sum(rij * rij, axis=2), axis=1)
            per[k] = (kin_i + vir_i) / d
            glob[k] = per[k].sum() / vol
        elif yspec == "thermal-conductivity":
            pair_e = _pair_energy(rij, mask, eps, sigma, cutoff)
            eps_i = 0.5 * m * np.sum(vel * vel, axis=1) + 0.5 * pair_e.sum(axis=1)
            conv = vel[:, 0] * eps_i
            # pair form of sum_i r_i eps_i-dot along x
            fij = f_over_r2[:, :, None] * rij
            vsum = vel[:, None, :] + vel[None, :, :]
            cond = 0.25 * np.sum(rij[:, :, 0] * np.sum(fij * vsum, axis=2), axis=1)
            per[k] = conv + cond
            glob[k] = per[k].sum() / vol
        else:
            raise ValueError(f"unknown transport observable {yspec!r}")
    if yspec == "thermal-conductivity":
        glob -= glob.mean()
    return glob, per, {"volume": vol}


def _pair_energy(rij, mask, eps, sigma, cutoff):
    r2 = np.sum(rij * rij, axis=2)
    inv_r2 = np.where(mask, sigma * sigma / np.where(mask, r2, 1.0), 0.0)
    inv_r6 = inv_r2 ** 3
    sr_cut6 = (sigma / cutoff) ** 6
    shift = 4.0 * eps * (sr_cut6 ** 2 - sr_cut6)
    return np.where(mask, 4.0 * eps * (inv_r6 ** 2 - inv_r6) - shift, 0.0)


def local_hamiltonian_variance_md(traj):
    """Var of H~_i = sum_{j in partners(i) + i} p_j^2/2m + V_i, frame-sampled.

    This is the local Hamiltonian driving single-particle pressure/stress
    contributions; the kinetic sum runs over the particle and its neighbors
    within the cutoff at each frame.
    """
    m = traj.system.mass
    kind, params = traj.system.potential
    if kind != "lj":
        raise ValueError("needs the LJ potential")
    cutoff = params["cutoff"]
    n_frames, n, _ = traj.velocities.shape
    vals = np.empty((n_frames, n))
    box = traj.system.box
    for k in range(n_frames):
        pos = traj.positions[k]
        rij = pos[:, None, :] - pos[None, :, :]
        rij -= box * np.rint(rij / box)
        r2 = np.sum(rij * rij, axis=2)
        np.fill_diagonal(r2, np.inf)
        mask = r2 < cutoff * cutoff
        kin = 0.5 * m * np.sum(traj.velocities[k] ** 2, axis=1)
        vals[k] = kin + mask @ kin + traj.local_potentials[k]
    return float(np.var(vals)), float(np.mean(vals))
