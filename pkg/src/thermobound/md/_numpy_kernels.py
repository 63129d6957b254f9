"""Pure-numpy reference kernels for the MD hot loops.

Same call signatures as the numba twins in _numba_kernels.py; selected when
numba is unavailable or THERMOBOUND_NUMBA=0.  Vectorized over all pairs, so
fine at desk scale (N <= a few hundred).
"""

import numpy as np

POT_LJ = 0
POT_HARMONIC = 1


def compute_forces(kind, pos, box, p1, p2, p3, ref_pos):
    """Forces, half-share local potential, virial sum, neighbor counts.

    kind = POT_LJ: p1, p2, p3 = epsilon, sigma, cutoff (truncated & shifted).
    kind = POT_HARMONIC: p1 = spring constant; tether to ref_pos, no pairs.
    """
    n = pos.shape[0]
    if kind == POT_HARMONIC:
        disp = pos - ref_pos
        forces = -p1 * disp
        v_local = 0.5 * p1 * np.sum(disp * disp, axis=1)
        return forces, v_local, 0.0, np.zeros(n, dtype=np.int64)

    rij = pos[:, None, :] - pos[None, :, :]
    rij -= box * np.rint(rij / box)
    r2 = np.sum(rij * rij, axis=2)
    np.fill_diagonal(r2, np.inf)
    cut2 = p3 * p3
    mask = r2 < cut2
    inv_r2 = np.where(mask, p2 * p2 / np.where(mask, r2, 1.0), 0.0)
    inv_r6 = inv_r2 ** 3
    inv_r12 = inv_r6 ** 2
    # pair energy, shifted to vanish at the cutoff
    sr_cut6 = (p2 * p2 / cut2) ** 3
    shift = 4.0 * p1 * (sr_cut6 ** 2 - sr_cut6)
    pair_e = np.where(mask, 4.0 * p1 * (inv_r12 - inv_r6) - shift, 0.0)
    # |f| * r = 24 eps (2 (s/r)^12 - (s/r)^6); force on i along +rij
    fmag_over_r2 = np.where(mask,
                            24.0 * p1 * (2.0 * inv_r12 - inv_r6) / np.where(mask, r2, 1.0),
                            0.0)
    forces = np.sum(fmag_over_r2[:, :, None] * rij, axis=1)
    v_local = 0.5 * np.sum(pair_e, axis=1)          # half of each pair to each partner
    virial = 0.5 * np.sum(fmag_over_r2 * r2)        # sum_{i<j} r_ij . f_ij
    neighbor_counts = mask.sum(axis=1).astype(np.int64)
    return forces, v_local, float(virial), neighbor_counts


def integrate_chunk(kind, pos, vel, frc, n_steps, dt, mass, box, p1, p2, p3, ref_pos,
                    use_thermostat, c1, c2v, noise,
                    sample_every, out_t0_index, out_pos, out_vel, out_frc,
                    out_vloc, out_virial, out_nnbr, step0, t_offset):
    """Advance n_steps with velocity Verlet (BAOAB splitting when thermostatted).

    Mutates pos/vel/frc in place; writes samples (step0 + k) % sample_every == 0
    into the out arrays starting at out_t0_index.  Returns (samples_written,
    max_speed_seen).
    """
    idx = out_t0_index
    max_speed = 0.0
    half = 0.5 * dt / mass
    for k in range(n_steps):
        vel += half * frc
        pos += 0.5 * dt * vel
        if use_thermostat:
            vel *= c1
            vel += c2v * noise[k]
        pos += 0.5 * dt * vel
        frc_new, vloc, virial, nnbr = compute_forces(kind, pos, box, p1, p2, p3, ref_pos)
        frc[...] = frc_new
        vel += half * frc
        speed = np.sqrt(np.max(np.sum(vel * vel, axis=1)))
        if speed > max_speed:
            max_speed = speed
        step = step0 + k + 1
        if step % sample_every == 0:
            out_pos[idx] = pos
            out_vel[idx] = vel
            out_frc[idx] = frc
            out_vloc[idx] = vloc
            out_virial[idx] = virial
            out_nnbr[idx] = nnbr
            idx += 1
    return idx - out_t0_index, max_speed
