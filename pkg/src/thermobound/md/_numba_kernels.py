"""Numba-compiled MD hot loops (pair forces and the integrator step).

Signatures mirror _numpy_kernels.py exactly; kernels.py picks the backend.
Noise for the thermostat is pre-generated outside so both backends consume
the same stream.
"""

import numpy as np
from numba import njit

POT_LJ = 0
POT_HARMONIC = 1


@njit(cache=True)
def compute_forces(kind, pos, box, p1, p2, p3, ref_pos):
    n = pos.shape[0]
    forces = np.zeros((n, 3))
    v_local = np.zeros(n)
    neighbor_counts = np.zeros(n, dtype=np.int64)
    virial = 0.0
    if kind == POT_HARMONIC:
        for i in range(n):
            acc = 0.0
            for a in range(3):
                d = pos[i, a] - ref_pos[i, a]
                forces[i, a] = -p1 * d
                acc += d * d
            v_local[i] = 0.5 * p1 * acc
        return forces, v_local, virial, neighbor_counts

    eps, sigma, cutoff = p1, p2, p3
    cut2 = cutoff * cutoff
    sig2 = sigma * sigma
    sr_cut6 = (sig2 / cut2) ** 3
    shift = 4.0 * eps * (sr_cut6 * sr_cut6 - sr_cut6)
    for i in range(n):
        for j in range(i + 1, n):
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            dz = pos[i, 2] - pos[j, 2]
            dx -= box * np.rint(dx / box)
            dy -= box * np.rint(dy / box)
            dz -= box * np.rint(dz / box)
            r2 = dx * dx + dy * dy + dz * dz
            if r2 < cut2:
                inv_r2 = sig2 / r2
                inv_r6 = inv_r2 * inv_r2 * inv_r2
                inv_r12 = inv_r6 * inv_r6
                pair_e = 4.0 * eps * (inv_r12 - inv_r6) - shift
                fmag = 24.0 * eps * (2.0 * inv_r12 - inv_r6) / r2
                forces[i, 0] += fmag * dx
                forces[i, 1] += fmag * dy
                forces[i, 2] += fmag * dz
                forces[j, 0] -= fmag * dx
                forces[j, 1] -= fmag * dy
                forces[j, 2] -= fmag * dz
                virial += fmag * r2
                v_local[i] += 0.5 * pair_e
                v_local[j] += 0.5 * pair_e
                neighbor_counts[i] += 1
                neighbor_counts[j] += 1
    return forces, v_local, virial, neighbor_counts


@njit(cache=True)
def integrate_chunk(kind, pos, vel, frc, n_steps, dt, mass, box, p1, p2, p3, ref_pos,
                    use_thermostat, c1, c2v, noise,
                    sample_every, out_t0_index, out_pos, out_vel, out_frc,
                    out_vloc, out_virial, out_nnbr, step0, t_offset):
    n = pos.shape[0]
    idx = out_t0_index
    max_speed = 0.0
    half = 0.5 * dt / mass
    for k in range(n_steps):
        for i in range(n):
            for a in range(3):
                vel[i, a] += half * frc[i, a]
                pos[i, a] += 0.5 * dt * vel[i, a]
        if use_thermostat:
            for i in range(n):
                for a in range(3):
                    vel[i, a] = c1 * vel[i, a] + c2v * noise[k, i, a]
        for i in range(n):
            for a in range(3):
                pos[i, a] += 0.5 * dt * vel[i, a]
        frc_new, vloc, virial, nnbr = compute_forces(kind, pos, box, p1, p2, p3, ref_pos)
        for i in range(n):
            speed2 = 0.0
            for a in range(3):
                frc[i, a] = frc_new[i, a]
                vel[i, a] += half * frc[i, a]
                speed2 += vel[i, a] * vel[i, a]
            if speed2 > max_speed * max_speed:
                max_speed = np.sqrt(speed2)
        step = step0 + k + 1
        if step % sample_every == 0:
            for i in range(n):
                for a in range(3):
                    out_pos[idx, i, a] = pos[i, a]
                    out_vel[idx, i, a] = vel[i, a]
                    out_frc[idx, i, a] = frc[i, a]
                out_vloc[idx, i] = vloc[i]
                out_nnbr[idx, i] = nnbr[i]
            out_virial[idx] = virial
            idx += 1
    return idx - out_t0_index, max_speed
