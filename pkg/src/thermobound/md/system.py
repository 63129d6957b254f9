"""MD system definition and the integrator driver.

Everything runs in reduced units (lengths in sigma, energies in epsilon,
masses in m); SI conversion happens only at the bound-evaluator boundary.
Langevin thermostatting uses the BAOAB splitting with noise pre-generated in
blocks from a seeded numpy Generator, so a given seed yields the identical
trajectory on either kernel backend's stream (bit-identical per backend).
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


class MDValidationError(ValueError):
    pass


class BlowUpError(RuntimeError):
    pass


@dataclass(frozen=True)
class Langevin:
    gamma: float
    T: float
    seed: int


@dataclass
class MDSystem:
    n: int
    box: float
    mass: float = 1.0
    potential: tuple = ("lj", {"epsilon": 1.0, "sigma": 1.0, "cutoff": 2.5})
    dt: float = 0.002
    thermostat: Langevin = None

    def __post_init__(self):
        if self.dt > 0.005:
            raise MDValidationError(f"dt = {self.dt} exceeds 0.005 reduced-unit cap")
        kind, params = self.potential
        if kind == "lj":
            if params["cutoff"] > self.box / 2.0:
                raise MDValidationError(
                    f"cutoff {params['cutoff']} exceeds box/2 = {self.box / 2.0}"
                )
        elif kind != "harmonic":
            raise MDValidationError(f"unknown potential kind {kind!r}")
        if self.thermostat is not None and self.thermostat.seed is None:
            raise MDValidationError("a seed is mandatory whenever a thermostat is present")

    def kernel_params(self):
        kind, params = self.potential
        if kind == "lj":
            return kernels.POT_LJ, params["epsilon"], params["sigma"], params["cutoff"]
        return kernels.POT_HARMONIC, params["k"], 0.0, 0.0


@dataclass
class MDTrajectory:
    times: np.ndarray
    positions: np.ndarray       # (frames, N, 3), unwrapped
    velocities: np.ndarray
    forces: np.ndarray
    local_potentials: np.ndarray   # (frames, N) half-share pair energies
    virials: np.ndarray            # (frames,) sum_{i<j} r_ij . f_ij
    neighbor_counts: np.ndarray    # (frames, N)
    system: MDSystem = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n_frames = len(self.times)
        for arr in (self.positions, self.velocities, self.forces,
                    self.local_potentials, self.virials, self.neighbor_counts):
            if len(arr) != n_frames:
                raise MDValidationError("trajectory arrays have inconsistent lengths")

    @property
    def n_frames(self):
        return len(self.times)

    @property
    def sample_dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def kinetic_energies(self):
        m = self.system.mass if self.system else 1.0
        return 0.5 * m * np.sum(self.velocities ** 2, axis=(1, 2))

    def potential_energies(self):
        return np.sum(self.local_potentials, axis=1)

    def total_energies(self):
        return self.kinetic_energies() + self.potential_energies()


def lattice_positions(n, box):
    """Simple-cubic lattice filling the periodic box."""
    per_side = int(np.ceil(n ** (1.0 / 3.0)))
    spacing = box / per_side
    pts = []
    for i in range(per_side):
        for j in range(per_side):
            for k in range(per_side):
                pts.append((i, j, k))
                if len(pts) == n:
                    return (np.array(pts, dtype=float) + 0.5) * spacing
    return (np.array(pts, dtype=float) + 0.5) * spacing


def maxwell_velocities(n, temperature, mass, rng):
    v = rng.normal(scale=np.sqrt(temperature / mass), size=(n, 3))
    v -= v.mean(axis=0)
    return v


def integrate(system: MDSystem, steps, sample_every=10, r0=None, v0=None,
              chunk_steps=2000, noise_rng=None) -> MDTrajectory:
    """Run the integrator and return the sampled trajectory.

    NVE (no thermostat) uses plain velocity Verlet; with a Langevin thermostat
    the O-step is the exact Ornstein-Uhlenbeck update between the two drift
    halves.  Samples land every `sample_every` steps.
    """
    n = system.n
    kind, p1, p2, p3 = system.kernel_params()
    ref_pos = lattice_positions(n, system.box)
    pos = np.array(r0 if r0 is not None else ref_pos, dtype=float)
    thermo = system.thermostat
    if v0 is not None:
        vel = np.array(v0, dtype=float)
    elif thermo is not None:
        vel = maxwell_velocities(n, thermo.T, system.mass,
                                 np.random.default_rng(thermo.seed + 1))
    else:
        vel = np.zeros((n, 3))
    frc, _, _, _ = kernels.compute_forces(kind, pos, system.box, p1, p2, p3, ref_pos)
    frc = np.array(frc, dtype=float)

    use_thermo = thermo is not None
    if use_thermo:
        c1 = float(np.exp(-thermo.gamma * system.dt))
        c2v = float(np.sqrt((1.0 - c1 * c1) * thermo.T / system.mass))
        if noise_rng is None:
            noise_rng = np.random.default_rng(thermo.seed)
    else:
        c1, c2v = 1.0, 0.0

    n_samples = steps // sample_every
    out_pos = np.empty((n_samples, n, 3))
    out_vel = np.empty((n_samples, n, 3))
    out_frc = np.empty((n_samples, n, 3))
    out_vloc = np.empty((n_samples, n))
    out_virial = np.empty(n_samples)
    out_nnbr = np.empty((n_samples, n), dtype=np.int64)

    v_scale = max(np.sqrt(np.mean(vel ** 2)), np.sqrt(thermo.T / system.mass) if use_thermo else 0.0, 1e-3)
    idx = 0
    done = 0
    while done < steps:
        todo = min(chunk_steps, steps - done)
        noise = noise_rng.normal(size=(todo, n, 3)) if use_thermo else np.zeros((1, n, 3))
        written, max_speed = kernels.integrate_chunk(
            kind, pos, vel, frc, todo, system.dt, system.mass, system.box,
            p1, p2, p3, ref_pos, use_thermo, c1, c2v, noise,
            sample_every, idx, out_pos, out_vel, out_frc, out_vloc, out_virial,
            out_nnbr, done, 0.0)
        idx += written
        done += todo
        if max_speed > 100.0 * v_scale:
            raise BlowUpError(
                f"instability: speed {max_speed:.3g} exceeded 100 thermal velocities "
                f"near step {done}"
            )
    times = system.dt * sample_every * (1.0 + np.arange(n_samples))
    return MDTrajectory(
        times=times, positions=out_pos, velocities=out_vel, forces=out_frc,
        local_potentials=out_vloc, virials=out_virial, neighbor_counts=out_nnbr,
        system=system,
        metadata={"backend": kernels.backend(), "steps": steps,
                  "sample_every": sample_every,
                  "seed": thermo.seed if use_thermo else None},
    )


def equilibrate_then_sample(system: MDSystem, equil_steps, steps, sample_every=10):
    """Convenience wrapper: one thermostatted run, discarding the first block."""
    if system.thermostat is None:
        raise MDValidationError("equilibrate_then_sample requires a thermostat")
    rng = np.random.default_rng(system.thermostat.seed)
    warm = integrate(system, equil_steps, sample_every=max(equil_steps // 4, 1),
                     noise_rng=rng)
    return integrate(system, steps, sample_every=sample_every,
                     r0=warm.positions[-1], v0=warm.velocities[-1], noise_rng=rng)
