"""Physical constants registry and reduced-unit conversion for the MD engine.

SI values are 2018 CODATA (k_B and h are exact in the revised SI).  Natural
units set hbar = k_B = 1.  The MD engine works in reduced Lennard-Jones
units internally; LJUnits is the single seam where sigma/epsilon/mass map
reduced statistics onto SI so that hbar can enter the bound evaluators.
"""

import math
from dataclasses import dataclass

HBAR_SI = 1.054571817e-34       # J s
KB_SI = 1.380649e-23            # J / K  (exact)
AMU_SI = 1.66053906660e-27      # kg

# reference materials used by the constants self-checks
ARGON_MASS_SI = 39.948 * AMU_SI
ARGON_LJ_EPSILON_SI = 119.8 * KB_SI     # J
ARGON_LJ_SIGMA_SI = 3.405e-10           # m
O2_MASS_SI = 5.31e-26                   # kg
WATER_NUMBER_DENSITY_SI = 3.34e28       # 1 / m^3


@dataclass(frozen=True)
class ConstantsRegistry:
    hbar: float
    k_B: float
    units: str  # "si" or "natural"

    def planckian_time(self, T):
        return self.hbar / (self.k_B * T)

    def thermal_wavelength(self, m, T):
        return math.sqrt(2.0 * math.pi * self.hbar ** 2 / (m * self.k_B * T))

    def min_viscosity_scale(self, n):
        """n*hbar, the order-of-magnitude viscosity floor for number density n."""
        return n * self.hbar


SI = ConstantsRegistry(hbar=HBAR_SI, k_B=KB_SI, units="si")
NATURAL = ConstantsRegistry(hbar=1.0, k_B=1.0, units="natural")


def registry(units):
    if units == "si":
        return SI
    if units == "natural":
        return NATURAL
    raise ValueError(f"unknown units mode {units!r} (expected 'si' or 'natural')")


@dataclass(frozen=True)
class LJUnits:
    """Reduced LJ unit system: lengths in sigma, energies in epsilon, masses in m."""

    sigma: float = ARGON_LJ_SIGMA_SI
    epsilon: float = ARGON_LJ_EPSILON_SI
    mass: float = ARGON_MASS_SI

    @property
    def time(self):
        return self.sigma * math.sqrt(self.mass / self.epsilon)

    @property
    def velocity(self):
        return self.sigma / self.time

    @property
    def force(self):
        return self.epsilon / self.sigma

    @property
    def temperature(self):
        return self.epsilon / KB_SI

    @property
    def diffusion(self):
        return self.sigma ** 2 / self.time

    @property
    def viscosity(self):
        return self.epsilon * self.time / self.sigma ** 3

    @property
    def pressure(self):
        return self.epsilon / self.sigma ** 3

    @property
    def number_density(self):
        return 1.0 / self.sigma ** 3

    def acceleration(self):
        return self.velocity / self.time


ARGON = LJUnits()
