"""Nanosphere, environment and Gaussian centre-of-mass wavefunction types.

The centre-of-mass wavefunction is always an isotropic complex Gaussian

    psi(x) = exp(-A r^2 + B . x + C)

and the *spread* is the full three-dimensional second moment about the
packet's own centre, ``sqrt(<|x - mu|^2>) = sqrt(3 / (4 Re A))``.  The
per-axis standard deviation is ``spread / sqrt(3)``.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .constants import CONSTANTS
from .exceptions import DomainError

hbar = CONSTANTS.hbar

# number density used for the default ultra-high-vacuum gas environment
DEFAULT_GAS_DENSITY = 300e6  # molecules per m^3 (a few hundred per cm^3)
AIR_MOLECULE_MASS = 28.97 * CONSTANTS.amu


@dataclass(frozen=True)
class NanosphereSpec:
    """Homogeneous sphere of radius ``radius`` (m) and mass density ``density`` (kg/m^3)."""

    radius: float
    density: float
    internal_temperature: float = 2000.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius}")
        if not self.density > 0:
            raise DomainError(f"density must be positive, got {self.density}")
        if self.internal_temperature < 0:
            raise DomainError("internal_temperature must be non-negative")
        if self.nucleon_count < 1:
            raise DomainError(f"sphere holds fewer than one nucleon (N={self.nucleon_count:.3g})")

    @property
    def mass(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3 * self.density

    @property
    def nucleon_count(self) -> float:
        return self.mass / CONSTANTS.amu


def nucleon_count(sphere: NanosphereSpec) -> float:
    return sphere.nucleon_count


@dataclass(frozen=True)
class EnvironmentSpec:
    """Residual gas and thermal radiation surrounding the sphere.

    ``gas_pressure=None`` selects an ultra-high vacuum holding
    ``DEFAULT_GAS_DENSITY`` molecules per m^3 at ``gas_temperature``.
    """

    gas_temperature: float = 16.0
    gas_pressure: float | None = None
    gas_molecule_mass: float = AIR_MOLECULE_MASS
    environment_temperature: float = 16.0

    def __post_init__(self):
        if self.gas_pressure is None:
            p = DEFAULT_GAS_DENSITY * CONSTANTS.k_B * self.gas_temperature
            object.__setattr__(self, "gas_pressure", p)
        for name in ("gas_temperature", "gas_pressure", "gas_molecule_mass", "environment_temperature"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        if self.gas_pressure > 0 and not self.gas_temperature > 0:
            raise DomainError("gas_temperature must be positive when gas_pressure > 0")

    @property
    def mean_gas_speed(self) -> float:
        """Mean Maxwell speed sqrt(8 k T / (pi m))."""
        if self.gas_temperature == 0:
            return 0.0
        return math.sqrt(8 * CONSTANTS.k_B * self.gas_temperature / (math.pi * self.gas_molecule_mass))

    @property
    def gas_number_density(self) -> float:
        if self.gas_pressure == 0:
            return 0.0
        return self.gas_pressure / (CONSTANTS.k_B * self.gas_temperature)


@dataclass(frozen=True)
class GaussianState:
    """Parameters of ``exp(-A r^2 + B.x + C)``.

    ``A`` in m^-2, ``B`` in m^-1 (three components), ``C`` dimensionless.
    """

    A: complex
    B: tuple = (0j, 0j, 0j)
    C: complex = 0j
    valid_norm: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "A", complex(self.A))
        b = tuple(complex(v) for v in np.ravel(self.B))
        if len(b) != 3:
            raise DomainError("B must have three components")
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", complex(self.C))
        if not (math.isfinite(self.A.real) and self.A.real > 0):
            raise DomainError(f"Re(A) must be positive and finite, got {self.A.real}")

    @property
    def B_array(self) -> np.ndarray:
        return np.array(self.B, dtype=complex)

    @property
    def r2(self) -> float:
        """Second moment <|x - mu|^2> in m^2."""
        return 3.0 / (4.0 * self.A.real)

    def log_norm(self) -> float:
        """log of the integral of |psi|^2."""
        a = self.A.real
        rb = self.B_array.real
        return 1.5 * math.log(math.pi / (2 * a)) + float(rb @ rb) / (2 * a) + 2 * self.C.real

    def normalized(self) -> "GaussianState":
        """Return the same state with Re(C) fixed so that the norm is one."""
        c = complex(self.C.real - 0.5 * self.log_norm(), self.C.imag)
        return replace(self, C=c, valid_norm=True)


def spread(state: GaussianState) -> float:
    return math.sqrt(state.r2)


def centre(state: GaussianState) -> np.ndarray:
    return state.B_array.real / (2 * state.A.real)


def mean_momentum(state: GaussianState) -> np.ndarray:
    mu = centre(state)
    return hbar * (state.B_array - 2 * state.A * mu).imag


def mean_velocity(state: GaussianState, sphere: NanosphereSpec) -> np.ndarray:
    return mean_momentum(state) / sphere.mass


def make_gaussian(spread, centre=(0.0, 0.0, 0.0), velocity=(0.0, 0.0, 0.0), sphere=None) -> GaussianState:
    """Real-width Gaussian with the requested spread, centre and mean velocity.

    ``sphere`` is only needed when ``velocity`` is non-zero.
    """
    if not spread > 0:
        raise DomainError(f"spread must be positive, got {spread}")
    mu = np.asarray(centre, dtype=float).reshape(3)
    v = np.asarray(velocity, dtype=float).reshape(3)
    A = 3.0 / (4.0 * spread**2)
    if np.any(v != 0):
        if sphere is None:
            raise DomainError("a NanosphereSpec is required to set a velocity")
        k = sphere.mass * v / hbar
    else:
        k = np.zeros(3)
    B = 2 * A * mu + 1j * k
    return GaussianState(A, tuple(B)).normalized()
