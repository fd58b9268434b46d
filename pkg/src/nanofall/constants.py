"""Physical constants (SI, CODATA 2018 via scipy.constants)."""

from dataclasses import dataclass
import math

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _sc.hbar
    G: float = _sc.G
    k_B: float = _sc.k
    c: float = _sc.c
    amu: float = _sc.atomic_mass
    m_electron: float = _sc.m_e
    m_nucleon: float = _sc.m_p
    # Planck mass sqrt(hbar c / G); the reduced form sqrt(hbar c / 8 pi G)
    # is what the quantum-gravity decoherence law is calibrated against.
    m_planck: float = math.sqrt(_sc.hbar * _sc.c / _sc.G)
    m_planck_reduced: float = math.sqrt(_sc.hbar * _sc.c / (8 * math.pi * _sc.G))
    hamaker_A: float = 1e-19
    atm: float = _sc.atm

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ValueError(f"constant {name} must be positive, got {value}")

    @property
    def h(self) -> float:
        return 2 * math.pi * self.hbar


CONSTANTS = PhysicalConstants()
