"""Self-gravity of a homogeneous sphere in the Gaussian (harmonic) scheme.

Lengths entering the polynomial branch are measured in units of the sphere
radius ``R``; the crossover between the polynomial and Coulomb branches sits
at ``d = 2R``.  The spring constant ``k(<r^2>)`` is defined so that
``dV_cons/d<r^2> = k/2`` with ``V_cons(<r^2>) = V_eff(sqrt(<r^2>))``.
"""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .constants import CONSTANTS
from .exceptions import DomainError, NumericalError
from .state import GaussianState, NanosphereSpec

G = CONSTANTS.G
hbar = CONSTANTS.hbar


def _gm2(sphere):
    return G * sphere.mass**2


# Branch formulas in reduced units (x = d / R).  Plain arithmetic only, so the
# same code runs on floats, numpy arrays and arbitrary-precision numbers.
def v_inner(x):
    """Overlap branch of V_eff in units of G M^2 / R (x <= 2)."""
    return -6 * x**0 / 5 + x**2 / 2 - 3 * x**3 / 16 + x**5 / 160


def v_outer(x):
    """Coulomb branch of V_eff in units of G M^2 / R (x >= 2)."""
    return -1 / x


def kappa_inner(x):
    """Overlap branch of the spring shape (x <= 2)."""
    return 1 - 9 * x / 16 + x**3 / 32


def kappa_outer(x):
    """Coulomb branch of the spring shape (x >= 2)."""
    return 1 / x**3


def kappa(dt, amplification=1.0):
    """Dimensionless spring shape: k = (G M^2 / R^3) * kappa(sqrt(<r^2>)/R)."""
    dt = np.asarray(dt, dtype=float)
    inner = amplification * kappa_inner(dt)
    with np.errstate(divide="ignore"):
        outer = np.where(dt > 0, kappa_outer(np.where(dt > 0, dt, 1.0)), np.inf)
    out = np.where(dt <= 2.0, inner, outer)
    return out if out.ndim else float(out)


def v_eff(d, sphere: NanosphereSpec):
    """Effective self-interaction energy (J) of two copies of the sphere at distance ``d``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be non-negative")
    R = sphere.radius
    x = d / R
    coulomb = v_outer(np.where(x > 0, x, 1.0))
    out = _gm2(sphere) / R * np.where(x <= 2.0, v_inner(x), coulomb)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SpringModel:
    """Spread-dependent harmonic spring standing in for self-gravity.

    ``amplification`` multiplies the short-distance (d <= 2R) branch only,
    mimicking the extra self-energy of the nuclei.
    """

    sphere: NanosphereSpec
    amplification: float = 1.0

    def __post_init__(self):
        if self.amplification < 1:
            raise DomainError("amplification must be >= 1")

    @property
    def crossover(self) -> float:
        return 2.0 * self.sphere.radius

    @property
    def k_scale(self) -> float:
        """G M^2 / R^3 in N/m."""
        return _gm2(self.sphere) / self.sphere.radius**3

    @property
    def coupling(self) -> float:
        """Dimensionless gravity strength g = G M^3 R / hbar^2."""
        s = self.sphere
        return G * s.mass**3 * s.radius / hbar**2


def spring_k(r2, model: SpringModel):
    """Spring constant (N/m) at second moment ``r2`` (m^2)."""
    r2 = np.asarray(r2, dtype=float)
    if np.any(r2 < 0):
        raise DomainError("r2 must be non-negative")
    dt = np.sqrt(r2) / model.sphere.radius
    out = model.k_scale * np.asarray(kappa(dt, model.amplification))
    return out if out.ndim else float(out)


def v_cons(r2, model: SpringModel):
    """Conserved potential (J): antiderivative of k/2 in <r^2>, zero at infinity."""
    r2 = np.asarray(r2, dtype=float)
    if np.any(r2 < 0):
        raise DomainError("r2 must be non-negative")
    s = model.sphere
    d = np.sqrt(r2)
    v_cross = -_gm2(s) / (2 * s.radius)
    inner = model.amplification * (v_eff(np.minimum(d, 2 * s.radius), s) - v_cross) + v_cross
    with np.errstate(divide="ignore"):
        outer = -_gm2(s) / np.where(d > 0, d, 1.0)
    out = np.where(d <= 2 * s.radius, inner, outer)
    return out if out.ndim else float(out)


def internal_kinetic_energy(state: GaussianState, mass: float) -> float:
    """Kinetic energy in the frame co-moving with the packet centre."""
    A = state.A
    return 1.5 * hbar**2 / mass * abs(A) ** 2 / A.real


def conserved_energy(state: GaussianState, model: SpringModel) -> float:
    """Conserved quantity of the Gaussian self-gravity dynamics (J).

    Depends on ``A`` only, so it is unchanged by translations and boosts.
    """
    return internal_kinetic_energy(state, model.sphere.mass) + float(v_cons(state.r2, model))


class BoundState(NamedTuple):
    spread: float
    A_static: float
    energy: float
    regime: str


def classify_regime(spread: float, radius: float) -> str:
    if spread >= 2 * radius:
        return "single_particle"
    if spread <= 0.1 * radius:
        return "macroscopic"
    return "mesoscopic"


def _fixed_point_residual(x, g, amp):
    # x = log(a), a = A R^2; bound states satisfy a^2 = (g / 4) kappa(dt)
    a = math.exp(x)
    dt = math.sqrt(0.75 / a)
    return 2.0 * x - math.log(0.25 * g * kappa(dt, amp))


def _fixed_points(model: SpringModel):
    g = model.coupling
    amp = model.amplification
    a_single = (0.25 * g * (4.0 / 3.0) ** 1.5) ** 2
    a_macro = math.sqrt(0.25 * g * amp)
    lo = math.log(min(a_single, a_macro)) - 5.0
    hi = math.log(max(a_single, a_macro)) + 5.0
    xs = np.linspace(lo, hi, 4001)
    fs = np.array([_fixed_point_residual(x, g, amp) for x in xs])
    roots = []
    for i in np.nonzero(np.sign(fs[:-1]) != np.sign(fs[1:]))[0]:
        x = brentq(_fixed_point_residual, xs[i], xs[i + 1], args=(g, amp), xtol=1e-15, rtol=1e-15, maxiter=500)
        # sign changes across the amplification step at d = 2R are not roots
        if abs(_fixed_point_residual(x, g, amp)) < 1e-9:
            roots.append(math.exp(x))
    return roots


def bound_state(model: SpringModel) -> BoundState:
    """Static Gaussian in which free dispersion balances self-gravity (dA/dt = 0).

    When several fixed points exist the lowest-energy one is returned.
    """
    roots = _fixed_points(model)
    if not roots:
        raise NumericalError(f"no bound state found (g={model.coupling:.3e}, amplification={model.amplification})")
    R = model.sphere.radius
    best = None
    for a in roots:
        A = a / R**2
        state = GaussianState(A)
        e = conserved_energy(state, model)
        s = math.sqrt(state.r2)
        cand = BoundState(s, A, e, classify_regime(s, R))
        if best is None or cand.energy < best.energy:
            best = cand
    return best


def fixed_point_residual(bound: BoundState, model: SpringModel) -> float:
    """Relative residual of A = sqrt(k M) / (2 hbar) at the bound state."""
    k = spring_k(3.0 / (4.0 * bound.A_static), model)
    target = math.sqrt(k * model.sphere.mass) / (2 * hbar)
    return abs(bound.A_static - target) / target


class CriticalLambda(NamedTuple):
    value: float  # k(<r^2_BS>) / (2 hbar) from the solved bound state
    estimate: float  # order-of-magnitude law for the bound-state regime
    single_particle_law: float  # G^4 M^11 / hbar^7
    macroscopic_law: float  # G M^2 / (R^3 hbar)
    bound: BoundState


def critical_lambda(model: SpringModel) -> CriticalLambda:
    """Decoherence strength at which decoherence and self-gravity compete (m^-2 s^-1)."""
    bs = bound_state(model)
    s = model.sphere
    M, R = s.mass, s.radius
    value = float(spring_k(bs.spread**2, model)) / (2 * hbar)
    sp_law = G**4 * M**11 / hbar**7
    mac_law = G * M**2 / (R**3 * hbar)
    estimate = sp_law if bs.regime == "single_particle" else mac_law
    return CriticalLambda(value, estimate, sp_law, mac_law, bs)


# calibrated so that a silica-density (2600 kg/m^3) sphere gives 8000
_DEFAULT_NUCLEUS_RADIUS = 5e-12
_DEFAULT_NUCLEUS_MASS = 8000.0 * (4.0 / 3.0) * math.pi * 2600.0 * _DEFAULT_NUCLEUS_RADIUS**3


@dataclass(frozen=True)
class NucleusSpec:
    mass: float = _DEFAULT_NUCLEUS_MASS
    radius: float = _DEFAULT_NUCLEUS_RADIUS

    def __post_init__(self):
        if not (self.mass > 0 and self.radius > 0):
            raise DomainError("nucleus mass and radius must be positive")


def structural_amplification(sphere: NanosphereSpec, nucleus: NucleusSpec = NucleusSpec()) -> float:
    """Ratio of nuclear to bulk mass density, (m/r^3)/(M/R^3)."""
    return (nucleus.mass / nucleus.radius**3) / (sphere.mass / sphere.radius**3)


class BoundPair(NamedTuple):
    inner: BoundState  # with structural amplification (metastable)
    outer: BoundState  # without amplification
    distinct: bool


def metastable_pair(sphere: NanosphereSpec, nucleus: NucleusSpec = NucleusSpec()) -> BoundPair:
    amp = max(1.0, structural_amplification(sphere, nucleus))
    outer = bound_state(SpringModel(sphere))
    inner = bound_state(SpringModel(sphere, amp))
    distinct = outer.spread / inner.spread > 1 + 1e-9
    return BoundPair(inner, outer, distinct)


def velocity_ratio(sphere: NanosphereSpec, temperature: float, bound: BoundState) -> float:
    """Thermal over quantum velocity, sqrt(2 k T / M) / (h / (M spread))."""
    if temperature < 0:
        raise DomainError("temperature must be non-negative")
    M = sphere.mass
    v_thermal = math.sqrt(2 * CONSTANTS.k_B * temperature / M)
    v_quant = CONSTANTS.h / (M * bound.spread)
    return v_thermal / v_quant
