"""Decoherence parameter catalog and experiment-planning calculators.

Every mechanism is summarized by a localization rate ``gamma`` (s^-1), an
inverse squared localization length ``alpha`` (m^-2) and their product
``Lambda = gamma * alpha`` (m^-2 s^-1).  Environmental mechanisms offer two
evaluation paths: ``method="exact"`` uses the microscopic formula and
``method="law"`` the rounded power law in SI numbers (R in m, T in K).
"""

from dataclasses import dataclass
import math
from typing import NamedTuple

from .constants import CONSTANTS
from .exceptions import DomainError
from .self_gravity import SpringModel, critical_lambda
from .state import EnvironmentSpec, NanosphereSpec

hbar = CONSTANTS.hbar
k_B = CONSTANTS.k_B
c = CONSTANTS.c

MODELS = ("gas", "bb_scatter", "bb_emission", "GRW", "CSL", "QG", "DP")

GRW_GAMMA0 = 1e-16
GRW_ALPHA0 = 1e14
CSL_LENGTH = 1e-7


class ModelParams(NamedTuple):
    model: str
    gamma: float
    alpha: float
    Lambda: float


def _params(model, alpha, Lambda=None, gamma=None) -> ModelParams:
    # exactly one of Lambda / gamma is given; the other follows from alpha
    if Lambda is None:
        Lambda = gamma * alpha
    else:
        gamma = Lambda / alpha
    return ModelParams(model, float(gamma), float(alpha), float(Lambda))


def _check_method(method):
    if method not in ("exact", "law"):
        raise DomainError(f"method must be 'exact' or 'law', got {method!r}")


def gas_params(env: EnvironmentSpec, sphere: NanosphereSpec, method="exact") -> ModelParams:
    """Scattering of residual gas molecules.

    ``exact``: alpha = m_a k_B T / (2 pi hbar^2) and
    Lambda = 8 sqrt(2 pi) / (3 sqrt 3) * m_a v_a p R^2 / hbar^2.
    ``law`` (low-pressure power laws): alpha = 1e19 T, Lambda = 1e30 R^2 T^1.5.
    """
    _check_method(method)
    T = env.gas_temperature
    R = sphere.radius
    if method == "law":
        return _params("gas", 1e19 * T, Lambda=1e30 * R**2 * T**1.5)
    m_a = env.gas_molecule_mass
    alpha = m_a * k_B * T / (2 * math.pi * hbar**2)
    if env.gas_pressure == 0:
        return ModelParams("gas", 0.0, alpha, 0.0)
    pref = 8 * math.sqrt(2 * math.pi) / (3 * math.sqrt(3))
    Lam = pref * m_a * env.mean_gas_speed * env.gas_pressure * R**2 / hbar**2
    return _params("gas", alpha, Lambda=Lam)


def blackbody_params(env: EnvironmentSpec, sphere: NanosphereSpec, method="exact"):
    """Scattering of environmental thermal photons and emission by the hot sphere.

    Returns
    -------
    (ModelParams, ModelParams)
        Scattering then emission.  Only the scattering ``alpha`` has an exact
        form; both ``Lambda`` values and the emission ``alpha`` are power laws.
    """
    _check_method(method)
    T = env.environment_temperature
    Ti = sphere.internal_temperature
    R = sphere.radius
    if method == "exact":
        a_sc = (k_B * T / (math.pi**1.5 * hbar * c)) ** 2
    else:
        a_sc = 4e4 * T**2
    L_sc = 1e36 * R**6 * T**9
    scatter = _params("bb_scatter", a_sc, Lambda=L_sc) if a_sc > 0 else ModelParams("bb_scatter", 0.0, 0.0, 0.0)
    a_em = 4e4 * Ti**2
    L_em = 5.0 / 6.0 * 1e9 * R**3 * Ti**6
    emission = _params("bb_emission", a_em, Lambda=L_em) if a_em > 0 else ModelParams("bb_emission", 0.0, 0.0, 0.0)
    return scatter, emission


def grw_params(sphere: NanosphereSpec, gamma0=GRW_GAMMA0, alpha0=GRW_ALPHA0) -> ModelParams:
    """Mass-proportional spontaneous localization: gamma = N gamma0."""
    if not (gamma0 >= 0 and alpha0 > 0):
        raise DomainError("need gamma0 >= 0 and alpha0 > 0")
    return _params("GRW", alpha0, gamma=sphere.nucleon_count * gamma0)


def csl_scale(radius: float, length: float = CSL_LENGTH) -> float:
    """Form factor of a uniform sphere for a Gaussian smearing ``length``.

    f(R) = (3/2) x^4 [1 - 2 x^2 + (1 + 2 x^2) exp(-1/x^2)],  x = length / R.

    It tends to 1/4 for R << length and to (3/2) x^4 for R >> length.  The
    bracket cancels like u^2 with u = (R/length)^2, losing about
    -3 log10(u) digits, so for R < length the (entire) power series
    (3/2) sum_{k>=2} (-1)^k (k-1)/(k+1)! u^(k-2) is summed instead.
    """
    if not (radius > 0 and length > 0):
        raise DomainError("radius and length must be positive")
    r = radius / length
    if r < 1.0:
        u = r * r
        total = 0.0
        for k in range(2, 22):
            total += (-1) ** k * (k - 1) / math.factorial(k + 1) * u ** (k - 2)
        return 1.5 * total
    x2 = 1.0 / (r * r)
    return 1.5 * x2 * x2 * (1 - 2 * x2 + (1 + 2 * x2) * math.exp(-1.0 / x2))


def csl_params(sphere: NanosphereSpec, gamma0=GRW_GAMMA0, alpha0=GRW_ALPHA0, length=CSL_LENGTH) -> ModelParams:
    """Continuous spontaneous localization: gamma = N^2 gamma0 f(R)."""
    if not (gamma0 >= 0 and alpha0 > 0):
        raise DomainError("need gamma0 >= 0 and alpha0 > 0")
    N = sphere.nucleon_count
    return _params("CSL", alpha0, gamma=N**2 * gamma0 * csl_scale(sphere.radius, length))


def qg_params(sphere: NanosphereSpec, planck_mass: float = CONSTANTS.m_planck_reduced) -> ModelParams:
    """Quantum-gravity induced decoherence.

    Lambda = c^4 M^2 m0^4 / (hbar^3 mP^3), alpha = c^2 m0^4 / (hbar^2 mP^2).
    The reduced Planck mass is the default.
    """
    m0 = CONSTANTS.m_nucleon
    M = sphere.mass
    Lam = c**4 * M**2 * m0**4 / (hbar**3 * planck_mass**3)
    alpha = c**2 * m0**4 / (hbar**2 * planck_mass**2)
    return _params("QG", alpha, Lambda=Lam)


def dp_params(sphere: NanosphereSpec) -> ModelParams:
    """Gravity-induced collapse: Lambda = G M^2 / (2 R^3 hbar), alpha = R^-2."""
    M, R = sphere.mass, sphere.radius
    Lam = CONSTANTS.G * M**2 / (2 * R**3 * hbar)
    return _params("DP", R**-2, Lambda=Lam)


def total_lambda(params) -> float:
    return float(sum(p.Lambda for p in params))


def regime(state_spread: float, alpha: float, band: float = 10.0) -> str:
    """``"LWL"``, ``"SWL"`` or ``"boundary"`` from comparing alpha^-1/2 with the spread."""
    if not (state_spread > 0 and alpha > 0):
        raise DomainError("spread and alpha must be positive")
    lam = alpha**-0.5
    if lam > band * state_spread:
        return "LWL"
    if lam * band < state_spread:
        return "SWL"
    return "boundary"


@dataclass(frozen=True)
class SensitivityInput:
    """Velocity resolution ``delta_v`` (m/s) over flight ``time`` (s) for mass ``mass`` (kg).

    ``accuracy`` is the relative precision on the squared spread.
    """

    delta_v: float
    time: float
    mass: float
    accuracy: float

    def __post_init__(self):
        if not (self.delta_v > 0 and self.time > 0 and self.mass > 0):
            raise DomainError("delta_v, time and mass must be positive")
        if not 0 <= self.accuracy <= 1:
            raise DomainError("accuracy must lie in [0, 1]")


def discriminable_lambda(inp: SensitivityInput) -> float:
    """Smallest Lambda whose t^3 term reaches ``accuracy`` of the dispersive t^2 term.

    Solves Lambda hbar^2 t^3 / (2 M^2) = eps * 9 dv^2 t^2 / 4.
    """
    return 9 * inp.accuracy * inp.delta_v**2 * inp.mass**2 / (2 * hbar**2 * inp.time)


def classicality_mu(gamma0: float) -> float:
    """-log10 of the per-electron localization rate, mu = -log10 gamma0 - 2 log10(m_e / amu)."""
    if not gamma0 > 0:
        raise DomainError("gamma0 must be positive")
    return -math.log10(gamma0) - 2 * math.log10(CONSTANTS.m_electron / CONSTANTS.amu)


def london_min_separation(sphere: NanosphereSpec, flight_time: float, max_drift: float,
                          hamaker: float = CONSTANTS.hamaker_A) -> float:
    """Separation at which the mutual van der Waals pull moves a sphere by at most ``max_drift``.

    Uses the potential -(3/2) A R^2 / d^2, force 3 A R^2 / d^3, and
    drift F t^2 / (2 M).
    """
    if not (flight_time >= 0 and max_drift > 0):
        raise DomainError("need flight_time >= 0 and max_drift > 0")
    M, R = sphere.mass, sphere.radius
    return (3 * hamaker * R**2 * flight_time**2 / (2 * M * max_drift)) ** (1.0 / 3.0)


def cooling_budget(photon_count: float, wavelength: float, sphere: NanosphereSpec, v_initial: float):
    """Momentum of ``photon_count`` photons relative to M v, and the single-photon recoil velocity."""
    if not (photon_count >= 0 and wavelength > 0 and v_initial > 0):
        raise DomainError("need photon_count >= 0 and positive wavelength, v_initial")
    p_photon = CONSTANTS.h / wavelength
    M = sphere.mass
    return photon_count * p_photon / (M * v_initial), p_photon / M


# Published order-of-magnitude values, (Lambda, gamma) per radius.
REFERENCE_NONEXOTIC = {
    1e-5: {"gas": (6.4e21, 4e1), "bb_scatter": (6.5e16, 6.5e9), "bb_emission": (5e13, 3e2), "crit": 1e17},
    1e-6: {"gas": (6.4e19, 4e-1), "bb_scatter": (6.5e10, 6.5e3), "bb_emission": (5e10, 3e-1), "crit": 1e14},
    1e-7: {"gas": (6.4e17, 4e-3), "bb_scatter": (6.5e4, 6.5e-3), "bb_emission": (5e7, 3e-4), "crit": 1e11},
    1e-8: {"gas": (6.4e15, 4e-5), "bb_scatter": (6.5e-2, 6.5e-9), "bb_emission": (5e4, 3e-7), "crit": 1e-22},
}
REFERENCE_EXOTIC = {
    1e-5: {"GRW": (6e13, 6e-1), "CSL": (5e21, 5e7), "QG": (3e31, 3e37), "DP": (5e19, 5e9)},
    1e-6: {"GRW": (6e10, 6e-4), "CSL": (5e19, 5e5), "QG": (3e25, 3e31), "DP": (5e16, 5e4)},
    1e-7: {"GRW": (6e7, 6e-7), "CSL": (2.5e18, 2.5e4), "QG": (3e19, 3e25), "DP": (5e13, 5e-1)},
    1e-8: {"GRW": (6e4, 6e-10), "CSL": (1e16, 1e2), "QG": (3e13, 3e19), "DP": (5e10, 5e-6)},
}
REFERENCE_DENSITY = 2600.0


def all_params(sphere: NanosphereSpec, env: EnvironmentSpec = EnvironmentSpec(), method="exact"):
    """Every catalog mechanism for one sphere, keyed by model id."""
    sc, em = blackbody_params(env, sphere, method)
    out = [gas_params(env, sphere, method), sc, em, grw_params(sphere), csl_params(sphere),
           qg_params(sphere), dp_params(sphere)]
    return {p.model: p for p in out}


def catalog(radii=(1e-5, 1e-6, 1e-7, 1e-8), density=REFERENCE_DENSITY, env: EnvironmentSpec = EnvironmentSpec()):
    """JSON-ready catalog with computed and reference values side by side.

    Each entry carries ``ratio_Lambda`` and ``ratio_gamma`` (computed over
    reference) whenever a reference value exists.
    """
    rows = []
    for R in radii:
        sphere = NanosphereSpec(R, density)
        ref = {**REFERENCE_NONEXOTIC.get(R, {}), **REFERENCE_EXOTIC.get(R, {})}
        entries = {}
        for method in ("exact", "law"):
            for name, p in all_params(sphere, env, method).items():
                if method == "law" and name not in ("gas", "bb_scatter"):
                    continue
                key = name if method == "exact" else f"{name}_law"
                e = {"gamma": p.gamma, "alpha": p.alpha, "Lambda": p.Lambda}
                if name in ref:
                    L_ref, g_ref = ref[name]
                    e.update(ref_Lambda=L_ref, ref_gamma=g_ref,
                             ratio_Lambda=p.Lambda / L_ref, ratio_gamma=p.gamma / g_ref)
                entries[key] = e
        crit = critical_lambda(SpringModel(sphere))
        entries["crit"] = {"Lambda": crit.value, "estimate": crit.estimate, "regime": crit.bound.regime}
        if "crit" in ref:
            entries["crit"].update(ref_Lambda=ref["crit"], ratio_estimate=crit.estimate / ref["crit"],
                                   ratio_Lambda=crit.value / ref["crit"])
        rows.append({"radius": R, "density": density, "mass": sphere.mass, "models": entries})
    return {
        "environment": {"gas_temperature": env.gas_temperature, "gas_pressure": env.gas_pressure,
                        "environment_temperature": env.environment_temperature},
        "rows": rows,
    }
