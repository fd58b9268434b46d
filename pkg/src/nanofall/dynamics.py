"""Deterministic evolution of the Gaussian wavefunction between jumps.

Three channels act on ``exp(-A r^2 + B.x + C)``:

* free Schrodinger dispersion,
* self-gravity, through the spread-dependent spring ``k(<r^2>)`` of
  :mod:`nanofall.self_gravity`,
* continuous (QMUPL-type) decoherence, adding a real constant ``Lambda`` to
  ``dA/dt``.

Both the spring and the decoherence term are centred on the packet's own
centre ``mu``, so they reshape the packet without pushing it around.  The
resulting closed system is

    dA/dt = -2i hbar A^2 / M + s
    dB/dt = -2i hbar A B / M + 2 s mu
    dC/dt = -i hbar (6 A - B.B) / (2 M) - s mu.mu

with ``s = i k / (2 hbar) + Lambda``.  Numerical work is done in the
dimensionless variables of :mod:`nanofall._kernels`.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from .constants import CONSTANTS
from .exceptions import DomainError, NumericalError
from .self_gravity import SpringModel, critical_lambda, spring_k
from .state import GaussianState, NanosphereSpec, centre

hbar = CONSTANTS.hbar


@dataclass(frozen=True)
class EvolutionMode:
    """Which deterministic channels are active.

    Parameters
    ----------
    gravity : bool
        Switch the self-gravity spring on.
    qmupl_lambda : float
        Continuous decoherence strength in m^-2 s^-1 (0 disables it).
    spring : SpringModel, optional
        Spring to use when ``gravity`` is on; defaults to the unamplified
        spring of the sphere passed to the evolution call.
    """

    gravity: bool = False
    qmupl_lambda: float = 0.0
    spring: SpringModel | None = None

    def __post_init__(self):
        if not (self.qmupl_lambda >= 0 and math.isfinite(self.qmupl_lambda)):
            raise DomainError(f"qmupl_lambda must be finite and >= 0, got {self.qmupl_lambda}")

    def spring_for(self, sphere: NanosphereSpec) -> SpringModel:
        if self.spring is not None:
            return self.spring
        return SpringModel(sphere)


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances of the adaptive Dormand-Prince 5(4) stepper.

    Tolerances apply to the dimensionless state.  ``max_step`` is in seconds.
    ``dense_output`` is accepted for interface compatibility; stop times are
    always hit exactly by clipping the last step of a segment.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-20
    max_step: float = math.inf
    dense_output: bool = False

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("integrator tolerances must be positive")
        if not self.max_step > 0:
            raise DomainError("max_step must be positive")


def time_unit(sphere: NanosphereSpec) -> float:
    """M R^2 / hbar, the time unit of the dimensionless equations (s)."""
    return sphere.mass * sphere.radius**2 / hbar


def kernel_params(mode: EvolutionMode, sphere: NanosphereSpec):
    """(g, amplification, lambda_hat) for the compiled right-hand side."""
    R, M = sphere.radius, sphere.mass
    if mode.gravity:
        spring = mode.spring_for(sphere)
        if spring.sphere != sphere:
            raise DomainError("spring model belongs to a different sphere")
        g, amp = spring.coupling, spring.amplification
    else:
        g, amp = 0.0, 1.0
    lam = mode.qmupl_lambda * M * R**4 / hbar
    return g, amp, lam


def to_dimless(state: GaussianState, radius: float) -> np.ndarray:
    y = np.empty(5, dtype=np.complex128)
    a = state.A * radius**2
    w = 1.0 / a
    y[0] = w
    y[1:4] = state.B_array * radius * w
    y[4] = state.C
    return y


def from_dimless(y, radius: float) -> GaussianState:
    a = 1.0 / complex(y[0])
    b = np.asarray(y[1:4]) * a
    return GaussianState(a / radius**2, tuple(b / radius), complex(y[4])).normalized()


def derivative(state: GaussianState, mode: EvolutionMode, sphere: NanosphereSpec):
    """Time derivatives (dA/dt, dB/dt, dC/dt) in SI units.

    Returns
    -------
    tuple
        ``(dA, dB, dC)`` with ``dB`` a complex array of length 3.
    """
    M = sphere.mass
    A = state.A
    B = state.B_array
    mu = centre(state)
    s = complex(mode.qmupl_lambda)
    if mode.gravity:
        s += 1j * float(spring_k(state.r2, mode.spring_for(sphere))) / (2 * hbar)
    dA = -2j * hbar * A**2 / M + s
    dB = -2j * hbar * A * B / M + 2 * s * mu
    dC = -1j * hbar * (6 * A - B @ B) / (2 * M) - s * float(mu @ mu)
    return dA, dB, dC


def evolve(
    state: GaussianState,
    duration: float,
    mode: EvolutionMode,
    sphere: NanosphereSpec,
    config: IntegratorConfig = IntegratorConfig(),
) -> GaussianState:
    """Integrate the Gaussian equations of motion for ``duration`` seconds.

    Raises
    ------
    NumericalError
        If Re(A) leaves the positive half-line or the step size underflows;
        the simulated time of the failure is attached.
    """
    if not duration >= 0:
        raise DomainError(f"duration must be non-negative, got {duration}")
    if duration == 0:
        return state
    T0 = time_unit(sphere)
    g, amp, lam = kernel_params(mode, sphere)
    y = to_dimless(state, sphere.radius)
    max_step = config.max_step / T0 if math.isfinite(config.max_step) else math.inf
    status, _, t_reached = _kernels.integrate_segment(
        y, 0.0, duration / T0, 0.0, g, amp, lam, config.rel_tol, config.abs_tol, max_step
    )
    if status != _kernels.OK or not np.all(np.isfinite(y)):
        reason = "Re(A) <= 0" if status == _kernels.NONPOSITIVE_WIDTH else "step size underflow"
        raise NumericalError(f"integration failed ({reason}) at t={t_reached * T0:.6g} s", time=t_reached * T0)
    return from_dimless(y, sphere.radius)


def free_closed_form(state: GaussianState, t: float, sphere: NanosphereSpec) -> GaussianState:
    """Exact free evolution, A(t) = A0 / D with D = 1 + 2i hbar A0 t / M.

    ``B`` follows as ``B0 / D`` and ``C`` as
    ``C0 - (3/2) log D + i hbar (B0.B0) t / (2 M D)``.
    """
    if not t >= 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if t == 0:
        return state
    M = sphere.mass
    D = 1 + 2j * hbar * state.A * t / M
    B0 = state.B_array
    C = state.C - 1.5 * np.log(D) + 1j * hbar * (B0 @ B0) * t / (2 * M * D)
    return GaussianState(state.A / D, tuple(B0 / D), C).normalized()


def qmupl_equilibrium_check(mode: EvolutionMode, sphere: NanosphereSpec) -> float:
    """Relative mismatch |Lambda - k(<r^2_BS>)/(2 hbar)| / Lambda between decoherence and gravity."""
    if not mode.gravity or not mode.qmupl_lambda > 0:
        raise DomainError("equilibrium check needs gravity on and qmupl_lambda > 0")
    crit = critical_lambda(mode.spring_for(sphere)).value
    return abs(mode.qmupl_lambda - crit) / mode.qmupl_lambda
