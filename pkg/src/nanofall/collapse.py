"""GRW-type jump process acting on the Gaussian wavefunction.

A jump multiplies the wavefunction by ``exp(-alpha |x - x0|^2 / 2)`` and
renormalizes.  For a Gaussian input this is again Gaussian with

    A -> A + alpha / 2,    B -> B + alpha x0,

and the jump centre ``x0`` is distributed per axis as a normal variable with
mean ``mu`` (the packet centre) and variance ``1/(4 Re A) + 1/(2 alpha)``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import DomainError
from .state import GaussianState, centre, spread


@dataclass(frozen=True)
class JumpChannel:
    """Independent Poisson jump mechanism.

    Parameters
    ----------
    gamma : float
        Jump rate (s^-1).
    alpha : float
        Inverse squared localization length (m^-2).
    label : str
        Name of the mechanism, used for bookkeeping and post-selection.
    """

    gamma: float
    alpha: float
    label: str = "grw"

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be finite and > 0, got {self.alpha}")

    @property
    def Lambda(self) -> float:
        return self.gamma * self.alpha


@dataclass(frozen=True)
class JumpEvent:
    time: float
    location: np.ndarray
    label: str
    pre_spread: float
    post_spread: float


def sample_jump_times(channels, horizon: float, rng: np.random.Generator):
    """Poisson jump schedule for every channel on ``[0, horizon]``.

    Returns
    -------
    times : ndarray
        Sorted jump times.
    channel_index : ndarray of int
        Index into ``channels`` for each time.
    """
    if not horizon >= 0:
        raise DomainError(f"horizon must be non-negative, got {horizon}")
    times = []
    index = []
    for i, ch in enumerate(channels):
        n = int(rng.poisson(ch.gamma * horizon)) if ch.gamma > 0 else 0
        times.append(rng.uniform(0.0, horizon, size=n))
        index.append(np.full(n, i, dtype=np.int64))
    if not times:
        return np.empty(0), np.empty(0, dtype=np.int64)
    t = np.concatenate(times)
    idx = np.concatenate(index)
    order = np.argsort(t, kind="stable")
    return t[order], idx[order]


def jump_location_variance(state: GaussianState, alpha: float) -> float:
    """Per-axis variance of the jump centre."""
    return 1.0 / (4.0 * state.A.real) + 1.0 / (2.0 * alpha)


def sample_jump_location(state: GaussianState, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``x0`` from the jump-location density of ``state``."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    sigma = math.sqrt(jump_location_variance(state, alpha))
    return centre(state) + sigma * rng.standard_normal(3)


def apply_jump(state: GaussianState, x0, alpha: float) -> GaussianState:
    """Multiply by the jump factor centred at ``x0`` and renormalize."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    x0 = np.asarray(x0, dtype=float).reshape(3)
    A = state.A + 0.5 * alpha
    B = state.B_array + alpha * x0
    C = state.C - 0.5 * alpha * float(x0 @ x0)
    return GaussianState(A, tuple(B), C).normalized()


def jump(state: GaussianState, channel: JumpChannel, time: float, rng: np.random.Generator):
    """Sample a location, apply the jump and return ``(new_state, JumpEvent)``."""
    x0 = sample_jump_location(state, channel.alpha, rng)
    new = apply_jump(state, x0, channel.alpha)
    return new, JumpEvent(time, x0, channel.label, spread(state), spread(new))
