"""Monte-Carlo ensembles of jumping, dispersing and self-gravitating wave packets.

Each trajectory owns a counter-based random stream derived from
``(master_seed, trajectory_index)``, so results do not depend on how the
trajectories are scheduled over worker processes.  Trajectories are cut into
fixed-size chunks whose outputs are concatenated in index order before any
statistics are taken; the reduction is therefore bit-reproducible for any
worker count.

The observable is the spread of the ensemble density matrix,

    <r^2>_total(t) = mean_i <r^2>_i(t) + mean_i |mu_i(t) - mean_j mu_j(t)|^2,

the sum of the mean individual variance and the variance of the centres.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import _kernels
from .collapse import JumpChannel, JumpEvent, sample_jump_times
from .constants import CONSTANTS
from .dynamics import EvolutionMode, IntegratorConfig, kernel_params, time_unit, to_dimless
from .exceptions import DomainError, NumericalError
from .self_gravity import SpringModel
from .state import EnvironmentSpec, NanosphereSpec, make_gaussian

hbar = CONSTANTS.hbar

CHUNK_SIZE = 250
DEFAULT_SAMPLES = 200


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce an ensemble run.

    ``sample_times=None`` selects ``DEFAULT_SAMPLES`` evenly spaced intervals
    on ``[0, duration]`` (endpoints included).
    """

    sphere: NanosphereSpec
    initial_spread: float
    duration: float
    environment: EnvironmentSpec = EnvironmentSpec()
    initial_centre: tuple = (0.0, 0.0, 0.0)
    initial_velocity: tuple = (0.0, 0.0, 0.0)
    gravity: bool = False
    amplification: float = 1.0
    channels: tuple = ()
    qmupl_lambda: float = 0.0
    sample_times: tuple | None = None
    trajectory_count: int = 1
    master_seed: int = 0
    integrator: IntegratorConfig = IntegratorConfig()

    def __post_init__(self):
        if not self.initial_spread > 0:
            raise DomainError(f"initial_spread must be positive, got {self.initial_spread}")
        if not (self.duration >= 0 and math.isfinite(self.duration)):
            raise DomainError(f"duration must be finite and >= 0, got {self.duration}")
        if int(self.trajectory_count) != self.trajectory_count or self.trajectory_count < 1:
            raise DomainError("trajectory_count must be a positive integer")
        if self.master_seed < 0:
            raise DomainError("master_seed must be non-negative")
        object.__setattr__(self, "channels", tuple(self.channels))
        for ch in self.channels:
            if not isinstance(ch, JumpChannel):
                raise DomainError("channels must be JumpChannel instances")
        object.__setattr__(self, "initial_centre", tuple(float(v) for v in self.initial_centre))
        object.__setattr__(self, "initial_velocity", tuple(float(v) for v in self.initial_velocity))
        if len(self.initial_centre) != 3 or len(self.initial_velocity) != 3:
            raise DomainError("initial_centre and initial_velocity need three components")
        if self.sample_times is None:
            st = tuple(np.linspace(0.0, self.duration, DEFAULT_SAMPLES + 1).tolist())
        else:
            st = tuple(float(t) for t in self.sample_times)
        if len(st) == 0:
            raise DomainError("sample_times must not be empty")
        if any(b < a for a, b in zip(st, st[1:])):
            raise DomainError("sample_times must be sorted")
        if st[0] < 0 or st[-1] > self.duration:
            raise DomainError("sample_times must lie within [0, duration]")
        object.__setattr__(self, "sample_times", st)
        # validates qmupl_lambda and amplification
        self.mode

    @property
    def mode(self) -> EvolutionMode:
        spring = SpringModel(self.sphere, self.amplification) if self.gravity else None
        return EvolutionMode(self.gravity, self.qmupl_lambda, spring)

    @property
    def channel_lambda(self) -> float:
        return float(sum(ch.Lambda for ch in self.channels))

    def initial_state(self):
        return make_gaussian(self.initial_spread, self.initial_centre, self.initial_velocity, self.sphere)


@dataclass
class TrajectoryRecord:
    """Snapshots of one trajectory at the configured sample times."""

    times: np.ndarray
    A: np.ndarray
    B: np.ndarray
    spread: np.ndarray
    centre: np.ndarray
    velocity: np.ndarray
    jumps: list = field(default_factory=list)


@dataclass
class EnsembleSamples:
    """Per-trajectory observables, trajectory index along axis 0.

    ``r2`` is (n, T); ``centre`` and ``velocity`` are (n, T, 3);
    ``jump_counts`` is (n, number of channels).
    """

    times: np.ndarray
    r2: np.ndarray
    centre: np.ndarray
    velocity: np.ndarray
    jump_counts: np.ndarray
    channel_labels: tuple

    @property
    def count(self) -> int:
        return self.r2.shape[0]

    def select(self, keep) -> "EnsembleSamples":
        keep = np.asarray(keep)
        return EnsembleSamples(self.times, self.r2[keep], self.centre[keep], self.velocity[keep],
                               self.jump_counts[keep], self.channel_labels)


@dataclass
class EnsembleStats:
    """Spread statistics per sample time (all lengths in m, variances in m^2)."""

    times: np.ndarray
    mean_individual_variance: np.ndarray
    centre_variance: np.ndarray
    total_spread: np.ndarray
    standard_error: np.ndarray
    analytic_eq8: np.ndarray
    trajectory_count: int

    @property
    def individual_rms(self):
        return np.sqrt(self.mean_individual_variance)

    @property
    def centre_rms(self):
        return np.sqrt(self.centre_variance)

    def at(self, t: float) -> int:
        """Index of sample time ``t``."""
        return _time_index(self.times, t)


def _time_index(times, t):
    times = np.asarray(times)
    i = int(np.argmin(np.abs(times - t)))
    if times.size == 0 or abs(times[i] - t) > 1e-9 * max(1.0, abs(t)):
        raise DomainError(f"time {t} was not sampled")
    return i


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(master_seed), int(index)])))


def _schedule(config: ScenarioConfig, index: int):
    rng = trajectory_rng(config.master_seed, index)
    times, which = sample_jump_times(config.channels, config.duration, rng)
    z = rng.standard_normal((times.size, 3))
    return times, which, z


def _kernel_run(config: ScenarioConfig, index: int, y0, g, amp, lam, T0):
    R = config.sphere.radius
    jt, which, z = _schedule(config, index)
    alphas = np.array([ch.alpha for ch in config.channels]) * R**2
    ja = alphas[which] if jt.size else np.empty(0)
    sample_t = np.asarray(config.sample_times) / T0
    snaps = np.empty((sample_t.size, 5), dtype=np.complex128)
    info = np.empty((jt.size, 5))
    cfg = config.integrator
    max_step = cfg.max_step / T0 if math.isfinite(cfg.max_step) else math.inf
    closed = (g == 0.0) and (lam == 0.0)
    status, t_fail = _kernels.run_trajectory_kernel(
        y0, sample_t, jt / T0, ja, z, g, amp, lam, cfg.rel_tol, cfg.abs_tol, max_step, closed, snaps, info
    )
    if status != _kernels.OK:
        reason = "Re(A) <= 0" if status == _kernels.NONPOSITIVE_WIDTH else "step size underflow"
        raise NumericalError(f"trajectory {index} failed ({reason}) at t={t_fail * T0:.6g} s",
                             time=t_fail * T0, trajectory=index)
    return snaps, jt, which, info


def _observables(snaps, sphere: NanosphereSpec):
    """(A, B, r2, centre, velocity) in SI from dimensionless snapshots (..., 5)."""
    R, M = sphere.radius, sphere.mass
    a = 1.0 / snaps[..., 0]
    b = snaps[..., 1:4] * a[..., None]
    ra = a.real
    mu_hat = b.real / (2 * ra[..., None])
    r2 = 0.75 * R**2 / ra
    centre = mu_hat * R
    velocity = hbar / (M * R) * (b - 2 * a[..., None] * mu_hat).imag
    return a / R**2, b / R, r2, centre, velocity


def _prepare(config: ScenarioConfig):
    T0 = time_unit(config.sphere)
    g, amp, lam = kernel_params(config.mode, config.sphere)
    y0 = to_dimless(config.initial_state(), config.sphere.radius)
    return y0, g, amp, lam, T0


def run_trajectory(config: ScenarioConfig, trajectory_index: int) -> TrajectoryRecord:
    """Simulate one trajectory; deterministic in ``(config.master_seed, trajectory_index)``."""
    y0, g, amp, lam, T0 = _prepare(config)
    snaps, jt, which, info = _kernel_run(config, trajectory_index, y0, g, amp, lam, T0)
    A, B, r2, centre, velocity = _observables(snaps, config.sphere)
    R = config.sphere.radius
    jumps = [
        JumpEvent(float(t), info[k, :3] * R, config.channels[which[k]].label,
                  math.sqrt(0.75 / info[k, 3]) * R, math.sqrt(0.75 / info[k, 4]) * R)
        for k, t in enumerate(jt)
    ]
    return TrajectoryRecord(np.asarray(config.sample_times), A, B, np.sqrt(r2), centre, velocity, jumps)


def _simulate_chunk(args):
    config, start, stop = args
    y0, g, amp, lam, T0 = _prepare(config)
    n, T = stop - start, len(config.sample_times)
    snaps = np.empty((n, T, 5), dtype=np.complex128)
    counts = np.zeros((n, len(config.channels)), dtype=np.int64)
    for k in range(n):
        s, _, which, _ = _kernel_run(config, start + k, y0, g, amp, lam, T0)
        snaps[k] = s
        if which.size:
            counts[k] = np.bincount(which, minlength=len(config.channels))
    _, _, r2, centre, velocity = _observables(snaps, config.sphere)
    return r2, centre, velocity, counts


def simulate_ensemble(config: ScenarioConfig, workers: int = 1, chunk_size: int = CHUNK_SIZE) -> EnsembleSamples:
    """Run all trajectories and collect per-trajectory observables in index order."""
    if workers < 1:
        raise DomainError("workers must be >= 1")
    n = int(config.trajectory_count)
    tasks = [(config, s, min(s + chunk_size, n)) for s in range(0, n, chunk_size)]
    if workers == 1 or len(tasks) == 1:
        parts = [_simulate_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_chunk, tasks))
    r2, centre, velocity, counts = (np.concatenate(x) for x in zip(*parts))
    labels = tuple(ch.label for ch in config.channels)
    return EnsembleSamples(np.asarray(config.sample_times), r2, centre, velocity, counts, labels)


def filter_gas_collisions(samples: EnsembleSamples, label: str = "gas") -> EnsembleSamples:
    """Drop trajectories in which any channel called ``label`` fired."""
    cols = [i for i, lab in enumerate(samples.channel_labels) if lab == label]
    if not cols:
        return samples
    keep = np.nonzero(samples.jump_counts[:, cols].sum(axis=1) == 0)[0]
    if keep.size == 0:
        raise DomainError(f"every trajectory saw a '{label}' jump; nothing left after post-selection")
    return samples.select(keep)


def ensemble_stats(samples: EnsembleSamples, config: ScenarioConfig) -> EnsembleStats:
    """Variance decomposition with a delta-method standard error on the total spread."""
    n = samples.count
    miv = samples.r2.mean(axis=0)
    dev = samples.centre - samples.centre.mean(axis=0)
    d2 = np.einsum("ntk,ntk->nt", dev, dev)
    cv = d2.mean(axis=0)
    total2 = miv + cv
    total = np.sqrt(total2)
    if n > 1:
        s = samples.r2 + d2
        se2 = s.std(axis=0, ddof=1) / math.sqrt(n)
        with np.errstate(invalid="ignore", divide="ignore"):
            se = np.where(total > 0, se2 / (2 * total), 0.0)
    else:
        se = np.zeros_like(total)
    closed = analytic_grw_spread(samples.times, config.initial_spread**2, config.sphere.mass, config.channel_lambda)
    return EnsembleStats(samples.times, miv, cv, total, se, closed, n)


def run_ensemble(config: ScenarioConfig, workers: int = 1, filter_gas: bool = False) -> EnsembleStats:
    samples = simulate_ensemble(config, workers)
    if filter_gas:
        samples = filter_gas_collisions(samples)
    return ensemble_stats(samples, config)


def analytic_grw_spread(t, initial_r2: float, M: float, Lambda: float):
    """Ensemble spread of a packet starting with a real width under free motion plus jumps.

    <r^2>(t) = <r^2>(0) + 9 hbar^2 t^2 / (4 M^2 <r^2>(0)) + Lambda hbar^2 t^3 / (2 M^2).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    if not (initial_r2 > 0 and M > 0 and Lambda >= 0):
        raise DomainError("need initial_r2 > 0, M > 0 and Lambda >= 0")
    r2 = initial_r2 * (1 + 9 * hbar**2 * t**2 / (4 * M**2 * initial_r2**2)
                       + Lambda * hbar**2 * t**3 / (2 * M**2 * initial_r2))
    out = np.sqrt(r2)
    return out if out.ndim else float(out)


def equilibrium_spread(M: float, Lambda: float) -> float:
    """Order-of-magnitude balance between jump shrinking and dispersion, (hbar / (M Lambda))^(1/4)."""
    if not (M > 0 and Lambda > 0):
        raise DomainError("M and Lambda must be positive")
    return (hbar / (M * Lambda)) ** 0.25


def velocity_histogram(samples, time: float, bins=50):
    """Histogram of mean centre velocities at ``time``.

    ``samples`` is an :class:`EnsembleSamples` or a list of :class:`TrajectoryRecord`.

    Returns
    -------
    dict
        ``"modulus"`` and ``"x"``, ``"y"``, ``"z"`` map to ``(counts, edges)``;
        ``"peak"`` is the centre of the fullest modulus bin.
    """
    if isinstance(samples, EnsembleSamples):
        i = _time_index(samples.times, time)
        v = samples.velocity[:, i, :]
    else:
        records = list(samples)
        if not records:
            raise DomainError("no trajectories given")
        i = _time_index(records[0].times, time)
        v = np.array([r.velocity[i] for r in records])
    speed = np.sqrt((v * v).sum(axis=1))
    out = {}
    counts, edges = np.histogram(speed, bins=bins)
    out["modulus"] = (counts, edges)
    for k, name in enumerate("xyz"):
        out[name] = np.histogram(v[:, k], bins=bins)
    j = int(np.argmax(counts))
    out["peak"] = 0.5 * (edges[j] + edges[j + 1])
    return out
