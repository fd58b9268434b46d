"""Named scenarios: the figure set and the parameter tables.

A figure preset bundles one base scenario with the curve variants to be
compared (free, gravity only, decoherence only, decoherence with gravity).
Deterministic variants (no jump channels) are run with one trajectory.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .collapse import JumpChannel
from .ensemble import DEFAULT_SAMPLES, ScenarioConfig
from .self_gravity import SpringModel, bound_state
from .state import NanosphereSpec

GOLD = 20000.0
SILICATE = 2600.0

VARIANTS = ("free", "gravity", "decoherence", "decoherence_gravity")


@dataclass(frozen=True)
class Preset:
    """A named family of curves sharing one sphere and initial spread.

    ``curves`` maps a curve name to a :class:`ScenarioConfig`.  ``gaps`` lists
    ``(label, minuend, subtrahend, time)`` differences of total spread that
    the run summary reports.
    """

    name: str
    description: str
    curves: dict
    gaps: tuple = ()
    window: tuple | None = None
    parameters: dict = field(default_factory=dict)


def _times(duration, extra=()):
    t = np.linspace(0.0, duration, DEFAULT_SAMPLES + 1)
    return tuple(np.unique(np.concatenate([t, np.asarray(extra, dtype=float)])).tolist())


def _figure(name, description, density, spread0, alpha, gamma, duration, window, gaps,
            trajectories, seed, extra_times=()):
    sphere = NanosphereSpec(1e-7, density)
    channel = JumpChannel(gamma, alpha, "decoherence")
    times = _times(duration, [*window, *(g[3] for g in gaps), *extra_times])
    base = ScenarioConfig(sphere, spread0, duration, sample_times=times, trajectory_count=trajectories,
                          master_seed=seed)
    curves = {
        "free": replace(base, trajectory_count=1),
        "gravity": replace(base, gravity=True, trajectory_count=1),
        "decoherence": replace(base, channels=(channel,)),
        "decoherence_gravity": replace(base, channels=(channel,), gravity=True),
    }
    params = {"radius": 1e-7, "density": density, "initial_spread": spread0, "alpha": alpha,
              "gamma": gamma, "duration": duration, "window": list(window)}
    return Preset(name, description, curves, tuple(gaps), tuple(window), params)


def fig1(seed=0, trajectories=1):
    """Free and self-gravitating curves for several initial widths over 24 hours."""
    sphere = NanosphereSpec(1e-7, 2650.0)
    bs = bound_state(SpringModel(sphere)).spread
    duration = 86400.0
    times = _times(duration)
    curves = {}
    spreads = {"1e-9": 1e-9, "1e-8": 1e-8, "bound": bs, "1e-7": 1e-7}
    for label, s0 in spreads.items():
        base = ScenarioConfig(sphere, s0, duration, sample_times=times, master_seed=seed)
        curves[f"free_{label}"] = base
        curves[f"G_{label}"] = replace(base, gravity=True)
    params = {"radius": 1e-7, "density": 2650.0, "initial_spreads": list(spreads.values()), "duration": duration}
    return Preset("fig1", "free vs self-gravitating widths over 24 h", curves, (), (0.0, duration), params)


def fig2_gold_strong(seed=0, trajectories=10000):
    return _figure("fig2_gold_strong", "gold, strong decoherence near the LWL/SWL boundary", GOLD, 1e-9,
                   1e18, 1.0, 300.0, (270.0, 300.0),
                   [("decoherence-free", "decoherence", "free", 300.0)], trajectories, seed)


def fig3_silicate_dp(seed=0, trajectories=10000):
    return _figure("fig3_silicate_dp", "silicate, weak gravity-type decoherence, wide packet", SILICATE, 1e-7,
                   1e13, 1.0, 300.0, (270.0, 300.0),
                   [("decoherence-free", "decoherence", "free", 200.0),
                    ("decoherence-free", "decoherence", "free", 300.0)], trajectories, seed)


def fig4_gold_dp(seed=0, trajectories=10000):
    return _figure("fig4_gold_dp", "gold, weak gravity-type decoherence", GOLD, 1e-9,
                   1e13, 1.0, 1000.0, (900.0, 1000.0),
                   [("free-(decoherence+gravity)", "free", "decoherence_gravity", 1000.0),
                    ("(decoherence+gravity)-gravity", "decoherence_gravity", "gravity", 1000.0),
                    ("decoherence-free", "decoherence", "free", 1000.0)], trajectories, seed)


def fig5_gold_strong_long(seed=0, trajectories=10000):
    return _figure("fig5_gold_strong_long", "gold, decoherence well above critical", GOLD, 1e-9,
                   1e16, 1.0, 1000.0, (900.0, 1000.0),
                   [("(decoherence+gravity)-decoherence", "decoherence_gravity", "decoherence", 1000.0),
                    ("gravity-free", "gravity", "free", 1000.0)], trajectories, seed)


def fig6_gold_weak_wide(seed=0, trajectories=10000):
    return _figure("fig6_gold_weak_wide", "gold, weak decoherence, wide packet", GOLD, 1e-7,
                   1e11, 1.0, 1000.0, (0.0, 1000.0),
                   [("free-gravity", "free", "gravity", 200.0),
                    ("free-gravity", "free", "gravity", 1000.0)], trajectories, seed)


def tailoring(seed=0, trajectories=10000):
    """Photon bombardment shrinking the individual packets; gravity off."""
    sphere = NanosphereSpec(1e-7, GOLD)
    channel = JumpChannel(1e3, 1e16, "photons")
    duration = 1.0
    times = _times(duration, [0.01, 0.02, 0.1, 0.2])
    cfg = ScenarioConfig(sphere, 1e-11, duration, channels=(channel,), sample_times=times,
                         trajectory_count=trajectories, master_seed=seed)
    params = {"radius": 1e-7, "density": GOLD, "initial_spread": 1e-11, "alpha": 1e16, "gamma": 1e3,
              "duration": duration}
    return Preset("tailoring", "photon bombardment of a narrow gold packet", {"decoherence": cfg}, (),
                  (0.0, 0.1), params)


FIGURES = {
    "fig1": fig1,
    "fig2_gold_strong": fig2_gold_strong,
    "fig3_silicate_dp": fig3_silicate_dp,
    "fig4_gold_dp": fig4_gold_dp,
    "fig5_gold_strong_long": fig5_gold_strong_long,
    "fig6_gold_weak_wide": fig6_gold_weak_wide,
    "tailoring": tailoring,
}
PRESET_NAMES = (*FIGURES, "tables")

# Caption parameters, kept separately from the builders so tests can compare both.
CAPTION_TABLE = {
    "fig1": {"radius": 1e-7, "density": 2650.0, "duration": 86400.0},
    "fig2_gold_strong": {"radius": 1e-7, "density": GOLD, "initial_spread": 1e-9, "alpha": 1e18, "gamma": 1.0,
                         "window": [270.0, 300.0]},
    "fig3_silicate_dp": {"radius": 1e-7, "density": SILICATE, "initial_spread": 1e-7, "alpha": 1e13, "gamma": 1.0,
                         "window": [270.0, 300.0]},
    "fig4_gold_dp": {"radius": 1e-7, "density": GOLD, "initial_spread": 1e-9, "alpha": 1e13, "gamma": 1.0,
                     "window": [900.0, 1000.0]},
    "fig5_gold_strong_long": {"radius": 1e-7, "density": GOLD, "initial_spread": 1e-9, "alpha": 1e16,
                              "gamma": 1.0, "window": [900.0, 1000.0]},
    "fig6_gold_weak_wide": {"radius": 1e-7, "density": GOLD, "initial_spread": 1e-7, "alpha": 1e11,
                            "gamma": 1.0, "window": [0.0, 1000.0]},
    "tailoring": {"radius": 1e-7, "density": GOLD, "initial_spread": 1e-11, "alpha": 1e16, "gamma": 1e3},
}


def get_preset(name: str, seed: int = 0, trajectories: int | None = None) -> Preset:
    if name not in FIGURES:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    kwargs = {"seed": seed}
    if trajectories is not None:
        kwargs["trajectories"] = trajectories
    return FIGURES[name](**kwargs)
