"""Plot-data emission and JSON scenario configs."""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .collapse import JumpChannel
from .dynamics import IntegratorConfig
from .ensemble import EnsembleStats, ScenarioConfig
from .exceptions import DomainError
from .state import EnvironmentSpec, NanosphereSpec

COLUMNS = ("t", "total_spread", "individual_rms", "centre_rms", "stderr", "analytic_eq8")


class ConfigError(DomainError):
    """Malformed scenario config; the message names the offending key path."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def stats_columns(stats: EnsembleStats):
    return (stats.times, stats.total_spread, stats.individual_rms, stats.centre_rms,
            stats.standard_error, stats.analytic_eq8)


def emit_plotdata(stats: EnsembleStats, path, format: str = "csv") -> None:
    """Write one curve as CSV (17 significant digits, LF endings) or JSON."""
    path = Path(path)
    cols = [np.asarray(c, dtype=float) for c in stats_columns(stats)]
    if format == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for row in zip(*cols):
                w.writerow([_fmt(v) for v in row])
    elif format == "json":
        doc = {name: [float(v) for v in col] for name, col in zip(COLUMNS, cols)}
        doc["trajectory_count"] = int(stats.trajectory_count)
        with open(path, "w", newline="\n") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    else:
        raise DomainError(f"unknown format {format!r}")


def read_plotdata(path) -> dict:
    """Read back a CSV written by :func:`emit_plotdata` as ``{column: ndarray}``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body]).reshape(len(body), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


# ---- scenario configs ------------------------------------------------------

_REQUIRED = ("radius", "density", "initial_spread", "duration")
_DEFAULTS = {
    "internal_temperature": 2000.0,
    "gas_temperature": 16.0,
    "gas_pressure": None,
    "environment_temperature": 16.0,
    "initial_centre": [0.0, 0.0, 0.0],
    "initial_velocity": [0.0, 0.0, 0.0],
    "gravity": False,
    "amplification": 1.0,
    "channels": [],
    "qmupl_lambda": 0.0,
    "sample_times": None,
    "trajectory_count": 1,
    "master_seed": 0,
    "rel_tol": 1e-10,
    "abs_tol": 1e-20,
    "max_step": None,
}
_CHANNEL_KEYS = {"gamma", "alpha", "label"}


def _num(doc, key, path, allow_none=False):
    v = doc[key]
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{path}{key}: expected a finite number, got {v!r}")
    return float(v)


def _int(doc, key, path):
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{path}{key}: expected an integer, got {v!r}")
    return v


def _vec3(doc, key, path):
    v = doc[key]
    if not isinstance(v, list) or len(v) != 3:
        raise ConfigError(f"{path}{key}: expected a list of three numbers")
    return tuple(_num({str(i): x for i, x in enumerate(v)}, str(i), f"{path}{key}.") for i in range(3))


def config_from_dict(doc: dict) -> ScenarioConfig:
    """Build a validated :class:`ScenarioConfig` from a JSON-style dict."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - set(_REQUIRED) - set(_DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    missing = [k for k in _REQUIRED if k not in doc]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    d = {**_DEFAULTS, **doc}
    try:
        sphere = NanosphereSpec(_num(d, "radius", ""), _num(d, "density", ""), _num(d, "internal_temperature", ""))
    except DomainError as exc:
        raise ConfigError(f"{_key_hint(exc, ('radius', 'density', 'internal_temperature'))}: {exc}") from None
    try:
        env = EnvironmentSpec(_num(d, "gas_temperature", ""), _num(d, "gas_pressure", "", allow_none=True),
                              environment_temperature=_num(d, "environment_temperature", ""))
    except DomainError as exc:
        raise ConfigError(f"environment: {exc}") from None
    if not isinstance(d["gravity"], bool):
        raise ConfigError(f"gravity: expected true/false, got {d['gravity']!r}")
    if not isinstance(d["channels"], list):
        raise ConfigError("channels: expected a list")
    channels = []
    for i, ch in enumerate(d["channels"]):
        p = f"channels[{i}]."
        if not isinstance(ch, dict):
            raise ConfigError(f"channels[{i}]: expected an object")
        bad = sorted(set(ch) - _CHANNEL_KEYS)
        if bad:
            raise ConfigError(f"{p}{bad[0]}: unknown key")
        for k in ("gamma", "alpha"):
            if k not in ch:
                raise ConfigError(f"{p}{k}: missing")
        label = ch.get("label", "decoherence")
        if not isinstance(label, str):
            raise ConfigError(f"{p}label: expected a string")
        try:
            channels.append(JumpChannel(_num(ch, "gamma", p), _num(ch, "alpha", p), label))
        except DomainError as exc:
            raise ConfigError(f"{p[:-1]}: {exc}") from None
    st = d["sample_times"]
    if st is not None:
        if not isinstance(st, list):
            raise ConfigError("sample_times: expected a list or null")
        st = tuple(_num({str(i): x for i, x in enumerate(st)}, str(i), "sample_times.") for i in range(len(st)))
    max_step = _num(d, "max_step", "", allow_none=True)
    try:
        integ = IntegratorConfig(_num(d, "rel_tol", ""), _num(d, "abs_tol", ""),
                                 math.inf if max_step is None else max_step)
    except DomainError as exc:
        raise ConfigError(f"integrator: {exc}") from None
    try:
        return ScenarioConfig(
            sphere, _num(d, "initial_spread", ""), _num(d, "duration", ""), env,
            _vec3(d, "initial_centre", ""), _vec3(d, "initial_velocity", ""), d["gravity"],
            _num(d, "amplification", ""), tuple(channels), _num(d, "qmupl_lambda", ""), st,
            _int(d, "trajectory_count", ""), _int(d, "master_seed", ""), integ,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def _key_hint(exc, keys):
    msg = str(exc)
    for k in keys:
        if k in msg:
            return k
    return "sphere"


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Inverse of :func:`config_from_dict` with every default spelled out."""
    integ = cfg.integrator
    return {
        "radius": cfg.sphere.radius,
        "density": cfg.sphere.density,
        "internal_temperature": cfg.sphere.internal_temperature,
        "initial_spread": cfg.initial_spread,
        "duration": cfg.duration,
        "gas_temperature": cfg.environment.gas_temperature,
        "gas_pressure": cfg.environment.gas_pressure,
        "environment_temperature": cfg.environment.environment_temperature,
        "initial_centre": list(cfg.initial_centre),
        "initial_velocity": list(cfg.initial_velocity),
        "gravity": cfg.gravity,
        "amplification": cfg.amplification,
        "channels": [{"gamma": c.gamma, "alpha": c.alpha, "label": c.label} for c in cfg.channels],
        "qmupl_lambda": cfg.qmupl_lambda,
        "sample_times": list(cfg.sample_times),
        "trajectory_count": int(cfg.trajectory_count),
        "master_seed": int(cfg.master_seed),
        "rel_tol": integ.rel_tol,
        "abs_tol": integ.abs_tol,
        "max_step": None if math.isinf(integ.max_step) else integ.max_step,
    }


def parse_config(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(doc)


def write_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(config_to_dict(cfg), fh, indent=1)
        fh.write("\n")
