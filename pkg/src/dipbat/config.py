"""Scenario definitions and the ``key = value`` configuration file format.

Example::

    # published design point, 0.2 s delay
    scenario.label = delay_0.2
    scenario.delay = 0.2
    params.cart_mass = 1.0
    bounds.zeta = 0.01, 1.5
    bat.population_size = 20
    sim.initial_state = 0, 0.0523599, 0, 0, 0, 0
    fitness.weights = 1, 1, 1
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .bat import BatConfig, SearchBounds
from .dynamics import PhysicalParams
from .exceptions import ConfigurationError
from .sim import SimConfig
from .tuning import DEFAULT_BOUNDS

_SCENARIO_KEYS = {
    "label": str,
    "delay": float,
    "plant": str,
    "delay_convention": str,
    "delay_pole": str,
    "settle_band": float,
}
_SIM_KEYS = {"dt": float, "horizon": float, "initial_state": "list", "reference": float}
_BAT_INT_KEYS = {"population_size", "generations", "seed"}


@dataclass
class Scenario:
    label: str = "scenario"
    delay: float = 0.0
    params: PhysicalParams = field(default_factory=PhysicalParams)
    bounds: SearchBounds = DEFAULT_BOUNDS
    bat: BatConfig = field(default_factory=BatConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    weights: tuple = (1.0, 1.0, 1.0)
    plant: str = "jacobian"
    delay_convention: str = "stable"
    delay_pole: str = "pade"
    settle_band: float = 0.02

    def __post_init__(self):
        if not self.label or any(c in self.label for c in "/\\"):
            raise ConfigurationError(f"scenario.label {self.label!r} is not a usable name")
        if not np.isfinite(self.delay) or self.delay < 0:
            raise ConfigurationError(f"scenario.delay must be >= 0, got {self.delay!r}")
        if self.plant not in ("jacobian", "paper"):
            raise ConfigurationError(f"scenario.plant must be jacobian or paper, got {self.plant!r}")
        if self.delay_convention not in ("stable", "paper"):
            raise ConfigurationError("scenario.delay_convention must be stable or paper")
        if self.delay_pole not in ("pade", "spaced"):
            raise ConfigurationError("scenario.delay_pole must be pade or spaced")
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise ConfigurationError("fitness.weights must be three non-negative numbers")
        if not self.settle_band > 0:
            raise ConfigurationError("scenario.settle_band must be > 0")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _parse_list(text, key):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigurationError(f"{key}: expected a comma-separated list of numbers") from None


def _convert(key, raw, kind):
    try:
        if kind == "list":
            return _parse_list(raw, key)
        if kind is int:
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        return kind(raw)
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {raw!r}") from None


def parse_config(text):
    """Parse ``key = value`` lines into a flat ``{dotted.key: str}`` dict."""
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key:
            raise ConfigurationError(f"line {lineno}: key {key!r} needs a section prefix")
        if key in entries:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def scenario_from_entries(entries):
    """Build a :class:`Scenario` from parsed entries; unknown keys are errors."""
    scenario_kw, params_kw, bat_kw, sim_kw = {}, {}, {}, {}
    bounds = {name: [lo, hi] for name, lo, hi in
              zip(DEFAULT_BOUNDS.names, DEFAULT_BOUNDS.lower, DEFAULT_BOUNDS.upper)}
    param_fields = {f.name for f in dataclasses.fields(PhysicalParams)}
    bat_fields = {f.name for f in dataclasses.fields(BatConfig)}
    weights = None
    for key, raw in entries.items():
        section, name = key.split(".", 1)
        if section == "scenario" and name in _SCENARIO_KEYS:
            scenario_kw[name] = _convert(key, raw, _SCENARIO_KEYS[name])
        elif section == "params" and name in param_fields:
            params_kw[name] = _convert(key, raw, float)
        elif section == "bat" and name in bat_fields:
            bat_kw[name] = _convert(key, raw, int if name in _BAT_INT_KEYS else float)
        elif section == "sim" and name in _SIM_KEYS:
            sim_kw[name] = _convert(key, raw, _SIM_KEYS[name])
        elif section == "bounds" and name in bounds:
            pair = _parse_list(raw, key)
            if len(pair) != 2:
                raise ConfigurationError(f"{key}: expected 'lower, upper'")
            bounds[name] = pair
        elif key == "fitness.weights":
            weights = tuple(_parse_list(raw, key))
        else:
            raise ConfigurationError(f"unknown configuration key {key!r}")
    kwargs = dict(scenario_kw)
    kwargs["params"] = PhysicalParams(**params_kw)
    kwargs["bat"] = BatConfig(**bat_kw)
    kwargs["sim"] = SimConfig(**sim_kw)
    kwargs["bounds"] = SearchBounds([bounds["zeta"][0], bounds["omega_n"][0]],
                                    [bounds["zeta"][1], bounds["omega_n"][1]],
                                    names=("zeta", "omega_n"))
    if weights is not None:
        kwargs["weights"] = weights
    return Scenario(**kwargs)


def load_scenario(path=None):
    if path is None:
        return Scenario()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return scenario_from_entries(parse_config(text))
