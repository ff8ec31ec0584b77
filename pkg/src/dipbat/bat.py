"""Bat-algorithm minimiser over a bounded box.

Each generation draws all of its random numbers up front and evaluates the
whole population's candidates as one batch, then merges results in bat-index
order. The outcome therefore depends only on the seed, never on how the
batch was evaluated.
"""

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_vector
from .exceptions import ConfigurationError

PENALTY = 1e9


@dataclass(frozen=True)
class BatConfig:
    population_size: int = 20
    generations: int = 20
    loudness: float = 0.5
    pulse_rate: float = 0.5
    f_min: float = 0.0
    f_max: float = 2.0
    loudness_decay: float = 0.9
    pulse_growth: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if int(self.population_size) != self.population_size or self.population_size < 2:
            raise ConfigurationError("bat.population_size must be an integer >= 2")
        if int(self.generations) != self.generations or self.generations < 1:
            raise ConfigurationError("bat.generations must be an integer >= 1")
        if not 0 < self.loudness <= 1:
            raise ConfigurationError("bat.loudness must lie in (0, 1]")
        if not 0 <= self.pulse_rate <= 1:
            raise ConfigurationError("bat.pulse_rate must lie in [0, 1]")
        if not self.f_min <= self.f_max:
            raise ConfigurationError("bat.f_min must not exceed bat.f_max")
        if not 0 < self.loudness_decay <= 1:
            raise ConfigurationError("bat.loudness_decay must lie in (0, 1]")
        if not self.pulse_growth >= 0:
            raise ConfigurationError("bat.pulse_growth must be >= 0")

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return BatConfig(**values)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SearchBounds:
    lower: np.ndarray
    upper: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        lower = check_vector(self.lower, "bounds.lower")
        upper = check_vector(self.upper, "bounds.upper", lower.size)
        names = tuple(self.names) or tuple(f"x{i}" for i in range(lower.size))
        for i, (lo, hi) in enumerate(zip(lower, upper)):
            if not lo < hi:
                raise ConfigurationError(
                    f"bounds.{names[i]}: lower ({lo}) must be below upper ({hi})")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "names", names)

    @property
    def dim(self):
        return self.lower.size

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)


@dataclass
class OptimizationResult:
    best_point: np.ndarray
    best_fitness: float
    fitness_history: list
    evaluations: int
    wall_time: float
    loudness: np.ndarray = field(repr=False, default=None)
    pulse_rate: np.ndarray = field(repr=False, default=None)


def _evaluate(objective, points):
    values = np.empty(len(points))
    for i, x in enumerate(points):
        v = float(objective(x.copy()))
        values[i] = v if math.isfinite(v) else math.inf
    return values


def optimize(objective, bounds, config=BatConfig(), initial_population=None, evaluate=None):
    """Minimise ``objective`` over ``bounds`` with the bat algorithm.

    Parameters
    ----------
    objective : callable
        Maps a 1-D decision vector to a float. Non-finite values count as +inf.
    bounds : SearchBounds
    config : BatConfig
    initial_population : array-like, optional
        Shape ``(population_size, dim)``; defaults to uniform draws over the box.
    evaluate : callable, optional
        ``evaluate(objective, points) -> values`` for batch evaluation, e.g. to
        farm a generation out to a process pool. Must preserve order.

    Returns
    -------
    OptimizationResult
    """
    if not isinstance(bounds, SearchBounds):
        raise ConfigurationError("bounds must be a SearchBounds instance")
    evaluate = evaluate or _evaluate
    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    n, d = config.population_size, bounds.dim

    if initial_population is None:
        x = bounds.lower + rng.uniform(size=(n, d)) * (bounds.upper - bounds.lower)
    else:
        x = np.array(initial_population, dtype=float)
        if x.shape != (n, d):
            raise ConfigurationError(f"initial_population must have shape {(n, d)}")
        x = bounds.clip(x)
    v = np.zeros((n, d))
    loud = np.full(n, float(config.loudness))
    pulse = np.full(n, float(config.pulse_rate))

    fit = evaluate(objective, x)
    evaluations = n
    best_idx = int(np.argmin(fit))
    best_x, best_f = x[best_idx].copy(), float(fit[best_idx])
    history = []

    for t in range(1, config.generations + 1):
        beta = rng.uniform(size=n)
        walk_draw = rng.uniform(size=n)
        eps = rng.uniform(-1.0, 1.0, size=(n, d))
        accept_draw = rng.uniform(size=n)

        freq = config.f_min + (config.f_max - config.f_min) * beta
        v = v + (x - best_x) * freq[:, None]
        cand = bounds.clip(x + v)
        local = walk_draw > pulse
        if np.any(local):
            cand[local] = bounds.clip(best_x + eps[local] * loud.mean())

        cand_fit = evaluate(objective, cand)
        evaluations += n

        for i in range(n):
            if cand_fit[i] < fit[i] and accept_draw[i] < loud[i]:
                x[i] = cand[i]
                fit[i] = cand_fit[i]
                loud[i] *= config.loudness_decay
                if config.pulse_growth > 0:
                    pulse[i] = config.pulse_rate * (1.0 - math.exp(-config.pulse_growth * t))
            if cand_fit[i] < best_f:
                best_x, best_f = cand[i].copy(), float(cand_fit[i])
        history.append(best_f)

    return OptimizationResult(
        best_point=best_x,
        best_fitness=best_f,
        fitness_history=history,
        evaluations=evaluations,
        wall_time=time.perf_counter() - started,
        loudness=loud,
        pulse_rate=pulse,
    )
