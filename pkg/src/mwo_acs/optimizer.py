"""Memetic walrus optimizer (MWO) with expert-guided search.

One run is a loop over ``t = 1 .. max_iterations``. Each iteration:

1. draws the migration danger ``E = E1(t) * E0`` and the safety level
   ``beta(t)``;
2. if ``|E| >= 0.5`` moves every walrus by a migration step, otherwise
   lets each walrus follow an age-weighted expert (a fitter walrus);
3. applies one role-based update keyed on ``S = beta * r2`` and the base
   walrus danger ``D = 2 (1 - t/T) (2 r - 1)``: males/females/children when
   ``S >= 0.5``, fleeing when ``|D| >= 0.5``, the best/second-best dual
   anchor otherwise;
4. evaluates the population once, updates best/second-best, resets the age
   of every walrus that improved either, ages everyone else by one, and
   recomputes influence weights.

All updates inside a step read the population as it stood at the start of
that step (synchronous update), and positions are pushed back into the box
by uniform resampling after each step.

RNG draw order
--------------
One ``numpy.random.Generator`` (``default_rng(seed)``) drives a run:

* init: ``random((N, dim))``
* per iteration: ``uniform(-1, 1)`` for E0; then either
  migration ``integers(0, N, N)``, ``integers(1, N, N)``, ``random(N)``
  or expert ``random(N)`` (pick), ``random(N)`` (step), ``integers(1, 3, N)`` (I);
  box repair ``random(k)`` for the k out-of-box entries in row-major order;
  ``random()`` for r2 and ``random()`` for D; then the role branch:
  children ``random((n_child, dim))``, fleeing ``random((N, dim))`` twice,
  or dual anchor ``random((N, 1))`` twice followed by two ``(N, dim)``
  angle draws; box repair again.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
import json

import numpy as np

from .halton import first_primes, halton

ANGLE_GUARD = 1e-6


@dataclass
class OptimizerConfig:
    population_size: int = 30
    max_iterations: int = 500
    aging_rate: float = 0.1
    max_age_fraction: float = 0.2
    male_fraction: float = 0.45
    female_fraction: float = 0.45
    child_fraction: float = 0.10
    expert_guidance_enabled: bool = True
    nonlinear_danger_enabled: bool = True
    update_composition: str = "sequential"
    seed: int = 0
    bounds: tuple = (0.0, 1.0)

    @classmethod
    def wo_ablation(cls, **kwargs):
        """Plain walrus optimizer: no expert guidance, linear danger decay."""
        kwargs.setdefault("expert_guidance_enabled", False)
        kwargs.setdefault("nonlinear_danger_enabled", False)
        return cls(**kwargs)

    def validate(self):
        if self.population_size < 4:
            raise ValueError("population_size must be at least 4")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.aging_rate > 0:
            raise ValueError("aging_rate must be positive")
        if self.max_age_fraction < 0:
            raise ValueError("max_age_fraction must be nonnegative")
        fracs = (self.male_fraction, self.female_fraction, self.child_fraction)
        if any(not 0.0 <= f <= 1.0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError("role fractions must lie in [0, 1] and sum to 1")
        if self.update_composition not in ("sequential", "exclusive"):
            raise ValueError("update_composition must be 'sequential' or 'exclusive'")
        if len(self.bounds) != 2:
            raise ValueError("bounds must be a (lower, upper) pair")
        return self

    def box(self, dim):
        lower = np.broadcast_to(np.asarray(self.bounds[0], dtype=np.float64), (dim,)).copy()
        upper = np.broadcast_to(np.asarray(self.bounds[1], dtype=np.float64), (dim,)).copy()
        if np.any(lower > upper):
            raise ValueError("invalid bounds: lower exceeds upper")
        return lower, upper

    def to_dict(self):
        d = asdict(self)
        d["bounds"] = [np.asarray(b).tolist() for b in self.bounds]
        return d


@dataclass
class Population:
    positions: np.ndarray
    fitness: np.ndarray
    ages: np.ndarray
    weights: np.ndarray
    best_position: np.ndarray | None = None
    best_fitness: float = math.inf
    second_position: np.ndarray | None = None
    second_fitness: float = math.inf

    @property
    def size(self):
        return self.positions.shape[0]


@dataclass
class RunRecord:
    seed: int
    config: dict
    convergence_trace: list
    best_fitness: float
    best_position: list
    evaluation_count: int
    iteration_of_last_improvement: int
    bound_violations: int = 0
    label: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------


def initialize_population(config, dim, rng=None):
    if dim < 1:
        raise ValueError("dim must be at least 1")
    lower, upper = config.box(dim)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n = config.population_size
    positions = lower + rng.random((n, dim)) * (upper - lower)
    return Population(
        positions=positions,
        fitness=np.full(n, np.inf),
        ages=np.zeros(n, dtype=np.int64),
        weights=np.ones(n),
    )


def clamp_to_bounds(position, lower, upper, rng):
    """Resample every out-of-box entry uniformly inside its interval."""
    x = np.array(position, dtype=np.float64, copy=True)
    lower = np.broadcast_to(lower, x.shape)
    upper = np.broadcast_to(upper, x.shape)
    bad = (x < lower) | (x > upper) | ~np.isfinite(x)
    k = int(np.count_nonzero(bad))
    if k:
        x[bad] = lower[bad] + (upper[bad] - lower[bad]) * rng.random(k)
    return x


def danger_amplitude(t, t_max, nonlinear=True):
    """E1: ``2 (1 - t/T)^(pi t / T)``, or ``2 (1 - t/T)`` when linear."""
    ratio = t / t_max
    if nonlinear:
        return 2.0 * (1.0 - ratio) ** (math.pi * ratio)
    return 2.0 * (1.0 - ratio)


def danger_signal(t, t_max, rng, nonlinear=True):
    return danger_amplitude(t, t_max, nonlinear) * rng.uniform(-1.0, 1.0)


def safety_signal(t, t_max):
    return 1.0 - 1.0 / (1.0 + math.exp((t_max / 2.0 - t) / t_max * 10.0))


def expert_weights(ages, aging_rate, max_age):
    ages = np.asarray(ages)
    return np.where(ages > max_age, 0.0, np.exp(-aging_rate * ages))


def update_expert_weights(population, config, improved=None):
    """Age everyone by one, reset improvers to zero, recompute weights."""
    population.ages += 1
    if improved is not None:
        population.ages[np.asarray(improved, dtype=bool)] = 0
    max_age = config.max_age_fraction * config.max_iterations
    population.weights = expert_weights(population.ages, config.aging_rate, max_age)
    return population


def _pick_experts(fitness, weights, u):
    better = fitness[None, :] < fitness[:, None]
    w = np.where(better, weights[None, :], 0.0)
    cum = np.cumsum(w, axis=1)
    total = cum[:, -1]
    picks = np.argmax(cum > (u * total)[:, None], axis=1)
    picks[~(total > 0)] = -1
    return picks


def select_expert(population, i, rng):
    """Draw an expert for walrus ``i`` or return None if nobody qualifies."""
    u = np.full(population.size, rng.random())
    k = int(_pick_experts(population.fitness, population.weights, u)[i])
    return None if k < 0 else k


def expert_step(x_i, x_k, w_k, rand, factor):
    return x_i + rand * w_k * (x_k - factor * x_i)


def expert_guided_update(x_i, x_k, w_k, rng, lower, upper):
    rand = rng.random()
    factor = int(rng.integers(1, 3))
    return clamp_to_bounds(expert_step(x_i, x_k, w_k, rand, factor), lower, upper, rng)


def migration_displacement(x_a, x_b, beta, r3):
    return (beta * r3**2) * (x_a - x_b)


def _partner_indices(n, rng):
    a = rng.integers(0, n, n)
    b = (a + rng.integers(1, n, n)) % n
    return a, b


def migration_step(positions, beta, rng):
    """Per-walrus displacement along the gap between two distinct others."""
    n = positions.shape[0]
    if n < 2:
        raise ValueError("migration needs at least two walruses")
    a, b = _partner_indices(n, rng)
    r3 = rng.random(n)
    return migration_displacement(positions[a], positions[b], beta, r3[:, None])


def role_counts(n, config):
    males = max(1, int(config.male_fraction * n))
    females = min(n - males, int(config.female_fraction * n))
    return males, females, n - males - females


def roles_update(positions, fitness, best, t, t_max, rng, lower, upper, config,
                 halton_offset=0, bases=None):
    """Male / female / child moves; returns the new (clamped) positions.

    Walruses are ranked by fitness. The top ``male_fraction`` jump to fresh
    Halton points (male ``k`` takes index ``halton_offset + k + 1``). Female
    ``k`` moves to ``alpha * male_k + (1 - alpha) * best`` with
    ``alpha = 1 - t / t_max``. Children overshoot past the best:
    ``best + r * (best - x)``.
    """
    n, dim = positions.shape
    n_male, n_female, n_child = role_counts(n, config)
    order = np.argsort(fitness, kind="stable")
    males = order[:n_male]
    females = order[n_male : n_male + n_female]
    children = order[n_male + n_female :]
    out = positions.copy()

    pts = halton(np.arange(halton_offset + 1, halton_offset + n_male + 1), dim, bases)
    out[males] = lower + pts * (upper - lower)

    alpha = 1.0 - t / t_max
    paired = males[np.arange(n_female) % n_male]
    xf = positions[females]
    out[females] = xf + alpha * (positions[paired] - xf) + (1.0 - alpha) * (best - xf)

    if n_child:
        r = rng.random((n_child, dim))
        out[children] = best + r * (best - positions[children])
    return clamp_to_bounds(out, lower, upper, rng)


def fleeing_step(x, best, r1, r4):
    return x * (2.0 * r1 - 1.0) - np.abs(best - x) * r4**2


def fleeing_update(x, best, rng, lower, upper):
    r1 = rng.random(np.shape(x))
    r4 = rng.random(np.shape(x))
    return clamp_to_bounds(fleeing_step(x, best, r1, r4), lower, upper, rng)


def dual_anchor_step(x, best, second, a1, a2, theta1, theta2):
    x1 = best - a1 * np.tan(theta1 * np.pi) * np.abs(best - x)
    x2 = second - a2 * np.tan(theta2 * np.pi) * np.abs(second - x)
    return (x1 + x2) / 2.0


def _angles(rng, shape):
    theta = rng.random(shape)
    bad = np.abs(theta - 0.5) < ANGLE_GUARD
    while np.any(bad):
        theta[bad] = rng.random(int(np.count_nonzero(bad)))
        bad = np.abs(theta - 0.5) < ANGLE_GUARD
    return theta


def dual_anchor_update(x, best, second, beta, rng, lower, upper):
    x = np.asarray(x, dtype=np.float64)
    lead = x.shape[:-1] + (1,) if x.ndim > 1 else ()
    a1 = beta * rng.random(lead)
    a2 = beta * rng.random(lead)
    theta1 = _angles(rng, x.shape)
    theta2 = _angles(rng, x.shape)
    step = dual_anchor_step(x, best, second, a1, a2, theta1, theta2)
    return clamp_to_bounds(step, lower, upper, rng)


# ---------------------------------------------------------------------------
# Main loop
# ---------------------------------------------------------------------------


def _track_elites(pop):
    improved = np.zeros(pop.size, dtype=bool)
    best_moved = False
    for i in range(pop.size):
        f = pop.fitness[i]
        if f < pop.best_fitness:
            if pop.best_position is not None:
                pop.second_fitness = pop.best_fitness
                pop.second_position = pop.best_position
            pop.best_fitness = float(f)
            pop.best_position = pop.positions[i].copy()
            improved[i] = True
            best_moved = True
        elif f < pop.second_fitness:
            pop.second_fitness = float(f)
            pop.second_position = pop.positions[i].copy()
            improved[i] = True
    return improved, best_moved


def _batch_evaluator(objective, vectorized):
    if vectorized is None:
        vectorized = hasattr(objective, "batch")
    if vectorized:
        fn = objective.batch if hasattr(objective, "batch") else objective
        return lambda X: np.asarray(fn(X), dtype=np.float64)
    return lambda X: np.array([float(objective(row)) for row in X])


def optimize(objective, dim, config, *, vectorized=None, callback=None, label=""):
    """Minimise ``objective`` over the box in ``config.bounds``.

    Parameters
    ----------
    objective : callable
        Maps a 1-D position to a float. If it has a ``batch`` method (or
        ``vectorized=True``) whole populations are scored at once.
    dim : int
        Search-space dimension.
    config : OptimizerConfig
    callback : callable, optional
        ``callback(t, population)`` after each evaluation pass, t=0 for the
        initial population.

    Returns
    -------
    RunRecord
    """
    config.validate()
    lower, upper = config.box(dim)
    rng = np.random.default_rng(config.seed)
    evaluate = _batch_evaluator(objective, vectorized)
    n = config.population_size
    t_max = config.max_iterations
    bases = first_primes(dim)

    pop = initialize_population(config, dim, rng)
    pop.fitness = evaluate(pop.positions)
    evaluations = n
    violations = int(np.count_nonzero((pop.positions < lower) | (pop.positions > upper)))
    _track_elites(pop)
    max_age = config.max_age_fraction * t_max
    pop.weights = expert_weights(pop.ages, config.aging_rate, max_age)
    if callback is not None:
        callback(0, pop)

    n_male = role_counts(n, config)[0]
    halton_offset = 0
    trace = []
    last_improvement = 0

    for t in range(1, t_max + 1):
        e = danger_amplitude(t, t_max, config.nonlinear_danger_enabled) * rng.uniform(-1.0, 1.0)
        beta = safety_signal(t, t_max)
        x = pop.positions
        migrating = abs(e) >= 0.5

        if migrating:
            x = x + migration_step(x, beta, rng)
        elif config.expert_guidance_enabled:
            picks = _pick_experts(pop.fitness, pop.weights, rng.random(n))
            rand = rng.random(n)
            factor = rng.integers(1, 3, n)
            has = picks >= 0
            if np.any(has):
                k = picks[has]
                step = expert_step(x[has], x[k], pop.weights[k][:, None],
                                   rand[has][:, None], factor[has][:, None])
                x = x.copy()
                x[has] = step
        x = clamp_to_bounds(x, lower, upper, rng)

        if not (migrating and config.update_composition == "exclusive"):
            best = pop.best_position
            second = pop.second_position if pop.second_position is not None else best
            s = beta * rng.random()
            d = 2.0 * (1.0 - t / t_max) * (2.0 * rng.random() - 1.0)
            if s >= 0.5:
                x = roles_update(x, pop.fitness, best, t, t_max, rng, lower, upper, config,
                                 halton_offset, bases)
                halton_offset += n_male
            elif abs(d) >= 0.5:
                x = fleeing_update(x, best, rng, lower, upper)
            else:
                x = dual_anchor_update(x, best, second, beta, rng, lower, upper)

        pop.positions = x
        pop.fitness = evaluate(x)
        evaluations += n
        violations += int(np.count_nonzero((x < lower) | (x > upper)))
        improved, best_moved = _track_elites(pop)
        update_expert_weights(pop, config, improved)
        if best_moved:
            last_improvement = t
        trace.append(pop.best_fitness)
        if callback is not None:
            callback(t, pop)

    return RunRecord(
        seed=int(config.seed),
        config=config.to_dict(),
        convergence_trace=[float(v) for v in trace],
        best_fitness=float(pop.best_fitness),
        best_position=pop.best_position.tolist(),
        evaluation_count=int(evaluations),
        iteration_of_last_improvement=int(last_improvement),
        bound_violations=violations,
        label=label,
    )
