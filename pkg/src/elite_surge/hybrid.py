"""Surrogate-assisted elite injection around GA, DE and CMA-ES, plus a plain BO loop.

Each hybrid generation runs one backend step, fits a GP to the resulting
offspring, nominates an elite from a candidate pool with an acquisition
rule (epsilon-greedy by default), evaluates it, and swaps it in for the
worst offspring if it is strictly better.

The backend and the elite path draw from separate random streams, so a
run with ``hybrid_enabled=False`` reproduces the bare backend exactly.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .acquisition import AcquisitionSpec, argmax_pool, epsilon_greedy_select, make_pool
from .ea import (
    CmaesState,
    DeParams,
    GaParams,
    Population,
    cmaes_ask,
    cmaes_init,
    cmaes_tell,
    de_step,
    ga_step,
    initial_population,
    worst_index,
)
from .gpr import SingularKernel, fit
from .problems import BenchmarkProblem, BudgetExhausted, EvaluationBudget, evaluate

__all__ = [
    "BACKENDS",
    "BoaResult",
    "HybridConfig",
    "TrialEvaluator",
    "TrialRecord",
    "algorithm_name",
    "hybrid_generation",
    "make_backend",
    "run_boa",
    "run_trial",
    "trial_rngs",
]

BACKENDS = ("GA", "DE", "CMAES")
SURROGATE_DATA = ("current_generation", "cumulative_archive")


@dataclass(frozen=True)
class HybridConfig:
    backend: str = "DE"
    hybrid_enabled: bool = True
    acquisition: AcquisitionSpec = field(default_factory=AcquisitionSpec)
    pool_size: int | None = None
    surrogate_data: str = "current_generation"
    archive_limit: int = 500
    elite_counts_in_budget: bool = True
    explore_in_pool: bool = False
    population_per_dim: int = 50
    budget_per_dim: int = 1000
    ga: GaParams = field(default_factory=GaParams)
    de: DeParams = field(default_factory=DeParams)
    cmaes_sigma: float = 1.3

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.surrogate_data not in SURROGATE_DATA:
            raise ValueError(f"surrogate_data must be one of {SURROGATE_DATA}")
        if self.population_per_dim < 1 or self.budget_per_dim < 1:
            raise ValueError("population and budget multipliers must be positive")

    def population_size(self, dimension: int) -> int:
        return self.population_per_dim * dimension

    def max_evaluations(self, dimension: int) -> int:
        return self.budget_per_dim * dimension


def algorithm_name(backend: str, hybrid: bool) -> str:
    return ("h" if hybrid else "") + backend


def trial_rngs(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (backend, elite) generators derived from one trial seed."""
    backend_seq, elite_seq = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.default_rng(backend_seq), np.random.default_rng(elite_seq)


class TrialEvaluator:
    """Budgeted objective that records the best-so-far value after every call."""

    def __init__(self, problem: BenchmarkProblem, budget: EvaluationBudget):
        self.problem = problem
        self.budget = budget
        self.best = math.inf
        self.history: list[float] = []

    def __call__(self, x) -> float:
        value = evaluate(self.problem, x, self.budget)
        self.best = min(self.best, value)
        self.history.append(self.best)
        return value

    def free(self, x) -> float:
        """Evaluate without charging the budget or adding a history entry."""
        value = evaluate(self.problem, x)
        self.best = min(self.best, value)
        return value


# ---------------------------------------------------------------------------
# backends behind one start / offspring / advance protocol


class _GenerationalBackend:
    def __init__(self, step, params, bounds, size):
        self._step = step
        self.params = params
        self.bounds = bounds
        self.size = size

    def start(self, rng, evaluator):
        return initial_population(self.bounds, self.size, rng, evaluator)

    def offspring(self, state, rng, evaluator):
        return self._step(state, self.params, rng, evaluator, self.bounds)

    def advance(self, state, offspring):
        return offspring


class _CmaesBackend:
    def __init__(self, sigma, bounds, size):
        self.sigma = sigma
        self.bounds = bounds
        self.size = size

    def start(self, rng, evaluator):
        mean = rng.uniform(self.bounds[:, 0], self.bounds[:, 1])
        return cmaes_init(mean, self.sigma, self.size)

    def offspring(self, state: CmaesState, rng, evaluator):
        X = cmaes_ask(state, rng, self.bounds)
        fitness = np.array([evaluator(x) for x in X], dtype=float)
        return Population(X, fitness, state.generation + 1)

    def advance(self, state, offspring):
        return cmaes_tell(state, offspring.X, offspring.fitness)


def make_backend(config: HybridConfig, problem: BenchmarkProblem):
    size = config.population_size(problem.dimension)
    if config.backend == "GA":
        return _GenerationalBackend(ga_step, config.ga, problem.bounds, size)
    if config.backend == "DE":
        return _GenerationalBackend(de_step, config.de, problem.bounds, size)
    return _CmaesBackend(config.cmaes_sigma, problem.bounds, size)


# ---------------------------------------------------------------------------


@dataclass
class GenerationInfo:
    elite: np.ndarray | None = None
    elite_fitness: float = math.nan
    accepted: bool = False
    replaced: int | None = None
    skipped: str | None = None


def nominate_elite(offspring: Population, config: HybridConfig, bounds, rng, used: int = 0,
                   archive: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    """Fit the surrogate and pick the elite candidate; raises SingularKernel on a failed fit."""
    X, y = (offspring.X, offspring.fitness) if archive is None else archive
    model = fit(X, y, bounds)
    pool = make_pool(bounds, rng, extra=offspring.X, size=config.pool_size)
    spec = config.acquisition
    if spec.kind in ("PI", "EI"):
        spec = spec.with_incumbent(offspring.best_fitness)
    if spec.kind == "EpsilonGreedy":
        x = epsilon_greedy_select(model, pool, spec, rng, bounds, config.explore_in_pool)
    else:
        x = argmax_pool(model, pool, spec, used)
    return np.clip(x, bounds[:, 0], bounds[:, 1])


def hybrid_generation(state, backend, config: HybridConfig, evaluator: TrialEvaluator,
                      rngs, archive=None, info: GenerationInfo | None = None):
    """One generation of the hybrid loop; returns ``(offspring, next_state)``.

    ``rngs`` is the ``(backend, elite)`` generator pair.  When fewer than
    ``population + 1`` evaluations remain the elite step is skipped.
    ``archive`` is a mutable ``[X, y]`` pair used in cumulative mode.
    """
    backend_rng, elite_rng = rngs
    info = GenerationInfo() if info is None else info
    budget = evaluator.budget
    bounds = backend.bounds
    room = budget.remaining >= backend.size + (1 if config.elite_counts_in_budget else 0)

    offspring = backend.offspring(state, backend_rng, evaluator)
    if not config.hybrid_enabled:
        info.skipped = "disabled"
        return offspring, backend.advance(state, offspring)
    if not room:
        info.skipped = "budget"
        return offspring, backend.advance(state, offspring)

    training = None
    if config.surrogate_data == "cumulative_archive":
        archive[0] = np.vstack([archive[0], offspring.X])[-config.archive_limit:]
        archive[1] = np.concatenate([archive[1], offspring.fitness])[-config.archive_limit:]
        training = (archive[0], archive[1])
    try:
        x = nominate_elite(offspring, config, bounds, elite_rng, budget.used, training)
    except SingularKernel:
        info.skipped = "singular"
        return offspring, backend.advance(state, offspring)

    f = evaluator(x) if config.elite_counts_in_budget else evaluator.free(x)
    info.elite, info.elite_fitness = x, f
    slot = worst_index(offspring)
    if f < offspring.fitness[slot]:
        offspring = offspring.copy()
        offspring.X[slot] = x
        offspring.fitness[slot] = f
        info.accepted, info.replaced = True, slot
    return offspring, backend.advance(state, offspring)


# ---------------------------------------------------------------------------
# trials


@dataclass
class TrialRecord:
    problem_id: str
    algorithm: str
    dimension: int
    seed: int
    optimum_value: float
    history: np.ndarray
    wall_time: float = 0.0
    evaluations: int = 0
    generations: int = 0
    elites_accepted: int = 0

    @property
    def best(self) -> float:
        return float(self.history[-1])

    @property
    def final_error(self) -> float:
        return self.best - self.optimum_value

    @property
    def filename(self) -> str:
        return trial_filename(self.problem_id, self.algorithm, self.dimension, self.seed)

    def to_csv(self) -> str:
        lines = [
            f"# problem={self.problem_id},algorithm={self.algorithm},dimension={self.dimension},"
            f"seed={self.seed},optimum={self.optimum_value!r}",
            "evaluation_index,best_so_far",
        ]
        lines.extend(f"{i},{float(v)!r}" for i, v in enumerate(self.history, start=1))
        return "\n".join(lines) + "\n"

    def write(self, directory) -> str:
        """Write atomically to ``directory/filename``; returns the path."""
        path = os.path.join(directory, self.filename)
        tmp = path + ".part"
        with open(tmp, "w", newline="") as fh:
            fh.write(self.to_csv())
        os.replace(tmp, path)
        return path

    @classmethod
    def from_csv(cls, text: str) -> "TrialRecord":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# "):
            raise ValueError("missing trial header line")
        meta = dict(item.split("=", 1) for item in lines[0][2:].split(","))
        if lines[1] != "evaluation_index,best_so_far":
            raise ValueError("unexpected column header")
        history = np.array([float(line.split(",")[1]) for line in lines[2:] if line])
        return cls(
            problem_id=meta["problem"],
            algorithm=meta["algorithm"],
            dimension=int(meta["dimension"]),
            seed=int(meta["seed"]),
            optimum_value=float(meta["optimum"]),
            history=history,
            evaluations=history.size,
        )

    @classmethod
    def read(cls, path) -> "TrialRecord":
        with open(path, newline="") as fh:
            return cls.from_csv(fh.read())


def trial_filename(problem_id: str, algorithm: str, dimension: int, seed: int) -> str:
    return f"{problem_id}_{algorithm}_{dimension}d_seed{seed}.csv"


def run_trial(problem: BenchmarkProblem, config: HybridConfig, seed: int,
              budget: EvaluationBudget | None = None,
              on_generation: Callable | None = None) -> TrialRecord:
    """Run one optimizer until the evaluation budget is spent.

    ``on_generation(offspring, state, info)`` is called after every
    completed generation.
    """
    if budget is None:
        budget = EvaluationBudget(config.max_evaluations(problem.dimension))
    backend = make_backend(config, problem)
    rngs = trial_rngs(seed)
    evaluator = TrialEvaluator(problem, budget)
    archive = [np.empty((0, problem.dimension)), np.empty(0)]
    generations = accepted = 0
    t0 = time.perf_counter()
    try:
        state = backend.start(rngs[0], evaluator)
        while not budget.exhausted:
            info = GenerationInfo()
            offspring, state = hybrid_generation(state, backend, config, evaluator, rngs, archive, info)
            generations += 1
            accepted += info.accepted
            if on_generation is not None:
                on_generation(offspring, state, info)
    except BudgetExhausted:
        pass
    return TrialRecord(
        problem_id=problem.id,
        algorithm=algorithm_name(config.backend, config.hybrid_enabled),
        dimension=problem.dimension,
        seed=int(seed),
        optimum_value=problem.optimum_value,
        history=np.array(evaluator.history),
        wall_time=time.perf_counter() - t0,
        evaluations=budget.used,
        generations=generations,
        elites_accepted=accepted,
    )


# ---------------------------------------------------------------------------
# Bayesian optimization baseline


@dataclass
class BoaResult:
    x: np.ndarray
    value: float
    incumbents: np.ndarray
    X: np.ndarray
    y: np.ndarray


def run_boa(objective, bounds, n_init: int, max_iter: int, acquisition: AcquisitionSpec | None = None,
            seed: int = 0, pool_size: int | None = None) -> BoaResult:
    """Sequential GP-based optimization from a Latin-hypercube start.

    The GP is refit on all observations each iteration and the next point
    is the pool optimum of ``acquisition`` (EI by default).  A failed fit
    falls back to a uniform random point.  ``incumbents`` holds the best
    value after the initial design and after every iteration.
    """
    bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
    if n_init < 2:
        raise ValueError("n_init must be at least 2")
    acquisition = AcquisitionSpec("EI") if acquisition is None else acquisition
    rng = np.random.default_rng(seed)
    lo, hi = bounds[:, 0], bounds[:, 1]
    X = qmc.scale(qmc.LatinHypercube(d=bounds.shape[0], seed=rng).random(n_init), lo, hi)
    y = np.array([objective(x) for x in X], dtype=float)
    incumbents = [y.min()]
    for _ in range(max_iter):
        try:
            model = fit(X, y, bounds)
        except SingularKernel:
            x = rng.uniform(lo, hi)
        else:
            pool = make_pool(bounds, rng, extra=X, size=pool_size)
            spec = acquisition
            if spec.kind in ("PI", "EI"):
                spec = spec.with_incumbent(y.min())
            if spec.kind == "EpsilonGreedy":
                x = epsilon_greedy_select(model, pool, spec, rng, bounds)
            else:
                x = argmax_pool(model, pool, spec, len(y))
        X = np.vstack([X, x])
        y = np.append(y, objective(x))
        incumbents.append(min(incumbents[-1], y[-1]))
    best = int(np.argmin(y))
    return BoaResult(X[best].copy(), float(y[best]), np.array(incumbents), X, y)
