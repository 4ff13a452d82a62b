"""Offspring generators: real-coded GA, DE/rand/1/bin and CMA-ES.

All three minimize, clip candidates to the box before evaluation, and call
``evaluator(x)`` once per candidate.  The evaluator owns budget accounting
and may raise :class:`~elite_surge.problems.BudgetExhausted` part-way
through a generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "CmaesParams",
    "CmaesState",
    "DeParams",
    "GaParams",
    "Population",
    "cmaes_ask",
    "cmaes_init",
    "cmaes_step",
    "cmaes_tell",
    "de_donor",
    "de_step",
    "ga_step",
    "initial_population",
    "polynomial_mutation",
    "sbx_crossover",
    "worst_index",
]

Evaluator = Callable[[np.ndarray], float]

EIGEN_FLOOR = 1e-14


@dataclass
class Population:
    X: np.ndarray
    fitness: np.ndarray
    generation: int = 0

    def __len__(self):
        return self.X.shape[0]

    def copy(self) -> "Population":
        return Population(self.X.copy(), self.fitness.copy(), self.generation)

    @property
    def evaluated(self) -> np.ndarray:
        return ~np.isnan(self.fitness)

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.fitness))

    @property
    def best_fitness(self) -> float:
        return float(np.min(self.fitness))


def worst_index(pop) -> int:
    """Index of the largest fitness; ties resolve to the lowest index."""
    fitness = pop.fitness if isinstance(pop, Population) else np.asarray(pop, dtype=float)
    return int(np.argmax(fitness))


def _evaluate_rows(X, evaluator) -> np.ndarray:
    return np.array([evaluator(x) for x in X], dtype=float)


def initial_population(bounds, size: int, rng: np.random.Generator, evaluator: Evaluator) -> Population:
    bounds = np.asarray(bounds, dtype=float)
    X = rng.uniform(bounds[:, 0], bounds[:, 1], size=(size, bounds.shape[0]))
    return Population(X, _evaluate_rows(X, evaluator), 0)


# ---------------------------------------------------------------------------
# GA


@dataclass(frozen=True)
class GaParams:
    crossover_rate: float = 0.5
    mutation_rate: float = 0.1
    sbx_eta: float = 15.0
    pm_eta: float = 20.0
    tournament_size: int = 2

    def __post_init__(self):
        if not (0 <= self.crossover_rate <= 1 and 0 <= self.mutation_rate <= 1):
            raise ValueError("GA rates must lie in [0, 1]")
        if self.sbx_eta <= 0 or self.pm_eta <= 0:
            raise ValueError("distribution indices must be positive")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


def _tournament(fitness, k, rng):
    entrants = rng.integers(len(fitness), size=k)
    return int(entrants[np.argmin(fitness[entrants])])


def sbx_crossover(p1, p2, eta, rng):
    """Simulated binary crossover of two parent vectors."""
    u = rng.random(p1.shape)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return c1, c2


def polynomial_mutation(x, lower, upper, rate, eta, rng):
    """Bounded polynomial mutation; each gene mutates with probability ``rate``."""
    x = np.clip(np.array(x, dtype=float), lower, upper)
    mask = rng.random(x.shape) < rate
    r = rng.random(x.shape)
    if not mask.any():
        return x
    span = upper - lower
    d1 = (x - lower) / span
    d2 = (upper - x) / span
    power = 1.0 / (eta + 1.0)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        left = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1) ** (eta + 1.0)
        right = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2) ** (eta + 1.0)
        delta = np.where(r < 0.5, left**power - 1.0, 1.0 - right**power)
    return np.where(mask, x + delta * span, x)


def ga_step(pop: Population, params: GaParams, rng: np.random.Generator, evaluator: Evaluator,
            bounds) -> Population:
    """One generation: tournament selection, SBX, polynomial mutation, 1-elitism.

    All ``len(pop)`` offspring are evaluated, copies included.  The best
    parent then takes the slot of the worst offspring.
    """
    bounds = np.asarray(bounds, dtype=float)
    lower, upper = bounds[:, 0], bounds[:, 1]
    n = len(pop)
    children = []
    while len(children) < n:
        a = pop.X[_tournament(pop.fitness, params.tournament_size, rng)]
        b = pop.X[_tournament(pop.fitness, params.tournament_size, rng)]
        if rng.random() < params.crossover_rate:
            c1, c2 = sbx_crossover(a, b, params.sbx_eta, rng)
        else:
            c1, c2 = a.copy(), b.copy()
        children.append(c1)
        children.append(c2)
    X = np.clip(np.array(children[:n]), lower, upper)
    X = np.array([polynomial_mutation(x, lower, upper, params.mutation_rate, params.pm_eta, rng) for x in X])
    X = np.clip(X, lower, upper)
    fitness = _evaluate_rows(X, evaluator)

    elite = pop.best_index
    slot = worst_index(fitness)
    X[slot] = pop.X[elite]
    fitness[slot] = pop.fitness[elite]
    return Population(X, fitness, pop.generation + 1)


# ---------------------------------------------------------------------------
# DE


@dataclass(frozen=True)
class DeParams:
    scale: float = 0.7
    crossover_rate: float = 0.9
    strategy: str = "rand/1/bin"

    def __post_init__(self):
        if not 0 < self.scale <= 2:
            raise ValueError("F must lie in (0, 2]")
        if not 0 <= self.crossover_rate <= 1:
            raise ValueError("Cr must lie in [0, 1]")
        if self.strategy != "rand/1/bin":
            raise ValueError(f"unsupported DE strategy {self.strategy!r}")


def de_donor(base, diff_a, diff_b, scale):
    return base + scale * (diff_a - diff_b)


def de_step(pop: Population, params: DeParams, rng: np.random.Generator, evaluator: Evaluator,
            bounds) -> Population:
    """One DE/rand/1/bin generation with greedy one-to-one survivor selection."""
    bounds = np.asarray(bounds, dtype=float)
    n, d = pop.X.shape
    if n < 4:
        raise ValueError("DE/rand/1 needs a population of at least 4")
    trials = np.empty_like(pop.X)
    for i in range(n):
        others = rng.choice(n - 1, size=3, replace=False)
        r1, r2, r3 = others + (others >= i)
        donor = de_donor(pop.X[r1], pop.X[r2], pop.X[r3], params.scale)
        cross = rng.random(d) < params.crossover_rate
        cross[rng.integers(d)] = True
        trials[i] = np.where(cross, donor, pop.X[i])
    trials = np.clip(trials, bounds[:, 0], bounds[:, 1])
    trial_fitness = _evaluate_rows(trials, evaluator)

    keep = trial_fitness <= pop.fitness
    X = np.where(keep[:, None], trials, pop.X)
    fitness = np.where(keep, trial_fitness, pop.fitness)
    return Population(X, fitness, pop.generation + 1)


# ---------------------------------------------------------------------------
# CMA-ES


@dataclass(frozen=True)
class CmaesParams:
    """Strategy constants of the (mu/mu_w, lambda)-CMA-ES for a given dimension and lambda."""

    dimension: int
    lam: int
    mu: int
    weights: np.ndarray
    mueff: float
    cc: float
    cs: float
    c1: float
    cmu: float
    damps: float
    chi_n: float

    @classmethod
    def default(cls, dimension: int, lam: int) -> "CmaesParams":
        n = dimension
        mu = lam // 2
        w = math.log(lam / 2 + 0.5) - np.log(np.arange(1, mu + 1))
        w = w / w.sum()
        mueff = 1.0 / float(np.sum(w**2))
        cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
        cs = (mueff + 2) / (n + mueff + 5)
        c1 = 2 / ((n + 1.3) ** 2 + mueff)
        cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
        damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + cs
        chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))
        return cls(n, lam, mu, w, mueff, cc, cs, c1, cmu, damps, chi_n)


@dataclass(frozen=True, eq=False)
class CmaesState:
    mean: np.ndarray
    sigma: float
    C: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    params: CmaesParams
    generation: int = 0
    B: np.ndarray = None
    D: np.ndarray = None
    repaired: bool = False

    def __post_init__(self):
        if self.B is None or self.D is None:
            B, D, repaired = _eigen(self.C)
            object.__setattr__(self, "B", B)
            object.__setattr__(self, "D", D)
            object.__setattr__(self, "repaired", repaired)

    @property
    def lam(self) -> int:
        return self.params.lam

    @property
    def inv_sqrt_C(self) -> np.ndarray:
        return (self.B / self.D) @ self.B.T


def _eigen(C):
    """Eigen-decomposition with eigenvalues floored at EIGEN_FLOOR.

    Returns ``B`` and the standard deviations ``D = sqrt(eigenvalues)``.
    """
    vals, B = np.linalg.eigh(C)
    repaired = bool(vals.min() < EIGEN_FLOOR)
    vals = np.maximum(vals, EIGEN_FLOOR)
    return B, np.sqrt(vals), repaired


def cmaes_init(mean, sigma: float = 1.3, lam: int | None = None) -> CmaesState:
    mean = np.asarray(mean, dtype=float).copy()
    n = mean.size
    lam = 4 + int(3 * math.log(n)) if lam is None else int(lam)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return CmaesState(mean, float(sigma), np.eye(n), np.zeros(n), np.zeros(n), CmaesParams.default(n, lam))


def cmaes_ask(state: CmaesState, rng: np.random.Generator, bounds) -> np.ndarray:
    """``lambda`` samples of ``m + sigma * N(0, C)``, clipped to the box."""
    bounds = np.asarray(bounds, dtype=float)
    z = rng.standard_normal((state.lam, state.mean.size))
    X = state.mean + state.sigma * (z * state.D) @ state.B.T
    return np.clip(X, bounds[:, 0], bounds[:, 1])


def cmaes_tell(state: CmaesState, X, fitness) -> CmaesState:
    """Rank ``X`` by ``fitness`` and apply the mean, path, covariance and step-size updates."""
    par = state.params
    n = state.mean.size
    X = np.asarray(X, dtype=float)
    order = np.argsort(np.asarray(fitness, dtype=float), kind="stable")
    Y = (X[order[: par.mu]] - state.mean) / state.sigma
    y_w = par.weights @ Y
    mean = state.mean + state.sigma * y_w

    gen = state.generation + 1
    p_sigma = (1 - par.cs) * state.p_sigma + math.sqrt(par.cs * (2 - par.cs) * par.mueff) * (state.inv_sqrt_C @ y_w)
    ps_norm = float(np.linalg.norm(p_sigma))
    hsig = ps_norm / math.sqrt(1 - (1 - par.cs) ** (2 * gen)) < (1.4 + 2 / (n + 1)) * par.chi_n
    p_c = (1 - par.cc) * state.p_c + hsig * math.sqrt(par.cc * (2 - par.cc) * par.mueff) * y_w

    rank_one = np.outer(p_c, p_c) + (1 - hsig) * par.cc * (2 - par.cc) * state.C
    rank_mu = (Y * par.weights[:, None]).T @ Y
    C = (1 - par.c1 - par.cmu) * state.C + par.c1 * rank_one + par.cmu * rank_mu
    C = 0.5 * (C + C.T)

    sigma = state.sigma * math.exp((par.cs / par.damps) * (ps_norm / par.chi_n - 1))

    B, D, repaired = _eigen(C)
    if repaired:
        C = (B * D**2) @ B.T
        C = 0.5 * (C + C.T)
    return CmaesState(mean, sigma, C, p_sigma, p_c, par, gen, B, D, repaired)


def cmaes_step(state: CmaesState, rng: np.random.Generator, evaluator: Evaluator,
               bounds) -> tuple[Population, CmaesState]:
    X = cmaes_ask(state, rng, bounds)
    fitness = _evaluate_rows(X, evaluator)
    return Population(X, fitness, state.generation + 1), cmaes_tell(state, X, fitness)
