import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from elite_surge.ea import (
    CmaesParams,
    DeParams,
    GaParams,
    Population,
    cmaes_ask,
    cmaes_init,
    cmaes_step,
    cmaes_tell,
    de_donor,
    de_step,
    ga_step,
    initial_population,
    polynomial_mutation,
    sbx_crossover,
    worst_index,
)


def sphere(x):
    return float(np.sum(np.asarray(x) ** 2))


class Counter:
    def __init__(self, f=sphere):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.f(x)


BOUNDS = np.array([[-100.0, 100.0]] * 3)


def start(n=20, seed=0, f=sphere):
    rng = np.random.default_rng(seed)
    return initial_population(BOUNDS, n, rng, f), rng


# --- worst index


def test_worst_index_cases():
    assert worst_index([3.0, 1.0, 2.0]) == 0
    assert worst_index([5.0, 7.0, 7.0, 1.0]) == 1
    assert worst_index([np.inf, 0.0]) == 0
    assert worst_index(Population(np.zeros((2, 1)), np.array([0.0, 4.0]))) == 1


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=30))
def test_worst_index_matches_brute_force(values):
    top = max(values)
    assert worst_index(values) == min(i for i, v in enumerate(values) if v == top)


# --- GA


def test_ga_without_variation_copies_parents():
    pop, rng = start()
    params = GaParams(crossover_rate=0.0, mutation_rate=0.0)
    nxt = ga_step(pop, params, rng, sphere, BOUNDS)
    parents = {tuple(x) for x in pop.X}
    assert all(tuple(x) in parents for x in nxt.X)


def test_ga_huge_mutation_index_barely_moves():
    rng = np.random.default_rng(1)
    x = np.array([10.0, -20.0, 30.0])
    y = polynomial_mutation(x, BOUNDS[:, 0], BOUNDS[:, 1], 1.0, 1e9, rng)
    np.testing.assert_allclose(y, x, atol=1e-5)


def test_polynomial_mutation_stays_in_box():
    rng = np.random.default_rng(2)
    for _ in range(200):
        x = rng.uniform(-150, 150, 3)
        y = polynomial_mutation(x, BOUNDS[:, 0], BOUNDS[:, 1], 1.0, 20.0, rng)
        assert np.all(np.isfinite(y))
        assert np.all(y >= -100) and np.all(y <= 100)


def test_sbx_preserves_midpoint():
    rng = np.random.default_rng(3)
    p1, p2 = np.array([1.0, 5.0]), np.array([3.0, -1.0])
    c1, c2 = sbx_crossover(p1, p2, 15.0, rng)
    np.testing.assert_allclose(c1 + c2, p1 + p2)


def test_ga_elitism_and_shape():
    pop, rng = start(n=21)
    counter = Counter()
    best = pop.best_fitness
    for _ in range(10):
        pop = ga_step(pop, GaParams(), rng, counter, BOUNDS)
        assert len(pop) == 21
        assert pop.best_fitness <= best
        best = pop.best_fitness
        assert np.all(pop.X >= -100) and np.all(pop.X <= 100)
    assert counter.calls == 10 * 21
    assert pop.generation == 10


def test_ga_deterministic():
    pop1, rng1 = start(seed=4)
    pop2, rng2 = start(seed=4)
    r1 = ga_step(pop1, GaParams(), rng1, sphere, BOUNDS)
    r2 = ga_step(pop2, GaParams(), rng2, sphere, BOUNDS)
    np.testing.assert_array_equal(r1.X, r2.X)
    np.testing.assert_array_equal(r1.fitness, r2.fitness)


def test_ga_params_validation():
    with pytest.raises(ValueError):
        GaParams(crossover_rate=1.5)
    with pytest.raises(ValueError):
        GaParams(sbx_eta=0)


# --- DE


def test_de_donor_value():
    donor = de_donor(np.array([1.0, 1.0]), np.array([3.0, 0.0]), np.array([1.0, 0.0]), 0.7)
    np.testing.assert_allclose(donor, [2.4, 1.0])


def test_de_monotone_per_slot():
    pop, rng = start(n=15, seed=5)
    counter = Counter()
    for _ in range(10):
        nxt = de_step(pop, DeParams(), rng, counter, BOUNDS)
        assert np.all(nxt.fitness <= pop.fitness)
        assert np.all(nxt.X >= -100) and np.all(nxt.X <= 100)
        pop = nxt
    assert counter.calls == 150


def test_de_full_crossover_takes_donor():
    # with Cr = 1 every trial equals its (clipped) donor, so accepted rows
    # lie in the span r1 + F (r2 - r3) of three other members
    pop = Population(np.array([[0.0], [1.0], [2.0], [4.0]]), np.array([0.0, 1.0, 4.0, 16.0]))
    seen = []

    def record(x):
        seen.append(float(x[0]))
        return sphere(x)

    de_step(pop, DeParams(scale=0.5, crossover_rate=1.0), np.random.default_rng(6), record, [[-100, 100]])
    members = [0.0, 1.0, 2.0, 4.0]
    possible = set()
    for i in range(4):
        others = [m for j, m in enumerate(members) if j != i]
        for a in others:
            for b in others:
                for c in others:
                    if len({a, b, c}) == 3:
                        possible.add(round(a + 0.5 * (b - c), 12))
    assert all(round(v, 12) in possible for v in seen)


def test_de_small_population_rejected():
    pop = Population(np.zeros((3, 1)), np.zeros(3))
    with pytest.raises(ValueError):
        de_step(pop, DeParams(), np.random.default_rng(0), sphere, [[-1, 1]])


# --- CMA-ES


class ZeroRng:
    def standard_normal(self, shape):
        return np.zeros(shape)


def test_cmaes_zero_draws_keep_mean():
    state = cmaes_init(np.array([1.0, -2.0]), sigma=1.3, lam=10)
    X = cmaes_ask(state, ZeroRng(), [[-100, 100]] * 2)
    np.testing.assert_array_equal(X, np.tile([1.0, -2.0], (10, 1)))
    nxt = cmaes_tell(state, X, np.zeros(10))
    np.testing.assert_allclose(nxt.mean, [1.0, -2.0])
    par = state.params
    assert nxt.sigma == pytest.approx(1.3 * math.exp(-par.cs / par.damps))


def test_cmaes_default_parameters():
    par = CmaesParams.default(2, 100)
    assert par.mu == 50
    assert par.weights.sum() == pytest.approx(1.0)
    assert np.all(np.diff(par.weights) < 0)
    assert par.c1 + par.cmu <= 1.0


def test_cmaes_covariance_symmetric_positive():
    state = cmaes_init(np.array([50.0, -30.0, 10.0]), lam=30)
    rng = np.random.default_rng(7)
    f = lambda x: float(x[0] ** 2 + 100 * x[1] ** 2 + 1e4 * x[2] ** 2)
    for _ in range(40):
        pop, state = cmaes_step(state, rng, f, BOUNDS)
        np.testing.assert_allclose(state.C, state.C.T)
        assert np.linalg.eigvalsh(state.C).min() > 0
        assert len(pop) == 30
        assert np.all(pop.X >= -100) and np.all(pop.X <= 100)


def test_cmaes_converges_on_sphere():
    state = cmaes_init(np.array([20.0, 20.0]), sigma=5.0, lam=20)
    rng = np.random.default_rng(8)
    for _ in range(150):
        pop, state = cmaes_step(state, rng, sphere, [[-100, 100]] * 2)
    assert pop.best_fitness < 1e-10


def test_cmaes_eigen_floor_repairs_degenerate_covariance():
    state = cmaes_init(np.zeros(2), lam=6)
    from dataclasses import replace

    degenerate = replace(state, C=np.array([[1.0, 1.0], [1.0, 1.0]]), B=None, D=None)
    assert degenerate.repaired
    assert degenerate.D.min() >= 1e-7
