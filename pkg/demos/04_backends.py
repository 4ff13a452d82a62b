# coding: utf-8

# # Evolutionary backends
#
# Real-coded GA, DE/rand/1/bin and CMA-ES, each driven one generation at a
# time.  The hybrid loop wraps exactly these steps.

import numpy as np

from elite_surge.ea import (
    DeParams,
    GaParams,
    cmaes_init,
    cmaes_step,
    de_step,
    ga_step,
    initial_population,
)


def rosen(x):
    return float(100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2)


bounds = np.array([[-5.0, 5.0], [-5.0, 5.0]])


rng = np.random.default_rng(0)
pop = initial_population(bounds, 40, rng, rosen)
for _ in range(60):
    pop = ga_step(pop, GaParams(), rng, rosen, bounds)
print("GA best:", pop.best_fitness)


rng = np.random.default_rng(0)
pop = initial_population(bounds, 40, rng, rosen)
for _ in range(60):
    pop = de_step(pop, DeParams(), rng, rosen, bounds)
print("DE best:", pop.best_fitness)


rng = np.random.default_rng(0)
state = cmaes_init(rng.uniform(-5, 5, 2), sigma=1.3, lam=40)
for _ in range(60):
    pop, state = cmaes_step(state, rng, rosen, bounds)
print("CMA-ES best:", pop.best_fitness, " step size:", state.sigma)
