# coding: utf-8

# # Acquisition functions
#
# PI, EI and the confidence bound are written for minimization: improvement
# means a posterior mean below the incumbent.  The hybrid loop itself uses
# the epsilon-greedy rule.

import numpy as np

from elite_surge import AcquisitionSpec, argmax_pool, epsilon_greedy_select, fit, make_pool
from elite_surge.acquisition import expected_improvement, probability_of_improvement


print("PI(mu=4, sd=1, best=5):", probability_of_improvement(4.0, 1.0, 5.0))
print("EI(mu=0, sd=1, best=0):", expected_improvement(0.0, 1.0, 0.0))


# Fit a surrogate on a quadratic bowl and pick points from a random pool.

rng = np.random.default_rng(3)
bounds = np.array([[-5.0, 5.0], [-5.0, 5.0]])
X = rng.uniform(-5, 5, (25, 2))
y = np.sum((X - 1.0) ** 2, axis=1)
model = fit(X, y, bounds)
pool = make_pool(bounds, rng, extra=X)

for spec in (AcquisitionSpec("EI", incumbent=y.min()), AcquisitionSpec("PI", xi=0.01, incumbent=y.min()),
             AcquisitionSpec("UCB")):
    print(spec.kind, argmax_pool(model, pool, spec, len(y)))


# Epsilon-greedy: the pool point with the lowest posterior mean, or with
# probability epsilon a uniform point from the box.

spec = AcquisitionSpec(epsilon=0.1)
greedy = argmax_pool(model, pool, spec)
picks = [epsilon_greedy_select(model, pool, spec, rng, bounds) for _ in range(2000)]
rate = np.mean([not np.array_equal(p, greedy) for p in picks])
print("greedy pick:", greedy, " exploration rate:", rate)
