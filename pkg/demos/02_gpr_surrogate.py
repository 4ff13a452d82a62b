# coding: utf-8

# # Gaussian process surrogate
#
# A noise-free GP with an isotropic squared-exponential kernel.  Inputs are
# scaled to the unit box, targets are standardized, and the length scale
# and signal variance come from a small log-likelihood grid.

import numpy as np

from elite_surge import fit


rng = np.random.default_rng(1)
X = rng.uniform(-3, 3, (12, 1))
y = np.sin(2 * X[:, 0]) + 0.1 * X[:, 0] ** 2
model = fit(X, y, bounds=[[-3, 3]])
print("length scale (unit box):", model.length_scale)
print("signal variance:", model.signal_variance)


# The posterior mean interpolates the data and the uncertainty collapses there.

mu, sigma = model.predict(X)
print("max residual:", np.max(np.abs(mu - y)))
print("max sd at training points:", sigma.max())


# Between observations the uncertainty opens up again.

grid = np.linspace(-3, 3, 7)[:, None]
mu, sigma = model.predict(grid)
for g, m, s in zip(grid[:, 0], mu, sigma):
    print(f"x={g:5.2f}  mean={m:7.3f}  sd={s:.3f}")
