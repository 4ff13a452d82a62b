"""Noise-free Gaussian process regression with an isotropic squared-exponential kernel.

Inputs are mapped to the unit box and targets are standardized before
fitting, so a single fixed hyperparameter grid serves every problem
scale.  Hyperparameters are picked by maximizing the log marginal
likelihood over that grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

__all__ = [
    "GprModel",
    "SingularKernel",
    "LENGTH_SCALE_GRID",
    "SIGNAL_VARIANCE_GRID",
    "fit",
    "log_marginal_likelihood",
    "se_kernel",
]

LENGTH_SCALE_GRID = np.logspace(-2, 1, 13)
SIGNAL_VARIANCE_GRID = (0.5, 1.0, 2.0)
JITTER = 1e-10
MAX_JITTER = 1e-4
CONSTANT_TARGET_TOL = 1e-12


class SingularKernel(np.linalg.LinAlgError):
    """The kernel matrix could not be factorized even with the largest jitter."""


def _sqdist(a, b):
    d2 = np.sum(a * a, axis=1)[:, None] + np.sum(b * b, axis=1)[None, :] - 2.0 * a @ b.T
    return np.maximum(d2, 0.0)


def se_kernel(a, b, length_scale, signal_variance):
    """``signal_variance * exp(-|a - b|^2 / (2 length_scale^2))`` for all row pairs."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    return signal_variance * np.exp(-0.5 * _sqdist(a, b) / length_scale**2)


def _factorize(K):
    """Cholesky of ``K + jitter I`` with jitter escalated by 10x up to MAX_JITTER."""
    n = K.shape[0]
    jitter = JITTER
    while jitter <= MAX_JITTER * (1 + 1e-9):
        try:
            return cholesky(K + jitter * np.eye(n), lower=True, check_finite=False), jitter
        except LinAlgError:
            jitter *= 10.0
    raise SingularKernel("kernel matrix is not positive definite up to jitter 1e-4")


def log_marginal_likelihood(L, alpha, y):
    n = y.size
    return -0.5 * float(y @ alpha) - float(np.sum(np.log(np.diag(L)))) - 0.5 * n * np.log(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class GprModel:
    """A fitted GP surrogate.

    ``X_train`` lives in the unit box and ``y_train`` is standardized;
    :meth:`predict` takes and returns values on the original scales.
    ``chol`` is ``None`` for a constant-target model.
    """

    X_train: np.ndarray
    y_train: np.ndarray
    length_scale: float
    signal_variance: float
    jitter: float
    chol: np.ndarray | None
    alpha: np.ndarray | None
    y_mean: float
    y_sd: float
    x_lo: np.ndarray
    x_hi: np.ndarray
    log_likelihood: float = np.nan

    @property
    def degenerate(self) -> bool:
        return self.chol is None

    def normalize(self, X):
        return (np.atleast_2d(np.asarray(X, dtype=float)) - self.x_lo) / (self.x_hi - self.x_lo)

    def predict(self, X):
        """Posterior mean and standard deviation at the rows of ``X``.

        A 1-D ``X`` is a single point and scalars are returned.
        """
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        Z = self.normalize(X)
        if self.degenerate:
            mu = np.full(Z.shape[0], self.y_mean)
            sigma = np.zeros(Z.shape[0])
        else:
            Ks = se_kernel(Z, self.X_train, self.length_scale, self.signal_variance)
            mu = self.y_mean + self.y_sd * (Ks @ self.alpha)
            v = solve_triangular(self.chol, Ks.T, lower=True, check_finite=False)
            var = self.signal_variance - np.sum(v * v, axis=0)
            sigma = self.y_sd * np.sqrt(np.maximum(var, 0.0))
        if single:
            return float(mu[0]), float(sigma[0])
        return mu, sigma

    def __call__(self, X):
        return self.predict(X)


def fit(X, y, bounds, length_scale=None, signal_variance=None) -> GprModel:
    """Fit a GP to ``(X, y)`` inside the box ``bounds`` (shape ``(D, 2)``).

    ``length_scale`` (unit-box units) and ``signal_variance`` fix the
    corresponding hyperparameter instead of searching the grid.

    Raises
    ------
    SingularKernel
        If no grid setting gives a factorizable kernel matrix.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
    if X.shape[0] != y.size:
        raise ValueError("X and y disagree on the number of points")
    if X.shape[0] < 2:
        raise ValueError("need at least two training points")
    if not np.all(np.isfinite(y)):
        raise ValueError("training targets must be finite")
    if X.shape[1] != bounds.shape[0]:
        raise ValueError("bounds do not match the input dimension")

    x_lo, x_hi = bounds[:, 0].copy(), bounds[:, 1].copy()
    Z = (X - x_lo) / (x_hi - x_lo)
    y_mean = float(np.mean(y))
    y_sd = float(np.std(y))

    if y_sd < CONSTANT_TARGET_TOL:
        return GprModel(Z, np.zeros_like(y), np.nan, np.nan, 0.0, None, None, y_mean, 0.0, x_lo, x_hi)

    ys = (y - y_mean) / y_sd
    scales = LENGTH_SCALE_GRID if length_scale is None else [float(length_scale)]
    variances = SIGNAL_VARIANCE_GRID if signal_variance is None else [float(signal_variance)]
    d2 = _sqdist(Z, Z)

    best = None
    for ell in scales:
        K0 = np.exp(-0.5 * d2 / ell**2)
        for sf2 in variances:
            try:
                L, jitter = _factorize(sf2 * K0)
            except SingularKernel:
                continue
            alpha = cho_solve((L, True), ys, check_finite=False)
            lml = log_marginal_likelihood(L, alpha, ys)
            if best is None or lml > best[0]:
                best = (lml, ell, sf2, jitter, L, alpha)
    if best is None:
        raise SingularKernel("no hyperparameter setting gave a factorizable kernel")

    lml, ell, sf2, jitter, L, alpha = best
    return GprModel(Z, ys, ell, sf2, jitter, L, alpha, y_mean, y_sd, x_lo, x_hi, lml)
