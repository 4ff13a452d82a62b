"""Acquisition functions over a GP posterior, written for minimization.

Improvement means a predicted value *below* the incumbent ``f_best``, so
the usual maximization forms are sign-adapted: ``s = (f_best - mu) / sigma``
and the upper confidence bound becomes a lower confidence bound that is
ranked by its smallest value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

__all__ = [
    "AcquisitionSpec",
    "argmax_pool",
    "default_beta",
    "ei",
    "epsilon_greedy_select",
    "expected_improvement",
    "lower_confidence_bound",
    "make_pool",
    "pi",
    "pool_size",
    "probability_of_improvement",
    "score_pool",
    "ucb",
]

KINDS = ("PI", "EI", "UCB", "EpsilonGreedy")
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def default_beta(i: int) -> float:
    return 2.0 * math.log(i + 1.0)


@dataclass(frozen=True)
class AcquisitionSpec:
    """Which acquisition to use and its parameters.

    Only the parameters of the active ``kind`` may be set: ``xi`` for PI,
    ``beta_schedule`` for UCB and ``epsilon`` for EpsilonGreedy.  The
    incumbent is needed by PI and EI.
    """

    kind: str = "EpsilonGreedy"
    xi: float | None = None
    beta_schedule: Callable[[int], float] | None = None
    epsilon: float | None = None
    incumbent: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown acquisition kind {self.kind!r}")
        owners = {"xi": "PI", "beta_schedule": "UCB", "epsilon": "EpsilonGreedy"}
        for name, owner in owners.items():
            if getattr(self, name) is not None and self.kind != owner:
                raise ValueError(f"{name} is only valid for {owner}, not {self.kind}")
        if self.kind == "PI" and self.xi is None:
            object.__setattr__(self, "xi", 0.0)
        if self.kind == "UCB" and self.beta_schedule is None:
            object.__setattr__(self, "beta_schedule", default_beta)
        if self.kind == "EpsilonGreedy" and self.epsilon is None:
            object.__setattr__(self, "epsilon", 0.1)
        if self.xi is not None and self.xi < 0:
            raise ValueError("xi must be non-negative")
        if self.epsilon is not None and not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")

    def with_incumbent(self, f_best: float) -> "AcquisitionSpec":
        return AcquisitionSpec(self.kind, self.xi, self.beta_schedule, self.epsilon, float(f_best))

    def beta(self, i: int) -> float:
        b = float(self.beta_schedule(i))
        if b < 0:
            raise ValueError(f"beta schedule returned a negative weight at i={i}")
        return b


# ---------------------------------------------------------------------------
# closed forms on posterior moments


def probability_of_improvement(mu, sigma, f_best, xi=0.0):
    mu, sigma = np.broadcast_arrays(np.asarray(mu, float), np.asarray(sigma, float))
    gap = f_best - mu - xi
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(sigma > 0, ndtr(gap / np.where(sigma > 0, sigma, 1.0)), (gap > 0).astype(float))
    return out if out.ndim else float(out)


def expected_improvement(mu, sigma, f_best):
    mu, sigma = np.broadcast_arrays(np.asarray(mu, float), np.asarray(sigma, float))
    gain = f_best - mu
    safe = np.where(sigma > 0, sigma, 1.0)
    s = gain / safe
    closed = safe * (s * ndtr(s) + _INV_SQRT_2PI * np.exp(-0.5 * s * s))
    out = np.where(sigma > 0, np.maximum(closed, 0.0), np.maximum(gain, 0.0))
    return out if out.ndim else float(out)


def lower_confidence_bound(mu, sigma, beta):
    out = np.asarray(mu, float) - math.sqrt(beta) * np.asarray(sigma, float)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# model-level wrappers


def _require(spec, kind):
    if spec.kind != kind:
        raise ValueError(f"expected a {kind} spec, got {spec.kind}")
    if kind in ("PI", "EI") and spec.incumbent is None:
        raise ValueError(f"{kind} needs an incumbent value")


def pi(model, x, spec: AcquisitionSpec):
    _require(spec, "PI")
    mu, sigma = model.predict(x)
    return probability_of_improvement(mu, sigma, spec.incumbent, spec.xi)


def ei(model, x, spec: AcquisitionSpec):
    _require(spec, "EI")
    mu, sigma = model.predict(x)
    return expected_improvement(mu, sigma, spec.incumbent)


def ucb(model, x, spec: AcquisitionSpec, i: int):
    """Lower confidence bound ``mu - sqrt(beta_i) sigma``; smaller is better."""
    _require(spec, "UCB")
    mu, sigma = model.predict(x)
    return lower_confidence_bound(mu, sigma, spec.beta(i))


# ---------------------------------------------------------------------------
# candidate pools and selection


def pool_size(dimension: int) -> int:
    return max(1000, 100 * dimension)


def make_pool(bounds, rng: np.random.Generator, extra=None, size: int | None = None) -> np.ndarray:
    """Uniform candidate points in the box, with ``extra`` rows appended."""
    bounds = np.asarray(bounds, dtype=float)
    d = bounds.shape[0]
    m = pool_size(d) if size is None else int(size)
    pool = rng.uniform(bounds[:, 0], bounds[:, 1], size=(m, d))
    if extra is not None and len(extra):
        pool = np.vstack([pool, np.asarray(extra, dtype=float)])
    return pool


def score_pool(model, pool, spec: AcquisitionSpec, i: int = 0):
    """Scores of every pool row and whether larger scores are better."""
    mu, sigma = model.predict(np.atleast_2d(pool))
    if spec.kind == "PI":
        _require(spec, "PI")
        return probability_of_improvement(mu, sigma, spec.incumbent, spec.xi), True
    if spec.kind == "EI":
        _require(spec, "EI")
        return expected_improvement(mu, sigma, spec.incumbent), True
    if spec.kind == "UCB":
        return lower_confidence_bound(mu, sigma, spec.beta(i)), False
    return mu, False


def argmax_pool(model, pool, spec: AcquisitionSpec, i: int = 0) -> np.ndarray:
    """Best pool point under ``spec``; ties go to the lowest index.

    PI and EI are maximized, the confidence bound and the plain posterior
    mean (EpsilonGreedy, greedy branch) are minimized.
    """
    pool = np.atleast_2d(pool)
    scores, larger_is_better = score_pool(model, pool, spec, i)
    idx = int(np.argmax(scores) if larger_is_better else np.argmin(scores))
    return pool[idx].copy()


def epsilon_greedy_select(model, pool, spec: AcquisitionSpec, rng: np.random.Generator, bounds=None,
                          explore_in_pool: bool = False) -> np.ndarray:
    """With probability epsilon a random point, otherwise the pool's lowest predicted mean.

    The random point is uniform over ``bounds`` (default: the model's box),
    or a uniform pick from the pool when ``explore_in_pool`` is set.  The
    model is not consulted on the exploratory branch.
    """
    _require(spec, "EpsilonGreedy")
    pool = np.atleast_2d(pool)
    if rng.random() < spec.epsilon:
        if explore_in_pool:
            return pool[rng.integers(len(pool))].copy()
        if bounds is None:
            lo, hi = model.x_lo, model.x_hi
        else:
            bounds = np.asarray(bounds, dtype=float)
            lo, hi = bounds[:, 0], bounds[:, 1]
        return rng.uniform(lo, hi)
    return argmax_pool(model, pool, spec)
