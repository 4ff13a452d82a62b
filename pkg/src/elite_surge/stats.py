"""Mann-Whitney U test and hybrid-vs-baseline significance verdicts."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr
from scipy.stats import rankdata

__all__ = [
    "ComparisonVerdict",
    "Direction",
    "MannWhitneyResult",
    "Symbol",
    "classify",
    "mann_whitney_u",
]

EXACT_LIMIT = 16


class MannWhitneyResult(NamedTuple):
    u: float
    p: float


class Direction(str, enum.Enum):
    HYBRID_BETTER = "hybrid_better"
    BASELINE_BETTER = "baseline_better"
    NONE = "none"


class Symbol(str, enum.Enum):
    MUCH_BETTER = "≫"
    BETTER = ">"
    EQUIVALENT = "≈"


def _u_statistic(ranks, n1):
    return float(np.sum(ranks[:n1]) - n1 * (n1 + 1) / 2.0)


def _exact_p(ranks, n1, u):
    n = ranks.size
    mean = n1 * (n - n1) / 2.0
    combos = np.array(list(itertools.combinations(range(n), n1)))
    dist = ranks[combos].sum(axis=1) - n1 * (n1 + 1) / 2.0
    observed = abs(u - mean)
    return float(np.mean(np.abs(dist - mean) >= observed - 1e-9))


def mann_whitney_u(a, b, method: str = "normal") -> MannWhitneyResult:
    """Rank-sum U of ``a`` against ``b`` and a two-sided p-value.

    ``method="normal"`` uses the normal approximation with tie-corrected
    variance and a continuity correction.  ``method="exact"`` enumerates
    every split of the pooled midranks (only for ``len(a) + len(b) <= 16``)
    and conditions on the observed ties.  If every value is tied the
    result is ``U = len(a) * len(b) / 2`` and ``p = 1``.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n1, n2 = a.size, b.size
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least two observations")
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return MannWhitneyResult(n1 * n2 / 2.0, 1.0)

    ranks = rankdata(pooled)
    u = _u_statistic(ranks, n1)
    if method == "exact":
        if n1 + n2 > EXACT_LIMIT:
            raise ValueError(f"exact enumeration is limited to {EXACT_LIMIT} observations")
        return MannWhitneyResult(u, _exact_p(ranks, n1, u))
    if method != "normal":
        raise ValueError(f"unknown method {method!r}")

    n = n1 + n2
    _, ties = np.unique(pooled, return_counts=True)
    var = n1 * n2 / 12.0 * ((n + 1) - np.sum(ties**3 - ties) / (n * (n - 1)))
    z = max(abs(u - n1 * n2 / 2.0) - 0.5, 0.0) / math.sqrt(var)
    p = min(1.0, 2.0 * float(ndtr(-z)))
    return MannWhitneyResult(u, p)


@dataclass(frozen=True)
class ComparisonVerdict:
    u_statistic: float
    p_two_sided: float
    direction: Direction
    symbol: Symbol

    def label(self, hybrid: str, baseline: str) -> str:
        return f"{hybrid} {self.symbol.value} {baseline}"


def classify(hybrid_errors, baseline_errors, method: str = "normal") -> ComparisonVerdict:
    """Significance verdict of hybrid against baseline (lower errors are better).

    The direction comes from the medians.  Only a hybrid advantage earns a
    symbol: ``≫`` below p = 0.01, ``>`` below p = 0.05; everything else,
    a significant baseline advantage included, is ``≈``.
    """
    u, p = mann_whitney_u(hybrid_errors, baseline_errors, method)
    mh, mb = float(np.median(hybrid_errors)), float(np.median(baseline_errors))
    if mh < mb:
        direction = Direction.HYBRID_BETTER
    elif mh > mb:
        direction = Direction.BASELINE_BETTER
    else:
        direction = Direction.NONE
    if direction is Direction.HYBRID_BETTER and p < 0.01:
        symbol = Symbol.MUCH_BETTER
    elif direction is Direction.HYBRID_BETTER and p < 0.05:
        symbol = Symbol.BETTER
    else:
        symbol = Symbol.EQUIVALENT
    return ComparisonVerdict(u, p, direction, symbol)
