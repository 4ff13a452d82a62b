"""Benchmark problems, evaluation budgets and the synthetic test suite.

Every problem is a minimization problem of the form::

    f(x) = base(R @ (x - o)) + bias

with a shift ``o`` strictly inside the box, an orthogonal rotation ``R``
and a scalar ``bias``, so the global minimum value is ``bias`` and it is
attained at ``x = o``.  Composition problems blend several such
components with Gaussian proximity weights.

The suite mirrors the unimodal / multimodal / composition structure of
the CEC2013 suite at small scale; shifts and rotations are generated from
a seed instead of being read from the official data files.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "BenchmarkProblem",
    "BudgetExhausted",
    "CompositionComponent",
    "DimensionMismatch",
    "EvaluationBudget",
    "OutOfBounds",
    "BASE_FUNCTIONS",
    "composition_evaluate",
    "evaluate",
    "make_problem",
    "make_suite",
    "random_rotation",
    "read_manifest",
    "suite_from_manifest",
    "write_manifest",
]

DEFAULT_BOUND = 100.0
BOUNDS_TOLERANCE = 1e-9


class BudgetExhausted(RuntimeError):
    """Raised when a true evaluation is requested with no budget left."""


class DimensionMismatch(ValueError):
    pass


class OutOfBounds(ValueError):
    pass


# ---------------------------------------------------------------------------
# base functions, all with minimum 0 at z = 0


def sphere(z):
    return float(np.dot(z, z))


def elliptic(z):
    d = z.size
    if d == 1:
        return float(z[0] ** 2)
    weights = 10.0 ** (6.0 * np.arange(d) / (d - 1))
    return float(np.dot(weights, z * z))


def bent_cigar(z):
    return float(z[0] ** 2 + 1e6 * np.dot(z[1:], z[1:]))


def rastrigin(z):
    return float(10.0 * z.size + np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z)))


def ackley(z):
    d = z.size
    a = -0.2 * math.sqrt(float(np.dot(z, z)) / d)
    b = float(np.sum(np.cos(2.0 * np.pi * z))) / d
    return max(0.0, 20.0 + math.e - 20.0 * math.exp(a) - math.exp(b))


def griewank(z):
    # CEC-style input scaling so the box covers a few hundred basins
    z = z * 6.0
    i = np.arange(1, z.size + 1)
    return float(np.dot(z, z) / 4000.0 - np.prod(np.cos(z / np.sqrt(i))) + 1.0)


def rosenbrock(z):
    z = z * 0.02048 + 1.0
    return float(np.sum(100.0 * (z[:-1] ** 2 - z[1:]) ** 2 + (z[:-1] - 1.0) ** 2))


_SCHWEFEL_OFFSET = 4.209687462275036e2


def _schwefel_terms(z):
    # modified Schwefel: out-of-range coordinates are folded back and penalised
    d = z.size
    out = np.empty_like(z)
    hi = z > 500.0
    lo = z < -500.0
    mid = ~(hi | lo)
    out[mid] = z[mid] * np.sin(np.sqrt(np.abs(z[mid])))
    if hi.any():
        t = 500.0 - np.fmod(z[hi], 500.0)
        out[hi] = t * np.sin(np.sqrt(np.abs(t))) - (z[hi] - 500.0) ** 2 / (10000.0 * d)
    if lo.any():
        t = np.fmod(np.abs(z[lo]), 500.0) - 500.0
        out[lo] = t * np.sin(np.sqrt(np.abs(t))) - (z[lo] + 500.0) ** 2 / (10000.0 * d)
    return out


_SCHWEFEL_PEAK = float(_schwefel_terms(np.array([_SCHWEFEL_OFFSET]))[0])


def schwefel(z):
    z = z * 10.0 + _SCHWEFEL_OFFSET
    return max(0.0, float(np.sum(_SCHWEFEL_PEAK - _schwefel_terms(z))))


BASE_FUNCTIONS: dict[str, Callable[[np.ndarray], float]] = {
    "sphere": sphere,
    "elliptic": elliptic,
    "bentcigar": bent_cigar,
    "rastrigin": rastrigin,
    "ackley": ackley,
    "griewank": griewank,
    "rosenbrock": rosenbrock,
    "schwefel": schwefel,
}

FAMILIES = ("unimodal", "multimodal", "composition")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompositionComponent:
    problem: "BenchmarkProblem"
    sigma: float
    scale: float
    bias: float


@dataclass(frozen=True, eq=False)
class BenchmarkProblem:
    """A shifted, rotated, biased box-constrained minimization problem.

    ``base`` names an entry of :data:`BASE_FUNCTIONS`, or is ``"composition"``
    in which case ``components`` holds the blended sub-problems and
    ``shift`` is the optimum of the first component.
    """

    id: str
    base: str
    family: str
    shift: np.ndarray
    rotation: np.ndarray
    bias: float = 0.0
    bounds: np.ndarray = None
    components: tuple[CompositionComponent, ...] = ()
    seed: int | None = None

    def __post_init__(self):
        shift = np.asarray(self.shift, dtype=float)
        rotation = np.asarray(self.rotation, dtype=float)
        d = shift.size
        if rotation.shape != (d, d):
            raise DimensionMismatch(f"rotation shape {rotation.shape} does not match D={d}")
        if self.bounds is None:
            bounds = np.tile([-DEFAULT_BOUND, DEFAULT_BOUND], (d, 1))
        else:
            bounds = np.asarray(self.bounds, dtype=float).reshape(d, 2)
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.base != "composition" and self.base not in BASE_FUNCTIONS:
            raise ValueError(f"unknown base function {self.base!r}")
        for name, arr in (("shift", shift), ("rotation", rotation), ("bounds", bounds)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dimension(self) -> int:
        return self.shift.size

    @property
    def lower(self) -> np.ndarray:
        return self.bounds[:, 0]

    @property
    def upper(self) -> np.ndarray:
        return self.bounds[:, 1]

    @property
    def optimum_value(self) -> float:
        return float(self.bias)

    @property
    def optimizer(self) -> np.ndarray:
        return self.shift

    def raw(self, x) -> float:
        """Objective value without bounds checks or budget accounting."""
        x = np.asarray(x, dtype=float)
        if self.base == "composition":
            return composition_evaluate(self.components, x) + self.bias
        z = self.rotation @ (x - self.shift)
        return BASE_FUNCTIONS[self.base](z) + self.bias

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def clip(self, x) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


class EvaluationBudget:
    """Counter of true objective evaluations with a hard ceiling."""

    def __init__(self, max_evaluations: int):
        if max_evaluations < 1:
            raise ValueError("max_evaluations must be positive")
        self.max_evaluations = int(max_evaluations)
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.max_evaluations - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.max_evaluations

    def charge(self) -> None:
        if self.used >= self.max_evaluations:
            raise BudgetExhausted(f"budget of {self.max_evaluations} evaluations exhausted")
        self.used += 1

    def __repr__(self):
        return f"EvaluationBudget(used={self.used}, max_evaluations={self.max_evaluations})"


def evaluate(problem: BenchmarkProblem, x, budget: EvaluationBudget | None = None) -> float:
    """Evaluate ``problem`` at ``x``, charging one unit to ``budget`` if given.

    Out-of-bounds inputs are rejected; clipping is the optimizer's job.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dimension,):
        raise DimensionMismatch(f"expected a vector of length {problem.dimension}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite point {x}")
    if np.any(x < problem.lower - BOUNDS_TOLERANCE) or np.any(x > problem.upper + BOUNDS_TOLERANCE):
        raise OutOfBounds(f"point {x} lies outside the search box")
    if budget is not None:
        budget.charge()
    return problem.raw(x)


def composition_evaluate(components: Sequence[CompositionComponent], x) -> float:
    """Proximity-weighted blend ``sum_k w_k * (scale_k * f_k(x) + bias_k)``.

    ``w_k`` is proportional to ``exp(-|x - o_k|^2 / (2 D sigma_k^2))`` and the
    weights sum to one.  A point sitting exactly on a component's shift gets
    that component's value alone; if every weight underflows the nearest
    component takes the full weight.
    """
    if len(components) < 2:
        raise ValueError("a composition needs at least two components")
    x = np.asarray(x, dtype=float)
    d = x.size
    if any(c.problem.dimension != d for c in components):
        raise DimensionMismatch("composition components must share the input dimension")
    dist2 = np.array([np.sum((x - c.problem.shift) ** 2) for c in components])
    values = np.array([c.scale * c.problem.raw(x) + c.bias for c in components])

    exact = dist2 == 0.0
    if exact.any():
        weights = exact.astype(float)
    else:
        sigmas = np.array([c.sigma for c in components])
        weights = np.exp(-dist2 / (2.0 * d * sigmas**2))
        if not weights.any():
            weights = np.zeros(len(components))
            weights[np.argmin(dist2)] = 1.0
    weights = weights / weights.sum()
    return float(np.dot(weights, values))


# ---------------------------------------------------------------------------
# suite construction


def random_rotation(rng: np.random.Generator, d: int) -> np.ndarray:
    """Orthogonal matrix from the QR decomposition of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


# (id, base, family, bias); order fixes the suite order
_SUITE_LAYOUT = [
    ("sphere", "sphere", "unimodal", -1400.0),
    ("elliptic", "elliptic", "unimodal", -1300.0),
    ("bentcigar", "bentcigar", "unimodal", -1200.0),
    ("rastrigin", "rastrigin", "multimodal", -800.0),
    ("ackley", "ackley", "multimodal", -700.0),
    ("griewank", "griewank", "multimodal", -600.0),
    ("rosenbrock", "rosenbrock", "multimodal", -500.0),
    ("schwefel", "schwefel", "multimodal", -400.0),
    ("comp1", "composition", "composition", 700.0),
    ("comp2", "composition", "composition", 800.0),
]

# (base, sigma, scale, bias) for each component
_COMPOSITIONS = {
    "comp1": [("sphere", 10.0, 1.0, 0.0), ("elliptic", 20.0, 1e-6, 100.0), ("bentcigar", 30.0, 1e-6, 200.0)],
    "comp2": [("rastrigin", 10.0, 1.0, 0.0), ("griewank", 20.0, 10.0, 100.0), ("schwefel", 30.0, 1.0, 200.0)],
}

SHIFT_MARGIN = 0.8


def _problem_seed(seed: int, dimension: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(dimension), int(index)])


def make_problem(problem_id: str, seed: int, dimension: int) -> BenchmarkProblem:
    """Build one suite member; depends only on ``(problem_id, seed, dimension)``."""
    ids = [row[0] for row in _SUITE_LAYOUT]
    try:
        index = ids.index(problem_id)
    except ValueError:
        raise KeyError(f"unknown problem id {problem_id!r}; known: {', '.join(ids)}") from None
    _, base, family, bias = _SUITE_LAYOUT[index]
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(_problem_seed(seed, dimension, index))
    bound = DEFAULT_BOUND * SHIFT_MARGIN

    if base != "composition":
        return BenchmarkProblem(
            id=problem_id,
            base=base,
            family=family,
            shift=rng.uniform(-bound, bound, dimension),
            rotation=random_rotation(rng, dimension),
            bias=bias,
            seed=int(seed),
        )

    components = []
    for k, (sub, sigma, scale, cbias) in enumerate(_COMPOSITIONS[problem_id]):
        sub_problem = BenchmarkProblem(
            id=f"{problem_id}.{k}",
            base=sub,
            family="composition",
            shift=rng.uniform(-bound, bound, dimension),
            rotation=random_rotation(rng, dimension),
            bias=0.0,
        )
        components.append(CompositionComponent(sub_problem, sigma, scale, cbias))
    return BenchmarkProblem(
        id=problem_id,
        base="composition",
        family=family,
        shift=components[0].problem.shift,
        rotation=np.eye(dimension),
        bias=bias,
        components=tuple(components),
        seed=int(seed),
    )


def make_suite(seed: int, dimension: int) -> list[BenchmarkProblem]:
    """Deterministic 10-problem suite: 3 unimodal, 5 multimodal, 2 composition."""
    return [make_problem(row[0], seed, dimension) for row in _SUITE_LAYOUT]


SUITE_IDS = tuple(row[0] for row in _SUITE_LAYOUT)


# ---------------------------------------------------------------------------
# manifest

MANIFEST_HEADER = "id,family,dimension,bias,seed"


def write_manifest(problems: Sequence[BenchmarkProblem], stream=None) -> str:
    """One line per problem; enough to rebuild the suite with :func:`suite_from_manifest`."""
    buf = io.StringIO()
    buf.write(MANIFEST_HEADER + "\n")
    for p in problems:
        buf.write(f"{p.id},{p.family},{p.dimension},{p.bias!r},{p.seed}\n")
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_manifest(text: str) -> list[dict]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != MANIFEST_HEADER:
        raise ValueError("not a problem manifest")
    records = []
    for line in lines[1:]:
        pid, family, dim, bias, seed = line.split(",")
        records.append(
            {"id": pid, "family": family, "dimension": int(dim), "bias": float(bias), "seed": int(seed)}
        )
    return records


def suite_from_manifest(text: str) -> list[BenchmarkProblem]:
    problems = []
    for rec in read_manifest(text):
        p = make_problem(rec["id"], rec["seed"], rec["dimension"])
        if p.family != rec["family"] or p.bias != rec["bias"]:
            raise ValueError(f"manifest record for {rec['id']} does not match the generator")
        problems.append(p)
    return problems
