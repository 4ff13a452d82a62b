import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import mannwhitneyu

from elite_surge.stats import Direction, Symbol, classify, mann_whitney_u


def test_fully_separated_small_samples():
    u, p = mann_whitney_u([1, 2, 3], [4, 5, 6], method="exact")
    assert u == 0.0
    assert p == pytest.approx(0.1)


def test_all_tied():
    for method in ("normal", "exact"):
        u, p = mann_whitney_u([5, 5, 5], [5, 5, 5, 5], method=method)
        assert u == 6.0
        assert p == 1.0


def test_too_small_samples_rejected():
    with pytest.raises(ValueError):
        mann_whitney_u([1.0], [2.0, 3.0])


def test_exact_limit():
    with pytest.raises(ValueError):
        mann_whitney_u(np.arange(9), np.arange(9) + 0.5, method="exact")


def test_normal_matches_scipy_with_ties():
    rng = np.random.default_rng(3)
    for _ in range(25):
        a = rng.integers(0, 6, rng.integers(2, 30))
        b = rng.integers(0, 6, rng.integers(2, 30))
        if np.all(np.concatenate([a, b]) == a[0]):
            continue
        ours = mann_whitney_u(a, b)
        ref = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
        assert ours.u == pytest.approx(ref.statistic)
        assert ours.p == pytest.approx(ref.pvalue, rel=1e-9)


def test_exact_matches_scipy_without_ties():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n1, n2 = rng.integers(2, 9, 2)
        x = rng.permutation(16)[: n1 + n2].astype(float)
        ours = mann_whitney_u(x[:n1], x[n1:], method="exact")
        ref = mannwhitneyu(x[:n1], x[n1:], alternative="two-sided", method="exact")
        assert ours.p == pytest.approx(ref.pvalue, rel=1e-9)


samples = st.lists(st.integers(-20, 20), min_size=2, max_size=12)


@given(samples, samples)
def test_u_symmetry(a, b):
    uab = mann_whitney_u(a, b).u
    uba = mann_whitney_u(b, a).u
    assert uab + uba == pytest.approx(len(a) * len(b))


@given(samples, samples)
def test_invariant_under_monotone_transform(a, b):
    base = mann_whitney_u(a, b)
    moved = mann_whitney_u(np.exp(np.asarray(a) / 10.0), np.exp(np.asarray(b) / 10.0))
    assert moved.u == base.u
    assert moved.p == pytest.approx(base.p)


def test_classify_much_better():
    hybrid = np.linspace(0, 1, 30)
    baseline = hybrid + 5
    verdict = classify(hybrid, baseline)
    assert verdict.symbol is Symbol.MUCH_BETTER
    assert verdict.direction is Direction.HYBRID_BETTER
    assert verdict.label("H-DE", "DE") == "H-DE ≫ DE"


def test_classify_better_band():
    # separated enough for p in [0.01, 0.05)
    hybrid = [1, 2, 3, 4, 6, 7, 9, 11]
    baseline = [5, 8, 10, 12, 13, 14, 15, 16]
    verdict = classify(hybrid, baseline)
    assert 0.01 <= verdict.p_two_sided < 0.05
    assert verdict.symbol is Symbol.BETTER


def test_classify_baseline_better_is_equivalent_symbol():
    verdict = classify(np.arange(30) + 100.0, np.arange(30.0))
    assert verdict.direction is Direction.BASELINE_BETTER
    assert verdict.p_two_sided < 0.01
    assert verdict.symbol is Symbol.EQUIVALENT


def test_classify_identical_data():
    data = np.random.default_rng(1).random(30)
    verdict = classify(data, data.copy())
    assert verdict.direction is Direction.NONE
    assert verdict.symbol is Symbol.EQUIVALENT
    assert verdict.p_two_sided > 0.9
