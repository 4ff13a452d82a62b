import numpy as np
import pytest

from elite_surge.acquisition import AcquisitionSpec
from elite_surge.ea import de_step, ga_step, initial_population, cmaes_init, cmaes_step
from elite_surge.hybrid import (
    GenerationInfo,
    HybridConfig,
    TrialEvaluator,
    TrialRecord,
    hybrid_generation,
    make_backend,
    run_boa,
    run_trial,
    trial_filename,
    trial_rngs,
)
from elite_surge.problems import EvaluationBudget, make_problem

SMALL = dict(population_per_dim=10, budget_per_dim=200)


@pytest.fixture(scope="module")
def sphere2():
    return make_problem("sphere", 7, 2)


def one_generation(problem, config, elite_value, seed=0):
    """Run a single hybrid generation with a patched elite fitness."""
    backend = make_backend(config, problem)
    rngs = trial_rngs(seed)
    evaluator = TrialEvaluator(problem, EvaluationBudget(10_000))
    state = backend.start(rngs[0], evaluator)
    real = evaluator.__call__
    calls = {"n": 0}

    class Patched(TrialEvaluator):
        def __call__(self, x):
            calls["n"] += 1
            if calls["n"] > backend.size:
                return elite_value
            return real(x)

    patched = Patched(problem, evaluator.budget)
    info = GenerationInfo()
    offspring, _ = hybrid_generation(state, backend, config, patched, rngs, None, info)
    return offspring, info


def plain_offspring(problem, config, seed=0):
    backend = make_backend(config, problem)
    rngs = trial_rngs(seed)
    evaluator = TrialEvaluator(problem, EvaluationBudget(10_000))
    state = backend.start(rngs[0], evaluator)
    return backend.offspring(state, rngs[0], evaluator)


@pytest.mark.parametrize("backend", ["GA", "DE", "CMAES"])
def test_rejected_elite_leaves_offspring_untouched(sphere2, backend):
    config = HybridConfig(backend=backend, **SMALL)
    offspring, info = one_generation(sphere2, config, elite_value=1e300)
    reference = plain_offspring(sphere2, config)
    np.testing.assert_array_equal(offspring.X, reference.X)
    np.testing.assert_array_equal(offspring.fitness, reference.fitness)
    assert not info.accepted


@pytest.mark.parametrize("backend", ["GA", "DE", "CMAES"])
def test_accepted_elite_takes_worst_slot(sphere2, backend):
    config = HybridConfig(backend=backend, **SMALL)
    offspring, info = one_generation(sphere2, config, elite_value=-1e300)
    reference = plain_offspring(sphere2, config)
    slot = int(np.argmax(reference.fitness))
    assert info.accepted and info.replaced == slot
    np.testing.assert_array_equal(offspring.X[slot], info.elite)
    assert offspring.fitness[slot] == -1e300
    others = np.arange(len(reference)) != slot
    np.testing.assert_array_equal(offspring.X[others], reference.X[others])
    assert sum(np.array_equal(row, info.elite) for row in offspring.X) == 1


@pytest.mark.parametrize("backend", ["GA", "DE", "CMAES"])
def test_budget_grows_by_population_plus_one(sphere2, backend):
    config = HybridConfig(backend=backend, **SMALL)
    backend_obj = make_backend(config, sphere2)
    rngs = trial_rngs(3)
    budget = EvaluationBudget(400)
    evaluator = TrialEvaluator(sphere2, budget)
    state = backend_obj.start(rngs[0], evaluator)
    used = budget.used
    for _ in range(5):
        info = GenerationInfo()
        _, state = hybrid_generation(state, backend_obj, config, evaluator, rngs, None, info)
        if info.skipped is None:
            assert budget.used - used == backend_obj.size + 1
        used = budget.used


def test_elite_outside_budget_when_flag_off(sphere2):
    config = HybridConfig(elite_counts_in_budget=False, **SMALL)
    record = run_trial(sphere2, config, seed=2)
    assert record.evaluations == 400
    assert len(record.history) == 400


def _manual_run(problem, config, seed):
    """Plain backend loop written directly against ea_core."""
    budget = EvaluationBudget(config.max_evaluations(problem.dimension))
    evaluator = TrialEvaluator(problem, budget)
    rng = trial_rngs(seed)[0]
    n = config.population_size(problem.dimension)
    bounds = problem.bounds
    try:
        if config.backend == "CMAES":
            state = cmaes_init(rng.uniform(bounds[:, 0], bounds[:, 1]), config.cmaes_sigma, n)
            while True:
                _, state = cmaes_step(state, rng, evaluator, bounds)
        pop = initial_population(bounds, n, rng, evaluator)
        step = ga_step if config.backend == "GA" else de_step
        params = config.ga if config.backend == "GA" else config.de
        while True:
            pop = step(pop, params, rng, evaluator, bounds)
    except Exception as exc:  # BudgetExhausted ends the loop
        assert type(exc).__name__ == "BudgetExhausted"
    return np.array(evaluator.history)


@pytest.mark.parametrize("backend", ["GA", "DE", "CMAES"])
@pytest.mark.parametrize("pid", ["sphere", "rastrigin", "comp1"])
def test_ablation_identity(backend, pid):
    problem = make_problem(pid, 7, 2)
    config = HybridConfig(backend=backend, hybrid_enabled=False, **SMALL)
    record = run_trial(problem, config, seed=11)
    manual = _manual_run(problem, config, 11)
    assert record.to_csv() == TrialRecord(
        problem.id, record.algorithm, 2, 11, problem.optimum_value, manual
    ).to_csv()


@pytest.mark.parametrize("backend", ["GA", "DE", "CMAES"])
def test_history_length_and_monotone(sphere2, backend):
    record = run_trial(sphere2, HybridConfig(backend=backend, **SMALL), seed=5)
    assert len(record.history) == 400 == record.evaluations
    assert np.all(np.diff(record.history) <= 0)
    assert record.final_error == record.history[-1] - sphere2.optimum_value
    assert record.final_error >= 0


def test_same_seed_same_trajectory(sphere2):
    a = run_trial(sphere2, HybridConfig(**SMALL), seed=9)
    b = run_trial(sphere2, HybridConfig(**SMALL), seed=9)
    assert a.to_csv() == b.to_csv()


def test_training_set_is_one_generation(sphere2, monkeypatch):
    import elite_surge.hybrid as hybrid

    sizes = []
    real_fit = hybrid.fit

    def spy(X, y, bounds, *args, **kwargs):
        sizes.append(len(X))
        return real_fit(X, y, bounds, *args, **kwargs)

    monkeypatch.setattr(hybrid, "fit", spy)
    run_trial(sphere2, HybridConfig(**SMALL), seed=1)
    assert sizes and set(sizes) == {20}


def test_cumulative_archive_grows_to_limit(sphere2, monkeypatch):
    import elite_surge.hybrid as hybrid

    sizes = []
    real_fit = hybrid.fit

    def spy(X, y, bounds, *args, **kwargs):
        sizes.append(len(X))
        return real_fit(X, y, bounds, *args, **kwargs)

    monkeypatch.setattr(hybrid, "fit", spy)
    config = HybridConfig(surrogate_data="cumulative_archive", archive_limit=50, **SMALL)
    run_trial(sphere2, config, seed=1)
    assert sizes[:3] == [20, 40, 50]
    assert max(sizes) == 50


def test_elite_never_worsens_best(sphere2):
    def check(offspring, state, info):
        if info.accepted:
            assert offspring.fitness[info.replaced] == info.elite_fitness
            assert offspring.best_fitness <= info.elite_fitness
        check.best.append(offspring.best_fitness)

    check.best = []
    run_trial(sphere2, HybridConfig(backend="DE", **SMALL), seed=4, on_generation=check)
    assert np.all(np.diff(check.best) <= 0)


def test_acquisition_variants_run(sphere2):
    for spec in (AcquisitionSpec("EI"), AcquisitionSpec("PI", xi=0.01), AcquisitionSpec("UCB")):
        record = run_trial(sphere2, HybridConfig(acquisition=spec, **SMALL), seed=0)
        assert len(record.history) == 400


def test_invalid_config():
    with pytest.raises(ValueError):
        HybridConfig(backend="PSO")
    with pytest.raises(ValueError):
        HybridConfig(surrogate_data="everything")


# --- CSV


def test_csv_round_trip(tmp_path, sphere2):
    record = run_trial(sphere2, HybridConfig(**SMALL), seed=3)
    path = record.write(tmp_path)
    assert path.endswith("sphere_hDE_2d_seed3.csv")
    back = TrialRecord.read(path)
    np.testing.assert_array_equal(back.history, record.history)
    assert back.optimum_value == record.optimum_value
    assert back.to_csv() == record.to_csv()
    assert not list(tmp_path.glob("*.part"))


def test_csv_layout():
    record = TrialRecord("sphere", "DE", 2, 4, -1400.0, np.array([3.0, 1.5]))
    assert record.to_csv().splitlines() == [
        "# problem=sphere,algorithm=DE,dimension=2,seed=4,optimum=-1400.0",
        "evaluation_index,best_so_far",
        "1,3.0",
        "2,1.5",
    ]
    assert trial_filename("comp2", "hCMAES", 10, 7) == "comp2_hCMAES_10d_seed7.csv"


def test_csv_rejects_garbage():
    with pytest.raises(ValueError):
        TrialRecord.from_csv("evaluation_index,best_so_far\n1,2\n")


# --- BOA


def test_boa_without_iterations_returns_design_best():
    f = lambda x: float((x[0] - 0.3) ** 2)
    result = run_boa(f, [[0, 1]], n_init=6, max_iter=0, seed=1)
    assert len(result.y) == 6
    assert result.value == result.y.min()
    assert result.incumbents.tolist() == [result.y.min()]


def test_boa_quadratic():
    f = lambda x: float((x[0] - 0.3) ** 2)
    result = run_boa(f, [[0, 1]], n_init=5, max_iter=20, seed=2)
    assert result.value <= 1e-2
    assert len(result.y) == 25
    assert np.all(np.diff(result.incumbents) <= 0)


def test_boa_latin_hypercube_strata():
    result = run_boa(lambda x: float(x[0]), [[0, 1]], n_init=5, max_iter=0, seed=3)
    strata = np.floor(result.X[:, 0] * 5).astype(int)
    assert sorted(strata) == [0, 1, 2, 3, 4]


def test_boa_requires_two_initial_points():
    with pytest.raises(ValueError):
        run_boa(lambda x: 0.0, [[0, 1]], n_init=1, max_iter=3)


def test_boa_constant_objective_does_not_crash():
    result = run_boa(lambda x: 1.0, [[0, 1], [0, 1]], n_init=4, max_iter=5, seed=0)
    assert result.value == 1.0
