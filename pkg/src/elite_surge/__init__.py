"""Gaussian-process elite injection for GA, DE and CMA-ES."""

from .acquisition import AcquisitionSpec, argmax_pool, epsilon_greedy_select, expected_improvement, make_pool
from .ea import DeParams, GaParams, Population, cmaes_init, cmaes_step, de_step, ga_step, worst_index
from .gpr import GprModel, SingularKernel, fit
from .harness import ExperimentConfig, build_report, load_config, parse_config, run_experiment
from .hybrid import HybridConfig, TrialRecord, hybrid_generation, run_boa, run_trial
from .problems import BenchmarkProblem, BudgetExhausted, EvaluationBudget, evaluate, make_problem, make_suite
from .stats import classify, mann_whitney_u

__version__ = "0.1.0"

__all__ = [
    "AcquisitionSpec", "argmax_pool", "epsilon_greedy_select", "expected_improvement", "make_pool",
    "DeParams", "GaParams", "Population", "cmaes_init", "cmaes_step", "de_step", "ga_step", "worst_index",
    "GprModel", "SingularKernel", "fit",
    "ExperimentConfig", "build_report", "load_config", "parse_config", "run_experiment",
    "HybridConfig", "TrialRecord", "hybrid_generation", "run_boa", "run_trial",
    "BenchmarkProblem", "BudgetExhausted", "EvaluationBudget", "evaluate", "make_problem", "make_suite",
    "classify", "mann_whitney_u",
]
