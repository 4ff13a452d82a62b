# coding: utf-8

# # One hybrid trial
#
# Each generation the backend produces offspring, a GP is fit to them, an
# epsilon-greedy elite is nominated and evaluated, and the elite replaces
# the worst offspring if it beats it.  With the hybrid switched off the run
# is exactly the plain backend.

import numpy as np

from elite_surge import HybridConfig, make_problem, run_boa, run_trial


problem = make_problem("sphere", seed=7, dimension=2)

for backend in ("GA", "DE", "CMAES"):
    hybrid = run_trial(problem, HybridConfig(backend=backend), seed=1)
    plain = run_trial(problem, HybridConfig(backend=backend, hybrid_enabled=False), seed=1)
    print(f"{backend:6s} hybrid error {hybrid.final_error:.3e}  plain error {plain.final_error:.3e}"
          f"  elites accepted {hybrid.elites_accepted}/{hybrid.generations}")


# The best-so-far history has one entry per true evaluation.

print("history length:", len(hybrid.history), " evaluations:", hybrid.evaluations)
print(hybrid.to_csv().splitlines()[:4])


# The Bayesian optimization baseline on a 1-D quadratic.

result = run_boa(lambda x: float((x[0] - 0.3) ** 2), [[0.0, 1.0]], n_init=5, max_iter=20, seed=0)
print("BOA best x:", result.x, " value:", result.value)
print("incumbents:", np.round(result.incumbents, 6))
