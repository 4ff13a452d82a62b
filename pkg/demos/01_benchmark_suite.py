# coding: utf-8

# # The benchmark suite
#
# Ten shifted, rotated problems on [-100, 100]^D: five unimodal, three
# multimodal and two compositions.  Everything is minimized, and each
# problem's optimum value is its bias.

import numpy as np

from elite_surge import EvaluationBudget, evaluate, make_suite
from elite_surge.problems import BudgetExhausted


suite = make_suite(seed=7, dimension=2)
for p in suite:
    print(f"{p.id:10s} {p.family:12s} optimum {p.optimum_value:8.1f}")


# The global minimizer is the shift vector, so probing there recovers the bias.

for p in suite:
    assert np.isclose(evaluate(p, p.optimizer), p.optimum_value)


# Away from the shift the value grows.

rng = np.random.default_rng(0)
sphere = suite[0]
x = rng.uniform(-100, 100, 2)
print("sphere at a random point:", evaluate(sphere, x) - sphere.optimum_value)


# A budget counts true evaluations and refuses to go past its ceiling.

budget = EvaluationBudget(3)
for _ in range(3):
    evaluate(sphere, x, budget)
try:
    evaluate(sphere, x, budget)
except BudgetExhausted as exc:
    print("stopped:", exc)
