# coding: utf-8

# # Significance tests and the experiment harness
#
# Hybrid and baseline final errors are compared with a two-sided
# Mann-Whitney U test.  Only a hybrid advantage gets a symbol.

import tempfile
from pathlib import Path

import numpy as np

from elite_surge import build_report, classify, mann_whitney_u, parse_config, run_experiment


print(mann_whitney_u([1, 2, 3], [4, 5, 6], method="exact"))

rng = np.random.default_rng(0)
hybrid = rng.lognormal(0, 1, 30)
baseline = rng.lognormal(1.5, 1, 30)
verdict = classify(hybrid, baseline)
print(verdict.label("hDE", "DE"), f"p={verdict.p_two_sided:.2g}")


# A small experiment: two problems, DE only, five trials, reduced budget.
# The CLI equivalent is `elite-surge run --config demos/small.cfg`.

text = (Path(__file__).parent / "small.cfg").read_text()
with tempfile.TemporaryDirectory() as tmp:
    config = parse_config(text, base_dir=Path(tmp))
    summary = run_experiment(config)
    print(f"{summary.trials_run} trials, {summary.evaluations} evaluations")
    report = build_report(config.output_dir)
    print(report.to_text())
    print(report.to_csv())
