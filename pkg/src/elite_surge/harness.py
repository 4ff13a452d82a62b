"""Experiment configuration, multi-trial execution and significance reports."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .acquisition import AcquisitionSpec
from .ea import DeParams, GaParams
from .hybrid import BACKENDS, HybridConfig, TrialRecord, algorithm_name, run_trial, trial_filename
from .problems import SUITE_IDS, make_problem, make_suite, write_manifest
from .stats import classify

__all__ = [
    "CONFIG_HEADER",
    "ConfigError",
    "ExperimentConfig",
    "RunSummary",
    "build_report",
    "format_listing",
    "load_config",
    "parse_config",
    "run_experiment",
    "trial_seed",
]

CONFIG_HEADER = "elite-surge-config v1"
THREADS_ENV = "ELITE_SURGE_THREADS"
MANIFEST_NAME = "manifest.txt"


class ConfigError(ValueError):
    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    suite_seed: int = 0
    dimensions: tuple[int, ...] = (2, 5, 10)
    trials: int = 30
    backends: tuple[str, ...] = BACKENDS
    problems: tuple[str, ...] = SUITE_IDS
    output_dir: Path = Path("results")
    parallelism: int = 1
    hybrid: HybridConfig = field(default_factory=HybridConfig)

    def __post_init__(self):
        if self.trials < 2:
            raise ConfigError("trials must be at least 2", key="trials")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be at least 1", key="parallelism")
        if any(d < 1 for d in self.dimensions):
            raise ConfigError("dimensions must be positive", key="dimensions")
        for b in self.backends:
            if b not in BACKENDS:
                raise ConfigError(f"unknown backend {b!r}", key="backends")
        for p in self.problems:
            if p not in SUITE_IDS:
                raise ConfigError(f"unknown problem {p!r}", key="problems")


def trial_seed(suite_seed: int, trial_index: int) -> int:
    return int(suite_seed) * 1_000_000 + int(trial_index)


# ---------------------------------------------------------------------------
# config text format


def _int(value):
    return int(value)


def _float(value):
    return float(value)


def _bool(value):
    v = value.lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _ints(value):
    return tuple(int(v) for v in _items(value))


def _items(value):
    return tuple(v.strip() for v in value.split(",") if v.strip())


def _names(value):
    items = _items(value)
    return SUITE_IDS if items == ("all",) else items


# key -> (parser, target); targets starting with "hybrid." go to HybridConfig
_KEYS = {
    "suite_seed": (_int, "suite_seed"),
    "dimensions": (_ints, "dimensions"),
    "trials": (_int, "trials"),
    "backends": (lambda v: tuple(b.upper() for b in _items(v)), "backends"),
    "problems": (_names, "problems"),
    "output_dir": (Path, "output_dir"),
    "parallelism": (_int, "parallelism"),
    "hybrid_enabled": (_bool, "hybrid.hybrid_enabled"),
    "acquisition": (str, "acq.kind"),
    "epsilon": (_float, "acq.epsilon"),
    "xi": (_float, "acq.xi"),
    "pool_size": (_int, "hybrid.pool_size"),
    "explore_in_pool": (_bool, "hybrid.explore_in_pool"),
    "surrogate_data": (str, "hybrid.surrogate_data"),
    "elite_counts_in_budget": (_bool, "hybrid.elite_counts_in_budget"),
    "population_per_dim": (_int, "hybrid.population_per_dim"),
    "budget_per_dim": (_int, "hybrid.budget_per_dim"),
    "ga_crossover_rate": (_float, "ga.crossover_rate"),
    "ga_mutation_rate": (_float, "ga.mutation_rate"),
    "ga_sbx_eta": (_float, "ga.sbx_eta"),
    "ga_pm_eta": (_float, "ga.pm_eta"),
    "ga_tournament_size": (_int, "ga.tournament_size"),
    "de_scale": (_float, "de.scale"),
    "de_crossover_rate": (_float, "de.crossover_rate"),
    "cmaes_sigma": (_float, "hybrid.cmaes_sigma"),
}


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    """Parse the ``key = value`` config format.

    The first non-blank line must be the version header; ``#`` starts a
    comment.  Unknown or repeated keys are errors.  A relative
    ``output_dir`` is resolved against ``base_dir``.
    """
    lines = text.splitlines()
    body_start = None
    for i, line in enumerate(lines):
        if line.strip():
            if line.strip() != CONFIG_HEADER:
                raise ConfigError(f"expected header {CONFIG_HEADER!r}", line=i + 1)
            body_start = i + 1
            break
    if body_start is None:
        raise ConfigError("empty config")

    values = {}
    for i in range(body_start, len(lines)):
        line = lines[i].split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=i + 1)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError("unknown key", line=i + 1, key=key)
        if key in values:
            raise ConfigError("key given twice", line=i + 1, key=key)
        parser, target = _KEYS[key]
        try:
            values[key] = (parser(value), target, i + 1)
        except ValueError as exc:
            raise ConfigError(str(exc), line=i + 1, key=key) from None

    top, hyb, acq, ga, de = {}, {}, {}, {}, {}
    groups = {"hybrid": hyb, "acq": acq, "ga": ga, "de": de}
    for key, (value, target, _) in values.items():
        if "." in target:
            group, name = target.split(".", 1)
            groups[group][name] = value
        else:
            top[key] = value

    def build(key_hint, factory, **kwargs):
        try:
            return factory(**kwargs)
        except ConfigError as exc:
            if exc.line is None and exc.key in values:
                raise ConfigError(str(exc).split(": ", 1)[-1], line=values[exc.key][2], key=exc.key) from None
            raise
        except (ValueError, TypeError) as exc:
            line = values[key_hint][2] if key_hint in values else None
            raise ConfigError(str(exc), line=line, key=key_hint) from None

    kind = acq.pop("kind", "EpsilonGreedy")
    hyb["acquisition"] = build("acquisition", AcquisitionSpec, kind=kind, **acq)
    hyb["ga"] = build("ga_crossover_rate", GaParams, **ga)
    hyb["de"] = build("de_scale", DeParams, **de)
    hybrid = build("surrogate_data", HybridConfig, **hyb)
    if "output_dir" in top and base_dir is not None and not top["output_dir"].is_absolute():
        top["output_dir"] = Path(base_dir) / top["output_dir"]
    return build(None, ExperimentConfig, hybrid=hybrid, **top)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def effective_parallelism(config: ExperimentConfig) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError(f"{THREADS_ENV} must be at least 1")
        return n
    return config.parallelism


# ---------------------------------------------------------------------------
# running


@dataclass(frozen=True)
class _Task:
    problem_id: str
    suite_seed: int
    dimension: int
    hybrid: HybridConfig
    seed: int
    path: Path


@dataclass
class RunSummary:
    trials_run: int = 0
    trials_skipped: int = 0
    evaluations: int = 0
    files: list = field(default_factory=list)


def _execute(task: _Task) -> int:
    problem = make_problem(task.problem_id, task.suite_seed, task.dimension)
    record = run_trial(problem, task.hybrid, task.seed)
    record.write(task.path.parent)
    return record.evaluations


def plan_tasks(config: ExperimentConfig) -> list[_Task]:
    tasks = []
    out = Path(config.output_dir)
    for dim in config.dimensions:
        for pid in config.problems:
            for backend in config.backends:
                for enabled in (True, False):
                    hybrid = replace(config.hybrid, backend=backend, hybrid_enabled=enabled)
                    algo = algorithm_name(backend, enabled)
                    for t in range(config.trials):
                        seed = trial_seed(config.suite_seed, t)
                        path = out / trial_filename(pid, algo, dim, seed)
                        tasks.append(_Task(pid, config.suite_seed, dim, hybrid, seed, path))
    return tasks


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> RunSummary:
    """Run every missing trial of ``config``; completed trial files are left alone."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = "".join(
        write_manifest([p for p in make_suite(config.suite_seed, d) if p.id in config.problems])
        for d in config.dimensions
    )
    (out / MANIFEST_NAME).write_text(manifest)

    summary = RunSummary()
    todo = []
    for task in plan_tasks(config):
        if task.path.exists():
            summary.trials_skipped += 1
        else:
            todo.append(task)
    workers = effective_parallelism(config) if workers is None else workers
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_execute, todo, chunksize=1))
    else:
        counts = [_execute(task) for task in todo]
    summary.trials_run = len(todo)
    summary.evaluations = int(sum(counts))
    summary.files = [t.path for t in todo]
    return summary


# ---------------------------------------------------------------------------
# reporting


@dataclass
class Report:
    rows: list
    missing: list

    def cell(self, problem, backend, dimension):
        for row in self.rows:
            if (row["problem"], row["backend"], row["dimension"]) == (problem, backend, dimension):
                return row
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["problem", "backend", "dimension", "symbol", "direction", "p_two_sided", "u_statistic",
                "n_hybrid", "n_baseline", "median_hybrid", "median_baseline"]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items() if k in cols})
        return buf.getvalue()

    def to_text(self) -> str:
        problems = _ordered(sorted({r["problem"] for r in self.rows} | {m[0] for m in self.missing}))
        present = {r["backend"] for r in self.rows} | {m[1] for m in self.missing}
        backends = [b for b in BACKENDS if b in present]
        dims = sorted({r["dimension"] for r in self.rows} | {m[2] for m in self.missing})
        header = ["Func."] + [f"{b} {d}-D" for b in backends for d in dims]
        table = [header]
        for pid in problems:
            line = [pid]
            for b in backends:
                for d in dims:
                    row = self.cell(pid, b, d)
                    line.append(f"h{b} {row['symbol']} {b}" if row else "missing")
            table.append(line)
        widths = [max(len(r[i]) for r in table) for i in range(len(header))]
        out = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table]
        return "\n".join(out) + "\n"


def _ordered(ids):
    known = [p for p in SUITE_IDS if p in ids]
    return known + sorted(p for p in ids if p not in SUITE_IDS)


def build_report(results_dir) -> Report:
    """Classify every (problem, backend, dimension) cell found in ``results_dir``."""
    groups: dict = {}
    for path in sorted(Path(results_dir).glob("*.csv")):
        rec = TrialRecord.read(path)
        hybrid = rec.algorithm.startswith("h")
        backend = rec.algorithm[1:] if hybrid else rec.algorithm
        key = (rec.problem_id, backend, rec.dimension)
        groups.setdefault(key, ([], []))[0 if hybrid else 1].append(rec.final_error)

    order = {b: i for i, b in enumerate(BACKENDS)}
    rows, missing = [], []
    for key in sorted(groups, key=lambda k: (_ordered([k[0]] + list(SUITE_IDS)).index(k[0]), order.get(k[1], 99), k[2])):
        hyb, base = groups[key]
        if len(hyb) < 2 or len(base) < 2:
            missing.append(key)
            continue
        v = classify(hyb, base)
        rows.append(dict(
            problem=key[0], backend=key[1], dimension=key[2],
            symbol=v.symbol.value, direction=v.direction.value,
            p_two_sided=v.p_two_sided, u_statistic=v.u_statistic,
            n_hybrid=len(hyb), n_baseline=len(base),
            median_hybrid=float(np.median(hyb)), median_baseline=float(np.median(base)),
        ))
    return Report(rows, missing)


def format_listing(config: ExperimentConfig) -> str:
    lines = ["id,family,dimension,optimum_value,seed"]
    for d in config.dimensions:
        for p in make_suite(config.suite_seed, d):
            if p.id in config.problems:
                lines.append(f"{p.id},{p.family},{p.dimension},{p.optimum_value!r},{p.seed}")
    return "\n".join(lines) + "\n"
