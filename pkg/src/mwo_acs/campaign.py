"""Multi-run experiment campaigns, statistics and CSV export.

A campaign is a JSON document::

    {
      "problem": "tf1",                      # or {"acs": "instance.json",
                                             #     "per_student_coverage": false,
                                             #     "filtered": false}
      "algorithms": [
        {"name": "MWO"},
        {"name": "WO", "ablation": "wo", "config": {"population_size": 30}}
      ],
      "run_count": 30,
      "base_seed": 0,
      "iterations": 500,
      "population": 30,
      "workers": 1,
      "out": "results/tf1"
    }

Run ``r`` of every algorithm uses seed ``base_seed + r``. The output
directory can be overridden with the ``MWO_ACS_OUT`` environment variable.

Layout of the output directory::

    campaign.json            resolved config
    runs/<alg>/seed_<s>.json one RunRecord per run
    results.csv              algorithm, seed, final fitness, iterations, evaluations
    summary.csv              mean / std per algorithm
    wilcoxon.csv             first algorithm against each other one
    traces/<alg>_seed_<s>.csv  iteration, best_fitness
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import benchmarks
from .model import load_instance
from .objective import AcsObjective
from .optimizer import OptimizerConfig, RunRecord, optimize
from .stats import summarize, wilcoxon_rank_sum

OUT_ENV = "MWO_ACS_OUT"
_ALGO_KEYS = {"name", "ablation", "config"}
_TOP_KEYS = {"problem", "algorithms", "run_count", "base_seed", "iterations",
             "population", "workers", "out"}


@dataclass
class AlgorithmSpec:
    name: str
    ablation: str | None = None
    config: dict = field(default_factory=dict)

    def build(self, seed, iterations, population, bounds):
        kw = {"max_iterations": iterations, "population_size": population, "bounds": bounds}
        kw.update(self.config)
        kw["seed"] = seed
        if self.ablation == "wo":
            return OptimizerConfig.wo_ablation(**kw)
        return OptimizerConfig(**kw)


@dataclass
class Campaign:
    problem: object
    algorithms: list
    run_count: int = 30
    base_seed: int = 0
    iterations: int = 500
    population: int = 30
    workers: int = 1
    out: str = "campaign_out"
    base_dir: str = "."

    def __post_init__(self):
        if self.run_count < 1:
            raise ValueError("run_count must be at least 1")
        if not self.algorithms:
            raise ValueError("a campaign needs at least one algorithm")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ValueError("algorithm names must be unique")
        for a in self.algorithms:
            if a.ablation not in (None, "wo"):
                raise ValueError(f"unknown ablation {a.ablation!r}")
        self.problem_id  # validates the problem entry

    @property
    def seeds(self):
        return [self.base_seed + r for r in range(self.run_count)]

    @property
    def problem_id(self):
        if isinstance(self.problem, str):
            return benchmarks.get(self.problem).id
        if isinstance(self.problem, dict) and "acs" in self.problem:
            return "acs"
        raise ValueError(f"invalid problem entry {self.problem!r}")

    def out_dir(self):
        return Path(os.environ.get(OUT_ENV) or self.out)

    def objective(self):
        """``(objective, dim, bounds)`` for the configured problem."""
        if isinstance(self.problem, str):
            f = benchmarks.get(self.problem)
            return f, f.dim, (f.lower, f.upper)
        path = Path(self.problem["acs"])
        if not path.is_absolute():
            path = Path(self.base_dir) / path
        try:
            inst = load_instance(path)
        except (OSError, ValueError) as exc:
            raise ValueError(f"cannot load instance {path}: {exc}") from exc
        obj = AcsObjective(inst,
                           per_student=bool(self.problem.get("per_student_coverage", False)),
                           filtered=bool(self.problem.get("filtered", False)))
        return obj, inst.dim, (0.0, 1.0)

    def to_dict(self):
        return {
            "problem": self.problem,
            "algorithms": [{"name": a.name, "ablation": a.ablation, "config": a.config}
                           for a in self.algorithms],
            "run_count": self.run_count,
            "base_seed": self.base_seed,
            "iterations": self.iterations,
            "population": self.population,
            "workers": self.workers,
            "out": self.out,
        }

    @classmethod
    def from_dict(cls, d, base_dir="."):
        if not isinstance(d, dict):
            raise ValueError("campaign config must be a JSON object")
        unknown = set(d) - _TOP_KEYS
        if unknown:
            raise ValueError(f"unknown campaign keys: {sorted(unknown)}")
        if "problem" not in d or "algorithms" not in d:
            raise ValueError("campaign config needs 'problem' and 'algorithms'")
        algos = []
        for a in d["algorithms"]:
            if isinstance(a, str):
                a = {"name": a}
            if set(a) - _ALGO_KEYS or "name" not in a:
                raise ValueError(f"invalid algorithm entry {a!r}")
            algos.append(AlgorithmSpec(a["name"], a.get("ablation"), dict(a.get("config") or {})))
        kw = {k: d[k] for k in ("run_count", "base_seed", "iterations", "population",
                                "workers", "out") if k in d}
        return cls(problem=d["problem"], algorithms=algos, base_dir=str(base_dir), **kw)

    @classmethod
    def load(cls, path):
        path = Path(path)
        with open(path) as fh:
            return cls.from_dict(json.load(fh), base_dir=path.parent)


def _one_run(campaign, algo, seed):
    objective, dim, bounds = campaign.objective()
    cfg = algo.build(seed, campaign.iterations, campaign.population, bounds)
    return optimize(objective, dim, cfg, label=algo.name)


def run_campaign(campaign, persist=True):
    """Run every algorithm ``run_count`` times; returns ``{name: [RunRecord]}``."""
    jobs = [(a, s) for a in campaign.algorithms for s in campaign.seeds]
    if campaign.workers > 1:
        with ProcessPoolExecutor(max_workers=campaign.workers) as ex:
            records = list(ex.map(_one_run, [campaign] * len(jobs),
                                  [a for a, _ in jobs], [s for _, s in jobs]))
    else:
        records = [_one_run(campaign, a, s) for a, s in jobs]
    grouped = {a.name: [] for a in campaign.algorithms}
    for (a, _), rec in zip(jobs, records):
        grouped[a.name].append(rec)
    if persist:
        out = campaign.out_dir()
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "campaign.json", "w") as fh:
            json.dump(campaign.to_dict(), fh, indent=1)
        for name, recs in grouped.items():
            d = out / "runs" / name
            d.mkdir(parents=True, exist_ok=True)
            for rec in recs:
                (d / f"seed_{rec.seed}.json").write_text(rec.to_json())
    return grouped


def load_records(out_dir):
    """Read ``runs/<alg>/seed_*.json`` back into ``{name: [RunRecord]}``."""
    out_dir = Path(out_dir)
    runs = out_dir / "runs"
    if not runs.is_dir():
        raise FileNotFoundError(f"no runs/ directory under {out_dir}")
    order = None
    cfg = out_dir / "campaign.json"
    if cfg.exists():
        order = [a["name"] for a in json.loads(cfg.read_text())["algorithms"]]
    names = order or sorted(p.name for p in runs.iterdir() if p.is_dir())
    grouped = {}
    for name in names:
        files = sorted((runs / name).glob("seed_*.json"), key=lambda p: int(p.stem[5:]))
        grouped[name] = [RunRecord.from_json(p.read_text()) for p in files]
        if not grouped[name]:
            raise ValueError(f"algorithm {name!r} has no runs")
    return grouped


def compare(grouped, problem="", alpha=0.05):
    """Wilcoxon rows: the first algorithm against every other one."""
    names = list(grouped)
    finals = {n: np.array([r.best_fitness for r in grouped[n]]) for n in names}
    rows = []
    ref = names[0]
    for other in names[1:]:
        a, b = finals[ref], finals[other]
        sa, sb = summarize(a), summarize(b)
        res = wilcoxon_rank_sum(a, b, alpha)
        rows.append({
            "problem": problem, "algorithm_a": ref, "algorithm_b": other,
            "mean_a": sa.mean, "std_a": sa.std, "mean_b": sb.mean, "std_b": sb.std,
            "p_value": res.p_value, "verdict": res.verdict,
        })
    return rows


def _fmt(x):
    return repr(float(x))


def _fmt_p(p):
    return "NaN" if np.isnan(p) else f"{p:.2E}"


def export_results(grouped, comparisons, out_dir):
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "seed", "final_fitness", "iterations", "evaluations",
                    "last_improvement"])
        for name, recs in grouped.items():
            for r in recs:
                w.writerow([name, r.seed, _fmt(r.best_fitness), len(r.convergence_trace),
                            r.evaluation_count, r.iteration_of_last_improvement])
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "runs", "mean", "std", "best", "worst"])
        for name, recs in grouped.items():
            finals = [r.best_fitness for r in recs]
            s = summarize(finals)
            w.writerow([name, s.n, _fmt(s.mean), _fmt(s.std), _fmt(min(finals)), _fmt(max(finals))])
    with open(out / "wilcoxon.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["problem", "algorithm_a", "algorithm_b", "mean_a", "std_a", "mean_b",
                    "std_b", "p_value", "verdict"])
        for row in comparisons:
            w.writerow([row["problem"], row["algorithm_a"], row["algorithm_b"],
                        _fmt(row["mean_a"]), _fmt(row["std_a"]), _fmt(row["mean_b"]),
                        _fmt(row["std_b"]), _fmt_p(row["p_value"]), row["verdict"]])
    for name, recs in grouped.items():
        for r in recs:
            with open(out / "traces" / f"{name}_seed_{r.seed}.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["iteration", "best_fitness"])
                for t, v in enumerate(r.convergence_trace, start=1):
                    w.writerow([t, _fmt(v)])
    return [out / "results.csv", out / "summary.csv", out / "wilcoxon.csv"]


def read_results_csv(path):
    """``{algorithm: {seed: final_fitness}}`` parsed from results.csv."""
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["algorithm"], {})[int(row["seed"])] = float(row["final_fitness"])
    return out


def execute(campaign):
    """Run, persist and export a campaign; returns the comparison rows."""
    grouped = run_campaign(campaign)
    rows = compare(grouped, campaign.problem_id)
    export_results(grouped, rows, campaign.out_dir())
    return rows


def compare_dir(out_dir):
    """Recompute statistics and CSVs from persisted run records."""
    grouped = load_records(out_dir)
    problem = ""
    cfg = Path(out_dir) / "campaign.json"
    if cfg.exists():
        problem = Campaign.from_dict(json.loads(cfg.read_text())).problem_id
    rows = compare(grouped, problem)
    export_results(grouped, rows, out_dir)
    return rows
