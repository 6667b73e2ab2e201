"""Command-line interface: ``mwo-acs <command> ...``.

Commands::

    instance gen      generate a synthetic ACS instance (JSON)
    optimize          run MWO (or the WO ablation) on an ACS instance or tfN
    benchmark list    print the benchmark catalog
    benchmark eval    evaluate a benchmark at a point read from a JSON file
    sequence          build learning sequences from a saved run record
    campaign run      run a multi-seed campaign from a JSON config
    campaign compare  recompute statistics for a finished campaign directory

Every command exits with status 0 on success and 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import benchmarks
from ._jit import BACKEND
from .campaign import Campaign, compare_dir, execute
from .model import binarize, generate_synthetic_instance, load_instance, save_instance
from .objective import AcsObjective
from .optimizer import OptimizerConfig, RunRecord, optimize
from .sequencer import SequenceParams, sequence_report, write_difficulty_csv


def _emit(obj, out):
    text = json.dumps(obj, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_instance_gen(args):
    inst = generate_synthetic_instance(args.seed, args.students, args.materials, args.concepts)
    save_instance(inst, args.out)
    print(f"wrote {args.out}: {inst.t_s} students, {inst.t_m} materials, {inst.t_c} concepts")


def cmd_optimize(args):
    if args.problem == "acs":
        if args.instance:
            inst = load_instance(args.instance)
        else:
            inst = generate_synthetic_instance(args.seed, 30, 150, 20)
        objective = AcsObjective(inst, per_student=args.per_student_coverage,
                                 filtered=args.filtered)
        dim, bounds = inst.dim, (0.0, 1.0)
    else:
        objective = benchmarks.get(args.problem)
        dim, bounds = objective.dim, (objective.lower, objective.upper)
    kw = dict(seed=args.seed, max_iterations=args.iters, population_size=args.pop, bounds=bounds)
    cfg = OptimizerConfig.wo_ablation(**kw) if args.ablation == "wo" else OptimizerConfig(**kw)
    rec = optimize(objective, dim, cfg, label="WO" if args.ablation == "wo" else "MWO")
    rec.extra["problem"] = args.problem
    rec.extra["backend"] = BACKEND
    if args.out:
        Path(args.out).write_text(rec.to_json() + "\n")
    print(f"{rec.label} on {args.problem}: best {rec.best_fitness!r} after "
          f"{rec.evaluation_count} evaluations (last improvement at t={rec.iteration_of_last_improvement})")


def cmd_benchmark_list(args):
    for f in benchmarks.catalog():
        print(f"{f.id:4s} {f.name:16s} {f.kind:10s} dim={f.dim:<3d} "
              f"[{f.lower:g}, {f.upper:g}] optimum={f.known_optimum:g}")


def cmd_benchmark_eval(args):
    point = np.asarray(json.loads(Path(args.point).read_text()), dtype=np.float64)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value = benchmarks.evaluate(args.fn, point)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    print(repr(value))


def cmd_sequence(args):
    inst = load_instance(args.instance)
    rec = RunRecord.from_json(Path(args.run).read_text())
    selection = binarize(np.asarray(rec.best_position), inst.t_s, inst.t_m)
    params = SequenceParams(challenge_norm=args.challenge_norm)
    report = sequence_report(selection, inst, params)
    _emit(report, args.out)
    if args.csv:
        write_difficulty_csv(report, inst, args.csv)


def _print_rows(rows):
    for r in rows:
        p = "NaN" if np.isnan(r["p_value"]) else f"{r['p_value']:.2E}"
        print(f"{r['problem']} {r['algorithm_a']} vs {r['algorithm_b']}: "
              f"{r['mean_a']:.6g} vs {r['mean_b']:.6g}  p={p} ({r['verdict']})")


def cmd_campaign_run(args):
    campaign = Campaign.load(args.config)
    rows = execute(campaign)
    print(f"results in {campaign.out_dir()}")
    _print_rows(rows)


def cmd_campaign_compare(args):
    _print_rows(compare_dir(args.dir))


def build_parser():
    p = argparse.ArgumentParser(prog="mwo-acs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    inst = sub.add_parser("instance", help="ACS instance utilities")
    isub = inst.add_subparsers(dest="action", required=True)
    g = isub.add_parser("gen", help="generate a synthetic instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--students", type=int, default=30)
    g.add_argument("--materials", type=int, default=150)
    g.add_argument("--concepts", type=int, default=20)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_instance_gen)

    o = sub.add_parser("optimize", help="run the optimizer once")
    o.add_argument("--problem", default="acs", help="'acs' or a benchmark id such as tf5")
    o.add_argument("--instance", help="instance JSON (acs only; default: synthetic seed)")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--iters", type=int, default=500)
    o.add_argument("--pop", type=int, default=30)
    o.add_argument("--ablation", choices=["wo"])
    o.add_argument("--per-student-coverage", action="store_true")
    o.add_argument("--filtered", action="store_true",
                   help="score the class-capped selection (acs only)")
    o.add_argument("--out", help="write the run record JSON here")
    o.set_defaults(func=cmd_optimize)

    b = sub.add_parser("benchmark", help="benchmark functions")
    bsub = b.add_subparsers(dest="action", required=True)
    bsub.add_parser("list", help="print the catalog").set_defaults(func=cmd_benchmark_list)
    e = bsub.add_parser("eval", help="evaluate at a point")
    e.add_argument("--fn", required=True)
    e.add_argument("--point", required=True, help="JSON file holding a list of floats")
    e.set_defaults(func=cmd_benchmark_eval)

    s = sub.add_parser("sequence", help="build learning sequences from a run record")
    s.add_argument("--run", required=True)
    s.add_argument("--instance", required=True)
    s.add_argument("--out")
    s.add_argument("--csv", help="also write a difficulty-per-position CSV")
    s.add_argument("--challenge-norm", choices=["catalog", "selected"], default="catalog")
    s.set_defaults(func=cmd_sequence)

    c = sub.add_parser("campaign", help="multi-seed experiment campaigns")
    csub = c.add_subparsers(dest="action", required=True)
    r = csub.add_parser("run")
    r.add_argument("--config", required=True)
    r.set_defaults(func=cmd_campaign_run)
    cc = csub.add_parser("compare")
    cc.add_argument("--dir", required=True)
    cc.set_defaults(func=cmd_campaign_compare)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (OSError, ValueError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
