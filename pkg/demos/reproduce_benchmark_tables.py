"""Desk-scale reproduction of the benchmark tables.

Runs the replicated experiment for a chosen scenario and compares the
Avg/Prop cells against the reference tables shipped with the package.
Defaults are sized for a coffee break; pass a scenario id and flags to
go bigger.

    python demos/reproduce_benchmark_tables.py                # S3.3, quick
    python demos/reproduce_benchmark_tables.py S2.1 --runs 100
"""

import argparse

from riskselect.cli import emit_report
from riskselect.gmm import EmConfig
from riskselect.report_compare import builtin_reference, compare
from riskselect.sim import run_experiment, scenario, standard_criteria

FAMILY_OF = {"S1": "mixture", "S2": "regression", "S3": "pca"}

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("scenario", nargs="?", default="S3.3")
parser.add_argument("--n", default="100,1000,10000",
                    help="comma-separated sample sizes")
parser.add_argument("--runs", type=int, default=25)
parser.add_argument("--seed", type=int, default=7)
parser.add_argument("--parallelism", type=int, default=2)
args = parser.parse_args()

cfg = scenario(args.scenario)
n_list = [int(tok) for tok in args.n.split(",")]
family = FAMILY_OF[args.scenario[:2]]

print(f"running {cfg.id}: n in {n_list}, {args.runs} runs, seed {args.seed}")
report = run_experiment(
    cfg, standard_criteria(cfg), n_list, runs=args.runs, seed=args.seed,
    em_config=EmConfig(), parallelism=args.parallelism,
)
print()
print(emit_report(report, "markdown"))

refs = [r for r in builtin_reference(family)
        if r.scenario == cfg.id and r.n in set(n_list)]
cells = compare(report, refs)
print("comparison against the shipped reference table "
      f"(tolerances +-{refs[0].tol_avg} avg, +-{refs[0].tol_prop} prop):")
for cell in cells:
    print(" ", cell.describe())
bad = sum(not c.passed for c in cells)
print(f"\n{len(cells) - bad}/{len(cells)} cells within tolerance"
      + ("" if not bad else " (small run counts wobble; try --runs 100)"))
if cfg.id in ("S3.1", "S3.2"):
    print("note: the documented S3.1/S3.2 mixing matrix cannot reproduce some")
    print("reference cells at any run count; its fourth population eigenvalue")
    print("sits below the BIC penalty gap at n=10^4 (see the package tests).")
