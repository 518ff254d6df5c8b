"""A scaled-down run of the full comparison matrix.

The real experiment (3 seeds, 15 ANFIS epochs, 100 GA generations, 1000 MLP
iterations) runs via `softdss bench --out <dir>`; this demo shrinks every
knob so it finishes in under a minute and prints the seed-averaged table.

Run:  python demos/demo_benchmark.py
"""

import tempfile
from pathlib import Path

from softdss.bench import (
    AnfisSettings,
    BenchConfig,
    CartSettings,
    MamdaniSettings,
    MlpSettings,
    run_bench,
)

config = BenchConfig(
    seeds=(1, 2),
    n=400,
    anfis=AnfisSettings(epochs=4, shapes=("gaussian", "trapezoid")),
    mamdani=MamdaniSettings(gd_epochs=5, population=12, generations=15),
    mlp=MlpSettings(hidden={"A": 10, "B": 10}, epochs=150),
    cart=CartSettings(min_leaf=5, folds=5),
)

out = Path(tempfile.mkdtemp(prefix="softdss-bench-"))
print(f"running reduced benchmark into {out} ...\n")
report = run_bench(config, out)

print(f"{'paradigm':18s} {'dataset':7s} {'train':>10} {'test':>10} {'wall':>7}")
for row in report["summary"]:
    print(f"{row['paradigm']:18s} {row['dataset']:7s} "
          f"{row['train_rmse']:10.5f} {row['test_rmse']:10.5f} {row['wall_time']:6.2f}s")

print("\nlowest test RMSE per dataset:", report["best_paradigm_by_test_rmse"])
print(f"outputs: summary.csv, sweep.csv, report.json, predictions_B.csv, runs/ in {out}")
