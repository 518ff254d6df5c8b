"""Benchmark harness: the full paradigm x dataset x seed experiment.

Regenerates the decision dataset, carves the two train/test splits (A: 90%,
B: 80%) per seed, trains every paradigm, sweeps the four membership shapes
for the Takagi-Sugeno network, and writes seed-averaged summary tables plus
per-run curves and model files.

All errors are RMSE on [0, 1]-normalized targets so numbers are comparable
across paradigms.  Sub-run failures are recorded and the matrix continues.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import cart as cart_mod
from . import tace
from .anfis import AnfisModel, anfis_train
from .fuzzy import LinguisticVariable
from .mamdani import GaConfig, ga_optimize, gd_tune, wang_mendel
from .mlp import mlp_init, scg_train
from .modelio import save_model
from .report import write_curve_csv

INPUT_LABELS = {
    "fuel": ("low", "half", "full"),
    "intercept_time": ("fast", "normal", "slow"),
    "weapon": ("insufficient", "enough", "sufficient"),
    "danger": ("endanger", "danger", "very_danger"),
}
SCORE_LABELS = ("bad", "acceptable", "good")

COMPARED_PARADIGMS = ("anfis", "mamdani-ga", "mlp", "cart")


@dataclass
class AnfisSettings:
    epochs: int = 15
    mf_count: int = 3
    shapes: tuple = ("gaussian", "gbell", "trapezoid", "triangle")
    step_size: float = 0.01


@dataclass
class MamdaniSettings:
    input_mfs: int = 3
    output_mfs: int = 3
    learning_rate: float = 0.5
    momentum: float = 0.3
    gd_epochs: int = 10
    population: int = 50
    generations: int = 100
    mutation_rate: float = 0.01
    tournament_size: int = 3
    elite_count: int = 1


@dataclass
class MlpSettings:
    hidden: dict = field(default_factory=lambda: {"A": 30, "B": 32})
    epochs: int = 1000


@dataclass
class CartSettings:
    min_leaf: int = 5
    folds: int = 10


@dataclass
class BenchConfig:
    seeds: tuple = (1, 2, 3)
    datasets: dict = field(default_factory=lambda: {"A": 0.9, "B": 0.8})
    n: int = 1000
    data_seed: int = 7
    jitter: bool = True
    anfis: AnfisSettings = field(default_factory=AnfisSettings)
    mamdani: MamdaniSettings = field(default_factory=MamdaniSettings)
    mlp: MlpSettings = field(default_factory=MlpSettings)
    cart: CartSettings = field(default_factory=CartSettings)

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        for name, frac in self.datasets.items():
            if not 0.0 < frac < 1.0:
                raise ValueError(f"dataset {name!r} fraction must be in (0, 1), got {frac}")

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        kwargs = dict(d)
        for key, sub in (("anfis", AnfisSettings), ("mamdani", MamdaniSettings),
                         ("mlp", MlpSettings), ("cart", CartSettings)):
            if key in kwargs and isinstance(kwargs[key], dict):
                kwargs[key] = sub(**kwargs[key])
        if "seeds" in kwargs:
            kwargs["seeds"] = tuple(kwargs["seeds"])
        if "anfis" in kwargs and isinstance(kwargs["anfis"], AnfisSettings):
            kwargs["anfis"] = replace(kwargs["anfis"], shapes=tuple(kwargs["anfis"].shapes))
        return cls(**kwargs)


def unit_variables(mf_count: int, shape: str) -> list[LinguisticVariable]:
    """The four input variables on normalized [0, 1] coordinates."""
    return [
        LinguisticVariable.uniform(
            name, 0.0, 1.0, mf_count, shape=shape,
            labels=INPUT_LABELS[name][:mf_count] if mf_count <= 3 else None,
        )
        for name in tace.FIELDS
    ]


def unit_score_variable(mf_count: int) -> LinguisticVariable:
    return LinguisticVariable.uniform(
        "score", 0.0, 1.0, mf_count, shape="triangle",
        labels=SCORE_LABELS[:mf_count] if mf_count <= 3 else None,
    )


def _rmse(pred, y) -> float:
    return float(np.sqrt(np.mean((np.asarray(pred) - np.asarray(y)) ** 2)))


class BenchRunner:
    """Executes the run matrix and assembles report files."""

    def __init__(self, config: BenchConfig, out_dir):
        self.config = config
        self.out = Path(out_dir)
        self.runs_dir = self.out / "runs"
        self.runs_dir.mkdir(parents=True, exist_ok=True)
        self.runs: list[dict] = []

    # -- individual paradigm runs ------------------------------------------

    def _record(self, paradigm, dataset, seed, fn):
        tag = f"{paradigm}_{dataset}_seed{seed}"
        start = time.perf_counter()
        entry = {"paradigm": paradigm, "dataset": dataset, "seed": seed}
        try:
            entry.update(fn(tag))
        except Exception as exc:  # sub-run failures must not kill the matrix
            entry["error"] = f"{type(exc).__name__}: {exc}"
        entry["wall_time"] = time.perf_counter() - start
        self.runs.append(entry)
        return entry

    def _run_anfis(self, tag, shape, train, test, seed):
        cfg = self.config.anfis
        model = AnfisModel.grid(unit_variables(cfg.mf_count, shape))
        model, report = anfis_train(
            model, train, test, cfg.epochs, mode="hybrid", k0=cfg.step_size, seed=seed
        )
        curve_path = self.runs_dir / f"{tag}.curve.csv"
        write_curve_csv(curve_path, report.rmse_per_epoch)
        model_path = self.runs_dir / f"{tag}.model.json"
        save_model(model, model_path)
        return {
            "train_rmse": report.final_train_rmse,
            "test_rmse": report.final_test_rmse,
            "curve": report.rmse_per_epoch,
            "model_path": str(model_path),
            "curve_path": str(curve_path),
        }

    def _run_mamdani(self, tag, mode, train, test, seed):
        cfg = self.config.mamdani
        inputs = unit_variables(cfg.input_mfs, "triangle")
        output = unit_score_variable(cfg.output_mfs)
        Xtr, ytr = train
        Xte, yte = test
        base = wang_mendel(Xtr, ytr, inputs, output)
        extras = {
            "rule_count": len(base.rules),
            "untuned_train_rmse": base.rmse(Xtr, ytr),
            "untuned_test_rmse": base.rmse(Xte, yte),
        }
        if mode == "gd":
            model, report = gd_tune(
                base, Xtr, ytr, cfg.learning_rate, cfg.momentum, cfg.gd_epochs
            )
            curve = report.rmse_per_epoch
            header = ("epoch", "train_rmse")
        else:
            ga_cfg = GaConfig(
                population=cfg.population,
                generations=cfg.generations,
                mutation_rate=cfg.mutation_rate,
                tournament_size=cfg.tournament_size,
                elite_count=cfg.elite_count,
                seed=seed,
            )
            model, curve = ga_optimize(base, Xtr, ytr, ga_cfg)
            header = ("generation", "best_fitness")
        curve_path = self.runs_dir / f"{tag}.curve.csv"
        write_curve_csv(curve_path, curve, header=header)
        model_path = self.runs_dir / f"{tag}.model.json"
        save_model(model, model_path)
        return {
            "train_rmse": model.rmse(Xtr, ytr),
            "test_rmse": model.rmse(Xte, yte),
            "curve": list(curve),
            "model_path": str(model_path),
            "curve_path": str(curve_path),
            "extras": extras,
        }

    def _run_mlp(self, tag, dataset_name, train, test, seed):
        cfg = self.config.mlp
        hidden = cfg.hidden[dataset_name]
        model = mlp_init(len(tace.FIELDS), hidden, seed=seed)
        model, report = scg_train(model, train, test, cfg.epochs, seed=seed)
        curve_path = self.runs_dir / f"{tag}.curve.csv"
        write_curve_csv(curve_path, report.rmse_per_epoch)
        model_path = self.runs_dir / f"{tag}.model.json"
        save_model(model, model_path)
        return {
            "train_rmse": report.final_train_rmse,
            "test_rmse": report.final_test_rmse,
            "curve": report.rmse_per_epoch,
            "model_path": str(model_path),
            "curve_path": str(curve_path),
            "extras": {"hidden_units": hidden},
        }

    def _run_cart(self, tag, train, test, seed):
        cfg = self.config.cart
        Xtr, ytr = train
        Xte, yte = test
        tree = cart_mod.grow(Xtr, ytr, min_leaf=cfg.min_leaf)
        seq = cart_mod.prune_sequence(
            tree, Xtr, ytr, folds=cfg.folds, seed=seed, min_leaf=cfg.min_leaf
        )
        best = cart_mod.select_min_cost(seq)
        curve_path = self.runs_dir / f"{tag}.relerr.csv"
        cart_mod.write_relative_error_csv(curve_path, seq)
        model_path = self.runs_dir / f"{tag}.model.json"
        save_model(best, model_path)
        return {
            "train_rmse": _rmse(cart_mod.predict_batch(best, Xtr), ytr),
            "test_rmse": _rmse(cart_mod.predict_batch(best, Xte), yte),
            "model_path": str(model_path),
            "curve_path": str(curve_path),
            "extras": {
                "terminal_count": cart_mod.count_leaves(best),
                "full_terminal_count": cart_mod.count_leaves(tree),
            },
        }

    # -- matrix ---------------------------------------------------------------

    def run(self) -> dict:
        cfg = self.config
        master = tace.normalize(tace.generate(cfg.data_seed, cfg.n, jitter=cfg.jitter))
        first_predictions = {}
        for ds_name in sorted(cfg.datasets):
            frac = cfg.datasets[ds_name]
            for seed in cfg.seeds:
                tr, te = tace.split(master, frac, seed)
                train, test = (tr.x, tr.y), (te.x, te.y)
                for shape in cfg.anfis.shapes:
                    self._record(
                        f"anfis-{shape}", ds_name, seed,
                        lambda tag, s=shape: self._run_anfis(tag, s, train, test, seed),
                    )
                self._record(
                    "mamdani-gd", ds_name, seed,
                    lambda tag: self._run_mamdani(tag, "gd", train, test, seed),
                )
                self._record(
                    "mamdani-ga", ds_name, seed,
                    lambda tag: self._run_mamdani(tag, "ga", train, test, seed),
                )
                self._record(
                    "mlp", ds_name, seed,
                    lambda tag: self._run_mlp(tag, ds_name, train, test, seed),
                )
                self._record(
                    "cart", ds_name, seed,
                    lambda tag: self._run_cart(tag, train, test, seed),
                )
                if ds_name == "B" and seed == cfg.seeds[0]:
                    first_predictions = self._collect_predictions(ds_name, seed, test)
        report = self._assemble(master)
        self._write_outputs(report, first_predictions)
        return report

    def _collect_predictions(self, ds_name, seed, test) -> dict:
        """Per-paradigm predictions over the full Dataset B test set (first seed)."""
        from .modelio import load_model

        Xte, yte = test
        cols = {"actual": np.asarray(yte)}
        for run in self.runs:
            if run["dataset"] != ds_name or run["seed"] != seed or "error" in run:
                continue
            loaded = load_model(run["model_path"])
            cols[run["paradigm"]] = loaded.predict_normalized(Xte)
        return cols

    def _assemble(self, master) -> dict:
        summary = {}
        for run in self.runs:
            if "error" in run:
                continue
            key = (run["paradigm"], run["dataset"])
            summary.setdefault(key, []).append(run)
        rows = []
        for (paradigm, dataset), entries in sorted(summary.items()):
            rows.append(
                {
                    "paradigm": paradigm,
                    "dataset": dataset,
                    "train_rmse": float(np.mean([e["train_rmse"] for e in entries])),
                    "test_rmse": float(np.mean([e["test_rmse"] for e in entries])),
                    "wall_time": float(np.mean([e["wall_time"] for e in entries])),
                    "n_seeds": len(entries),
                }
            )
        # the gaussian-MF network is the Takagi-Sugeno entry in the comparison
        best = {}
        for ds_name in sorted(self.config.datasets):
            scores = {}
            for row in rows:
                name = "anfis" if row["paradigm"] == "anfis-gaussian" else row["paradigm"]
                if name in COMPARED_PARADIGMS and row["dataset"] == ds_name:
                    scores[name] = row["test_rmse"]
            if scores:
                best[ds_name] = min(scores, key=scores.get)
        failures = [
            {k: run[k] for k in ("paradigm", "dataset", "seed", "error")}
            for run in self.runs
            if "error" in run
        ]
        return {
            "config": _config_dict(self.config),
            "master_size": len(master),
            "runs": self.runs,
            "summary": rows,
            "best_paradigm_by_test_rmse": best,
            "failures": failures,
        }

    def _write_outputs(self, report, predictions) -> None:
        with open(self.out / "summary.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["paradigm", "dataset", "train_rmse", "test_rmse", "n_seeds", "wall_time"]
            )
            for row in report["summary"]:
                writer.writerow(
                    [
                        row["paradigm"],
                        row["dataset"],
                        repr(row["train_rmse"]),
                        repr(row["test_rmse"]),
                        row["n_seeds"],
                        repr(row["wall_time"]),
                    ]
                )
        shapes = [f"anfis-{s}" for s in self.config.anfis.shapes]
        with open(self.out / "sweep.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["shape", "dataset", "train_rmse", "test_rmse"])
            for row in report["summary"]:
                if row["paradigm"] in shapes:
                    writer.writerow(
                        [
                            row["paradigm"].removeprefix("anfis-"),
                            row["dataset"],
                            repr(row["train_rmse"]),
                            repr(row["test_rmse"]),
                        ]
                    )
        with open(self.out / "report.json", "w") as fh:
            json.dump(report, fh, indent=1, sort_keys=True, default=_json_default)
            fh.write("\n")
        if predictions:
            names = list(predictions)
            with open(self.out / "predictions_B.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(names)
                for i in range(len(predictions["actual"])):
                    writer.writerow([repr(float(predictions[n][i])) for n in names])


def _config_dict(config: BenchConfig) -> dict:
    d = asdict(config)
    d["seeds"] = list(config.seeds)
    d["anfis"]["shapes"] = list(config.anfis.shapes)
    return d


def _json_default(obj):
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def run_bench(config: BenchConfig, out_dir) -> dict:
    """Run the complete benchmark matrix and write all report files."""
    return BenchRunner(config, out_dir).run()
