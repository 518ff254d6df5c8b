"""Command-line harness: generate-data, train, predict, bench.

Exit codes: 0 success, 1 usage error, 2 runtime error.  Training operates on
[0, 1]-normalized data internally; CSV files and predict inputs/outputs stay
in physical units.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import cart as cart_mod
from . import tace
from .anfis import AnfisModel, anfis_train
from .bench import BenchConfig, run_bench, unit_score_variable, unit_variables
from .fuzzy import MF_SHAPES
from .mamdani import GaConfig, ga_optimize, gd_tune, wang_mendel
from .mlp import mlp_init, scg_train
from .modelio import load_model, save_model
from .report import write_curve_csv

MODEL_KINDS = ("anfis", "mamdani-gd", "mamdani-ga", "mlp", "cart")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's default 2
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="softdss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate-data", help="write a seeded decision dataset CSV")
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--n", type=int, default=1000)
    gen.add_argument("--out", required=True)
    gen.add_argument("--jitter", choices=("on", "off"), default="on")
    gen.add_argument("--anchors", action="store_true",
                     help="write exactly the 11 expert anchor rows")

    tr = sub.add_parser("train", help="train one paradigm on a dataset CSV")
    tr.add_argument("--model", required=True, choices=MODEL_KINDS)
    tr.add_argument("--data", required=True)
    tr.add_argument("--test", default=None, help="optional held-out CSV")
    tr.add_argument("--out", required=True, help="model JSON path")
    tr.add_argument("--epochs", type=int, default=None)
    tr.add_argument("--shape", choices=tuple(MF_SHAPES), default="gaussian")
    tr.add_argument("--seed", type=int, default=1)
    tr.add_argument("--config", default=None, help="JSON file or literal with hyperparameters")

    pr = sub.add_parser("predict", help="score a situation with a saved model")
    pr.add_argument("--model", required=True)
    pr.add_argument("values", help="fuel,intercept_time,weapon,danger in physical units")

    be = sub.add_parser("bench", help="run the full benchmark matrix")
    be.add_argument("--out", required=True, help="output directory")
    be.add_argument("--config", default=None, help="JSON file or literal with overrides")
    return parser


def _load_json_arg(arg):
    if arg is None:
        return {}
    path = Path(arg)
    text = path.read_text() if path.exists() else arg
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _UsageError(f"--config is not valid JSON: {exc}") from None
    if not isinstance(value, dict):
        raise _UsageError("--config must be a JSON object")
    return value


def _cmd_generate_data(args) -> int:
    if args.anchors:
        dataset = tace.anchors_dataset()
    else:
        dataset = tace.generate(args.seed, args.n, jitter=args.jitter == "on")
    try:
        tace.save_csv(dataset, args.out)
    except OSError as exc:
        raise RuntimeError(f"cannot write {args.out}: {exc.strerror}") from None
    print(f"wrote {len(dataset)} samples to {args.out}")
    return 0


def _load_normalized(path):
    data = tace.normalize(tace.load_csv(path))
    return data.x, data.y


def _cmd_train(args) -> int:
    opts = _load_json_arg(args.config)
    X, y = _load_normalized(args.data)
    test = _load_normalized(args.test) if args.test else None
    out_path = Path(args.out)
    curve_path = out_path.with_suffix(".curve.csv")
    extras = {}
    start = time.perf_counter()

    if args.model == "anfis":
        epochs = args.epochs or opts.get("epochs", 15)
        model = AnfisModel.grid(unit_variables(opts.get("mf_count", 3), args.shape))
        model, report = anfis_train(
            model, (X, y), test, epochs,
            mode=opts.get("mode", "hybrid"),
            k0=opts.get("step_size", 0.01),
            seed=args.seed,
        )
        curve, header = report.rmse_per_epoch, ("epoch", "train_rmse")
        train_rmse, test_rmse = report.final_train_rmse, report.final_test_rmse
    elif args.model in ("mamdani-gd", "mamdani-ga"):
        inputs = unit_variables(opts.get("input_mfs", 3), "triangle")
        output = unit_score_variable(opts.get("output_mfs", 3))
        base = wang_mendel(X, y, inputs, output)
        extras["rule_count"] = len(base.rules)
        if args.model == "mamdani-gd":
            epochs = args.epochs or opts.get("epochs", 10)
            model, report = gd_tune(
                base, X, y,
                learning_rate=opts.get("learning_rate", 0.5),
                momentum=opts.get("momentum", 0.3),
                epochs=epochs,
            )
            curve, header = report.rmse_per_epoch, ("epoch", "train_rmse")
        else:
            ga_cfg = GaConfig(
                population=opts.get("population", 50),
                generations=args.epochs or opts.get("generations", 100),
                mutation_rate=opts.get("mutation_rate", 0.01),
                tournament_size=opts.get("tournament_size", 3),
                elite_count=opts.get("elite_count", 1),
                seed=args.seed,
            )
            model, curve = ga_optimize(base, X, y, ga_cfg)
            header = ("generation", "best_fitness")
        train_rmse = model.rmse(X, y)
        test_rmse = model.rmse(*test) if test else None
    elif args.model == "mlp":
        epochs = args.epochs or opts.get("epochs", 1000)
        net = mlp_init(len(tace.FIELDS), opts.get("hidden_units", 30), seed=args.seed)
        model, report = scg_train(net, (X, y), test, epochs, seed=args.seed)
        curve, header = report.rmse_per_epoch, ("epoch", "train_rmse")
        train_rmse, test_rmse = report.final_train_rmse, report.final_test_rmse
        extras["hidden_units"] = net.hidden_units
    else:  # cart
        tree = cart_mod.grow(X, y, min_leaf=opts.get("min_leaf", 5))
        seq = cart_mod.prune_sequence(
            tree, X, y,
            folds=opts.get("folds", 10),
            seed=args.seed,
            min_leaf=opts.get("min_leaf", 5),
        )
        model = cart_mod.select_min_cost(seq)
        cart_mod.write_relative_error_csv(curve_path, seq)
        curve = None
        train_rmse = float(np.sqrt(np.mean((cart_mod.predict_batch(model, X) - y) ** 2)))
        test_rmse = (
            float(np.sqrt(np.mean((cart_mod.predict_batch(model, test[0]) - test[1]) ** 2)))
            if test else None
        )
        extras["terminal_count"] = cart_mod.count_leaves(model)

    if curve is not None:
        write_curve_csv(curve_path, curve, header=header)
    save_model(model, out_path)
    summary = {
        "kind": args.model,
        "train_rmse": train_rmse,
        "test_rmse": test_rmse,
        "wall_time": time.perf_counter() - start,
        "seed": args.seed,
        "model_path": str(out_path),
        "curve_path": str(curve_path),
        "extras": extras,
    }
    print(json.dumps(summary, indent=1, sort_keys=True))
    return 0


def _cmd_predict(args) -> int:
    parts = args.values.split(",")
    if len(parts) != 4:
        raise _UsageError(f"expected 4 comma-separated values, got {len(parts)}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise _UsageError(f"non-numeric input value in {args.values!r}") from None
    for name, value, (lo, hi) in zip(tace.FIELDS, values, tace.FIELD_RANGES):
        if not lo <= value <= hi:
            raise RuntimeError(f"{name}={value:g} outside [{lo:g}, {hi:g}]")
    loaded = load_model(args.model)
    print(repr(loaded.predict_score(values)))
    return 0


def _cmd_bench(args) -> int:
    config = BenchConfig.from_dict(_load_json_arg(args.config))
    report = run_bench(config, args.out)
    print(json.dumps(
        {
            "out": str(args.out),
            "summary": report["summary"],
            "best_paradigm_by_test_rmse": report["best_paradigm_by_test_rmse"],
            "failures": report["failures"],
        },
        indent=1,
        sort_keys=True,
    ))
    return 0


_COMMANDS = {
    "generate-data": _cmd_generate_data,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"softdss: error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"softdss: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"softdss: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
