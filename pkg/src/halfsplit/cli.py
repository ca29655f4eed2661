"""halfsplit command line: train, predict, evaluate, bench, generate.

Exit codes: 0 success, 2 usage/parameter, 3 data or parse failure,
4 dimension or input error, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .bench import METHODS, run_benchmark
from .data_io import (
    Dataset,
    SyntheticSpec,
    apply_standardizer,
    fit_standardizer,
    generate_synthetic,
    iris_path,
    load_csv,
    load_libsvm,
    stratified_split,
    write_csv,
)
from .errors import DimensionError, HalfsplitError, InputError, ParameterError, UndefinedMetricError
from .metrics import MulticlassConfusion, multiclass_accuracy
from .persistence import load_model, model_kind, predict_any, save_model
from .shard_engine import ExecConfig
from .tree_builder import BuildConfig, build_tree

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3, 4, 5
BUILTIN_IRIS = "@iris"

log = logging.getLogger("halfsplit")


def _int_list(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _add_data_args(p, required=True):
    g = p.add_argument_group("dataset")
    g.add_argument("--data", required=required, help=f"dataset path, or {BUILTIN_IRIS} for the bundled Iris set")
    g.add_argument("--format", choices=("csv", "libsvm"), default="csv")
    g.add_argument("--label-col", default="-1", help="label column index or header name (csv)")
    g.add_argument("--header", action="store_true", help="first csv line is a header")
    g.add_argument("--delimiter", default=",")


def _add_build_args(p):
    g = p.add_argument_group("training")
    g.add_argument("--mu", type=float, default=1.0)
    g.add_argument("--validation-fraction", type=float, default=0.2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--metric", choices=("accuracy", "f1"), default="accuracy")
    g.add_argument("--max-candidates", type=int, default=None)
    g.add_argument("--standardize", action="store_true")
    g.add_argument("--shards", type=int, default=None)
    g.add_argument("--backend", choices=("serial", "threaded"), default="serial")
    env_threads = os.environ.get("HALFSPLIT_THREADS")
    g.add_argument("--threads", type=int, default=int(env_threads) if env_threads else None,
                   help="worker threads for the threaded backend (default: $HALFSPLIT_THREADS)")


def _load_data(args) -> Dataset:
    if args.data == BUILTIN_IRIS:
        return load_csv(iris_path(), label_col="species", header=True)
    if not Path(args.data).is_file():
        raise FileNotFoundError(f"no such dataset file: {args.data}")
    if args.format == "libsvm":
        return load_libsvm(args.data)
    label = int(args.label_col) if args.label_col.lstrip("-").isdigit() else args.label_col
    return load_csv(args.data, label_col=label, delimiter=args.delimiter, header=args.header)


def _build_config(args) -> BuildConfig:
    return BuildConfig(
        mu=args.mu,
        validation_fraction=args.validation_fraction,
        seed=args.seed,
        selection_metric=args.metric,
        max_candidates=args.max_candidates,
        execution=ExecConfig(args.shards, args.backend, args.threads),
    )


def _align_labels(data: Dataset, class_names) -> Dataset:
    """Re-express the dataset's class ids in the model's id space, matching by name."""
    if not class_names:
        return data
    lookup = {name: k for k, name in enumerate(class_names)}
    unknown = sorted(set(data.class_names[c] for c in data.present_classes()) - set(lookup))
    if unknown:
        raise InputError(f"labels not known to the model: {unknown}")
    mapping = np.array([lookup.get(n, -1) for n in data.class_names], dtype=np.int64)
    return Dataset(data.features, mapping[data.labels] if data.m else data.labels, list(class_names))


# ---------------------------------------------------------------- commands


def cmd_train(args) -> int:
    config = _build_config(args)
    data = _load_data(args)
    std = None
    if args.standardize:
        std = fit_standardizer(data)
        data = apply_standardizer(std, data)
    if args.kind == "tree":
        model = build_tree(data, config)
    else:
        from .baselines import train_ovo, train_ovr

        model = (train_ovo if args.kind == "ovo" else train_ovr)(data, config.mu, config.execution)
    size = save_model(args.out, model, std)
    print(f"model: {args.kind}, {len(model.classes)} classes, {model.feature_count} features, {size} bytes -> {args.out}")
    if args.kind == "tree":
        internal = model.internal_nodes()
        print(f"depth {model.depth()}, {len(internal)} internal nodes, {model.planes_trained} planes trained"
              + ("" if model.exhaustive else " (candidate search capped, non-exhaustive)"))
        print(f"root split {model.root.partition}, validation accuracy {model.root.validation_accuracy:.4f}")
    else:
        print(f"{len(model.planes)} planes")
    return EXIT_OK


def _predict_file(args):
    model, std = load_model(args.model)
    data = _load_data(args)
    if data.d != model.feature_count:
        raise DimensionError(f"model expects {model.feature_count} features, data has {data.d}")
    if std is not None:
        data = apply_standardizer(std, data)
    return model, data


def cmd_predict(args) -> int:
    model, data = _predict_file(args)
    labels, evaluations, _ = predict_any(model, data.features)
    names = model.class_names or tuple(str(c) for c in model.classes)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for lab in labels:
            out.write(f"{names[lab]}\n")
    finally:
        if args.out:
            out.close()
    print(f"{data.m} rows, {evaluations} plane evaluations", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model, data = _predict_file(args)
    if data.m == 0:
        raise UndefinedMetricError("test set is empty")
    data = _align_labels(data, model.class_names)
    labels, evaluations, seconds = predict_any(model, data.features)
    n = max(len(model.class_names), max(model.classes) + 1)
    conf = MulticlassConfusion.from_labels(data.labels, labels, n)
    names = model.class_names or tuple(str(c) for c in range(n))
    width = max(len(s) for s in names) + 2
    print("confusion (rows = true, columns = predicted)")
    print(" " * width + "".join(f"{s:>{width}}" for s in names))
    for k, row in enumerate(conf.matrix):
        print(f"{names[k]:<{width}}" + "".join(f"{v:>{width}}" for v in row))
    print(f"accuracy {multiclass_accuracy(conf):.4f} on {data.m} rows")
    print(f"{'class':<{width}}precision    recall        f1")
    for k, (p, r, f) in enumerate(conf.per_class()):
        print(f"{names[k]:<{width}}{p:9.4f}{r:10.4f}{f:10.4f}")
    print(f"planes evaluated: {evaluations} total, {evaluations / data.m:.3f} per sample, "
          f"at most {model.planes_per_prediction} ({model_kind(model)}), {seconds:.6f} s")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _build_config(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ParameterError(f"unknown methods {bad}; choose from {METHODS}")
    data = _load_data(args)
    train, test = stratified_split(data, args.test_fraction, args.seed)
    if args.standardize:
        std = fit_standardizer(train)
        train, test = apply_standardizer(std, train), apply_standardizer(std, test)
    report = run_benchmark(train, test, methods, config, args.reps)
    report.environment["dataset"] = args.data
    report.environment["standardize"] = args.standardize
    report.environment["test_fraction"] = args.test_fraction
    Path(args.report).write_text(report.to_json())
    csv_path = args.csv or str(Path(args.report).with_suffix(".csv"))
    Path(csv_path).write_text(report.to_csv())
    print(f"{'method':<6}{'accuracy':>10}{'train s':>12}{'test s':>12}{'planes':>8}{'evals/row':>11}")
    for r in report.methods.values():
        print(f"{r.method:<6}{r.accuracy:>10.4f}{r.train_seconds_median:>12.5f}{r.test_seconds_median:>12.6f}"
              f"{r.planes_trained:>8}{r.planes_evaluated_per_sample:>11.2f}")
    print(f"median of {args.reps} run(s); report -> {args.report}, {csv_path}")
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = {}
    if args.config:
        spec.update(json.loads(Path(args.config).read_text()))
    for key, val in (("n_classes", args.classes), ("d", args.dim), ("counts", args.counts),
                     ("proportions", args.proportions), ("total", args.total), ("scheme", args.scheme),
                     ("scale", args.scale), ("sigma", args.sigma), ("seed", args.seed)):
        if val is not None:
            spec[key] = val
    try:
        spec = SyntheticSpec(**spec)
    except TypeError as exc:
        raise ParameterError(f"invalid generator spec: {exc}") from None
    data = generate_synthetic(spec)
    write_csv(data, args.out)
    counts = ", ".join(f"{data.class_names[k]}={c}" for k, c in enumerate(data.class_counts()))
    print(f"{data.m} rows, {data.d} features -> {args.out} ({counts})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="halfsplit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and save it as JSON")
    _add_data_args(p)
    _add_build_args(p)
    p.add_argument("--kind", choices=METHODS, default="tree")
    p.add_argument("--out", "--model", dest="out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="print predicted labels")
    _add_data_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="confusion matrix, accuracy and per-class scores")
    _add_data_args(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="compare tree, OvO and OvR")
    _add_data_args(p)
    _add_build_args(p)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--test-fraction", type=float, default=0.25)
    p.add_argument("--report", "--out", dest="report", required=True, help="JSON report path")
    p.add_argument("--csv", default=None, help="CSV path (default: report path with .csv)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a synthetic Gaussian-cloud dataset as CSV")
    p.add_argument("--config", help="JSON file with generator fields; flags override it")
    p.add_argument("--classes", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--counts", type=_int_list)
    p.add_argument("--proportions", type=_float_list)
    p.add_argument("--total", type=int)
    p.add_argument("--scheme", choices=("corners", "simplex"))
    p.add_argument("--scale", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except HalfsplitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
