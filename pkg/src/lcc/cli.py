"""Command-line entry point: ``lcc <subcommand> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys


from . import dataio, inference
from .chain import load_model, save_model
from .errors import LCCError
from .experiments import (
    Method,
    SweepConfig,
    benchmark_rows,
    load_benchmark_data,
    run_benchmark,
    run_mode_sweep,
    run_ordering_sweep,
    write_csv,
)
from .metrics import evaluate_batch

log = logging.getLogger("lcc")


def _common(p, grid=True):
    p.add_argument("--config", help="key=value file; command-line flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float, help="ridge penalty (default 0.001)")
    p.add_argument("--workers", type=int)
    p.add_argument("--output", "-o", help="CSV output path (default: stdout)")
    p.add_argument("--long", action="store_const", const=True, default=None,
                   help="allow runs the default suite skips (M12, large datasets)")
    if grid:
        p.add_argument("--model", help="synthetic model id, M1..M12")
        p.add_argument("--n", dest="n_grid", help="comma-separated training sizes")
        p.add_argument("--repetitions", type=int)
        p.add_argument("--families", help="comma-separated carrier families")


def build_parser():
    parser = argparse.ArgumentParser(prog="lcc", description="Logistic classifier chains.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("order-sweep", help="probability of recovering the true label order")
    _common(p)
    p.add_argument("--no-loglik", dest="include_loglik", action="store_const", const=False, default=None)

    p = sub.add_parser("mode-sweep", help="probability of recovering the true joint mode")
    _common(p)
    p.add_argument("--test-size", type=int)
    p.add_argument("--engine", choices=("auto",) + inference.ENGINES)
    p.add_argument("--beam-width", type=int)

    p = sub.add_parser("benchmark", help="cross-validated comparison on a dataset")
    _common(p, grid=False)
    p.add_argument("--data", dest="dataset")
    p.add_argument("--label-count", type=int, help="labels are the last N attributes")
    p.add_argument("--top-k", type=int)
    p.add_argument("--subsample", type=int)
    p.add_argument("--standardize", action="store_const", const=True, default=None)
    p.add_argument("--folds", type=int)
    p.add_argument("--methods", help="comma-separated subset, e.g. 'BR,CC EX'")
    p.add_argument("--families", help="carrier family for the ordering search")

    p = sub.add_parser("fit", help="train a chain or BR model and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--label-count", type=int)
    p.add_argument("--kind", choices=("cc", "br"), default="cc")
    p.add_argument("--ordering", default="original",
                   help="original, reversed, loglik, a carrier family, or a comma-separated permutation")
    p.add_argument("--lambda", dest="lam", type=float, default=0.001)
    p.add_argument("--output", "-o", required=True, help="model file")

    p = sub.add_parser("predict", help="joint-mode predictions from a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-count", type=int)
    p.add_argument("--engine", choices=inference.ENGINES, default="exhaustive")
    p.add_argument("--beam-width", type=int, default=2)
    p.add_argument("--output", "-o", help="CSV output path (default: stdout)")
    return parser


_CONFIG_KEYS = ("seed", "lam", "workers", "output", "long", "model", "n_grid", "repetitions", "families",
                "include_loglik", "test_size", "engine", "beam_width", "dataset", "label_count", "top_k",
                "subsample", "standardize", "folds", "methods")


def _config(args):
    overrides = {k: getattr(args, k) for k in _CONFIG_KEYS if getattr(args, k, None) is not None}
    if args.config:
        return SweepConfig.from_file(args.config, **overrides)
    return SweepConfig.from_mapping(overrides)


def _emit(rows, output):
    if output:
        write_csv(rows, output)
    else:
        write_csv(rows, "/dev/stdout")


def _cmd_fit(args):
    data = dataio.load_dataset(args.data, label_count=args.label_count)
    if args.kind == "br":
        model = Method("BR", kind="br", lam=args.lam).train(data.X, data.Y)
    else:
        if "," in args.ordering or args.ordering.isdigit():
            order = tuple(int(t) for t in args.ordering.split(","))
            from .chain import train_chain
            model = train_chain(data.X, data.Y, order, args.lam)
        else:
            model = Method("CC", ordering=args.ordering, lam=args.lam).train(data.X, data.Y)
    save_model(model, args.output)
    log.info("saved model with ordering %s", getattr(model, "ordering", None))


def _cmd_predict(args):
    model = load_model(args.model)
    data = dataio.load_dataset(args.data, label_count=args.label_count)
    if data.p != model.p:
        raise LCCError(f"data has {data.p - 1} features, model expects {model.p - 1}")
    pred = inference.predict(model, data.X, args.engine, args.beam_width)
    names = data.label_names if data.K == model.K else tuple(f"y{k}" for k in range(model.K))
    rows = [{nm: int(v) for nm, v in zip(names, r)} for r in pred]
    _emit(rows, args.output)
    if data.K == model.K:
        scores = evaluate_batch(data.Y, pred)
        print(" ".join(f"{k}={v:.4f}" for k, v in scores.items()), file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "order-sweep":
            cfg = _config(args)
            _emit(run_ordering_sweep(cfg), cfg.output)
        elif args.command == "mode-sweep":
            cfg = _config(args)
            _emit(run_mode_sweep(cfg), cfg.output)
        elif args.command == "benchmark":
            cfg = _config(args)
            data = load_benchmark_data(cfg)
            _emit(benchmark_rows(run_benchmark(cfg, data), data.name), cfg.output)
        elif args.command == "fit":
            _cmd_fit(args)
        elif args.command == "predict":
            _cmd_predict(args)
    except (LCCError, OSError) as exc:
        print(f"lcc: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
