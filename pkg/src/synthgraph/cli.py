"""Command line entry point.

Exit codes: 0 success, 1 verification or metric failure, 2 usage error,
3 I/O error (including corrupt dataset files).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import baselines, io, reports, taskgen
from .errors import DatasetFormatError, GenerationError, InputError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SEED_ENV = "SYNTHGRAPH_SEED"

log = logging.getLogger("synthgraph")


class UsageError(Exception):
    reported = False


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _build_config(args) -> taskgen.GenConfig:
    overrides = {"num_nodes": args.nodes, "target_avg_degree": args.avg_degree,
                 "num_states": args.states, "seed": args.seed}
    if args.config:
        # values in the file win over the environment, explicit flags win over both
        cfg = io.load_config(args.config)
        changes = {k: v for k, v in overrides.items() if v is not None}
        return cfg.replace(**changes)
    if args.seed is None:
        overrides["seed"] = _default_seed()
    return taskgen.default_config(args.task, **overrides)


def cmd_generate(args) -> int:
    config = _build_config(args)
    try:
        dataset = taskgen.generate_task(args.task, config)
    except GenerationError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = taskgen.verify_task(dataset)
    if not report.passed:
        print(report.format(), file=sys.stderr)
        return EXIT_FAIL
    splits = taskgen.make_splits(dataset, args.reps, config.seed)
    io.write_dataset(dataset, args.out, splits)
    print(f"{args.task}: {dataset.num_nodes} nodes, {dataset.graph.num_edges} edges -> {args.out}")
    return EXIT_OK


def _reports_dir(args) -> Path:
    return Path(args.out) if args.out else Path(args.dataset) / "reports"


def cmd_stats(args) -> int:
    dataset = io.read_dataset(args.dataset)
    report = reports.write_stats(dataset, _reports_dir(args))
    for name, col in reports.TABLE1_COLUMNS.items():
        value = getattr(report, name)
        shown = "null (" + report.undefined[name] + ")" if value is None else (
            value if isinstance(value, int) else f"{value:.4f}")
        print(f"{col:>9}: {shown}")
    return EXIT_FAIL if report.undefined else EXIT_OK


def cmd_baseline(args) -> int:
    dataset = io.read_dataset(args.dataset)
    splits = io.read_splits(args.dataset, dataset.num_nodes)
    if not splits:
        raise UsageError(f"{args.dataset} has no splits; regenerate it or add splits/")
    result = baselines.evaluate(baselines.MODELS[args.model](), dataset, splits)
    reports.write_baseline(result, args.model, _reports_dir(args))
    print(f"{args.model} on {dataset.task_id}: {result.mean:.4f} ± {result.std:.4f} "
          f"over {len(splits)} splits")
    for w in result.metadata.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    dataset = io.read_dataset(args.dataset)
    report = taskgen.verify_task(dataset)
    print(report.format())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_reproduce(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else _default_seed()
    stats: dict = {}
    results: dict[str, dict] = {name: {} for name in baselines.MODELS}
    for task in reports.TASK_ORDER:
        config = taskgen.default_config(task, seed=seed)
        try:
            dataset = taskgen.generate_task(task, config)
        except GenerationError as exc:
            print(f"{task}: generation failed: {exc}", file=sys.stderr)
            return EXIT_FAIL
        check = taskgen.verify_task(dataset)
        if not check.passed:
            print(check.format(), file=sys.stderr)
            return EXIT_FAIL
        splits = taskgen.make_splits(dataset, args.reps, seed)
        tdir = out / task
        io.write_dataset(dataset, tdir, splits)
        stats[task] = reports.write_stats(dataset, tdir / "reports")
        for name, model in baselines.MODELS.items():
            r = baselines.evaluate(model(), dataset, splits)
            reports.write_baseline(r, name, tdir / "reports")
            results[name][task] = r
        log.info("%s done", task)
    reports.write_table_1(stats, out / "table_1.csv")
    reports.write_table_2(results, out / "table_2_baselines.csv")
    print((out / "table_1.csv").read_text(encoding="utf-8"), end="")
    print((out / "table_2_baselines.csv").read_text(encoding="utf-8"), end="")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        exc = UsageError(message)
        exc.reported = True
        raise exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="synthgraph", description="Synthetic node classification tasks.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="generate, verify and write a dataset")
    g.add_argument("--task", required=True, choices=reports.TASK_ORDER)
    g.add_argument("--nodes", type=int)
    g.add_argument("--avg-degree", type=float)
    g.add_argument("--states", type=int)
    g.add_argument("--seed", type=int, help=f"default: the --config seed, else ${SEED_ENV}, else 0")
    g.add_argument("--config", help="JSON file with GenConfig fields")
    g.add_argument("--reps", type=int, default=10, help="number of split repetitions")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="write stats.json, ccns.csv, feature_hist.csv")
    s.add_argument("dataset")
    s.add_argument("--out", help="report directory (default: <dataset>/reports)")
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("baseline", help="evaluate a baseline over the stored splits")
    b.add_argument("dataset")
    b.add_argument("--model", required=True, choices=sorted(baselines.MODELS))
    b.add_argument("--out", help="report directory (default: <dataset>/reports)")
    b.set_defaults(func=cmd_baseline)

    v = sub.add_parser("verify", help="check a dataset against its task rule")
    v.add_argument("dataset")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reproduce-paper", help="generate all six tasks and the summary tables")
    r.add_argument("--out", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--reps", type=int, default=10)
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return args.func(args)
    except UsageError as exc:
        if not exc.reported:
            print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetFormatError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InputError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
