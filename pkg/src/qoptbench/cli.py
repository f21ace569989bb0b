"""Command-line front end: gen, run, sweep, report.

Configuration precedence is built-in defaults < JSON config file < flags.
The config file is flat JSON whose keys mirror the flag names; unknown keys
are rejected by name.  QOPTBENCH_CONFIG sets the default config path.

Exit codes: 0 success, 2 usage or input error, 3 matrix completed with
per-run failures (the failures are embedded in the results CSV).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

from .bench import (
    ALGORITHMS,
    BenchConfig,
    aggregate,
    make_suite,
    read_records,
    render_boxplot,
    run_matrix,
    summary_to_csv,
    sweep_qaoa,
)
from .problems import KINDS, read_suite, write_suite

ENV_CONFIG = "QOPTBENCH_CONFIG"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARTIAL = 3

_CONFIG_KEYS = {f.name for f in fields(BenchConfig)} | {"workers"}


class CliError(Exception):
    pass


def load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise CliError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise CliError(f"config file {path} must hold a JSON object")
    for key in data:
        if key not in _CONFIG_KEYS:
            raise CliError(
                f"unknown config key {key!r} in {path}; "
                f"valid keys: {sorted(_CONFIG_KEYS)}"
            )
    return data


def build_bench_config(args) -> tuple[BenchConfig, int]:
    """Merge defaults, config file, and flags; returns (config, workers)."""
    merged: dict = {}
    config_path = getattr(args, "config", None) or os.environ.get(ENV_CONFIG)
    if config_path:
        merged.update(load_config_file(config_path))
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    workers = int(merged.pop("workers", 0) or (os.cpu_count() or 1))
    return BenchConfig(**merged), workers


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file (or set $QOPTBENCH_CONFIG)")
    p.add_argument("--p", type=int, help="alternating-layer depth (default 100)")
    p.add_argument("--reps", type=int, help="SU(2) repetitions (default 2)")
    p.add_argument("--budget", type=int, help="optimizer evaluation budget (default 5000)")
    p.add_argument("--sweeps", type=int, help="annealing sweeps (default 10000)")
    p.add_argument("--shots", type=int, help="annealing shots (default 1000)")
    p.add_argument("--qa-T", dest="qa_T", type=float, help="simulated anneal duration (default 20)")
    p.add_argument("--qa-dt", dest="qa_dt", type=float, help="simulated anneal step (default 0.01)")
    p.add_argument("--lam", type=float, help="regularization (default 1e-6)")
    p.add_argument("--dt-override", dest="dt_override", type=float, help="imaginary-time step override")
    p.add_argument("--T-override", dest="T_override", type=float, help="imaginary-time duration override")
    p.add_argument(
        "--diagonal-part",
        dest="sa_diagonal_part",
        action="store_const",
        const=True,
        help="let SA anneal only the Z terms of non-diagonal Hamiltonians",
    )
    p.add_argument("--base-seed", dest="base_seed", type=int, help="seed for derived per-run seeds")
    p.add_argument("--workers", type=int, help="concurrent runs (default: CPU count)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qoptbench",
        description="Benchmark quantum and classical heuristics on seeded problem suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance suite file")
    g.add_argument("kind", help=f"problem family, one of {', '.join(KINDS)}")
    g.add_argument("--count", type=int, default=250)
    g.add_argument("--n", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--edge-probability", type=float, default=0.5)
    g.add_argument("--value-max", type=int, default=None, help="numpart/knapsack value range")
    g.add_argument("--weight-max", type=int, default=50)
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="run algorithms over a suite file")
    r.add_argument("instances")
    r.add_argument("--algo", required=True, help="comma-separated algorithm tags")
    r.add_argument("--out", required=True)
    r.add_argument("--resume", action="store_true")
    _add_config_flags(r)

    s = sub.add_parser("sweep", help="factorial depth/size sweep of the alternating-layer driver")
    s.add_argument("kind")
    s.add_argument("--p", required=True, help="comma-separated depths")
    s.add_argument("--n", required=True, help="comma-separated qubit counts")
    s.add_argument("--per-cell", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=None)
    s.add_argument("--out", required=True)

    rep = sub.add_parser("report", help="aggregate a results CSV into summary + box plot")
    rep.add_argument("results")
    rep.add_argument("--out-dir", required=True)
    return parser


def cmd_gen(args) -> int:
    if args.kind not in KINDS:
        print(
            f"error: unknown kind {args.kind!r}; valid kinds: {', '.join(KINDS)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    kwargs = {}
    if args.kind == "maxcut":
        kwargs["edge_probability"] = args.edge_probability
    if args.kind == "numpart":
        kwargs["value_max"] = args.value_max or 100
    if args.kind == "knapsack":
        kwargs["value_max"] = args.value_max or 50
        kwargs["weight_max"] = args.weight_max
    suite = make_suite(args.kind, count=args.count, n=args.n, base_seed=args.seed, **kwargs)
    write_suite(suite, args.out)
    print(f"wrote {len(suite)} {args.kind} instances (n={args.n}, seed={args.seed}) to {args.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    tags = [t.strip() for t in args.algo.split(",") if t.strip()]
    for tag in tags:
        if tag == "qa_hw":
            print(
                "error: hardware backends unsupported; use qa_sim",
                file=sys.stderr,
            )
            return EXIT_USAGE
        if tag not in ALGORITHMS:
            print(
                f"error: unknown algorithm {tag!r}; valid: {', '.join(ALGORITHMS)}",
                file=sys.stderr,
            )
            return EXIT_USAGE
    try:
        suite = read_suite(args.instances)
    except FileNotFoundError:
        print(f"error: instance file not found: {args.instances}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg, workers = build_bench_config(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    records = run_matrix(
        suite,
        tags,
        cfg,
        out_path=args.out,
        workers=workers,
        resume=args.resume,
        progress=lambda r: print(
            f"{r.instance_id} {r.algorithm}: fidelity="
            f"{'error' if r.error else f'{r.fidelity:.4f}'}"
        ),
    )
    failures = sum(1 for r in records if r.error)
    print(f"wrote {len(records)} records to {args.out} ({failures} failed)")
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_sweep(args) -> int:
    if args.kind not in KINDS:
        print(
            f"error: unknown kind {args.kind!r}; valid kinds: {', '.join(KINDS)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    try:
        p_values = [int(v) for v in args.p.split(",")]
        n_values = [int(v) for v in args.n.split(",")]
    except ValueError:
        print("error: --p and --n must be comma-separated integers", file=sys.stderr)
        return EXIT_USAGE
    if any(n > 12 for n in n_values):
        print("error: sweep limited to n <= 12", file=sys.stderr)
        return EXIT_USAGE
    cfg = BenchConfig(budget=args.budget) if args.budget else BenchConfig()
    records = sweep_qaoa(args.kind, p_values, n_values, args.per_cell, args.seed, cfg)
    with open(args.out, "w") as fh:
        from .bench import RESULTS_HEADER, record_to_row

        fh.write(RESULTS_HEADER + "\n")
        for rec in records:
            fh.write(record_to_row(rec) + "\n")
    print(f"wrote {len(records)} sweep records to {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        records = read_records(args.results)
    except FileNotFoundError:
        print(f"error: results file not found: {args.results}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not records:
        print("error: results file holds no records", file=sys.stderr)
        return EXIT_USAGE
    stats = aggregate(records)
    if not stats:
        print("error: no scoreable records (all rows failed)", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.csv").write_text(summary_to_csv(stats))
    (out / "fidelity_boxplot.svg").write_text(render_boxplot(stats))
    for s in stats:
        print(f"{s.kind} {s.algorithm}: median fidelity {s.median!r} (count {s.count})")
    print(f"wrote {out / 'summary.csv'} and {out / 'fidelity_boxplot.svg'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    handler = {
        "gen": cmd_gen,
        "run": cmd_run,
        "sweep": cmd_sweep,
        "report": cmd_report,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
