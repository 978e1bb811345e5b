"""Command-line experiment runner.

Subcommands: run, sweep, lowerbound, verify.
Exit codes: 0 success, 2 config error, 3 strict-mode bound violation,
4 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

from . import harness

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BOUND = 3
EXIT_INVARIANT = 4


def _load_config(path: str | None) -> dict:
    if path is None:
        raise harness.ConfigError("--config PATH is required for this subcommand")
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise harness.ConfigError(f"cannot read config {path}: {exc}") from exc


def _emit(text: str, out_dir: str | None, filename: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
    else:
        path = pathlib.Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text)


def _rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join("" if row.get(c) is None else str(row.get(c))
                              for c in columns))
    return "\n".join(lines) + "\n"


def _cmd_run(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    results = harness.run_many(config)
    summaries = [summary for _, summary in results]
    violations = [s for s in summaries
                  if s.get("bound_check") and not s["bound_check"]["ok"]]
    if args.format == "csv":
        for i, (trace, _) in enumerate(results):
            name = "trace.csv" if len(results) == 1 else f"trace_rep{i:03d}.csv"
            _emit(harness.trace_to_csv(trace), args.out, name)
    else:
        _emit(harness.to_json({"runs": summaries}), args.out, "summary.json")
    if args.out is not None:
        # a directory sink always gets both renderings
        if args.format == "csv":
            _emit(harness.to_json({"runs": summaries}), args.out, "summary.json")
        else:
            for i, (trace, _) in enumerate(results):
                name = "trace.csv" if len(results) == 1 else f"trace_rep{i:03d}.csv"
                _emit(harness.trace_to_csv(trace), args.out, name)
    if args.strict and violations:
        s = violations[0]
        print(f"strict: measured regret {s['regret_dynamic']:.6g} exceeds "
              f"{s['bound_check']['bound']} (seed {s['seed']})", file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    grid = config.pop("sweep", None)
    if not grid:
        raise harness.ConfigError('sweep needs a "sweep" grid object in the config')
    rows = harness.sweep(config, grid)
    violations = [r for r in rows if r.get("bound_check") and not r["bound_check"]["ok"]]
    if args.format == "csv":
        flat = []
        columns: list[str] = []
        for row in rows:
            r = {f"cell_{k}": v for k, v in row["cell"].items()}
            r.update({k: v for k, v in row.items()
                      if k not in ("cell", "bound_check", "epoch_starts", "expert_rates")})
            flat.append(r)
            columns += [c for c in r if c not in columns]
        _emit(_rows_to_csv(flat, columns), args.out, "sweep.csv")
    else:
        _emit(harness.to_json({"grid": grid, "rows": rows}), args.out, "sweep.json")
    if args.strict and violations:
        print(f"strict: bound violated in cell {violations[0]['cell']}", file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK


def _cmd_lowerbound(args) -> int:
    config = harness.normalize_config(_load_config(args.config))
    if config["environment"].get("kind") != "lowerbound":
        raise harness.ConfigError('lowerbound needs environment {"kind": "lowerbound"}')
    report = harness.lowerbound_report(
        T=config["T"], d=int(config["delay"]["d"]), D=config["D"], G=config["G"],
        n=config["n"], learner_spec=config["learner"],
        trials=args.trials, base_seed=args.seed if args.seed is not None else config["seed"])
    if args.format == "csv":
        rows = [{"trial": i, "static_regret": r}
                for i, r in enumerate(report["per_trial"])]
        _emit(_rows_to_csv(rows, ["trial", "static_regret"]), args.out, "lowerbound.csv")
    else:
        _emit(harness.to_json(report), args.out, "lowerbound.json")
    status = {True: "PASS", False: "FAIL", None: "n/a (single trial)"}[report["pass"]]
    print(f"mean static regret {report['mean_static_regret']:.4f} vs "
          f"bound {report['bound_lemma3']:.4f}: {status}", file=sys.stderr)
    return EXIT_OK


def _cmd_verify(args) -> int:
    checks = harness.verify_all(seed=args.seed if args.seed is not None else 0)
    if args.format == "json":
        _emit(harness.to_json({"checks": checks}), args.out, "verify.json")
    for check in checks:
        status = "ok" if check["ok"] else "FAIL"
        line = f"[{status}] {check['name']}"
        if check["detail"] and not check["ok"]:
            line += f": {check['detail']}"
        print(line)
    failed = [c for c in checks if not c["ok"]]
    if failed:
        print(f"{len(failed)} invariant(s) failed", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delayed-oco",
        description="Run online-learning experiments under delayed gradient feedback.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_trials in (("run", _cmd_run, False),
                                   ("sweep", _cmd_sweep, False),
                                   ("lowerbound", _cmd_lowerbound, True),
                                   ("verify", _cmd_verify, False)):
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="JSON config path")
        p.add_argument("--seed", type=int, default=None, help="override the base seed")
        p.add_argument("--trials", type=int, default=200 if needs_trials else 1,
                       help="independent adversarial draws (lowerbound)")
        p.add_argument("--strict", action="store_true",
                       help="fail (exit 3) if a measured regret exceeds its bound")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except harness.SweepError as exc:
        print(f"sweep error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
