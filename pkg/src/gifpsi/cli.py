"""Command line front end.

``gifpsi run CONFIG`` executes every task of a JSON config.  The per-kind
subcommands (``validate-axioms``, ``alpha-norm``, ``analyze-sequence``,
``check-continuity``, ``check-compact``) run only the tasks of that kind.
Exit codes: 0 clean, 1 property violation or task error, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import TASK_KINDS, load_config, validate_config
from .errors import ConfigError
from .runner import EXIT_CONFIG, run

# kinds that can run without any task entry in the config
DEFAULT_TASKS = {
    "validate-axioms": {"kind": "validate-axioms", "id": "validate-axioms"},
    "alpha-norm": {"kind": "alpha-norm", "id": "alpha-norm", "alpha": 0.5},
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="path to a JSON run config")
    common.add_argument("--output", "-o", help="report path (overrides the config 'output')")
    common.add_argument("--seed-override", type=int, default=None,
                        help="replace sampler.seed for this run")
    common.add_argument("--parallel", action="store_true",
                        help="run independent tasks concurrently (same report payload)")
    common.add_argument("--workers", type=int, default=None, help="thread count for --parallel")
    common.add_argument("--complement-thresholds", action="store_true",
                        help="use the 1-beta => 1-alpha thresholds in the IFC check")
    common.add_argument("--payload-only", action="store_true",
                        help="write only the deterministic payload (no timing block)")

    parser = argparse.ArgumentParser(prog="gifpsi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run every task in the config")
    for kind in TASK_KINDS:
        sub.add_parser(kind, parents=[common], help=f"run only the {kind} tasks")
    v = sub.add_parser("validate", help="validate a config and print the resolved form")
    v.add_argument("config")
    v.add_argument("--seed-override", type=int, default=None)
    return parser


def _print_diagnostics(exc: ConfigError):
    for d in exc.diagnostics:
        print(f"config error: {d}", file=sys.stderr)


def _select(args):
    """Load the config and narrow it to the subcommand's task kind."""
    cfg = load_config(args.config, args.seed_override)
    if args.command == "run":
        return cfg
    selected = [t for t in cfg.tasks if t.kind == args.command]
    if selected:
        cfg.tasks = selected
        cfg.echo["tasks"] = [e for e in cfg.echo["tasks"] if e["kind"] == args.command]
        return cfg
    if args.command not in DEFAULT_TASKS:
        raise ConfigError([f"tasks: no {args.command} task defined"])
    raw = json.loads(Path(args.config).read_text())
    raw["tasks"] = [DEFAULT_TASKS[args.command]]
    return validate_config(raw, args.seed_override)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            cfg = load_config(args.config, args.seed_override)
            print(json.dumps(cfg.echo, sort_keys=True, indent=1))
            return 0
        cfg = _select(args)
    except ConfigError as exc:
        _print_diagnostics(exc)
        return EXIT_CONFIG

    report = run(cfg, parallel=args.parallel, complement_thresholds=args.complement_thresholds,
                 max_workers=args.workers)
    doc = report.payload if args.payload_only else report.to_dict()
    text = json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"
    out = args.output or cfg.output
    if out:
        Path(out).write_text(text)
        for t in report.payload["tasks"]:
            print(f"{t['id']}: {t['kind']} {t['status']}")
        summary = report.payload["summary"]
        print(f"{summary['tasks']} tasks, {summary['violation']} with violations, "
              f"{summary['error']} errors -> {out} (exit {report.exit_code})")
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
