"""Command-line entry points: run, sweep, metrics, validate.

Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.
"""

import argparse
import itertools
import json
import sys
from pathlib import Path

from .config import config_violations, load_config
from .errors import ConfigError
from .protocol import (CONFIG_NAME, CSV_NAME, SUMMARY_NAME, dumps_json,
                       recompute_summary, run_protocol)


def _load_raw(path):
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _cmd_validate(args):
    raw = _load_raw(args.config)
    if args.seed is not None:
        raw["seed"] = args.seed
    raw.pop("sweep", None)
    _, _, errors = config_violations(raw)
    if errors:
        print("configuration is invalid:", file=sys.stderr)
        for err in errors:
            print(f"  - {err}", file=sys.stderr)
        return 1
    if not args.quiet:
        print("configuration is valid")
    return 0


def _cmd_run(args):
    raw = _load_raw(args.config)
    raw.pop("sweep", None)
    config = load_config(raw, seed_override=args.seed)
    out = Path(args.out if args.out is not None else config.out_dir)
    run_protocol(config, out_dir=out, quiet=args.quiet)
    if not args.quiet:
        print(f"wrote {out / CSV_NAME} and {out / SUMMARY_NAME}")
    return 0


def _set_path(d, dotted, value):
    keys = dotted.split(".")
    node = d
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"sweep path {dotted!r} crosses a non-object")
    node[keys[-1]] = value


def _cmd_sweep(args):
    raw = _load_raw(args.config)
    sweep = raw.pop("sweep", None)
    if not isinstance(sweep, dict) or not sweep:
        raise ConfigError("sweep requires a non-empty 'sweep' object in the "
                          "config mapping dotted parameter paths to lists")
    for path, values in sweep.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep.{path}: expected a non-empty list")
    if args.seed is not None:
        raw["seed"] = args.seed
    keys = sorted(sweep)
    root = Path(args.out if args.out is not None
                else raw.get("out_dir", "out"))
    root.mkdir(parents=True, exist_ok=True)
    index = []
    for i, combo in enumerate(itertools.product(*(sweep[k] for k in keys))):
        cell_raw = json.loads(json.dumps(raw))
        label_parts = []
        for key, value in zip(keys, combo):
            _set_path(cell_raw, key, value)
            label_parts.append(f"{key.split('.')[-1]}={value}")
        cell_name = f"{i:03d}_" + "_".join(label_parts)
        cell_name = cell_name.replace("/", "-").replace(" ", "")
        config = load_config(cell_raw)
        cell_dir = root / cell_name
        run_protocol(config, out_dir=cell_dir, quiet=args.quiet)
        index.append({"cell": cell_name,
                      "overrides": dict(zip(keys, combo))})
        if not args.quiet:
            print(f"cell {cell_name} done")
    (root / "sweep.json").write_text(dumps_json({"cells": index}))
    return 0


def _cmd_metrics(args):
    run_dir = Path(args.out)
    for name in (CSV_NAME, CONFIG_NAME):
        if not (run_dir / name).exists():
            raise ConfigError(f"{run_dir} does not contain {name}")
    summary = recompute_summary(run_dir)
    text = dumps_json(summary)
    summary_path = run_dir / SUMMARY_NAME
    if summary_path.exists() and summary_path.read_text() != text:
        print(f"recomputed metrics differ from {summary_path}",
              file=sys.stderr)
        summary_path.write_text(text)
        return 1
    summary_path.write_text(text)
    if not args.quiet:
        print(f"metrics match {summary_path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="aangait",
        description="Adaptive assist-as-needed gait-training simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out):
        p.add_argument("--config", metavar="PATH",
                       help="JSON config file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, metavar="U64",
                       help="override the config seed")
        if needs_out:
            p.add_argument("--out", metavar="DIR", default=None,
                           help="output directory (default: the config's "
                            "out_dir)")
        p.add_argument("--quiet", action="store_true",
                       help="suppress progress output")

    p_run = sub.add_parser("run", help="execute a configured protocol run")
    common(p_run, needs_out=True)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser(
        "sweep", help="run the cartesian product of the config's sweep lists")
    common(p_sweep, needs_out=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_metrics = sub.add_parser(
        "metrics", help="recompute the summary from an existing run directory")
    p_metrics.add_argument("--out", metavar="DIR", default="out",
                           help="run directory to recompute (default: out)")
    p_metrics.add_argument("--quiet", action="store_true")
    p_metrics.set_defaults(func=_cmd_metrics)

    p_val = sub.add_parser("validate", help="check a config without running")
    common(p_val, needs_out=False)
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
