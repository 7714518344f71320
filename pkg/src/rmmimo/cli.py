"""Command line entry point: ``rmmimo {fig1,regions,cdf,ee,custom} [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError
from .scenario import PRESETS, ScenarioConfig, load_config

log = logging.getLogger("rmmimo")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmmimo", description=__doc__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in PRESETS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="JSON scenario document")
        p.add_argument("--seed", type=int, help="base seed (u64)")
        p.add_argument("--trials", type=int, help="Monte Carlo trials (fig1: target draws)")
        p.add_argument("--ttis", type=int, help="TTIs per trial")
        p.add_argument("--out", help="output directory")
        p.add_argument("--arch", help="comma-separated architectures, e.g. SCA_T,SCA_R")
        p.add_argument("--users", help="comma-separated scheduled-user counts, e.g. 1,2,4,6")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def resolve_config(args) -> ScenarioConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["fig1_draws" if args.experiment == "fig1" else "trials"] = args.trials
    if args.ttis is not None:
        overrides["ttis"] = args.ttis
    if args.out is not None:
        overrides["out"] = args.out
    if args.arch is not None:
        overrides["architectures"] = [a.strip() for a in args.arch.split(",") if a.strip()]
    if args.users is not None:
        overrides["users"] = _int_list(args.users)
    if args.config:
        return load_config(args.config, preset=args.experiment, **overrides)
    return ScenarioConfig.for_preset(args.experiment, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = resolve_config(args)
    except (ConfigError, TypeError) as exc:
        print(f"rmmimo: configuration error: {exc}", file=sys.stderr)
        return 2
    from .harness import run_experiment
    try:
        outputs = run_experiment(config, progress=lambda t: log.info("trial %d done", t))
    except ConfigError as exc:
        print(f"rmmimo: configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # report, don't dump a traceback on the user
        log.debug("run failed", exc_info=True)
        print(f"rmmimo: run failed: {exc}", file=sys.stderr)
        return 1
    for name, path in outputs.items():
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
