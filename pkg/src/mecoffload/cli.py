"""Command line entry point: ``mecoffload {run,fig2,...,fig6,table1}``.

Exit status is 0 on success, 1 for configuration or usage errors and 2 for
failures while running.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .baselines import SchemeId
from .experiment import MODES, SWEEPS, ExperimentSpec, Sweep, emit_csv, preset, run
from .scenario import ConfigError, ScenarioConfig, load_config

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6", "table1")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _csv_list(text, cast=str):
    return [cast(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="scenario JSON")
    common.add_argument("--seed", type=int, help="master seed (default: the config's seed)")
    common.add_argument("--drops", type=int, help="Monte-Carlo drops (default 100)")
    common.add_argument("--out", metavar="PATH", help="CSV destination (default: stdout)")
    common.add_argument("--schemes", type=_csv_list,
                        help="comma list from " + ",".join(s.value for s in SchemeId))
    common.add_argument("--interference", choices=MODES,
                        help="SINR used for reported utilities (default exact)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for drops")
    common.add_argument("--no-timing", action="store_true",
                        help="skip runtime measurement (runtime column is 0; output is reproducible)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="mecoffload", description="Multi-cell MEC offloading experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", parents=[common], help="custom experiment")
    r.add_argument("--sweep", choices=SWEEPS, help="parameter to sweep")
    r.add_argument("--values", type=lambda t: _csv_list(t, float),
                   help="comma list of sweep values")
    for name in PRESETS:
        q = sub.add_parser(name, parents=[common], help=f"{name} preset")
        if name != "table1":
            q.add_argument("--panel", choices=("a", "b"), default="a")
    return p


def _spec_from_args(args) -> ExperimentSpec:
    base = load_config(args.config) if args.config else None
    seed = args.seed if args.seed is not None else (base.seed if base else 0)
    drops = args.drops if args.drops is not None else 100
    if args.command == "run":
        if (args.sweep is None) != (args.values is None):
            raise ConfigError("--sweep and --values go together")
        sweep = Sweep(args.sweep, tuple(args.values)) if args.sweep else None
        spec = ExperimentSpec(base or ScenarioConfig(), drops=drops, master_seed=seed,
                              sweep=sweep)
    else:
        spec = preset(args.command, getattr(args, "panel", "a"), drops, seed, base)
    changes = {}
    if args.schemes:
        changes["schemes"] = tuple(SchemeId.parse(s) for s in args.schemes)
    if args.interference:
        changes["interference_mode"] = args.interference
    if args.no_timing:
        changes["measure_runtime"] = False
    return replace(spec, **changes) if changes else spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = _spec_from_args(args)
    except (ConfigError, ValueError) as exc:
        print(f"mecoffload: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    # runtimes are only comparable when schemes are timed one at a time
    workers = 1 if args.command == "table1" else max(1, args.workers)
    try:
        rows = run(spec, workers)
        emit_csv(rows, args.out if args.out else sys.stdout)
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"mecoffload: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
