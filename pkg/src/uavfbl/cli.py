"""Command-line front end: ``uavfbl {solve,sweep,ablate,montecarlo,validate}``.

Exit statuses:

    0  success (``solve``: the allocation is feasible)
    1  the solved scenario is infeasible
    2  usage error (bad flags, empty sweep range)
    3  configuration error (unreadable file, bad or missing field)
    4  ``validate`` found a failing property
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments
from .config import REGIMES, SCHEMES, ConfigError, ScenarioConfig, check_fbl_targets, load_config

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_VALIDATION = 4


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario INI file (defaults if omitted)")
    common.add_argument("--out", type=Path, help="write CSV here instead of stdout")
    common.add_argument("--scheme", choices=SCHEMES)
    common.add_argument("--regime", choices=REGIMES)
    common.add_argument("--integer-blocklengths", action="store_true", default=None)
    common.add_argument("--unit-fading", action="store_true", default=None)

    p = argparse.ArgumentParser(prog="uavfbl", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve the configured scenario")

    sw = sub.add_parser("sweep", parents=[common], help="sweep one parameter")
    sw.add_argument("--sweep", required=True, choices=experiments.SWEEPS, dest="sweep_name")
    sw.add_argument("--from", type=float, required=True, dest="start")
    sw.add_argument("--to", type=float, required=True, dest="stop")
    sw.add_argument("--steps", type=int, required=True)

    ab = sub.add_parser("ablate", parents=[common],
                        help="relaying: IBL-optimal vs FBL-optimal vs FBL at the IBL blocklength")
    ab.add_argument("--sweep", choices=experiments.SWEEPS, dest="sweep_name")
    ab.add_argument("--from", type=float, dest="start")
    ab.add_argument("--to", type=float, dest="stop")
    ab.add_argument("--steps", type=int)

    mc = sub.add_parser("montecarlo", parents=[common], help="average over fading draws")
    mc.add_argument("--trials", type=int, required=True)
    mc.add_argument("--seed", type=int, required=True)
    mc.add_argument("--sweep", choices=experiments.SWEEPS, dest="sweep_name")
    mc.add_argument("--from", type=float, dest="start")
    mc.add_argument("--to", type=float, dest="stop")
    mc.add_argument("--steps", type=int)

    va = sub.add_parser("validate", help="run the invariant checks")
    va.add_argument("--only", nargs="*", metavar="NAME", help="run just these checks")
    return p


def _scenario(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    overrides = {}
    for key in ("scheme", "regime", "integer_blocklengths", "unit_fading"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return cfg.replace(**overrides) if overrides else cfg


def _combos(args, cfg):
    schemes = (args.scheme,) if args.scheme else SCHEMES
    regimes = (args.regime,) if args.regime else REGIMES
    check_fbl_targets(cfg, regimes)
    return tuple((s, r) for s in schemes for r in regimes)


def _values(args, required):
    given = [args.sweep_name, args.start, args.stop, args.steps]
    if not any(v is not None for v in given) and not required:
        return None, (None,)
    if any(v is None for v in given):
        raise UsageError("--sweep, --from, --to and --steps go together")
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if args.steps > 1 and args.start == args.stop:
        raise UsageError("empty sweep range")
    log = args.sweep_name == "nu2"
    if log and min(args.start, args.stop) <= 0:
        raise UsageError("nu2 sweeps are log-spaced and need positive endpoints")
    return args.sweep_name, experiments.sweep_values(args.start, args.stop, args.steps, log)


def _emit(args, text):
    if args.out:
        args.out.write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    cfg = _scenario(args)
    check_fbl_targets(cfg)
    res = experiments.solve_config(cfg)
    row = experiments.result_row(cfg, "none", None, cfg.scheme, cfg.regime, res)
    _emit(args, experiments.to_csv(experiments.SWEEP_HEADER, [row]))
    if not res.feasible:
        print(f"infeasible: {res.infeasibility_reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _scenario(args)
    combos = _combos(args, cfg)
    name, values = _values(args, required=True)
    try:
        rows = experiments.run_sweep(cfg, name, values, combos)
    except ConfigError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, experiments.to_csv(experiments.SWEEP_HEADER, rows))
    return EXIT_OK


def cmd_ablate(args) -> int:
    cfg = _scenario(args)
    check_fbl_targets(cfg, ("fbl",))
    name, values = _values(args, required=False)
    rows = experiments.run_ablation(cfg, name, values)
    _emit(args, experiments.to_csv(experiments.ABLATION_HEADER, rows))
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    cfg = _scenario(args)
    combos = _combos(args, cfg)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    name, values = _values(args, required=False)
    rows = experiments.run_montecarlo(cfg, args.trials, args.seed, name, values, combos)
    _emit(args, experiments.to_csv(experiments.SWEEP_HEADER, rows))
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import CHECKS, run_checks

    if args.only:
        unknown = sorted(set(args.only) - set(CHECKS))
        if unknown:
            raise UsageError(f"unknown checks: {', '.join(unknown)}")
    results = run_checks(args.only)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<28} {r.seconds:6.2f}s  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VALIDATION if failed else EXIT_OK


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "ablate": cmd_ablate,
            "montecarlo": cmd_montecarlo, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
