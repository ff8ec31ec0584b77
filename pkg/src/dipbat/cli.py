"""Command-line entry point: ``run``, ``sweep``, ``linearize`` and ``selftest``."""

import argparse
import logging
import sys

import numpy as np

from .exceptions import ConfigurationError, DipbatError
from .config import load_scenario
from .delay import pade_augment
from .linearization import jacobian_linear_model, model_discrepancy, paper_linear_model

log = logging.getLogger("dipbat")


def _parse_delays(text):
    try:
        delays = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"--delays: cannot parse {text!r}") from None
    if not delays:
        raise ConfigurationError("--delays needs at least one value")
    return delays


def _cmd_run(args):
    from .scenario import run_scenario

    scenario = load_scenario(args.config)
    if args.seed is not None:
        scenario = scenario.replace(bat=scenario.bat.replace(seed=args.seed))
    if args.delay is not None:
        scenario = scenario.replace(delay=args.delay)
    report = run_scenario(scenario, args.out)
    print(f"{report['label']}: delay={report['delay_s']:g}s zeta={report['zeta']:.6g} "
          f"omega_n={report['omega_n']:.6g} fitness={report['best_fitness']:.6g} "
          f"abscissa={report['spectral_abscissa']:.6g} stable={report['stable']} "
          f"wall_time={report['wall_time_s']:.3f}s")
    return 0


def _cmd_sweep(args):
    from .scenario import SUMMARY_HEADER, run_sweep

    base = load_scenario(args.config)
    if args.seed is not None:
        base = base.replace(bat=base.bat.replace(seed=args.seed))
    scenarios = [base.replace(label=f"{base.label}_delay_{d:g}", delay=d)
                 for d in _parse_delays(args.delays)]
    rows, errors = run_sweep(scenarios, args.out, jobs=args.jobs)
    print(",".join(SUMMARY_HEADER))
    for row in rows:
        print(",".join(row))
    if errors:
        return next(iter(errors.values()))[2]
    return 0


def _print_matrix(name, M):
    print(f"{name} =")
    print(np.array2string(np.atleast_2d(M), precision=6, suppress_small=False,
                          max_line_width=160))


def _cmd_linearize(args):
    scenario = load_scenario(args.config)
    models = {"paper": paper_linear_model, "jacobian": jacobian_linear_model}
    names = ["paper", "jacobian"] if args.model == "both" else [args.model]
    for name in names:
        model = models[name](scenario.params)
        if scenario.delay > 0:
            model = pade_augment(model, scenario.delay, scenario.delay_convention)
        print(f"# {name} model (order {model.order})")
        _print_matrix("A", model.A)
        _print_matrix("B", model.B)
    if args.model == "both":
        d = model_discrepancy(scenario.params)
        print(f"# discrepancy: max|dA| = {d['max_abs_diff_A']:.6g} "
              f"(rel {d['rel_diff_A']:.3g}), max|dB| = {d['max_abs_diff_B']:.6g} "
              f"(rel {d['rel_diff_B']:.3g}), same sparsity: {d['same_sparsity']}")
    return 0


def _cmd_selftest(args):
    from .selftest import run_selftest

    results = run_selftest()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return 0 if all(ok for _, ok, _ in results) else 3


def build_parser():
    parser = argparse.ArgumentParser(prog="dipbat", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="tune and simulate one scenario")
    run.add_argument("--config")
    run.add_argument("--seed", type=int)
    run.add_argument("--delay", type=float, help="override scenario.delay")
    run.add_argument("--out", default="out")
    run.set_defaults(func=_cmd_run)

    sweep = sub.add_parser("sweep", help="run one scenario per delay and summarise")
    sweep.add_argument("--config")
    sweep.add_argument("--delays", default="0.02,0.2,2.0")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--out", default="out")
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.set_defaults(func=_cmd_sweep)

    lin = sub.add_parser("linearize", help="print the linear A and B matrices")
    lin.add_argument("--config")
    lin.add_argument("--model", choices=("paper", "jacobian", "both"), default="both")
    lin.set_defaults(func=_cmd_linearize)

    selftest = sub.add_parser("selftest", help="run the fast invariant checks")
    selftest.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DipbatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
