"""Scenario runner: tune, synthesise, simulate and write the result artifacts."""

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor

from .control import PolePlacementController
from .exceptions import ConfigurationError, DipbatError, DivergenceError
from .linearization import model_discrepancy
from .sim import integrate_linear, integrate_nonlinear, ise_fitness, settling_time
from .tuning import BatTunedController, design_model

log = logging.getLogger(__name__)

SUMMARY_HEADER = ["label", "delay_s", "wall_time_s", "zeta", "omega_n", "best_fitness", "stable"]


def _fmt(x):
    return repr(float(x))


def _with_label(exc, label):
    exc.args = (f"[{label}] {exc.args[0] if exc.args else exc}",) + exc.args[1:]
    exc.scenario = label
    return exc


def _nonlinear_summary(params, gain, scenario, delay):
    try:
        traj = integrate_nonlinear(params, gain, scenario.sim, delay=delay,
                                   delay_convention=scenario.delay_convention)
    except DivergenceError as exc:
        return None, {"diverged_at": exc.time, "settling_time": None}
    return traj, {
        "diverged_at": None,
        "settling_time": settling_time(traj, scenario.settle_band, scenario.sim.reference),
        "ise": ise_fitness(traj, scenario.sim.reference, scenario.weights),
    }


def run_scenario(scenario, out_dir=None):
    """Tune (zeta, omega_n) for ``scenario`` and simulate the resulting loops.

    Writes CSV artifacts plus ``report.json`` into ``out_dir/<label>`` when
    ``out_dir`` is given. Returns the report dict.
    """
    try:
        return _run_scenario(scenario, out_dir)
    except DipbatError as exc:
        raise _with_label(exc, scenario.label)


def _run_scenario(scenario, out_dir):
    label, delay, params = scenario.label, float(scenario.delay), scenario.params
    log.info("scenario %s: delay %.4g s", label, delay)
    tuner = BatTunedController(
        delay=delay, bounds=scenario.bounds, bat=scenario.bat, sim=scenario.sim,
        weights=scenario.weights, plant=scenario.plant,
        delay_convention=scenario.delay_convention, delay_pole=scenario.delay_pole,
    ).fit(params)
    result = tuner.result_
    delayed_ctrl = tuner.controller_

    if delay > 0:
        plain_model = design_model(params, scenario.plant)
        plain_ctrl = PolePlacementController(tuner.zeta_, tuner.omega_n_,
                                             reference=scenario.sim.reference).fit(plain_model)
    else:
        plain_ctrl = delayed_ctrl

    linear = {
        "delayed": integrate_linear(delayed_ctrl.closed_loop_, scenario.sim,
                                    delayed_ctrl.applied_gain_),
        "undelayed": integrate_linear(plain_ctrl.closed_loop_, scenario.sim,
                                      plain_ctrl.applied_gain_),
    }
    nl_delayed, nl_delayed_info = _nonlinear_summary(params, delayed_ctrl.applied_gain_,
                                                     scenario, delay)
    nl_plain, nl_plain_info = _nonlinear_summary(params, plain_ctrl.applied_gain_, scenario, 0.0)

    report = {
        "label": label,
        "delay_s": delay,
        "zeta": tuner.zeta_,
        "omega_n": tuner.omega_n_,
        "best_fitness": result.best_fitness,
        "wall_time_s": result.wall_time,
        "evaluations": result.evaluations,
        "fitness_history": list(result.fitness_history),
        "spectral_abscissa": delayed_ctrl.spectral_abscissa_,
        "stable": bool(delayed_ctrl.spectral_abscissa_ < 0),
        "undelayed_spectral_abscissa": plain_ctrl.spectral_abscissa_,
        "poles": [[p.real, p.imag] for p in delayed_ctrl.poles_],
        "gain": delayed_ctrl.gain_.tolist(),
        "applied_gain": delayed_ctrl.applied_gain_.tolist(),
        "settling_time": {
            name: settling_time(traj, scenario.settle_band, scenario.sim.reference)
            for name, traj in linear.items()
        },
        "nonlinear": {"delayed": nl_delayed_info, "undelayed": nl_plain_info},
        "config": {
            "plant": scenario.plant,
            "delay_convention": scenario.delay_convention,
            "delay_pole": scenario.delay_pole,
            "params": params.as_dict(),
            "bat": scenario.bat.as_dict(),
            "bounds": {n: [float(lo), float(hi)] for n, lo, hi in zip(
                scenario.bounds.names, scenario.bounds.lower, scenario.bounds.upper)},
            "sim": {"dt": scenario.sim.dt, "horizon": scenario.sim.horizon,
                    "initial_state": scenario.sim.initial_state.tolist(),
                    "reference": scenario.sim.reference},
            "fitness_weights": list(scenario.weights),
            "settle_band": scenario.settle_band,
        },
        "linear_model_discrepancy": _discrepancy_summary(params),
        "files": [],
    }

    if out_dir is not None:
        target = os.path.join(out_dir, label)
        os.makedirs(target, exist_ok=True)
        outputs = {
            "trajectory_delayed.csv": linear["delayed"],
            "trajectory_undelayed.csv": linear["undelayed"],
            "nonlinear_delayed.csv": nl_delayed,
            "nonlinear_undelayed.csv": nl_plain,
        }
        for name, traj in outputs.items():
            if traj is not None:
                traj.write_csv(os.path.join(target, name))
                report["files"].append(name)
        write_convergence_csv(os.path.join(target, "convergence.csv"), result.fitness_history)
        report["files"].append("convergence.csv")
        report["files"].append("report.json")
        with open(os.path.join(target, "report.json"), "w", newline="\n") as fh:
            json.dump(report, fh, indent=2, default=_json_default)
            fh.write("\n")
    return report


def _discrepancy_summary(params):
    full = model_discrepancy(params)
    keep = ("max_abs_diff_A", "max_abs_diff_B", "rel_diff_A", "rel_diff_B", "same_sparsity",
            "A_paper", "B_paper", "A_jacobian", "B_jacobian")
    out = {k: full[k] for k in keep}
    out["eig_paper"] = [[z.real, z.imag] for z in full["eig_paper"]]
    out["eig_jacobian"] = [[z.real, z.imag] for z in full["eig_jacobian"]]
    return out


def _json_default(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def write_convergence_csv(path, history):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["generation", "best_fitness"])
        for gen, value in enumerate(history, 1):
            writer.writerow([gen, _fmt(value)])


def _sweep_worker(args):
    scenario, out_dir = args
    try:
        return run_scenario(scenario, out_dir), None
    except DipbatError as exc:
        return None, (type(exc).__name__, str(exc), exc.exit_code)


def run_sweep(scenarios, out_dir=None, jobs=1):
    """Run every scenario and write ``sweep_summary.csv``; one row per scenario.

    A failing scenario is recorded (``stable = error``) and the rest still run.
    Returns ``(rows, errors)`` where ``errors`` maps label to (type, message, exit code).
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ConfigurationError("sweep needs at least one scenario")
    labels = [s.label for s in scenarios]
    dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
    if dupes:
        raise ConfigurationError(f"duplicate scenario labels: {', '.join(dupes)}")

    work = [(s, out_dir) for s in scenarios]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_sweep_worker, work))
    else:
        outcomes = [_sweep_worker(w) for w in work]

    rows, errors = [], {}
    for scenario, (report, error) in zip(scenarios, outcomes):
        if error is not None:
            log.error("scenario %s failed: %s", scenario.label, error[1])
            errors[scenario.label] = error
            rows.append([scenario.label, _fmt(scenario.delay), "", "", "", "", "error"])
            continue
        rows.append([
            report["label"], _fmt(report["delay_s"]), _fmt(report["wall_time_s"]),
            _fmt(report["zeta"]), _fmt(report["omega_n"]), _fmt(report["best_fitness"]),
            "true" if report["stable"] else "false",
        ])
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "sweep_summary.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            writer.writerows(rows)
        manifest = {
            "summary": "sweep_summary.csv",
            "scenarios": {s.label: None if s.label in errors else f"{s.label}/report.json"
                          for s in scenarios},
            "errors": {lab: {"type": e[0], "message": e[1]} for lab, e in errors.items()},
        }
        with open(os.path.join(out_dir, "sweep_manifest.json"), "w", newline="\n") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    return rows, errors
