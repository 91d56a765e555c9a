"""Command-line front end: ``elitist-chain {analyze,simulate,compare,power}``.

Exit codes: 0 success, 1 runtime or statistical failure, 2 invalid input.
CSV goes to ``--out`` when given (the text report then goes to stdout),
otherwise CSV goes to stdout and the report to stderr.
"""
import argparse
import csv
import io
import sys
from contextlib import contextmanager

import numpy as np

from . import analytics, simulate
from ._numbers import fmt
from .config import ConfigError, check, defaults_yaml, load_config
from .levels import FitnessFamily
from .triangular import InvalidKernelError, brute_force_power, compute_power_factors, kernel_power


class StatisticalFailure(RuntimeError):
    pass


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float) and np.isnan(v):
        return ""
    return fmt(v)


def write_csv(stream, header, rows):
    w = csv.writer(stream, lineterminator="\n")
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _report_stream(cfg):
    return sys.stdout if cfg.out else sys.stderr


def _model(cfg, problem):
    factors = compute_power_factors(problem.kernel, eps_diag=cfg.eps_diag)
    model = analytics.coefficients(problem, factors)
    if cfg.coefficient_offset:
        model = model.with_offset(cfg.coefficient_offset)
    return model


def _tuple_text(values):
    return "(" + ", ".join(analytics.format_scalar(v) for v in values) + ")"


def analysis_report(cfg, problem, model):
    lines = [
        f"problem: {problem.label} (L = {problem.dim})",
        f"eigenvalues lambda_k: {_tuple_text(model.eigenvalues)}",
        f"coefficients c_k: {_tuple_text(model.coefficients)}",
    ]
    if problem.exact:
        lines.append("coefficients c_k (exact): (" + ", ".join(fmt(c) for c in model.coefficients) + ")")
    lines.append(f"E_0 = {analytics.format_scalar(model.e0)}")
    lines += [f"warning: {m}" for m in model.check()]
    lines.append(analytics.closed_form_report(model, cfg.digits, cfg.cutoff))
    return "\n".join(lines) + "\n"


def cmd_analyze(cfg):
    problem = cfg.build_problem()
    model = _model(cfg, problem)
    traj = analytics.series(model, cfg.horizon)
    rows = zip(traj.t, traj.fitness, traj.error, traj.rate)
    with _sink(cfg.out) as fh:
        write_csv(fh, ["t", "F", "E", "R"], rows)
    _report_stream(cfg).write(analysis_report(cfg, problem, model))
    return 0


def run_simulation(cfg, problem=None):
    if cfg.simulation_path == "bitstring":
        p = cfg.problem
        problem = problem or cfg.build_problem()
        q0 = [float(v) for v in problem.q0]
        return simulate.run_bitstring(
            FitnessFamily(p["family"], p.get("levels")), int(p["n"]),
            mutation=p.get("mutation", "onebit"), p_mut=p.get("p_mut"),
            horizon=cfg.horizon, runs=cfg.runs, seed=cfg.seed, q0=q0, workers=cfg.workers,
        )
    problem = problem or cfg.build_problem()
    return simulate.run_chain(problem, cfg.horizon, cfg.runs, cfg.seed, workers=cfg.workers)


def cmd_simulate(cfg):
    problem = cfg.build_problem()
    emp = run_simulation(cfg, problem)
    rows = zip(emp.t, emp.mean, emp.stderr, emp.error, emp.rate)
    with _sink(cfg.out) as fh:
        write_csv(fh, ["t", "mean_F", "stderr", "E_emp", "R_emp"], rows)
    return 0


def cmd_compare(cfg):
    problem = cfg.build_problem()
    model = _model(cfg, problem)
    traj = analytics.series(model, cfg.horizon)
    emp = run_simulation(cfg, problem)
    rep = simulate.compare(traj, emp, threshold=cfg.z_threshold)
    rows = zip(traj.t, traj.fitness, emp.mean, emp.stderr, rep.z)
    with _sink(cfg.out) as fh:
        write_csv(fh, ["t", "F_analytic", "mean_F", "stderr", "z"], rows)
    verdict = "PASS" if rep.passed else "FAIL"
    _report_stream(cfg).write(
        f"{verdict} {problem.label}: max|z| = {rep.max_abs_z:.3f} (threshold {cfg.z_threshold:g}, "
        f"runs {emp.runs}, seed {emp.seed}, path {cfg.simulation_path})\n"
    )
    if not rep.passed:
        raise StatisticalFailure(f"analytic and empirical fitness disagree (max|z| = {rep.max_abs_z:.3f})")
    return 0


def cmd_power(cfg, t, oracle=False):
    problem = cfg.build_problem()
    K = problem.kernel
    closed = kernel_power(compute_power_factors(K, eps_diag=cfg.eps_diag), t)
    with _sink(cfg.out) as fh:
        write_csv(fh, None, closed)
    if oracle:
        brute = brute_force_power(K, t)
        dev = max(abs(float(a - b)) for a, b in zip(closed.flat, brute.flat))
        out = sys.stdout
        if cfg.out is None:
            out.write("\n")
        out.write("# brute-force R^t\n")
        buf = io.StringIO()
        write_csv(buf, None, brute)
        out.write(buf.getvalue())
        out.write(f"max_abs_deviation,{fmt(dev)}\n")
        if dev > 1e-9:
            raise StatisticalFailure(f"closed form deviates from brute force by {dev:g}")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="YAML run configuration")
    common.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    common.add_argument("--horizon", type=int, metavar="T", help="override the horizon")
    common.add_argument("--rational", action="store_true", help="exact rational arithmetic for the kernel")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--seed", type=int, metavar="U64")
    sim.add_argument("--runs", type=int, metavar="N")
    sim.add_argument("--workers", type=int, metavar="W", help="threads; does not change results")

    parser = argparse.ArgumentParser(prog="elitist-chain", description=__doc__.splitlines()[0])
    parser.add_argument("--print-defaults", action="store_true", help="print the default configuration and exit")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("analyze", parents=[common], help="closed-form F_t, E_t, R_t")
    sub.add_parser("simulate", parents=[common, sim], help="Monte-Carlo mean fitness")
    sub.add_parser("compare", parents=[common, sim], help="analytic vs. empirical z-scores")
    pw = sub.add_parser("power", parents=[common], help="closed-form kernel power")
    pw.add_argument("-t", "--exponent", type=int, default=1, metavar="T")
    pw.add_argument("--oracle", action="store_true", help="also print the brute-force power and deviation")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_defaults:
        sys.stdout.write(defaults_yaml())
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        cfg = cfg.override(
            out=args.out, horizon=args.horizon,
            exact=True if args.rational else None,
            seed=getattr(args, "seed", None), runs=getattr(args, "runs", None),
            workers=getattr(args, "workers", None),
        )
        check(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        if args.exponent < 1:
            raise ConfigError("--exponent must be >= 1")
        return cmd_power(cfg, args.exponent, args.oracle)
    except (ConfigError, InvalidKernelError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StatisticalFailure, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
