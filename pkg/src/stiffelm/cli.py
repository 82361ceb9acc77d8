"""Command-line entry point.

Subcommands: solve-ode, fit-function, fit-image, sweep, diagnose (plus the
make-test-image helper).  Every run writes ``report.json`` into ``--out-dir``.
Exit codes: 0 success, 2 invalid flags, 3 I/O error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys
from types import SimpleNamespace

import numpy as np

from . import io as sio
from .assembly import OdeProblem, assemble_fit, assemble_ode
from .basis import ACTIVATIONS, DISTRIBUTIONS, ENCODINGS, ElmConfig, build_basis
from .diagnostics import export_heatmap, export_spectrum, scaling_table
from .linalg import DecompositionError
from .solver import (DEFAULT_EVAL_POINTS, exact_ade_solution, fit_samples, multiscale_target,
                     solve_ode, sweep_epsilon, train)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

SEED_ENV = "STIFFELM_SEED"
ODE_FILTER_WIDTH = 1e-4
FIT_FILTER_WIDTH = 1e-3
IMAGE_FILTER_WIDTH = 1e-4
ODE_WEIGHTS = "-1,1"
FIT_WEIGHTS = "-4,4"


class UsageError(Exception):
    pass


def _floats(text: str, n: int | None = None, flag: str = "") -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag or 'value'}: expected comma-separated numbers, got {text!r}")
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"{flag or 'value'}: expected {n} numbers, got {text!r}")
    return vals


def _bc(text: str) -> tuple[float, float]:
    try:
        x, v = text.split("=")
        return float(x), float(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--bc: expected x=value, got {text!r}")


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV} must be an integer, got {env!r}")


def _add_model_flags(p, filter_width: float, weights: str):
    p.add_argument("--nodes", type=int, default=1000, help="hidden nodes (default 1000)")
    p.add_argument("--encoding", choices=ENCODINGS, default="gaussian")
    p.add_argument("--filter-width", type=float, default=filter_width,
                   help=f"Gaussian filter width d (default {filter_width:g})")
    p.add_argument("--activation", choices=ACTIVATIONS, default="tanh")
    p.add_argument("--weight-dist", choices=DISTRIBUTIONS, default="uniform")
    p.add_argument("--weight-params", default=weights,
                   help=f"lo,hi for uniform or mean,std for normal (default {weights})")
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help=f"RNG seed (default 1, or ${SEED_ENV})")
    p.add_argument("--rank-tol-factor", type=float, default=1.0)
    p.add_argument("--out-dir", default="out")


def _add_ode_flags(p, sweep: bool = False):
    if not sweep:
        p.add_argument("--epsilon", type=float, help="advection-diffusion shorthand u' = eps u''")
        p.add_argument("--coeffs", help="a0,a1,a2 for a0 u + a1 u' + a2 u'' = rhs")
        p.add_argument("--rhs", type=float, default=0.0)
        p.add_argument("--bc", type=_bc, action="append", default=[], help="boundary condition x=value")
    p.add_argument("--collocation", type=int, default=1000)
    p.add_argument("--collocation-mode", choices=("uniform", "random"), default="uniform")
    p.add_argument("--eval-points", type=int, default=DEFAULT_EVAL_POINTS)
    p.add_argument("--full-resolution", action="store_true", help="do not pool large heatmaps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stiffelm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-ode", help="solve a linear ODE of order <= 2 on [0, 1]")
    _add_model_flags(p, ODE_FILTER_WIDTH, ODE_WEIGHTS)
    _add_ode_flags(p)

    p = sub.add_parser("fit-function", help="least-squares fit of a 1-D target")
    _add_model_flags(p, FIT_FILTER_WIDTH, FIT_WEIGHTS)
    p.add_argument("--target", default="multiscale", help="multiscale or csv:<path>")
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("fit-image", help="fit a grayscale PGM as a flattened 1-D signal")
    _add_model_flags(p, IMAGE_FILTER_WIDTH, FIT_WEIGHTS)
    p.add_argument("--input", required=True, help="P2 or P5 graymap")

    p = sub.add_parser("sweep", help="advection-diffusion solves over a list of epsilons")
    _add_model_flags(p, ODE_FILTER_WIDTH, ODE_WEIGHTS)
    p.add_argument("--epsilons", required=True, help="comma-separated positive diffusivities")
    _add_ode_flags(p, sweep=True)

    p = sub.add_parser("diagnose", help="export heatmap, spectrum and scaling table of H")
    _add_model_flags(p, ODE_FILTER_WIDTH, ODE_WEIGHTS)
    _add_ode_flags(p)
    p.add_argument("--from-report", help="rebuild the system described by a report.json")
    p.add_argument("--dump-matrix", action="store_true", help="write heatmap.pgm of H")
    p.add_argument("--dump-spectrum", action="store_true", help="write spectrum.csv of H")

    p = sub.add_parser("make-test-image", help="write the synthetic high-frequency test PGM")
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--out", default="synthetic.pgm")
    return parser


# ------------------------------------------------------------ helpers


def _config(args) -> ElmConfig:
    try:
        params = _floats(args.weight_params, 2, "--weight-params")
        return ElmConfig(args.nodes, args.encoding, args.filter_width, args.activation,
                         args.weight_dist, params, args.seed)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise UsageError(str(exc))


def _ode_problem(args) -> OdeProblem:
    if args.collocation < 1:
        raise UsageError("--collocation must be at least 1")
    colloc = ("uniform", args.collocation) if args.collocation_mode == "uniform" \
        else ("random", args.collocation, args.seed)
    if args.epsilon is not None and args.coeffs is not None:
        raise UsageError("--epsilon and --coeffs are mutually exclusive")
    if args.epsilon is not None:
        if args.epsilon == 0:
            raise UsageError("--epsilon must be non-zero")
        if args.bc:
            raise UsageError("--bc is implied by --epsilon (u(0)=0, u(1)=1)")
        return OdeProblem.advection_diffusion(args.epsilon, colloc)
    if args.coeffs is None:
        raise UsageError("one of --epsilon or --coeffs is required")
    try:
        coeffs = _floats(args.coeffs, 3, "--coeffs")
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc))
    order = max((i for i, c in enumerate(coeffs) if c), default=None)
    if order is None:
        raise UsageError("--coeffs: at least one coefficient must be non-zero")
    if len(args.bc) != order:
        raise UsageError(f"--bc: an order-{order} equation needs {order} boundary conditions, got {len(args.bc)}")
    try:
        return OdeProblem(coeffs, args.rhs, tuple(args.bc), colloc)
    except ValueError as exc:
        raise UsageError(f"--bc: {exc}")


def _ade_epsilon(problem: OdeProblem):
    """Recover epsilon if ``problem`` is the advection-diffusion benchmark, else None."""
    a0, a1, a2 = problem.coeffs
    if (a0 == 0 and a1 == 1 and a2 != 0 and problem.rhs == 0
            and problem.boundary_conditions == ((0.0, 0.0), (1.0, 1.0))):
        return -a2
    return None


def _artifact_paths(out_dir, names):
    return {name: os.path.join(out_dir, name) for name in names}


def _sha256(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_common(out_dir, result, args, command, config, problem, extra_artifacts=None, extra=None):
    paths = _artifact_paths(out_dir, ["solution.csv", "spectrum.csv", "heatmap.pgm"])
    sio.write_solution_csv(result.xs, result.predictions, result.exact, paths["solution.csv"])
    export_spectrum(result.report.spectrum, paths["spectrum.csv"])
    export_heatmap(result.system.H, "log-abs", paths["heatmap.pgm"],
                   full_resolution=getattr(args, "full_resolution", False))
    artifacts = {k: k for k in paths}
    artifacts.update(extra_artifacts or {})
    report = sio.RunReport(
        command=command,
        config=config.to_dict(),
        problem=problem,
        conditioning=result.report.summary(),
        train_seconds=result.train_seconds,
        artifacts=artifacts,
        metrics=result.metrics.to_dict() if result.metrics is not None else None,
        extra=extra,
    )
    sio.write_report(report, os.path.join(out_dir, "report.json"))
    return report


def _ode_problem_dict(problem: OdeProblem, args) -> dict:
    return {**problem.to_dict(), "eval_points": args.eval_points, "rank_tol_factor": args.rank_tol_factor}


def _print_summary(report):
    c = report.conditioning
    line = f"rank={c['rank']} raw_cond={c['raw_condition']:.3g} eff_cond={c['effective_condition']:.3g}"
    if report.metrics:
        line += f" mae={report.metrics['mae']:.3g} mse={report.metrics['mse']:.3g}"
    line += f" train_seconds={report.train_seconds:.3f}"
    print(line)


# ------------------------------------------------------------ commands


def cmd_solve_ode(args):
    config = _config(args)
    problem = _ode_problem(args)
    eps = _ade_epsilon(problem)
    oracle = (lambda x: exact_ade_solution(eps, x)) if eps is not None else None
    result = solve_ode(config, problem, oracle, args.eval_points, args.rank_tol_factor)
    sio.ensure_dir(args.out_dir)
    report = _write_common(args.out_dir, result, args, "solve-ode", config, _ode_problem_dict(problem, args))
    _print_summary(report)


def _normalize(xs):
    lo, hi = float(np.min(xs)), float(np.max(xs))
    if hi == lo:
        return np.zeros_like(xs), lo, hi
    return (xs - lo) / (hi - lo), lo, hi


def _function_samples(target: str, samples: int):
    if target == "multiscale":
        if samples < 1:
            raise UsageError("--samples must be at least 1")
        xs = np.linspace(0.0, 1.0, samples)
        return xs, multiscale_target(xs), {"target": "multiscale", "samples": samples}
    if target.startswith("csv:"):
        path = target[4:]
        xs, ys = sio.read_xy_csv(path)
        return xs, ys, {"target": target, "samples": int(xs.size), "sha256": _sha256(path)}
    raise UsageError(f"--target: expected 'multiscale' or 'csv:<path>', got {target!r}")


def cmd_fit_function(args):
    config = _config(args)
    raw_xs, ys, problem = _function_samples(args.target, args.samples)
    xs, lo, hi = _normalize(raw_xs)
    problem.update({"x_min": lo, "x_max": hi, "rank_tol_factor": args.rank_tol_factor})
    result = fit_samples(config, xs, ys, args.rank_tol_factor)
    sio.ensure_dir(args.out_dir)
    report = _write_common(args.out_dir, result, args, "fit-function", config, problem)
    _print_summary(report)


def cmd_fit_image(args):
    config = _config(args)
    pixels, maxval = sio.read_pgm(args.input)
    xs, ys = sio.load_image_vector(args.input)
    result = fit_samples(config, xs, ys, args.rank_tol_factor)
    sio.ensure_dir(args.out_dir)
    recon = np.round(np.clip(result.predictions, 0.0, 1.0) * maxval).astype(np.int64).reshape(pixels.shape)
    sio.write_pgm(os.path.join(args.out_dir, "reconstruction.pgm"), recon, maxval)
    problem = {"input": os.path.abspath(args.input), "sha256": _sha256(args.input),
               "height": pixels.shape[0], "width": pixels.shape[1], "maxval": maxval,
               "rank_tol_factor": args.rank_tol_factor}
    report = _write_common(args.out_dir, result, args, "fit-image", config, problem,
                           extra_artifacts={"reconstruction.pgm": "reconstruction.pgm"})
    _print_summary(report)


def cmd_sweep(args):
    config = _config(args)
    try:
        epsilons = _floats(args.epsilons, flag="--epsilons")
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc))
    if not epsilons or any(not e > 0 for e in epsilons):
        raise UsageError("--epsilons: every value must be positive")
    if args.collocation < 1:
        raise UsageError("--collocation must be at least 1")
    colloc = ("uniform", args.collocation) if args.collocation_mode == "uniform" \
        else ("random", args.collocation, args.seed)
    rows = sweep_epsilon(config, epsilons, colloc, args.rank_tol_factor, args.eval_points, keep_results=True)
    sio.ensure_dir(args.out_dir)
    sio.write_csv(os.path.join(args.out_dir, "sweep.csv"),
                  ["epsilon", "mae", "rank", "raw_condition", "effective_condition", "status"],
                  [(r.epsilon, r.mae, r.rank, r.raw_condition, r.effective_condition,
                    "ok" if r.ok else f"failed: {r.error}") for r in rows])
    ok = [(r.epsilon, r.result) for r in rows if r.ok]
    if ok:
        scaling_table(ok, os.path.join(args.out_dir, "scaling.csv"))
    entries = []
    for i, row in enumerate(rows):
        sub = f"eps_{i:02d}"
        entries.append({"epsilon": row.epsilon, "dir": sub, "status": "ok" if row.ok else row.error})
        if not row.ok:
            continue
        res = row.result
        d = sio.ensure_dir(os.path.join(args.out_dir, sub))
        sio.write_solution_csv(res.xs, res.predictions, res.exact, os.path.join(d, "solution.csv"))
        export_spectrum(res.report.spectrum, os.path.join(d, "spectrum.csv"))
        problem = OdeProblem.advection_diffusion(row.epsilon, colloc)
        sio.write_report(sio.RunReport(
            command="solve-ode", config=config.to_dict(), problem=_ode_problem_dict(problem, args),
            conditioning=res.report.summary(), train_seconds=res.train_seconds,
            artifacts={"solution.csv": "solution.csv", "spectrum.csv": "spectrum.csv"},
            metrics=res.metrics.to_dict()), os.path.join(d, "report.json"))
    total = sum(r.result.train_seconds for r in rows if r.ok)
    sio.write_report(sio.RunReport(
        command="sweep", config=config.to_dict(),
        problem={"epsilons": list(epsilons), "collocation": list(colloc), "eval_points": args.eval_points,
                 "rank_tol_factor": args.rank_tol_factor},
        conditioning={}, train_seconds=total,
        artifacts={"sweep.csv": "sweep.csv", **({"scaling.csv": "scaling.csv"} if ok else {})},
        extra={"runs": entries}), os.path.join(args.out_dir, "report.json"))
    for r in rows:
        status = f"mae={r.mae:.3g} rank={r.rank}" if r.ok else f"FAILED {r.error}"
        print(f"epsilon={r.epsilon:g} {status}")


def _rebuild_from_report(path):
    """Config, linear system and optional oracle described by a saved report."""
    try:
        report = sio.read_report(path)
    except ValueError as exc:
        raise UsageError(f"--from-report: {exc}")
    try:
        config = ElmConfig.from_dict(report.config)
    except (TypeError, KeyError, ValueError) as exc:
        raise UsageError(f"--from-report: invalid config: {exc}")
    try:
        return _rebuild(report, config)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"--from-report: invalid problem description: {exc}")


def _rebuild(report, config):
    basis = build_basis(config)
    prob = report.problem
    if report.command == "solve-ode":
        problem = OdeProblem.from_dict(prob)
        eps = _ade_epsilon(problem)
        return config, assemble_ode(basis, problem), eps, prob.get("rank_tol_factor", 1.0)
    if report.command == "fit-function":
        xs, ys, _ = _function_samples(prob["target"], prob["samples"])
        return config, assemble_fit(basis, _normalize(xs)[0], ys), None, prob.get("rank_tol_factor", 1.0)
    if report.command == "fit-image":
        xs, ys = sio.load_image_vector(prob["input"])
        return config, assemble_fit(basis, xs, ys), None, prob.get("rank_tol_factor", 1.0)
    raise UsageError(f"--from-report: cannot diagnose a {report.command!r} report")


def cmd_diagnose(args):
    if args.from_report:
        config, system, eps, tol_factor = _rebuild_from_report(args.from_report)
        problem = {"from_report": os.path.abspath(args.from_report)}
    else:
        config = _config(args)
        ode = _ode_problem(args)
        system = assemble_ode(build_basis(config), ode)
        eps, tol_factor = _ade_epsilon(ode), args.rank_tol_factor
        problem = _ode_problem_dict(ode, args)
    beta, cond, seconds = train(system, tol_factor)
    sio.ensure_dir(args.out_dir)
    dump_all = not (args.dump_matrix or args.dump_spectrum)
    artifacts = {}
    if args.dump_matrix or dump_all:
        hm = export_heatmap(system.H, "log-abs", os.path.join(args.out_dir, "heatmap.pgm"),
                            full_resolution=args.full_resolution)
        artifacts["heatmap.pgm"] = "heatmap.pgm"
        print(f"heatmap {hm.pixels.shape[0]}x{hm.pixels.shape[1]} (H is {hm.rows}x{hm.cols}, pool {hm.pool_factor})")
    if args.dump_spectrum or dump_all:
        export_spectrum(cond.spectrum, os.path.join(args.out_dir, "spectrum.csv"))
        artifacts["spectrum.csv"] = "spectrum.csv"

    row = SimpleNamespace(report=cond, metrics=None)
    scaling_table([(eps if eps is not None else float("nan"), row)], os.path.join(args.out_dir, "scaling.csv"))
    artifacts["scaling.csv"] = "scaling.csv"
    report = sio.RunReport(command="diagnose", config=config.to_dict(), problem=problem,
                           conditioning=cond.summary(), train_seconds=seconds, artifacts=artifacts)
    sio.write_report(report, os.path.join(args.out_dir, "report.json"))
    _print_summary(report)


def cmd_make_test_image(args):
    if args.size < 2:
        raise UsageError("--size must be at least 2")
    sio.write_pgm(args.out, sio.synthetic_image(args.size))
    print(args.out)


COMMANDS = {
    "solve-ode": cmd_solve_ode,
    "fit-function": cmd_fit_function,
    "fit-image": cmd_fit_image,
    "sweep": cmd_sweep,
    "diagnose": cmd_diagnose,
    "make-test-image": cmd_make_test_image,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"stiffelm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, sio.PgmError) as exc:
        print(f"stiffelm {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DecompositionError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"stiffelm {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
