"""Command-line interface.

Subcommands:
    run     solve one or more sample bundles and emit one record per sample
    bench   synthetic Monte-Carlo benchmark over the implemented methods
    verify  stationarity / grid oracles on bundles or random instances

Records are line-delimited JSON with a schema_version field. Exit codes:
0 success, 2 usage error, 3 input format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import backend
from .bundle import read_bundle
from .errors import FormatError, MTAError, NonFinite, SizeMismatch
from .oracles import GRID_MAX_VIEWS, grid_oracle, stationarity_oracle
from .predictors import METHODS, ensemble_vote, run_method
from .scenes import OUTLIER_MODES, SceneConfig, generate_scene, run_benchmark
from .solver import Hyperparams, mta_solve

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3


def _params_from_args(args) -> Hyperparams:
    return Hyperparams(
        lam=args.lam,
        lam_y=args.lam_y,
        rho=args.rho,
        epsilon=args.epsilon,
        max_inner_y=args.max_inner,
        max_inner_m=args.max_inner,
        max_outer=args.max_outer,
        affinity_kind=args.affinity,
        diagonal_mode=args.diagonal,
        fraction=args.fraction,
    )


def _params_record(params: Hyperparams) -> dict:
    return {
        "lambda": params.lam,
        "lambda_y": params.lam_y,
        "rho": params.rho,
        "epsilon": params.epsilon,
        "max_inner": params.max_inner_y,
        "max_outer": params.max_outer,
        "affinity": params.affinity_kind,
        "diagonal": params.diagonal_mode,
        "fraction": params.fraction,
    }


def _add_solver_flags(sub):
    sub.add_argument("--lambda", dest="lam", type=float, default=4.0, help="affinity coupling weight")
    sub.add_argument("--lambda-y", dest="lam_y", type=float, default=0.2, help="entropy barrier weight")
    sub.add_argument("--rho", type=float, default=0.3, help="bandwidth neighbor ratio")
    sub.add_argument("--epsilon", type=float, default=1e-6, help="convergence threshold")
    sub.add_argument("--max-outer", type=int, default=20)
    sub.add_argument("--max-inner", type=int, default=100)
    sub.add_argument("--affinity", choices=["text", "vision"], default="text")
    sub.add_argument("--diagonal", choices=["zeroed", "kept"], default="zeroed")
    sub.add_argument("--fraction", type=float, default=0.1, help="kept fraction for --method threshold")


def _default_jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("MTA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _emit(lines: list[str], output: str | None) -> None:
    text = "".join(line + "\n" for line in lines)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_sample(path: str, method: str, params: Hyperparams, use_ensemble: bool) -> dict:
    views, class_sets, _header = read_bundle(path)
    t0 = time.perf_counter()
    if use_ensemble:
        reports = [run_method(method, views, cs, params) for cs in class_sets]
        rep = ensemble_vote(reports)
        votes = [r.predicted_class for r in reports]
    else:
        rep = run_method(method, views, class_sets[0], params)
        votes = None
    wall = time.perf_counter() - t0

    record = {
        "schema_version": SCHEMA_VERSION,
        "kind": "run",
        "sample": str(path),
        "method": rep.method,
        "backend": backend.NAME,
        "predicted_class": rep.predicted_class,
        "predicted_name": rep.class_name,
        "similarities": [float(s) for s in rep.similarities],
        "inlierness": None if rep.inlierness is None else [float(v) for v in rep.inlierness],
        "iterations": rep.iterations,
        "objective_trajectory": rep.objective_trajectory,
        "flags": list(rep.flags),
        "params": _params_record(params),
        "wall_time_s": wall,
    }
    if votes is not None:
        record["votes"] = votes
    return record


def cmd_run(args) -> int:
    params = _params_from_args(args)
    jobs = _default_jobs(args)
    try:
        if jobs == 1:
            records = [_run_sample(p, args.method, params, args.ensemble) for p in args.bundles]
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = [
                    pool.submit(_run_sample, p, args.method, params, args.ensemble)
                    for p in args.bundles
                ]
                records = [f.result() for f in futures]  # input order preserved
    except (FormatError, SizeMismatch, NonFinite) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    _emit([json.dumps(r, sort_keys=True) for r in records], args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    config = SceneConfig(
        seed=args.seed,
        dim=args.dim,
        n_classes=args.classes,
        n_views=args.views,
        inlier_noise=args.inlier_noise,
        outlier_fraction=args.outlier_fraction,
        outlier_mode=args.outlier_mode,
        text_noise=args.text_noise,
    )
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            print(f"error: unknown method {m!r}", file=sys.stderr)
            return EXIT_USAGE
    params = _params_from_args(args)
    result = run_benchmark(config, methods, args.trials, params)
    _emit(result.records(), args.output)
    print(result.summary(), file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    params = _params_from_args(args)
    records = []
    try:
        if args.bundles:
            cases = []
            for path in args.bundles:
                views, class_sets, _ = read_bundle(path)
                cases.append((str(path), views, class_sets[0]))
        else:
            config = SceneConfig(
                seed=args.seed,
                dim=2,
                n_classes=3,
                n_views=min(6, GRID_MAX_VIEWS),
                inlier_noise=0.3,
                outlier_fraction=0.2,
                outlier_mode="uniform_sphere",
                text_noise=0.1,
            )
            cases = []
            for i in range(args.instances):
                scene = generate_scene(config, trial=i)
                cases.append((f"random-{i}", scene.views, scene.classes))
    except (FormatError, SizeMismatch, NonFinite) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT

    for name, views, classes in cases:
        solution = mta_solve(views, classes, params)
        report = stationarity_oracle(views, classes, solution, params)
        record = {
            "schema_version": SCHEMA_VERSION,
            "kind": "verify",
            "sample": name,
            "backend": backend.NAME,
            "converged": solution.trace.converged,
            "objective": solution.trace.objectives[-1],
            "grad_norm": report.grad_norm,
            "y_residual_inf": report.y_residual_inf,
            "flags": list(solution.trace.flags),
        }
        if views.dim == 2 and views.n_views <= GRID_MAX_VIEWS:
            oracle = grid_oracle(views, classes, params, grid_resolution=args.grid_resolution)
            record["grid_min_objective"] = oracle.min_objective
            record["grid_gap"] = solution.trace.objectives[-1] - oracle.min_objective
        records.append(json.dumps(record, sort_keys=True))
    _emit(records, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mta",
        description="Robust MeanShift aggregation of augmented-view embeddings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve sample bundles")
    p_run.add_argument("bundles", nargs="+", help="bundle directories")
    p_run.add_argument("--method", choices=METHODS, default="mta")
    _add_solver_flags(p_run)
    p_run.add_argument("--ensemble", action="store_true", help="majority vote over all class sets")
    p_run.add_argument("--output", default=None, help="write records here instead of stdout")
    p_run.add_argument("--jobs", type=int, default=None, help="parallel samples (MTA_THREADS fallback)")
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="synthetic benchmark")
    p_bench.add_argument("--trials", type=int, default=100)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--dim", type=int, default=64)
    p_bench.add_argument("--classes", type=int, default=10)
    p_bench.add_argument("--views", type=int, default=64)
    p_bench.add_argument("--inlier-noise", type=float, default=0.35)
    p_bench.add_argument("--outlier-fraction", type=float, default=0.3)
    p_bench.add_argument("--outlier-mode", choices=OUTLIER_MODES, default="wrong_class")
    p_bench.add_argument("--text-noise", type=float, default=0.1)
    p_bench.add_argument("--methods", default="mta,meanshift,mean,zeroshot")
    _add_solver_flags(p_bench)
    p_bench.add_argument("--output", default=None)
    p_bench.set_defaults(func=cmd_bench)

    p_verify = sub.add_parser("verify", help="run verification oracles")
    p_verify.add_argument("bundles", nargs="*", help="bundle directories (default: random instances)")
    p_verify.add_argument("--instances", type=int, default=10)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--grid-resolution", type=int, default=200)
    _add_solver_flags(p_verify)
    p_verify.add_argument("--output", default=None)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MTAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
