"""Batch command line: fit, path, simulate, tune, ari.

Exit statuses: 0 success, 2 unreadable input, 3 a fit hit max-iters,
4 invalid configuration.
"""

import argparse
import logging
import os
import sys

from .admm import AdmmConfig, InputDataError, InvalidConfigError, fit
from .clusters import BiclusterLabels, adjusted_rand_index, extract_labels
from .graph import EdgeRecipe
from .io import (
    CsvParseError,
    RunManifest,
    config_to_dict,
    read_labels,
    read_matrix,
    write_labels,
    write_matrix,
    write_summary,
)
from .simulate import CheckerboardSpec, CompositionalSpec, gen_checkerboard, gen_checkerboard_pair, gen_compositional
from .tuning import TuningGrid, ari_oracle_tune, holdout_validate, stability_select

EXIT_OK, EXIT_PARSE, EXIT_NOT_CONVERGED, EXIT_CONFIG = 0, 2, 3, 4

logger = logging.getLogger("biadmm")


class UsageError(ValueError):
    pass


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_engine_flags(p):
    g = p.add_argument_group("engine")
    g.add_argument("--norm", choices=["l1", "l2", "linf"], default="l2")
    g.add_argument("--nu1", type=float)
    g.add_argument("--nu2", type=float)
    g.add_argument("--nu3", type=float)
    g.add_argument("--compositional", action="store_true", help="constrain every row of A to sum to 1")
    g.add_argument("--tol", type=float, default=1e-6, help="primal and dual residual tolerance")
    g.add_argument("--max-iters", type=int, default=10_000)
    g.add_argument("--eps", type=float, default=1e-6, help="fusion tolerance for label extraction")
    w = p.add_argument_group("weights")
    w.add_argument("--knn-m1", type=int, default=5, help="row neighbours")
    w.add_argument("--knn-m2", type=int, default=5, help="column neighbours")
    w.add_argument("--phi", type=float, default=1.0, help="Gaussian kernel rate")
    w.add_argument("--full-graph", action="store_true", help="all pairs with unit weights")
    w.add_argument("--normalize-weights", action="store_true",
                   help="compute kNN distances on the centred, unit-Frobenius data")


def _add_grid_flags(p):
    g = p.add_argument_group("grid")
    g.add_argument("--grid-gamma1", type=_float_list, help="comma-separated gamma1 values")
    g.add_argument("--grid-gamma2", type=_float_list, help="comma-separated gamma2 values")
    g.add_argument("--grid-gamma", type=_float_list, help="single-gamma grid (rescaled weights)")
    g.add_argument("--grid-log", nargs=3, type=float, metavar=("LO", "HI", "NUM"),
                   help="log-spaced values for both gammas")
    g.add_argument("--grid-single", action="store_true", help="with --grid-log: one shared gamma")


def build_parser():
    parser = argparse.ArgumentParser(prog="biadmm", description="Convex biclustering via ADMM.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    pf = sub.add_parser("fit", help="fit at one (gamma1, gamma2)")
    pf.add_argument("input")
    pen = pf.add_argument_group("penalty")
    pen.add_argument("--gamma1", type=float)
    pen.add_argument("--gamma2", type=float)
    pen.add_argument("--gamma", type=float, help="single-gamma mode; excludes --gamma1/--gamma2")
    _add_engine_flags(pf)
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--out-dir", default=".")

    pp = sub.add_parser("path", help="fit every point of a grid")
    pp.add_argument("input")
    _add_engine_flags(pp)
    _add_grid_flags(pp)
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--out-dir", default=".")

    ps = sub.add_parser("simulate", help="generate synthetic data")
    ps.add_argument("--kind", choices=["checkerboard", "compositional"], default="checkerboard")
    ps.add_argument("--n", type=int, default=50)
    ps.add_argument("--p", type=int, default=40)
    ps.add_argument("--K", type=int, default=4)
    ps.add_argument("--R", type=int, default=4)
    ps.add_argument("--sigma", type=float, default=2.0)
    ps.add_argument("--pair", action="store_true", help="also write an independent validation copy")
    ps.add_argument("--n-control", type=int, default=50)
    ps.add_argument("--n-treatment", type=int, default=50)
    ps.add_argument("--dispersion", type=float, default=0.01)
    ps.add_argument("--reads", type=int, default=10_000)
    ps.add_argument("--fold", type=float, default=1400.0)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out-dir", default=".")

    pt = sub.add_parser("tune", help="select (gamma1, gamma2) over a grid")
    pt.add_argument("input")
    pt.add_argument("--method", choices=["holdout", "stability", "ari"], default="holdout")
    pt.add_argument("--holdout-frac", type=float, default=0.1)
    pt.add_argument("--repetitions", type=int, default=50)
    pt.add_argument("--valid", help="validation matrix (method ari)")
    pt.add_argument("--truth-rows", help="true row labels (method ari)")
    pt.add_argument("--truth-cols", help="true column labels (method ari)")
    _add_engine_flags(pt)
    _add_grid_flags(pt)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--out-dir", default=".")

    pa = sub.add_parser("ari", help="adjusted Rand index of two label files")
    pa.add_argument("labels_a")
    pa.add_argument("labels_b")
    return parser


def _config(args, gamma1=0.0, gamma2=0.0):
    return AdmmConfig(
        gamma1=gamma1, gamma2=gamma2, q=args.norm, nu1=args.nu1, nu2=args.nu2, nu3=args.nu3,
        max_iters=args.max_iters, tol_primal=args.tol, tol_dual=args.tol, compositional=args.compositional,
    )


def _recipe(args, single):
    if args.knn_m1 < 1 or args.knn_m2 < 1:
        raise InvalidConfigError("--knn-m1 and --knn-m2 must be at least 1")
    if not args.phi >= 0:
        raise InvalidConfigError("--phi must be nonnegative")
    return EdgeRecipe(args.knn_m1, args.knn_m2, args.phi, args.full_graph, args.normalize_weights, single)


def _grid(args):
    given = [args.grid_gamma is not None, args.grid_log is not None,
             args.grid_gamma1 is not None or args.grid_gamma2 is not None]
    if sum(given) != 1:
        raise UsageError("give exactly one of --grid-gamma, --grid-log, or --grid-gamma1/--grid-gamma2")
    try:
        if args.grid_gamma is not None:
            return TuningGrid(tuple(args.grid_gamma), single=True)
        if args.grid_log is not None:
            lo, hi, num = args.grid_log
            if not (0 < lo <= hi) or num < 1 or num != int(num):
                raise ValueError("--grid-log needs 0 < LO <= HI and a positive integer NUM")
            return TuningGrid.log_spaced(lo, hi, int(num), single=args.grid_single)
        if args.grid_gamma1 is None or args.grid_gamma2 is None:
            raise ValueError("--grid-gamma1 and --grid-gamma2 go together")
        return TuningGrid(tuple(args.grid_gamma1), tuple(args.grid_gamma2))
    except ValueError as exc:
        raise InvalidConfigError(str(exc)) from None


def _grid_dict(grid):
    return {"gamma1_values": list(grid.gamma1_values), "gamma2_values": list(grid.gamma2_values),
            "single": grid.single}


def _engine_echo(args):
    keys = ["knn_m1", "knn_m2", "phi", "full_graph", "normalize_weights", "eps", "seed"]
    return {k: getattr(args, k) for k in keys}


def _fit_and_write(X, rows, cols, config, eps, out_dir, names):
    res = fit(X, rows, cols, config)
    lab = extract_labels(res, rows, cols, eps)
    os.makedirs(out_dir, exist_ok=True)
    write_matrix(os.path.join(out_dir, "A_hat.csv"), res.A_hat, names.row_names, names.col_names)
    write_labels(os.path.join(out_dir, "row_labels.csv"), lab.row_labels)
    write_labels(os.path.join(out_dir, "col_labels.csv"), lab.col_labels)
    summary = {
        "converged": res.converged,
        "iterations": res.iterations,
        "primal_residual": res.primal_residual,
        "dual_residual": res.dual_residual,
        "objective": res.objective,
        "n_row_clusters": lab.n_row_clusters,
        "n_col_clusters": lab.n_col_clusters,
    }
    return res, lab, summary


def cmd_fit(args):
    pair = args.gamma1 is not None or args.gamma2 is not None
    if pair and args.gamma is not None:
        raise UsageError("--gamma excludes --gamma1/--gamma2")
    single = args.gamma is not None
    g1 = args.gamma if single else (args.gamma1 or 0.0)
    g2 = args.gamma if single else (args.gamma2 or 0.0)
    config = _config(args, g1, g2)
    recipe = _recipe(args, single)
    data = read_matrix(args.input)
    rows, cols = recipe.build(data.values)
    res, _, summary = _fit_and_write(data.values, rows, cols, config, args.eps, args.out_dir, data)
    summary.update({f"config.{k}": v for k, v in config_to_dict(config).items()})
    summary.update({f"flags.{k}": v for k, v in _engine_echo(args).items()})
    summary["single_gamma"] = single
    write_summary(os.path.join(args.out_dir, "summary.txt"), summary)
    if not res.converged:
        print(f"warning: stopped at max_iters={config.max_iters} without converging", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_path(args):
    grid = _grid(args)
    config = _config(args)
    data = read_matrix(args.input)
    rows, cols = _recipe(args, grid.single).build(data.values)
    entries = []
    all_converged = True
    for idx, (g1, g2) in enumerate(grid.points()):
        sub = f"point_{idx:04d}"
        res, _, summary = _fit_and_write(
            data.values, rows, cols, config.with_gammas(g1, g2), args.eps, os.path.join(args.out_dir, sub), data
        )
        all_converged &= res.converged
        entries.append({"index": idx, "dir": sub, "gamma1": g1, "gamma2": g2, **summary})
    manifest = RunManifest(
        "path", {"input": args.input}, entries, config_to_dict(config), _grid_dict(grid), args.seed
    )
    manifest.write(os.path.join(args.out_dir, "manifest.txt"))
    return EXIT_OK if all_converged else EXIT_NOT_CONVERGED


def cmd_simulate(args):
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        if args.kind == "checkerboard":
            spec = CheckerboardSpec(args.n, args.p, args.K, args.R, args.sigma, args.seed)
            if args.pair:
                X, Xv, truth = gen_checkerboard_pair(spec)
                write_matrix(os.path.join(args.out_dir, "valid.csv"), Xv)
            else:
                X, truth = gen_checkerboard(spec)
        else:
            spec = CompositionalSpec(
                n_control=args.n_control, n_treatment=args.n_treatment, dispersion=args.dispersion,
                reads_per_sample=args.reads, ratio_fold_reduction=args.fold, seed=args.seed,
            )
            X, truth = gen_compositional(spec)
    except ValueError as exc:
        raise InvalidConfigError(str(exc)) from None
    write_matrix(os.path.join(args.out_dir, "data.csv"), X)
    write_labels(os.path.join(args.out_dir, "truth_rows.csv"), truth.row_labels)
    write_labels(os.path.join(args.out_dir, "truth_cols.csv"), truth.col_labels)
    return EXIT_OK


def cmd_tune(args):
    grid = _grid(args)
    config = _config(args)
    recipe = _recipe(args, grid.single)
    X = read_matrix(args.input).values
    if args.method == "holdout":
        if not 0 < args.holdout_frac < 0.5:
            raise InvalidConfigError("--holdout-frac must be in (0, 0.5)")
        rows, cols = recipe.build(X)
        report = holdout_validate(X, rows, cols, grid, args.holdout_frac, args.seed, config)
    elif args.method == "stability":
        if args.repetitions < 2:
            raise InvalidConfigError("--repetitions must be at least 2")
        report = stability_select(X, grid, recipe, args.repetitions, args.seed, config, args.eps)
    else:
        if not (args.valid and args.truth_rows and args.truth_cols):
            raise UsageError("method ari needs --valid, --truth-rows and --truth-cols")
        Xv = read_matrix(args.valid).values
        truth = BiclusterLabels(read_labels(args.truth_rows), read_labels(args.truth_cols))
        if Xv.shape != X.shape or truth.row_labels.size != X.shape[0] or truth.col_labels.size != X.shape[1]:
            raise InputDataError("training, validation and truth shapes disagree")
        report = ari_oracle_tune(X, Xv, truth, grid, recipe, config, args.eps)
    os.makedirs(args.out_dir, exist_ok=True)
    write_summary(os.path.join(args.out_dir, "tuning.txt"), {
        "method": report.method,
        "selected_gamma1": report.selected[0],
        "selected_gamma2": report.selected[1],
        "best_score": report.best_score,
        "scores": [[g1, g2, s] for g1, g2, s in report.score_table()],
        "extras": report.extras,
        "grid": _grid_dict(grid),
        **{f"config.{k}": v for k, v in config_to_dict(config).items()},
        **{f"flags.{k}": v for k, v in _engine_echo(args).items()},
    })
    print(f"selected gamma1={report.selected[0]:.6g} gamma2={report.selected[1]:.6g} "
          f"score={report.best_score:.6g}")
    return EXIT_OK


def cmd_ari(args):
    a = read_labels(args.labels_a)
    b = read_labels(args.labels_b)
    if a.size != b.size:
        raise InputDataError(f"label files differ in length: {a.size} vs {b.size}")
    print(f"{adjusted_rand_index(a, b):.10g}")
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "path": cmd_path, "simulate": cmd_simulate, "tune": cmd_tune, "ari": cmd_ari}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (CsvParseError, InputDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
