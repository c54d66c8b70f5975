"""Command-line interface: fit, select, eval, sweep, verify, generate.

Every command is deterministic given its full argument list (seeds
included) and writes a manifest next to its outputs.  The manifest
timestamp honors SOURCE_DATE_EPOCH so reruns can be made byte-identical.

Exit codes: 0 success, 2 argument errors, 3 data errors, 4 numerical
failures.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dataio import (
    DataError,
    DataMatrix,
    SyntheticSpec,
    center_features,
    generate_synthetic,
    load_csv,
    load_labels,
    save_matrix,
    save_results,
    write_matrix_csv,
)
from .evaluation import evaluate_selection
from .features import FeatureRanking, score_features, select_top_k
from .norms import ProjectionMatrix
from .solver import (
    NumericalError,
    SolverConfig,
    init_from_string,
    init_to_string,
    solve,
)
from .verify import run_battery

DEFAULT_GRID = "1e-6,1e-4,1e-2,1,1e2,1e4,1e6"


@dataclass
class RunManifest:
    command: str
    input_path: str
    config: dict
    centering: bool
    timestamp: str
    tool_version: str


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
    return datetime.now(timezone.utc).isoformat()


def _manifest(command: str, input_path: str, config: SolverConfig | None,
              centering: bool) -> RunManifest:
    echo = {}
    if config is not None:
        echo = {
            "alpha": config.alpha,
            "beta": config.beta,
            "epsilon": config.epsilon,
            "tol": config.tol,
            "max_iter": config.max_iter,
            "init": init_to_string(config.init),
        }
    return RunManifest(
        command=command,
        input_path=str(input_path),
        config=echo,
        centering=centering,
        timestamp=_timestamp(),
        tool_version=__version__,
    )


class ArgumentProblem(Exception):
    """Bad argument combination detected after parsing."""


def _load_input(args) -> DataMatrix:
    return load_csv(args.input, args.has_header, args.samples_as)


def _parse_init(args):
    try:
        return init_from_string(args.init, args.seed)
    except ValueError as exc:
        raise ArgumentProblem(str(exc)) from exc


def _solver_config(args) -> SolverConfig:
    init = _parse_init(args)
    try:
        return SolverConfig(
            alpha=args.alpha,
            beta=args.beta,
            epsilon=args.epsilon,
            tol=args.tol,
            max_iter=args.max_iter,
            init=init,
        )
    except ValueError as exc:
        raise ArgumentProblem(str(exc)) from exc


def _write_trace_csv(trace, path) -> None:
    lines = ["iteration,total,loss,l21,trace"]
    for i, obj in enumerate(trace.objectives):
        lines.append(
            f"{i},{obj.total!r},{obj.loss!r},{obj.l21_penalty!r},{obj.trace_penalty!r}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_ranking_csv(ranking: FeatureRanking, names, path, top: int | None = None) -> None:
    rows = ranking.order if top is None else ranking.order[:top]
    lines = ["rank,index,name,score"]
    for rank, idx in enumerate(rows):
        name = names[idx] if names else ""
        lines.append(f"{rank},{int(idx)},{name},{float(ranking.scores[idx])!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_selected(path) -> list[int]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("rank,"):
        raise DataError(f"{path} is not a selected-features file")
    indices = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) < 4:
            raise DataError(f"{path}: malformed row {ln!r}")
        indices.append(int(cells[1]))
    if not indices:
        raise DataError(f"{path} lists no features")
    return indices


def _fit(X: DataMatrix, args):
    centering = args.center
    mean = None
    if centering:
        X, mean = center_features(X)
    config = _solver_config(args)
    result = solve(X, config)
    return X, mean, config, result


def cmd_fit(args) -> int:
    X = _load_input(args)
    _, mean, config, result = _fit(X, args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(result.W.values, out / "w_matrix.csv")
    _write_trace_csv(result.trace, out / "trace.csv")
    if mean is not None:
        write_matrix_csv(mean.reshape(1, -1), out / "mean.csv")
    save_results(_manifest("fit", args.input, config, args.center),
                 out / "manifest.json")
    trace = result.trace
    print(f"fit: {trace.iterations} iterations, converged={trace.converged}, "
          f"final objective {trace.objectives[-1].total!r}")
    print(f"wrote {out / 'w_matrix.csv'}, {out / 'trace.csv'}, {out / 'manifest.json'}")
    return 0


def cmd_select(args) -> int:
    if args.w_matrix is None and args.input is None:
        raise ArgumentProblem("select needs --w-matrix or --input")
    names = None
    config = None
    if args.w_matrix is not None:
        table = load_csv(args.w_matrix, has_header=False, samples_as="columns")
        if table.values.shape[0] != table.values.shape[1]:
            raise DataError(f"{args.w_matrix} is not a square matrix")
        W = ProjectionMatrix(table.values)
        input_path = args.w_matrix
    else:
        X = _load_input(args)
        names = X.feature_names
        input_path = args.input
        _, _, config, result = _fit(X, args)
        W = result.W
    ranking = score_features(W)
    if not 1 <= args.num_features <= W.d:
        raise ArgumentProblem(
            f"--num-features must lie in [1, {W.d}], got {args.num_features}")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_ranking_csv(ranking, names, out / "ranking.csv")
    _write_ranking_csv(ranking, names, out / "selected.csv", top=args.num_features)
    centering = args.center if args.w_matrix is None else False
    save_results(_manifest("select", input_path, config, centering),
                 out / "manifest.json")
    print(f"wrote {out / 'ranking.csv'} and {out / 'selected.csv'} "
          f"(top {args.num_features} of {W.d})")
    return 0


def _parse_int_list(text: str, what: str) -> list[int]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ArgumentProblem(f"{what} must list at least one integer")
    try:
        return [int(s) for s in items]
    except ValueError as exc:
        raise ArgumentProblem(f"{what}: {exc}") from exc


def _parse_float_list(text: str, what: str) -> list[float]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ArgumentProblem(f"{what} must list at least one value")
    try:
        return [float(s) for s in items]
    except ValueError as exc:
        raise ArgumentProblem(f"{what}: {exc}") from exc


def cmd_eval(args) -> int:
    X = _load_input(args)
    truth = load_labels(args.labels, args.labels_header)
    if truth.size != X.n:
        raise DataError(
            f"{args.labels} has {truth.size} labels but {args.input} has {X.n} samples")
    if args.clusters < 1 or args.clusters > X.n:
        raise ArgumentProblem(f"--clusters must lie in [1, {X.n}]")
    if args.runs < 1:
        raise ArgumentProblem("--runs must be at least 1")

    if args.selected is not None and args.num_features is not None:
        raise ArgumentProblem("--selected and --num-features are mutually exclusive")

    Xw = center_features(X)[0] if args.center else X
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    config = None
    if args.selected is not None:
        selected = _read_selected(args.selected)
        if any(not 0 <= i < X.d for i in selected):
            raise DataError(f"{args.selected} indexes features outside [0, {X.d})")
        report = evaluate_selection(Xw, selected, truth, args.clusters,
                                    args.runs, args.seed)
        save_results(report, out / "eval_report.json")
        print(f"eval: ACC {report.acc_mean:.4f} +- {report.acc_std:.4f}, "
              f"NMI {report.nmi_mean:.4f} +- {report.nmi_std:.4f} over {report.runs} runs")
    else:
        if args.num_features is None:
            raise ArgumentProblem("eval needs --selected or --num-features")
        ks = _parse_int_list(args.num_features, "--num-features")
        if any(not 1 <= k <= X.d for k in ks):
            raise ArgumentProblem(f"--num-features entries must lie in [1, {X.d}]")
        config = _solver_config(args)
        result = solve(Xw, config)
        ranking = score_features(result.W)
        if len(ks) > 1:
            lines = ["num_features,acc_mean,acc_std,nmi_mean,nmi_std"]
            for k in ks:
                rep = evaluate_selection(Xw, select_top_k(ranking, k), truth,
                                         args.clusters, args.runs, args.seed)
                lines.append(f"{k},{rep.acc_mean!r},{rep.acc_std!r},"
                             f"{rep.nmi_mean!r},{rep.nmi_std!r}")
                print(f"eval: k={k} ACC {rep.acc_mean:.4f} NMI {rep.nmi_mean:.4f}")
            (out / "feature_curve.csv").write_text("\n".join(lines) + "\n",
                                                   encoding="utf-8")
            print(f"wrote {out / 'feature_curve.csv'}")
        else:
            rep = evaluate_selection(Xw, select_top_k(ranking, ks[0]), truth,
                                     args.clusters, args.runs, args.seed)
            save_results(rep, out / "eval_report.json")
            print(f"eval: k={ks[0]} ACC {rep.acc_mean:.4f} +- {rep.acc_std:.4f}, "
                  f"NMI {rep.nmi_mean:.4f} +- {rep.nmi_std:.4f}")
    save_results(_manifest("eval", args.input, config, args.center),
                 out / "manifest.json")
    return 0


def cmd_sweep(args) -> int:
    X = _load_input(args)
    truth = load_labels(args.labels, args.labels_header)
    if truth.size != X.n:
        raise DataError(
            f"{args.labels} has {truth.size} labels but {args.input} has {X.n} samples")
    alphas = _parse_float_list(args.alpha_grid, "--alpha-grid")
    betas = _parse_float_list(args.beta_grid, "--beta-grid")
    if any(a <= 0 for a in alphas) or any(b <= 0 for b in betas):
        raise ArgumentProblem("grid values must be positive")
    if not 1 <= args.num_features <= X.d:
        raise ArgumentProblem(f"--num-features must lie in [1, {X.d}]")

    Xw = center_features(X)[0] if args.center else X
    init = _parse_init(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["alpha,beta,acc_mean,nmi_mean"]
    for alpha in alphas:
        for beta in betas:
            config = SolverConfig(alpha=alpha, beta=beta, epsilon=args.epsilon,
                                  tol=args.tol, max_iter=args.max_iter, init=init)
            result = solve(Xw, config)
            ranking = score_features(result.W)
            rep = evaluate_selection(Xw, select_top_k(ranking, args.num_features),
                                     truth, args.clusters, args.runs, args.seed)
            lines.append(f"{alpha!r},{beta!r},{rep.acc_mean!r},{rep.nmi_mean!r}")
            print(f"sweep: alpha={alpha:g} beta={beta:g} ACC {rep.acc_mean:.4f} "
                  f"NMI {rep.nmi_mean:.4f}")
    (out / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    save_results(_manifest("sweep", args.input, None, args.center),
                 out / "manifest.json")
    print(f"wrote {out / 'sweep.csv'} ({len(alphas) * len(betas)} grid points)")
    return 0


def cmd_verify(args) -> int:
    results = run_battery(trials=args.trials, seed=args.seed, max_dim=args.max_dim)
    out = Path(args.out_dir)
    failed = False
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail}")
        if not res.passed:
            failed = True
            if res.replay is not None:
                out.mkdir(parents=True, exist_ok=True)
                replay_path = out / f"replay_{res.name}.json"
                save_results(res.replay, replay_path)
                print(f"  failing instance written to {replay_path}")
    return 1 if failed else 0


def cmd_generate(args) -> int:
    try:
        spec = SyntheticSpec(
            n_samples=args.n_samples,
            n_informative=args.n_informative,
            n_noise=args.n_noise,
            n_clusters=args.clusters,
            cluster_separation=args.separation,
            noise_scale=args.noise_scale,
            outlier_fraction=args.outlier_fraction,
            seed=args.seed,
        )
    except DataError as exc:
        raise ArgumentProblem(str(exc)) from exc
    X, labels, informative = generate_synthetic(spec)
    X.feature_names = [f"f{i}" for i in range(X.d)]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix(X, out / "data.csv", samples_as="rows", include_header=True)
    Path(out / "labels.csv").write_text(
        "\n".join(str(int(v)) for v in labels) + "\n", encoding="utf-8")
    manifest = _manifest("generate", "synthetic", None, False)
    save_results({"manifest": manifest, "spec": spec,
                  "informative_indices": informative}, out / "manifest.json")
    print(f"wrote {out / 'data.csv'} ({X.d} features x {X.n} samples), "
          f"{out / 'labels.csv'}, {out / 'manifest.json'}")
    return 0


def _add_io_arguments(p, with_input=True):
    if with_input:
        p.add_argument("--input", required=True, help="input CSV of numeric data")
        p.add_argument("--has-header", action="store_true",
                       help="first CSV row is a header")
        p.add_argument("--samples-as", choices=("rows", "columns"), default="rows",
                       help="orientation of the CSV (default: rows)")
    p.add_argument("--out-dir", default=".", help="directory for output files")


def _add_solver_arguments(p, require_penalties=True):
    p.add_argument("--alpha", type=float, required=require_penalties,
                   default=None if require_penalties else 1.0,
                   help="row-sparsity penalty weight")
    p.add_argument("--beta", type=float, required=require_penalties,
                   default=None if require_penalties else 1.0,
                   help="low-rank (trace norm) penalty weight")
    p.add_argument("--tol", type=float, default=1e-7,
                   help="relative objective-change tolerance (default 1e-7)")
    p.add_argument("--max-iter", type=int, default=100,
                   help="iteration cap (default 100)")
    p.add_argument("--epsilon", type=float, default=1e-8,
                   help="singularity guard (default 1e-8)")
    p.add_argument("--init", default="scaled:0.5",
                   help="W start: identity | scaled:C | constant:C | random[:SEED]")
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=True,
                   help="subtract per-feature means before fitting (default on)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspca",
        description="Convex sparse PCA: fit projections, rank features, "
                    "evaluate selections by clustering.",
    )
    parser.add_argument("--version", action="version", version=f"cspca {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="learn a projection matrix from a CSV")
    _add_io_arguments(p)
    _add_solver_arguments(p)
    p.add_argument("--seed", type=int, default=0, help="seed for random init")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="rank features and select the top k")
    p.add_argument("--w-matrix", help="projection matrix CSV from a previous fit")
    p.add_argument("--input", help="input CSV (fit inline instead of --w-matrix)")
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--samples-as", choices=("rows", "columns"), default="rows")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--num-features", type=int, required=True,
                   help="how many top-ranked features to select")
    _add_solver_arguments(p, require_penalties=False)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("eval", help="cluster on selected features and score ACC/NMI")
    _add_io_arguments(p)
    p.add_argument("--labels", required=True, help="ground-truth labels CSV (one column)")
    p.add_argument("--labels-header", action="store_true",
                   help="labels CSV has a header row")
    p.add_argument("--selected", help="selected-features file from 'select'")
    p.add_argument("--num-features", help="k, or a comma list for a curve, e.g. 2,4,8")
    p.add_argument("--clusters", type=int, required=True, help="number of clusters")
    p.add_argument("--runs", type=int, default=30,
                   help="repeated clustering runs (default 30)")
    p.add_argument("--seed", type=int, default=0, help="base seed for the runs")
    _add_solver_arguments(p, require_penalties=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid-sweep alpha x beta and record ACC/NMI")
    _add_io_arguments(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--labels-header", action="store_true")
    p.add_argument("--alpha-grid", default=DEFAULT_GRID,
                   help=f"comma list of alphas (default {DEFAULT_GRID})")
    p.add_argument("--beta-grid", default=DEFAULT_GRID,
                   help=f"comma list of betas (default {DEFAULT_GRID})")
    p.add_argument("--num-features", type=int, required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--init", default="scaled:0.5")
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the built-in verification battery")
    p.add_argument("--trials", type=int, default=50,
                   help="instances for the equivalence check (default 50)")
    p.add_argument("--seed", type=int, default=20260101)
    p.add_argument("--max-dim", type=int, default=15,
                   help="largest feature dimension tested (default 15)")
    p.add_argument("--out-dir", default=".",
                   help="where replay files for failures go")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a synthetic dataset with known structure")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--n-samples", type=int, default=150)
    p.add_argument("--n-informative", type=int, default=5)
    p.add_argument("--n-noise", type=int, default=50)
    p.add_argument("--clusters", type=int, default=6)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--noise-scale", type=float, default=0.5)
    p.add_argument("--outlier-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ArgumentProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
