"""Command-line front end wiring the full analysis pipeline.

Stages read canonical session CSVs and write CSV artifacts (plus SVG
figures with ``--plot``).  Every stage takes an explicit ``--seed``;
outputs are byte-identical for a fixed configuration.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, augment, dataset, evaluate, features, geometry, synth
from .dataset import fmt_float
from .errors import GazeDataError, NumericError, UsageError
from .learn import (
    elastic_net_fit,
    export_error_model,
    linear_fit,
    linear_predict,
    rmse,
    save_model,
    write_error_model_csv,
)

SUBCOMMANDS = (
    "synth", "clean", "stats", "augment", "features",
    "tsne", "train", "evaluate", "regress", "report",
)

_DEFAULT_GRIDS = {
    "knn": {"k": [1, 3, 5, 7, 9]},
    "svm": {"C": [0.1, 1, 5, 10, 100], "gamma": [0.1, 0.5, 1, 1.25, 2]},
    "mlp": {
        "hidden_layers": [(50,), (100,), (50, 100, 50), (100, 100)],
        "l2_alpha": [0.001, 0.01, 0.1, 0.5],
    },
}

_CONDITION_ALIASES = {
    "neutral": "Neutral",
    "head_roll20": "HeadRoll20",
    "head_pitch20": "HeadPitch20",
    "head_yaw20": "HeadYaw20",
    "plat_roll20": "PlatRoll20",
    "plat_pitch20": "PlatPitch20",
    "plat_yaw20": "PlatYaw20",
    "platform_roll20": "PlatRoll20",
    "platform_pitch20": "PlatPitch20",
    "platform_yaw20": "PlatYaw20",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # map argparse failures onto exit code 1
        raise UsageError(message)


def normalize_condition(name: str) -> str:
    if name in dataset.CONDITIONS:
        return name
    canon = _CONDITION_ALIASES.get(name.lower())
    if canon is None and name.upper() in dataset.CONDITIONS:
        canon = name.upper()
    if canon is None:
        raise UsageError(f"unknown condition {name!r}")
    return canon


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_sessions(paths: list[str]) -> list[dataset.GazeSession]:
    if not paths:
        raise UsageError("no input files given")
    return [dataset.load_session(p) for p in paths]


def _cleaned_errors(session, method: str, kernel: int) -> geometry.ErrorSeries:
    errs = geometry.compute_errors(dataset.fill_missing(session))
    return analysis.clean_series(errs, method=method, kernel_w=kernel)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_synth(args) -> int:
    out = _outdir(args)
    sessions = synth.synth_task_sessions(
        args.task,
        participants=args.participants,
        seed=args.seed,
        platform=args.platform,
        spread_frac=args.spread,
        samples_per_aoi=args.samples_per_aoi,
    )
    index = ["file,participant_id,platform,condition"]
    for s in sessions:
        name = f"{s.meta.participant_id}_{s.meta.condition}.csv"
        dataset.save_session(s, out / name)
        index.append(f"{name},{s.meta.participant_id},{s.meta.platform},{s.meta.condition}")
    (out / "sessions_index.csv").write_text("\n".join(index) + "\n", encoding="utf-8")
    print(f"wrote {len(sessions)} sessions to {out}")
    return 0


def _write_errors_csv(path, series, meta) -> None:
    lines = [
        f"# participant_id={meta.participant_id}",
        f"# platform={meta.platform}",
        f"# condition={meta.condition}",
        "timestamp_ms,aoi_id,frontal_err,yaw_err,pitch_err",
    ]
    for i in range(len(series)):
        lines.append(
            f"{series.timestamps[i]},{series.aoi_ids[i]},"
            f"{fmt_float(series.frontal_err[i])},{fmt_float(series.yaw_err[i])},"
            f"{fmt_float(series.pitch_err[i])}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_clean(args) -> int:
    out = _outdir(args)
    for path in args.input:
        session = dataset.load_session(path)
        series = _cleaned_errors(session, args.method, args.kernel)
        _write_errors_csv(out / f"{Path(path).stem}_errors.csv", series, session.meta)
    print(f"cleaned {len(args.input)} session(s) with method={args.method}")
    return 0


def cmd_stats(args) -> int:
    out = _outdir(args)
    named_stats = []
    aoi_vectors = []
    for path in args.input:
        session = dataset.load_session(path)
        series = _cleaned_errors(session, args.method, args.kernel)
        stem = Path(path).stem
        for cat in geometry.CATEGORIES:
            named_stats.append((f"{stem}:{cat}", analysis.describe(np.abs(series.channel(cat)))))
        aoi_vectors.append((stem, analysis.per_aoi_mean(series, "frontal", allow_empty=True)))
        smap = analysis.spatial_error_map(series, geometry.grid_gt_angles(session))
        analysis.write_spatial_map_csv(out / f"{stem}_spatial.csv", smap)
        x = np.abs(series.frontal_err)
        curve = analysis.kde(x, args.bandwidth, analysis.kde_grid(x, args.bandwidth))
        if args.plot:
            from . import plots

            plots.plot_spatial_map(smap, out / f"{stem}_spatial.svg", title=stem)
            plots.plot_kde([(stem, curve)], out / f"{stem}_kde.svg", title=stem)
    analysis.write_stats_csv(out / "stats.csv", named_stats)
    if len(aoi_vectors) >= 2:
        names, r = analysis.correlation_matrix(aoi_vectors)
        analysis.write_correlation_csv(out / "correlation.csv", names, r)
    print(f"stats for {len(args.input)} session(s) -> {out / 'stats.csv'}")
    return 0


def cmd_augment(args) -> int:
    out = _outdir(args)
    for path in args.input:
        session = dataset.load_session(path)
        series = _cleaned_errors(session, args.method, args.kernel)
        augmented = augment.augment_sample(series, args.seed)
        stem = Path(path).stem
        header = {
            "participant_id": session.meta.participant_id,
            "condition": session.meta.condition,
        }
        for i, (tag, payload) in enumerate(augmented.variants, start=1):
            augment.write_variant_csv(out / f"{stem}_aug{i:02d}_{tag}.csv", tag, payload, header)
        if args.plot:
            from . import plots

            series_variants = [
                (tag, payload.frontal_err)
                for tag, payload in augmented.variants
                if isinstance(payload, geometry.ErrorSeries)
            ]
            plots.plot_series_variants(
                series.frontal_err, series_variants, out / f"{stem}_augment.svg", title=stem
            )
    print(f"augmented {len(args.input)} session(s), 10 variants each")
    return 0


def cmd_features(args) -> int:
    out = _outdir(args)
    sessions = _load_sessions(args.input)
    matrix = features.assemble_dataset(
        sessions,
        task=args.task,
        augment=not args.no_augment,
        seed=args.seed,
        clean_method=args.method,
        kernel_w=args.kernel,
        reduced=args.reduced,
    )
    features.write_matrix_csv(out / "features.csv", matrix)
    print(f"{len(matrix)} samples x {matrix.rows.shape[1]} features -> {out / 'features.csv'}")
    return 0


def cmd_tsne(args) -> int:
    out = _outdir(args)
    matrix = features.read_matrix_csv(args.input[0])
    std = features.standardize(matrix)
    result = features.tsne(std, perplexity=args.perplexity, seed=args.seed, n_iter=args.iters)
    features.write_tsne_csv(out / "tsne.csv", result, matrix.labels, matrix.class_names)
    if args.plot:
        from . import plots

        plots.plot_tsne(result.coords, matrix.labels, matrix.class_names, out / "tsne.svg")
    print(
        f"embedded {len(matrix)} rows; KL {result.kl_trace[0]:.3f} -> {result.kl_trace[-1]:.3f}"
    )
    return 0


def _model_spec(args) -> evaluate.ModelSpec:
    if args.model == "knn":
        params = {"k": args.k}
    elif args.model == "svm":
        params = {"C": args.C, "gamma": args.gamma}
    elif args.model == "mlp":
        layers = tuple(int(v) for v in args.layers.split(","))
        params = {"hidden_layers": layers, "l2_alpha": args.alpha, "epochs": args.epochs}
    elif args.model == "forest":
        params = {"n_estimators": args.trees, "max_depth": args.depth}
    else:
        raise UsageError(f"unknown model {args.model!r}")
    return evaluate.ModelSpec(args.model, params)


def cmd_train(args) -> int:
    out = _outdir(args)
    matrix = features.read_matrix_csv(args.input[0])
    spec = _model_spec(args)
    result = evaluate.kfold_cv(matrix, spec, k_folds=args.cv, seed=args.seed)
    lines = ["fold,accuracy"]
    for f, s in enumerate(result.fold_scores):
        lines.append(f"{f},{fmt_float(s)}")
    lines.append(f"mean,{fmt_float(result.mean_accuracy)}")
    (out / "cv_scores.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    cm, rates = evaluate.classification_report(
        matrix.labels, result.pooled_predictions, matrix.n_classes, matrix.class_names
    )
    evaluate.write_confusion_csv(out / "confusion.csv", cm)
    evaluate.write_rates_csv(out / "rates.csv", [(args.model, rates)])

    model = spec.fit(features.standardize(matrix), seed=args.seed)
    save_model(model, out / "model.txt")
    if args.plot:
        from . import plots

        plots.plot_confusion(cm, out / "confusion.svg", title=f"{args.model} (CV pooled)")
    print(f"{args.model}: {args.cv}-fold CV accuracy {result.mean_accuracy:.4f}")
    return 0


def _parse_grid(text: str, family: str) -> dict[str, list]:
    """Grid syntax: 'k=1,3,5;gamma=0.5,1' (layers use + inside a value)."""
    grid: dict[str, list] = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        if "=" not in chunk:
            raise UsageError(f"bad grid chunk {chunk!r}")
        key, values = chunk.split("=", 1)
        parsed = []
        for v in values.split(","):
            v = v.strip()
            if key.strip() == "hidden_layers":
                parsed.append(tuple(int(u) for u in v.split("+")))
            elif key.strip() in ("k", "epochs", "n_estimators", "max_depth"):
                parsed.append(int(v))
            else:
                parsed.append(float(v))
        grid[key.strip()] = parsed
    if not grid:
        raise UsageError("empty grid")
    return grid


def cmd_evaluate(args) -> int:
    out = _outdir(args)
    matrix = features.read_matrix_csv(args.input[0])
    grid = _parse_grid(args.grid, args.model) if args.grid else _DEFAULT_GRIDS.get(args.model)
    if grid is None:
        raise UsageError(f"no default grid for {args.model}; pass --grid")
    result = evaluate.grid_search(matrix, args.model, grid, k_folds=args.cv, seed=args.seed)
    evaluate.write_cv_table_csv(out / "grid.csv", result.table)
    best = ";".join(f"{k}={v}" for k, v in sorted(result.best_params.items()))
    (out / "best_params.txt").write_text(best + "\n", encoding="utf-8")

    if args.sizes:
        sizes = [int(s) for s in args.sizes.split(",")]
        spec = evaluate.ModelSpec(args.model, result.best_params)
        lc = evaluate.learning_curve(matrix, spec, sizes, k_folds=args.cv, seed=args.seed)
        evaluate.write_learning_curve_csv(out / "learning_curve.csv", lc)
        if args.plot:
            from . import plots

            plots.plot_learning_curve(lc, out / "learning_curve.svg", title=args.model)
    print(f"best {args.model} parameters: {best}")
    return 0


def cmd_regress(args) -> int:
    out = _outdir(args)
    condition = normalize_condition(args.condition)
    sessions = [
        s for s in _load_sessions(args.input) if s.meta.condition == condition
    ]
    if not sessions:
        raise GazeDataError(f"no input session has condition {condition}")

    angles, target = [], []
    for session in sessions:
        filled = dataset.fill_missing(session)
        series = analysis.clean_series(
            geometry.compute_errors(filled), method=args.method, kernel_w=args.kernel
        )
        z = session.meta.user_distance_z
        ox, oy = session.screen.origin
        keep = {int(t) for t in series.timestamps}
        for rec in filled.records:
            if rec.timestamp_ms not in keep:
                continue
            g = geometry.to_angles(
                geometry.binocular_average(rec, session.screen), session.screen, z
            )
            angles.append([g.theta_gaze, g.theta_yaw, g.theta_pitch])
        target.extend(np.abs(series.frontal_err))
    x = np.asarray(angles)
    y = np.asarray(target)
    if len(x) != len(y):
        raise GazeDataError("angle rows and error rows disagree; check cleaning method")

    rng = np.random.default_rng(args.seed)
    order = rng.permutation(len(x))
    n_test = max(1, int(round(len(x) * args.test_frac)))
    test_idx, train_idx = order[:n_test], order[n_test:]

    # standardize features and target with training statistics only
    x_mu, x_sd = x[train_idx].mean(axis=0), x[train_idx].std(axis=0)
    y_mu, y_sd = float(y[train_idx].mean()), float(y[train_idx].std())
    if (x_sd == 0).any() or y_sd == 0:
        raise NumericError("zero-variance predictor or target; cannot standardize")
    xs, ys = (x - x_mu) / x_sd, (y - y_mu) / y_sd

    if args.penalty == "elasticnet":
        model = elastic_net_fit(xs[train_idx], ys[train_idx], alpha=args.alpha,
                                mix=args.mix, degree=args.degree)
    else:
        model = linear_fit(xs[train_idx], ys[train_idx], penalty=args.penalty,
                           z=args.alpha, degree=args.degree)

    pred_std = linear_predict(model, xs[test_idx])
    pred = pred_std * y_sd + y_mu
    actual = y[test_idx]
    fit_rmse = rmse(pred, actual)
    baseline = rmse(np.full_like(actual, y_mu), actual)

    if args.degree == 1:
        em = export_error_model(model, condition)
        write_error_model_csv(out / "coefficients.csv", [em], {condition: fit_rmse})
    if args.plot:
        from . import plots

        plots.plot_actual_vs_predicted(actual, pred, out / "regression.svg",
                                       title=f"{condition} ({args.penalty})")
    print(f"{condition} {args.penalty}: rmse={fit_rmse:.4f} (mean-predictor baseline {baseline:.4f})")
    return 0


def cmd_report(args) -> int:
    out = _outdir(args)
    sections = []
    artifacts = {
        "stats.csv": "Descriptive statistics",
        "correlation.csv": "Dataset correlation matrix",
        "features.csv": "Feature matrix",
        "tsne.csv": "t-SNE embedding",
        "cv_scores.csv": "Cross-validation scores",
        "confusion.csv": "Confusion matrix",
        "rates.csv": "Detection rates",
        "grid.csv": "Grid search table",
        "best_params.txt": "Best hyperparameters",
        "learning_curve.csv": "Learning curve",
        "coefficients.csv": "Error-model coefficients",
    }
    for name, title in artifacts.items():
        path = out / name
        if not path.exists():
            continue
        body = path.read_text(encoding="utf-8").strip().splitlines()
        sections.append(f"## {title} ({name})\n")
        preview = body[:12]
        sections.append("```\n" + "\n".join(preview) + "\n```\n")
        if len(body) > 12:
            sections.append(f"({len(body) - 12} more lines)\n")
    svgs = sorted(p.name for p in out.glob("*.svg"))
    if svgs:
        sections.append("## Figures\n")
        sections.extend(f"- {name}" for name in svgs)
    if not sections:
        raise GazeDataError(f"no pipeline artifacts found in {out}")
    (out / "report.md").write_text(
        "# Gaze error analysis report\n\n" + "\n".join(sections) + "\n", encoding="utf-8"
    )
    print(f"report -> {out / 'report.md'}")
    return 0


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------


def _add_common(p, with_input=True):
    if with_input:
        p.add_argument("--input", nargs="+", required=True, help="input CSV file(s)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--plot", action="store_true", help="also write SVG figures")
    p.add_argument("--config", default=None, help="key=value defaults file")


def _add_cleaning(p):
    p.add_argument("--method", default="median", choices=("median", "mad", "iqr"))
    p.add_argument("--kernel", type=int, default=41, help="median filter width")


def build_parser() -> _Parser:
    parser = _Parser(prog="gazelab", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic sessions")
    _add_common(p, with_input=False)
    p.add_argument("--task", default="user_distance",
                   choices=("user_distance", "head_pose", "platform_pose", "mixed"))
    p.add_argument("--participants", type=int, default=20)
    p.add_argument("--platform", default="desktop", choices=dataset.PLATFORMS)
    p.add_argument("--spread", type=float, default=0.08,
                   help="per-session target jitter fraction")
    p.add_argument("--samples-per-aoi", type=int, default=41)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("clean", help="fill, convert to errors, remove outliers")
    _add_common(p)
    _add_cleaning(p)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("stats", help="descriptive statistics, KDE, spatial maps")
    _add_common(p)
    _add_cleaning(p)
    p.add_argument("--bandwidth", type=float, default=0.2)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("augment", help="write the 10 augmentation variants")
    _add_common(p)
    _add_cleaning(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("features", help="assemble the labelled feature matrix")
    _add_common(p)
    _add_cleaning(p)
    p.add_argument("--task", required=True,
                   choices=("user_distance", "head_pose", "platform_pose", "mixed"))
    p.add_argument("--no-augment", action="store_true")
    p.add_argument("--reduced", action="store_true", help="5-statistic feature set")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("tsne", help="2-D embedding of a feature matrix")
    _add_common(p)
    p.add_argument("--perplexity", type=float, default=80.0)
    p.add_argument("--iters", type=int, default=1000)
    p.set_defaults(func=cmd_tsne)

    p = sub.add_parser("train", help="cross-validate and fit one classifier")
    _add_common(p)
    p.add_argument("--model", required=True, choices=("knn", "svm", "mlp", "forest"))
    p.add_argument("--cv", type=int, default=10)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--layers", default="50,100,50")
    p.add_argument("--alpha", type=float, default=1e-3, help="MLP L2 strength")
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--trees", type=int, default=200)
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="grid search and learning curves")
    _add_common(p)
    p.add_argument("--model", required=True, choices=("knn", "svm", "mlp", "forest"))
    p.add_argument("--cv", type=int, default=10)
    p.add_argument("--grid", default=None, help="e.g. 'k=1,3,5,7,9'")
    p.add_argument("--sizes", default=None, help="learning-curve sizes, e.g. 200,400,800")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("regress", help="fit gaze-error prediction models")
    _add_common(p)
    _add_cleaning(p)
    p.add_argument("--condition", required=True)
    p.add_argument("--penalty", default="elasticnet",
                   choices=("none", "ridge", "lasso", "elasticnet"))
    p.add_argument("--alpha", type=float, default=0.5, help="penalty strength")
    p.add_argument("--mix", type=float, default=0.5, help="elastic net L1 share")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--test-frac", type=float, default=0.3)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("report", help="aggregate stage outputs in --out")
    _add_common(p, with_input=False)
    p.set_defaults(func=cmd_report)

    return parser


def _apply_config(parser: _Parser, argv: list[str]) -> list[str]:
    """Load key=value defaults from --config; explicit flags still win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a file path")
    path = Path(argv[idx + 1])
    if not path.exists():
        raise GazeDataError(f"config file not found: {path}")
    defaults = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise GazeDataError(f"config line without '=': {line!r}")
        key, value = line.split("=", 1)
        defaults[key.strip().replace("-", "_")] = value.strip()
    # Feed the values as defaults of the chosen subparser, coerced through
    # each option's declared type; explicit flags override defaults.
    sub_actions = parser._subparsers._group_actions[0]
    if argv and argv[0] in sub_actions.choices:
        sub = sub_actions.choices[argv[0]]
        typed = {}
        for action in sub._actions:
            if action.dest in defaults:
                raw = defaults[action.dest]
                if action.type is not None:
                    typed[action.dest] = action.type(raw)
                elif isinstance(action, argparse._StoreTrueAction):
                    typed[action.dest] = raw.lower() in ("1", "true", "yes")
                elif action.nargs in ("+", "*"):
                    typed[action.dest] = raw.split()
                else:
                    typed[action.dest] = raw
        sub.set_defaults(**typed)
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except GazeDataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
