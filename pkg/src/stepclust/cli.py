"""Command-line interface.

Exit codes: 0 success, 2 validation/configuration errors, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import gap_statistic
from .errors import StageError, ValidationError
from .features import VARIABLES, compute_features
from .ingest import epoch_columns, read_day_matrix, validate_grid
from .mfpca import fit_mfpca, project
from .pipeline import METHODS, PipelineConfig, run_benchmark, run_pipeline, sensitivity_sweep
from .plots import emit_plots
from .simulation import FAMILIES, SimSpec, generate, read_truth, write_dataset
from .smoothing import smooth

log = logging.getLogger("stepclust")


def _write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _config(args) -> PipelineConfig:
    overrides = {
        "q1": args.q1, "q2": args.q2, "variance_threshold": args.variance_threshold,
        "k": args.k, "method": args.method, "seed": args.seed, "b_gap": args.b_gap,
        "k_max": args.k_max, "restarts": args.restarts,
        "n_basis": args.n_basis if args.n_basis else None,
    }
    if args.config:
        return PipelineConfig.from_json(args.config, **overrides)
    return PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})


def _read(args):
    return read_day_matrix(args.path, integer=not args.real)


def _truth_labels(path, dm):
    if not path:
        return None
    mapping = read_truth(path)
    missing = [d for d in dm.day_ids if d not in mapping]
    if missing:
        raise ValidationError(f"truth file lacks {len(missing)} day ids, e.g. {missing[0]!r}")
    return np.array([mapping[d] for d in dm.day_ids])


def _scores_rows(day_ids, scores):
    return [[d] + s.tolist() for d, s in zip(day_ids, scores)]


def cmd_ingest_check(args):
    dm = _read(args)
    if args.q2:
        validate_grid(dm, args.q2)
    print(f"ok: N={dm.N} T={dm.T} dtype={dm.counts.dtype} subjects={'yes' if dm.has_subjects else 'no'}")


def cmd_features(args):
    cfg = _config(args)
    dm = _read(args)
    feats = compute_features(dm, cfg.q1, cfg.q2)
    rows = []
    for i, d in enumerate(dm.day_ids):
        for v, name in enumerate(VARIABLES):
            rows.append([d, name] + feats.curves[v, i].tolist())
    p = _write_csv(args.out, ["day_id", "variable"] + epoch_columns(dm.T), rows)
    print(f"wrote {p}")


def _fit(args, cfg, dm):
    feats = compute_features(dm, cfg.q1, cfg.q2)
    sm = smooth(feats, list(cfg.n_basis))
    model = fit_mfpca(sm, cfg.variance_threshold)
    return sm, model, project(model, sm)


def cmd_fit(args):
    cfg = _config(args)
    dm = _read(args)
    validate_grid(dm, cfg.q2)
    sm, model, scores = _fit(args, cfg, dm)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model.save(out / "model.json")
    with open(out / "basis.json", "w", encoding="utf-8") as fh:
        json.dump([b.to_dict() for b in sm.bases], fh, indent=1)
    for v, name in enumerate(VARIABLES):
        c = sm.coefficients[v]
        _write_csv(out / f"coefficients_{name}.csv", ["day_id"] + [f"c{r + 1}" for r in range(c.shape[1])],
                   _scores_rows(dm.day_ids, c))
    _write_csv(out / "scores.csv", ["day_id"] + [f"xi_{r + 1}" for r in range(scores.r)],
               _scores_rows(dm.day_ids, scores.scores))
    print(f"{model.n_components} components explain {model.explained[model.n_components - 1]:.4f} of variance")


def _run(args):
    cfg = _config(args)
    dm = _read(args)
    truth = _truth_labels(getattr(args, "truth", None), dm)
    result, model, report = run_pipeline(dm, cfg, truth=truth)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "labels.csv", ["day_id", "cluster"], [[d, int(l) + 1] for d, l in zip(dm.day_ids, result.labels)])
    model.save(out / "model.json")
    _write_csv(out / "scores.csv", ["day_id"] + [f"xi_{r + 1}" for r in range(report.scores.r)],
               _scores_rows(dm.day_ids, report.scores.scores))
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=1)
    _write_csv(out / "explained.csv", ["component", "eigenvalue", "cumulative_explained"],
               [[r + 1, lam, e] for r, (lam, e) in enumerate(zip(model.eigenvalues, model.explained))])
    if report.gap is not None:
        g = report.gap
        _write_csv(out / "gap.csv", ["k", "gap", "sk"], [[int(k), gg, s] for k, gg, s in zip(g.ks, g.gaps, g.sks)])
    return dm, result, model, report, out


def cmd_cluster(args):
    _, result, _, report, out = _run(args)
    print(f"k={result.k} sizes={report.cluster_sizes} components={report.n_components}")
    if report.metrics:
        print(f"ccr={report.metrics['ccr']:.4f} arand={report.metrics['arand']:.4f}")
    print(f"outputs in {out}")


def cmd_plots(args):
    dm, result, model, report, out = _run(args)
    written = emit_plots(result, model, dm, out, gap=report.gap)
    for note in written.pop("notices", []):
        print(f"notice: {note}")
    print(f"wrote {len(written)} plot files to {out}")


def cmd_gap(args):
    cfg = _config(args)
    dm = _read(args)
    validate_grid(dm, cfg.q2)
    _, _, scores = _fit(args, cfg, dm)
    kw = {"restarts": cfg.restarts} if cfg.method == "kmeans" else {}
    g = gap_statistic(scores.scores, cfg.k_max, cfg.b_gap, cfg.method, cfg.seed, **kw)
    p = _write_csv(args.out, ["k", "gap", "sk"], [[int(k), gg, s] for k, gg, s in zip(g.ks, g.gaps, g.sks)])
    print(f"chosen k={g.chosen_k}; wrote {p}")


def cmd_simulate(args):
    spec = SimSpec(args.family, tuple(args.n_per_group or ()), seed=args.seed)
    ds = generate(spec)
    paths = write_dataset(ds, args.out)
    print("wrote " + ", ".join(str(p) for p in paths))


def cmd_benchmark(args):
    cfg = _config(args)

    def progress(row):
        log.info("%s %s rep %d: ccr=%.4f arand=%.4f", row["generator"], row["method"], row["replicate"],
                 row["ccr"], row["arand"])

    rows, table = run_benchmark(args.families, args.methods, args.replicates, args.seed, cfg,
                                n_per_group=args.n_per_group, progress=progress)
    out = Path(args.out_dir)
    _write_csv(out / "metrics.csv", ["generator", "method", "replicate", "ccr", "arand"],
               [[r["generator"], r["method"], r["replicate"], r["ccr"], r["arand"]] for r in rows])
    _write_csv(out / "table.csv", ["generator", "method", "replicates", "ccr_mean", "ccr_sd", "arand_mean", "arand_sd"],
               [[t[c] for c in ("generator", "method", "replicates", "ccr_mean", "ccr_sd", "arand_mean", "arand_sd")]
                for t in table])
    print(f"{'generator':<16}{'method':<8}{'CCR':>18}{'aRand':>18}")
    for t in table:
        print(f"{t['generator']:<16}{t['method']:<8}"
              f"{t['ccr_mean']:>10.4f} ({t['ccr_sd']:.3f}){t['arand_mean']:>10.4f} ({t['arand_sd']:.3f})")


def cmd_sweep(args):
    cfg = _config(args)
    if cfg.k is None:
        cfg = cfg.replace(k=4)
    dm = _read(args)
    _, table = sensitivity_sweep(dm, args.q1_values, cfg)
    p = _write_csv(args.out, ["q1_a", "q1_b", "arand"], [[t["q1_a"], t["q1_b"], t["arand"]] for t in table])
    for t in table:
        print(f"q1={t['q1_a']} vs q1={t['q1_b']}: arand={t['arand']:.4f}")
    print(f"wrote {p}")


def _pipeline_opts(p):
    p.add_argument("--config", help="JSON file with PipelineConfig fields; flags override it")
    p.add_argument("--q1", type=int)
    p.add_argument("--q2", type=int)
    p.add_argument("--variance-threshold", type=float)
    p.add_argument("--k", type=int, help="fixed number of clusters (default: gap statistic)")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--n-basis", type=int, nargs="+", help="basis size, one value or one per variable")
    p.add_argument("--seed", type=int)
    p.add_argument("--b-gap", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--restarts", type=int)


def _input_opts(p):
    p.add_argument("path", help="wide CSV: day_id,subject_id,t0001,...")
    p.add_argument("--real", action="store_true", help="accept real-valued (non-integer) curves")


def build_parser():
    parser = argparse.ArgumentParser(prog="stepclust", description="Cluster daily step-count curves with MFPCA.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="validate a wide CSV")
    _input_opts(p)
    p.add_argument("--q2", type=int, default=None)
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("features", help="export feature curves")
    _input_opts(p)
    _pipeline_opts(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("fit", help="smooth features and fit MFPCA")
    _input_opts(p)
    _pipeline_opts(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_fit)

    for name, func, helptext in (("cluster", cmd_cluster, "run the full pipeline"),
                                 ("plots", cmd_plots, "run the pipeline and write plot data")):
        p = sub.add_parser(name, help=helptext)
        _input_opts(p)
        _pipeline_opts(p)
        p.add_argument("--truth", help="truth CSV (day_id,group) for CCR/aRand")
        p.add_argument("--out-dir", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("gap", help="gap statistic over k = 1..k_max")
    _input_opts(p)
    _pipeline_opts(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("simulate", help="generate a benchmark dataset")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-group", type=int, nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="simulation benchmark: mean (sd) CCR and aRand per family and method")
    _pipeline_opts(p)
    p.add_argument("--families", nargs="+", choices=FAMILIES, default=list(FAMILIES))
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--n-per-group", type=int, nargs="+")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("sweep-q1", help="label agreement across q1 values at fixed k")
    _input_opts(p)
    _pipeline_opts(p)
    p.add_argument("--q1-values", type=int, nargs="+", default=[4, 6, 8, 12])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seed", None) is None and args.command == "benchmark":
        args.seed = 0
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, ValidationError) else 1
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
