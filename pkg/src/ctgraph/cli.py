"""Command-line interface.

Subcommands: ``simulate``, ``fit``, ``eval``, ``demo-discretization`` and
``experiment``.  Every subcommand exits 0 on success; failures print a
machine-readable JSON object to stderr and exit 1.  ``experiment`` accepts a
single JSON config file supplying everything, with flags overriding
individual fields.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dcm import fit_dcm
from .discretization import discretization_demo, first_sign_flip, write_demo_csv
from .experiments import ExperimentConfig, load_experiment_config, run_experiment
from .metrics import evaluate_graph, max_f1_threshold, write_metrics_json
from .systems import (
    ObservationScheme,
    generate_dataset,
    make_system,
    read_manifest,
    read_timeseries_csv,
    write_manifest,
    write_timeseries_csv,
)
from .training import TrainConfig, extract_graph, fit_penalized, save_model
from .experiments import _train_from_dict


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, _, raw = item.partition("=")
        if not _:
            raise ValueError(f"expected key=value, got {item!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _cmd_simulate(args) -> int:
    system = make_system(args.system, _parse_params(args.param))
    kind = "irregular-drop" if args.drop > 0 else "regular"
    scheme = ObservationScheme(kind=kind, dt=args.dt, n=args.n, drop_fraction=args.drop)
    data = generate_dataset(system, scheme, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_timeseries_csv(out / "data.csv", data)
    write_manifest(out / "manifest.json", system, scheme, args.seed)
    print(f"wrote {out / 'data.csv'} ({data.n} observations, d={data.dim})")
    return 0


def _cmd_fit(args) -> int:
    data = read_timeseries_csv(args.data)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = _train_from_dict(json.load(fh))
    else:
        cfg = TrainConfig()
    if args.seed is not None:
        import dataclasses
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.method == "ngm":
        model = fit_penalized(data, cfg, args.penalty)
    else:
        model = fit_dcm(data, cfg, smoothing=args.smoothing)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(out / "field.json", out / "report.json", model, method=args.method)
    scores, graph = extract_graph(model)
    np.savetxt(out / "scores.csv", scores, delimiter=",")
    print(f"wrote {out / 'field.json'}; {int(graph.sum())} edges recovered")
    return 0


def _cmd_eval(args) -> int:
    manifest = read_manifest(args.manifest)
    truth = manifest["truth"]
    scores = np.loadtxt(args.scores, delimiter=",", ndmin=2)
    include_diag = not args.no_diagonal
    if args.max_f1:
        threshold, graph, _ = max_f1_threshold(scores, truth, include_diag)
    else:
        threshold, graph = None, (scores > 0).astype(np.int8)
    report = evaluate_graph(scores, graph, truth, args.method, manifest.get("seed", 0),
                            "", include_diag, threshold)
    write_metrics_json(args.out, report)
    print(json.dumps(report.to_dict(), indent=1))
    return 0


def _cmd_demo(args) -> int:
    a = np.array([[args.a11, args.a12], [args.a21, args.a22]])
    grid = np.linspace(args.dt_min, args.dt_max, args.steps)
    rows = discretization_demo(a, grid)
    if args.out:
        write_demo_csv(args.out, rows)
    flip = first_sign_flip(a, grid)
    print("dt      b12        b21        match12 match21")
    for r in rows[:: max(1, len(rows) // 20)]:
        print(f"{r.dt:<7.4g} {r.b12:<10.4g} {r.b21:<10.4g} "
              f"{int(r.sign_match_12):<7d} {int(r.sign_match_21)}")
    if flip is None:
        print("no sign flip on the grid: discrete and continuous signs agree")
    else:
        print(f"first sign flip at dt={flip:.6g}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_experiment_config(args.config)
    overrides = {}
    if args.repetitions is not None:
        overrides["repetitions"] = args.repetitions
    if args.outdir is not None:
        overrides["outdir"] = args.outdir
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        doc = cfg.to_dict()
        doc.update(overrides)
        cfg = ExperimentConfig.from_dict(doc)
    result = run_experiment(cfg)
    print(f"wrote {result['summary_csv']}")
    for row in result["summary"]:
        print(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ctgraph", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate a dataset from a shipped system")
    s.add_argument("--system", required=True,
                   choices=["lorenz96", "rossler", "glycolysis", "synthetic"])
    s.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="system parameter override (JSON-parsed value)")
    s.add_argument("--dt", type=float, default=0.1)
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--drop", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_simulate)

    s = sub.add_parser("fit", help="fit a model to a time-series CSV")
    s.add_argument("--method", choices=["ngm", "dcm"], default="ngm")
    s.add_argument("--penalty", choices=["agl", "gl", "lasso"], default="agl")
    s.add_argument("--data", required=True)
    s.add_argument("--config", help="TrainConfig JSON file")
    s.add_argument("--seed", type=int)
    s.add_argument("--smoothing", type=float, help="manual spline smoothing (dcm)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_fit)

    s = sub.add_parser("eval", help="score a d x d score CSV against a manifest's truth")
    s.add_argument("--scores", required=True)
    s.add_argument("--manifest", required=True)
    s.add_argument("--method", default="external-scores")
    s.add_argument("--max-f1", action="store_true",
                   help="threshold scores at the max-F1 point instead of score > 0")
    s.add_argument("--no-diagonal", action="store_true")
    s.add_argument("--out", default="metrics.json")
    s.set_defaults(func=_cmd_eval)

    s = sub.add_parser("demo-discretization",
                       help="sign flips of exp(A dt) off-diagonals over a dt grid")
    s.add_argument("--a11", type=float, default=-1.0)
    s.add_argument("--a12", type=float, default=2.0)
    s.add_argument("--a21", type=float, default=-4.0)
    s.add_argument("--a22", type=float, default=-0.5)
    s.add_argument("--dt-min", type=float, default=0.01)
    s.add_argument("--dt-max", type=float, default=5.0)
    s.add_argument("--steps", type=int, default=200)
    s.add_argument("--out", help="optional CSV output path")
    s.set_defaults(func=_cmd_demo)

    s = sub.add_parser("experiment", help="run a JSON-configured experiment")
    s.add_argument("--config", required=True)
    s.add_argument("--repetitions", type=int)
    s.add_argument("--outdir")
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.set_defaults(func=_cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
