"""Command-line surface.

Subcommands wrap the library modules one-to-one; failures exit nonzero with a
single machine-readable error JSON on stderr (usage errors exit 2 via
argparse)."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import LabeledPointCloud, read_cloud_csv, write_cloud_csv
from .errors import InvalidParameterError, TopoArchError
from .lle import EmbeddingSpec, lle_embed
from .mlp import Architecture, BatchSchedule, TrainConfig, init_model, save_checkpoint, train
from .openml import fetch_openml
from .persistence import ThresholdPolicy, compute_persistence, threshold_features
from .regions import mask_betti, rasterize, write_pgm
from .rips import build_rips
from .selection import select
from .svgplot import barcode_svg, report
from .sweep import records_to_csv, records_to_json, sweep
from .synth import DatasetSpec, make_cell_spec, sample_dataset

SWEEP_KEYS = {
    "schema": int, "seed": int, "archs": list, "cells": list, "trials": int,
    "n_points": int, "max_steps": int, "workers": int, "resolution": int,
    "fresh_n": int, "suite_seed": int, "target_error": float,
}
SWEEP_REQUIRED = {"schema", "archs", "cells", "trials"}


def load_sweep_config(path) -> dict:
    """Schema-versioned sweep config; unknown keys are rejected."""
    with open(path) as fh:
        cfg = json.load(fh)
    unknown = set(cfg) - set(SWEEP_KEYS)
    if unknown:
        raise InvalidParameterError(
            f"unknown sweep config keys: {sorted(unknown)}", keys=sorted(unknown))
    missing = SWEEP_REQUIRED - set(cfg)
    if missing:
        raise InvalidParameterError(
            f"sweep config missing keys: {sorted(missing)}", keys=sorted(missing))
    if cfg["schema"] != 1:
        raise InvalidParameterError(f"unsupported sweep config schema {cfg['schema']}")
    for key, value in cfg.items():
        want = SWEEP_KEYS[key]
        if want is float:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        else:
            ok = isinstance(value, want) and not isinstance(value, bool)
        if not ok:
            raise InvalidParameterError(
                f"sweep config key {key!r} must be {want.__name__}", key=key)
    return cfg


def _load_labeled(path) -> LabeledPointCloud:
    cloud = read_cloud_csv(path)
    if not isinstance(cloud, LabeledPointCloud):
        raise InvalidParameterError(f"{path} has no label column")
    return cloud


def _policy_from_args(args) -> ThresholdPolicy:
    if args.policy == "two-sigma":
        return ThresholdPolicy("two-sigma")
    if args.policy == "absolute":
        return ThresholdPolicy("absolute", eps=args.policy_eps)
    return ThresholdPolicy("top-k", k=args.policy_k)


def cmd_gen_data(args):
    spec = make_cell_spec(args.beta0, args.beta1, seed=args.seed, n_points=args.n)
    cloud = sample_dataset(spec)
    out = Path(args.output)
    write_cloud_csv(cloud, out)
    meta = {
        "schema": 1,
        "ground_truth": list(cloud.ground_truth.as_tuple()),
        "spec": spec.to_json_obj(),
    }
    meta_path = out.with_suffix(out.suffix + ".meta.json") if out.suffix != ".csv" \
        else out.with_name(out.stem + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True))
    print(f"wrote {out} and {meta_path} (ground truth {tuple(cloud.ground_truth.as_tuple())})")
    return 0


def _select_points(cloud, which):
    if isinstance(cloud, LabeledPointCloud) and which != "all":
        return cloud.class_points(int(which))
    return cloud.points


def cmd_ph(args):
    cloud = read_cloud_csv(args.data)
    pts = _select_points(cloud, args.label)
    if args.subsample and pts.shape[0] > args.subsample:
        idx = np.sort(np.random.default_rng(args.seed).choice(
            pts.shape[0], args.subsample, replace=False))
        pts = pts[idx]
    cx = build_rips(pts, eps_max=args.eps_max, max_dim=args.max_dim, budget=args.budget)
    diagram = compute_persistence(cx)
    out = Path(args.out)
    out.write_text(json.dumps(diagram.to_json_obj(), sort_keys=True))
    svg_path = Path(args.svg) if args.svg else out.with_suffix(".svg")
    svg_path.write_text(barcode_svg(diagram, title=f"barcode: {Path(args.data).name}"))
    profile = threshold_features(diagram)
    print(f"wrote {out} and {svg_path}; pairs={len(diagram)} "
          f"thresholded profile={profile.as_tuple()}")
    return 0


def cmd_train(args):
    cloud = _load_labeled(args.data)
    meta_path = Path(args.data).with_name(Path(args.data).stem + ".meta.json")
    beta0 = args.beta0
    if beta0 is None and meta_path.exists():
        beta0 = json.loads(meta_path.read_text())["ground_truth"][0]
    beta0 = max(int(beta0 or 1), 1)
    trunk = args.trunk if args.trunk else beta0
    arch = Architecture(args.ell, args.h0, trunk_width=trunk)
    model = init_model(arch, cloud.dim, beta0, seed=args.seed)
    config = TrainConfig(seed=args.seed, max_steps=args.max_steps,
                         target_error=args.target_error)
    result = train(model, cloud, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(result.final_model, out / "model.ckpt")
    summary = {
        "schema": 1,
        "arch": {"ell": arch.ell, "h0": arch.h0, "trunk_width": arch.trunk_width},
        "beta0": beta0,
        "best_error": result.best_error,
        "converged_at": result.converged_at,
        "steps_run": result.steps_run,
        "error_curve": result.error_curve,
    }
    if cloud.dim == 2:
        from .regions import padded_bbox
        mask = rasterize(result.final_model, padded_bbox(cloud.points), args.resolution)
        profile = mask_betti(mask)
        write_pgm(mask, out / "decision_region.pgm")
        summary["region_profile"] = list(profile.as_tuple())
    (out / "train_result.json").write_text(json.dumps(summary, sort_keys=True))
    print(f"best_error={result.best_error} converged_at={result.converged_at} -> {out}")
    return 0


def cmd_sweep(args):
    cfg = load_sweep_config(args.config)
    specs = [make_cell_spec(b0, b1, seed=cfg.get("suite_seed", 42),
                            n_points=cfg.get("n_points", 5000))
             for b0, b1 in cfg["cells"]]
    config = TrainConfig(
        seed=cfg.get("seed", 0),
        max_steps=cfg.get("max_steps", 20_000),
        target_error=cfg.get("target_error", 0.05),
    )
    records = sweep(
        [tuple(a) for a in cfg["archs"]], specs, trials=cfg["trials"], config=config,
        workers=args.workers if args.workers is not None else cfg.get("workers", 1),
        resolution=cfg.get("resolution", 512),
        fresh_n=cfg.get("fresh_n", 10_000),
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records_to_csv(records, out / "sweep_records.csv")
    records_to_json(records, out / "sweep_records.json")
    (out / "sweep_meta.json").write_text(json.dumps({"schema": 1, "config": cfg}, sort_keys=True))
    print(f"wrote {len(records)} records to {out}")
    return 0


def cmd_select(args):
    cloud = _load_labeled(args.data)
    rep = select(cloud, eps_max=args.eps_max, policy=_policy_from_args(args),
                 subsample=args.subsample, seed=args.seed)
    out = Path(args.out)
    out.write_text(rep.to_json())
    text_path = out.with_suffix(".txt")
    text_path.write_text(rep.to_text())
    print(rep.to_text(), end="")
    print(f"wrote {out} and {text_path}")
    return 0


def cmd_embed(args):
    cloud = read_cloud_csv(args.data)
    spec = EmbeddingSpec(k_neighbors=args.k, target_dim=args.dim)
    emb = lle_embed(cloud.points, spec)
    if isinstance(cloud, LabeledPointCloud):
        out_cloud = LabeledPointCloud(emb, cloud.labels)
    else:
        from .data import PointCloud
        out_cloud = PointCloud(emb)
    write_cloud_csv(out_cloud, args.out)
    print(f"embedded {emb.shape[0]} points into R^{emb.shape[1]} -> {args.out}")
    return 0


def cmd_fetch_openml(args):
    cloud = fetch_openml(args.name, cache_dir=args.cache_dir)
    if args.out:
        write_cloud_csv(cloud, args.out)
        print(f"wrote {args.out} ({cloud.n} points, d={cloud.dim})")
    else:
        print(f"cached {args.name}: {cloud.n} points, d={cloud.dim}")
    return 0


def cmd_report(args):
    written = report(args.artifacts, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="topoarch",
        description="Topological complexity measurement and architecture selection.")
    p.add_argument("--version", action="version", version=f"topoarch {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate a synthetic labeled dataset")
    g.add_argument("--beta0", type=int, required=True)
    g.add_argument("--beta1", type=int, default=0)
    g.add_argument("--n", type=int, default=5000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen_data)

    g = sub.add_parser("ph", help="persistent homology of a dataset CSV")
    g.add_argument("data")
    g.add_argument("--eps-max", type=float, required=True)
    g.add_argument("--max-dim", type=int, default=2)
    g.add_argument("--label", choices=["0", "1", "all"], default="1")
    g.add_argument("--subsample", type=int, default=1000)
    g.add_argument("--budget", type=int, default=50_000_000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--svg", default=None)
    g.set_defaults(func=cmd_ph)

    g = sub.add_parser("train", help="train one architecture on a dataset CSV")
    g.add_argument("data")
    g.add_argument("--ell", type=int, required=True)
    g.add_argument("--h0", type=int, required=True)
    g.add_argument("--trunk", type=int, default=None)
    g.add_argument("--beta0", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-steps", type=int, default=20_000)
    g.add_argument("--target-error", type=float, default=0.05)
    g.add_argument("--resolution", type=int, default=512)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_train)

    g = sub.add_parser("sweep", help="run an experiment grid from a config JSON")
    g.add_argument("config")
    g.add_argument("-o", "--out", required=True)
    g.add_argument("--workers", type=int, default=None)
    g.set_defaults(func=cmd_sweep)

    g = sub.add_parser("select", help="recommend architectures from data homology")
    g.add_argument("data")
    g.add_argument("--eps-max", type=float, required=True)
    g.add_argument("--policy", choices=["two-sigma", "absolute", "top-k"],
                   default="two-sigma")
    g.add_argument("--policy-eps", type=float, default=None)
    g.add_argument("--policy-k", type=int, default=None)
    g.add_argument("--subsample", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=cmd_select)

    g = sub.add_parser("embed", help="locally linear embedding of a dataset CSV")
    g.add_argument("data")
    g.add_argument("--k", type=int, default=120)
    g.add_argument("--dim", type=int, default=3)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=cmd_embed)

    g = sub.add_parser("fetch-openml", help="fetch and cache an OpenML dataset")
    g.add_argument("name")
    g.add_argument("-o", "--out", default=None)
    g.add_argument("--cache-dir", default=None)
    g.set_defaults(func=cmd_fetch_openml)

    g = sub.add_parser("report", help="render SVG/CSV report bundle from artifacts")
    g.add_argument("artifacts")
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TopoArchError as exc:
        print(json.dumps(exc.to_json_obj(), sort_keys=True, default=str), file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(json.dumps({"code": "internal-error", "message": str(exc), "context": {}},
                         sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
