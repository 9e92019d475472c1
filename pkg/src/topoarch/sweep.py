"""Experiment grid runner: (architecture, dataset, trial) cells with error
curves, decision-region homology, and expressivity, reproducible and
schedule-independent under parallel execution."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import DivergenceError
from .mlp import Architecture, TrainConfig, init_model, misclassification, train
from .regions import DEFAULT_RESOLUTION, expressivity, homology_match, mask_betti, rasterize
from .synth import DatasetSpec, fresh_sample, sample_dataset


@dataclass
class SweepRecord:
    ell: int
    h0: int
    trunk_width: int
    spec_name: str
    beta0_data: int
    beta1_data: int
    trial: int
    seed: int
    status: str
    best_error: float = None
    converged_at: int = None
    steps_run: int = 0
    beta0_f: int = None
    beta1_f: int = None
    e_h0: float = None
    e_h1: float = None
    homology_match: bool = None
    fresh_error: float = None
    error_curve: list = None

    def key(self):
        return (self.spec_name, self.ell, self.h0, self.trial)


CSV_COLUMNS = [
    "ell", "h0", "trunk_width", "spec_name", "beta0_data", "beta1_data",
    "trial", "seed", "status", "best_error", "converged_at", "steps_run",
    "beta0_f", "beta1_f", "e_h0", "e_h1", "homology_match", "fresh_error",
]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])


def records_to_json(records, path=None):
    obj = {"schema": 1, "records": [asdict(r) for r in records]}
    text = json.dumps(obj, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def records_from_json(path_or_text):
    text = path_or_text
    if not str(path_or_text).lstrip().startswith("{"):
        with open(path_or_text) as fh:
            text = fh.read()
    obj = json.loads(text)
    out = []
    for r in obj["records"]:
        r = dict(r)
        if r.get("error_curve") is not None:
            r["error_curve"] = [tuple(p) for p in r["error_curve"]]
        out.append(SweepRecord(**r))
    return out


def run_cell(spec: DatasetSpec, arch: Architecture, trial: int, seed: int,
             config: TrainConfig, resolution=DEFAULT_RESOLUTION,
             fresh_n=10_000, measure_topology=True) -> SweepRecord:
    """Train one (dataset, architecture, trial) cell and measure the final
    decision region against the dataset's ground truth."""
    cloud = sample_dataset(spec)
    gt = spec.ground_truth
    rec = SweepRecord(
        ell=arch.ell, h0=arch.h0, trunk_width=arch.trunk_width,
        spec_name=spec.name, beta0_data=gt[0], beta1_data=gt[1],
        trial=trial, seed=seed, status="ok",
    )
    model0 = init_model(arch, cloud.dim, max(gt[0], 1), seed)
    cfg = replace(config, seed=seed)
    try:
        result = train(model0, cloud, cfg)
    except DivergenceError:
        rec.status = "diverged"
        return rec
    rec.best_error = result.best_error
    rec.converged_at = result.converged_at
    rec.steps_run = result.steps_run
    rec.error_curve = [(int(s), float(e)) for s, e in result.error_curve]

    if measure_topology and cloud.dim == 2:
        mask = rasterize(result.final_model, spec.bounding_box, resolution)
        profile = mask_betti(mask)
        score = expressivity(profile, gt)
        rec.beta0_f = profile[0]
        rec.beta1_f = profile[1]
        rec.e_h0 = score[0]
        rec.e_h1 = score[1]
        rec.homology_match = homology_match(profile, gt)
        fresh = fresh_sample(spec, fresh_n, salt=1000 + trial)
        rec.fresh_error = misclassification(result.final_model, fresh.points, fresh.labels)
    return rec


def _run_cell_star(args):
    return run_cell(*args)


def cell_seed(base_seed: int, spec_idx: int, arch_idx: int, trial: int) -> int:
    ss = np.random.SeedSequence([base_seed & 0xFFFFFFFF, spec_idx, arch_idx, trial])
    return int(ss.generate_state(1)[0])


def sweep(archs, specs, trials: int, config: TrainConfig = None, workers: int = 1,
          resolution=DEFAULT_RESOLUTION, fresh_n=10_000, measure_topology=True):
    """Run every (arch, spec, trial) cell; trunk widths follow each dataset's
    beta_0. Output order is fixed by (spec, arch, trial) regardless of the
    worker count; per-cell divergence is recorded, not raised."""
    if config is None:
        config = TrainConfig()
    tasks = []
    for si, spec in enumerate(specs):
        b0 = max(spec.ground_truth[0], 1)
        for ai, arch in enumerate(archs):
            if isinstance(arch, Architecture):
                cell_arch = replace(arch, trunk_width=b0)
            else:
                ell, h0 = arch
                cell_arch = Architecture(int(ell), int(h0), trunk_width=b0)
            for trial in range(trials):
                seed = cell_seed(config.seed, si, ai, trial)
                tasks.append((spec, cell_arch, trial, seed, config,
                              resolution, fresh_n, measure_topology))
    if workers <= 1:
        return [run_cell(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell_star, tasks, chunksize=1))


def best_error_by_arch(records):
    """Minimum best_error per (ell, h0) over all datasets and trials."""
    out = {}
    for r in records:
        if r.best_error is None:
            continue
        k = (r.ell, r.h0)
        out[k] = min(out.get(k, 1.0), r.best_error)
    return out


def convergence_step(record, max_steps):
    """Convergence step with non-converged runs censored at max_steps."""
    return record.converged_at if record.converged_at is not None else max_steps


def expressivity_frequencies(records, dim=0, k_values=None):
    """P(beta_dim(f) >= k) per h0, estimated over trials; Fig-5-style table."""
    field = "beta0_f" if dim == 0 else "beta1_f"
    by_h0 = {}
    for r in records:
        v = getattr(r, field)
        if v is None:
            continue
        by_h0.setdefault(r.h0, []).append(v)
    if k_values is None:
        kmax = max((max(v) for v in by_h0.values() if v), default=0)
        k_values = list(range(1, kmax + 1))
    table = {}
    for h0, vals in sorted(by_h0.items()):
        arr = np.asarray(vals)
        table[h0] = {k: float(np.mean(arr >= k)) for k in k_values}
    return table, list(k_values)
