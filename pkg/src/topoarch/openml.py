"""OpenML dataset ingestion: fetch by name or id over the public HTTP API,
parse ARFF, standardize features, cache canonical CSV with checksums."""
from __future__ import annotations

import hashlib
import io
import json
import os
import time
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np
from scipy.io import arff

from .data import LabeledPointCloud, read_cloud_csv, write_cloud_csv
from .errors import CacheIntegrityError, DatasetNotFoundError, NetworkError, NonBinaryLabelError

API_BASE = "https://api.openml.org/api/v1/json"
PAPER_DATASETS = ["fri_c0_250_5", "balance-scale", "banana", "phoneme", "delta_ailerons"]
RETRIES = 3
BACKOFF = 0.5


def default_cache_dir() -> Path:
    env = os.environ.get("TOPOARCH_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "topoarch"


def _http_get(url: str) -> bytes:
    last = None
    for attempt in range(RETRIES):
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                return resp.read()
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            last = exc
            if attempt < RETRIES - 1:
                time.sleep(BACKOFF * 2 ** attempt)
    raise NetworkError(f"failed to fetch {url} after {RETRIES} attempts: {last}", url=url)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def resolve_dataset_id(name_or_id, transport) -> int:
    text = str(name_or_id)
    if text.isdigit():
        return int(text)
    url = f"{API_BASE}/data/list/data_name/{text}/limit/1/status/active"
    try:
        payload = json.loads(transport(url))
    except NetworkError:
        raise
    except Exception as exc:
        raise DatasetNotFoundError(f"could not resolve dataset {text!r}: {exc}", name=text)
    datasets = payload.get("data", {}).get("dataset", [])
    if not datasets:
        raise DatasetNotFoundError(f"no active OpenML dataset named {text!r}", name=text)
    return int(datasets[0]["did"])


def _parse_arff(raw: bytes, target_attribute=None):
    text = raw.decode("utf-8", errors="replace")
    data, meta = arff.loadarff(io.StringIO(text))
    names = list(meta.names())
    if target_attribute and target_attribute in names:
        target = target_attribute
    else:
        target = names[-1]
    feature_names = [n for n in names if n != target and meta[n][0] == "numeric"]
    if not feature_names:
        raise NonBinaryLabelError("dataset has no numeric feature columns", target=target)

    raw_labels = data[target]
    if raw_labels.dtype.kind in "SO":
        raw_labels = np.array([v.decode() if isinstance(v, bytes) else str(v) for v in raw_labels])
    classes = sorted(set(raw_labels.tolist()))
    if len(classes) != 2:
        raise NonBinaryLabelError(
            f"dataset target {target!r} has {len(classes)} classes, need 2",
            classes=[str(c) for c in classes][:10],
        )
    label_map = {classes[0]: 0, classes[1]: 1}
    labels = np.array([label_map[v] for v in raw_labels.tolist()], dtype=np.int64)

    feats = np.column_stack([np.asarray(data[n], dtype=np.float64) for n in feature_names])
    keep = ~np.any(np.isnan(feats), axis=1)
    return feats[keep], labels[keep], feature_names, target, [str(c) for c in classes]


def standardize(features: np.ndarray) -> np.ndarray:
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    std[std == 0] = 1.0
    return (features - mean) / std


def fetch_openml(name_or_id, cache_dir=None, transport=None, normalize=True) -> LabeledPointCloud:
    """Binary-labeled OpenML dataset as a standardized LabeledPointCloud.

    Cached under the cache directory as canonical CSV + checksum sidecar;
    cache reads are checksum-verified; `transport` (url -> bytes) is
    injectable for tests and offline mirrors."""
    transport = transport or _http_get
    cache = Path(cache_dir) if cache_dir else default_cache_dir()
    key = str(name_or_id).lower().replace("/", "_")
    csv_path = cache / "openml" / f"{key}.csv"
    meta_path = cache / "openml" / f"{key}.meta.json"

    if csv_path.exists() and meta_path.exists():
        meta = json.loads(meta_path.read_text())
        digest = _sha256(csv_path.read_bytes())
        if digest != meta.get("sha256"):
            raise CacheIntegrityError(
                f"cached dataset {key} fails its checksum", path=str(csv_path),
                expected=meta.get("sha256"), actual=digest,
            )
        cloud = read_cloud_csv(csv_path)
        return LabeledPointCloud(cloud.points, cloud.labels)

    did = resolve_dataset_id(name_or_id, transport)
    desc_payload = json.loads(transport(f"{API_BASE}/data/{did}"))
    desc = desc_payload.get("data_set_description")
    if not desc:
        raise DatasetNotFoundError(f"no description for OpenML dataset id {did}", did=did)
    arff_bytes = transport(desc["url"])
    feats, labels, feature_names, target, classes = _parse_arff(
        arff_bytes, desc.get("default_target_attribute"))
    if normalize:
        feats = standardize(feats)
    cloud = LabeledPointCloud(feats, labels)

    csv_path.parent.mkdir(parents=True, exist_ok=True)
    write_cloud_csv(cloud, csv_path)
    meta = {
        "schema": 1,
        "name": str(name_or_id),
        "dataset_id": did,
        "source_url": desc["url"],
        "target_attribute": target,
        "classes": classes,
        "feature_names": feature_names,
        "normalized": bool(normalize),
        "sha256": _sha256(csv_path.read_bytes()),
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True))
    return cloud
