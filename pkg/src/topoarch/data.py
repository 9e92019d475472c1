"""Point clouds, labeled datasets, and their CSV serialization.

The on-disk dataset format is a CSV with header ``x1,...,xd[,label]``; labels,
when present, are integers in {0, 1}.
"""
from __future__ import annotations

import csv

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError


class PointCloud:
    """Finite set of points in R^d, d >= 1."""

    def __init__(self, points):
        pts = _as_point_array(points)
        self.points = pts

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def bounding_box(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"PointCloud(n={self.n}, d={self.dim})"


class LabeledPointCloud:
    """Points with binary labels and, for synthetic data, the generating
    homology profile (beta_0, beta_1)."""

    def __init__(self, points, labels, ground_truth=None):
        pts = _as_point_array(points)
        lab = np.asarray(labels, dtype=np.int64)
        if lab.ndim != 1 or lab.shape[0] != pts.shape[0]:
            raise DimensionMismatchError(
                "labels must be a 1-d array matching the number of points",
                n_points=int(pts.shape[0]),
                n_labels=int(lab.shape[0]) if lab.ndim == 1 else -1,
            )
        bad = set(np.unique(lab)) - {0, 1}
        if bad:
            raise InvalidParameterError(f"labels must be 0/1, got extra values {sorted(bad)}")
        self.points = pts
        self.labels = lab
        self.ground_truth = ground_truth

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def class_points(self, label: int) -> np.ndarray:
        return self.points[self.labels == label]

    def positives(self) -> np.ndarray:
        return self.class_points(1)

    def negatives(self) -> np.ndarray:
        return self.class_points(0)

    def __len__(self):
        return self.n

    def __repr__(self):
        return (
            f"LabeledPointCloud(n={self.n}, d={self.dim}, "
            f"pos={int(self.labels.sum())}, ground_truth={self.ground_truth})"
        )


def _as_point_array(points) -> np.ndarray:
    try:
        pts = np.asarray(points, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise DimensionMismatchError(f"ragged or non-numeric point input: {exc}")
    if pts.ndim != 2:
        raise DimensionMismatchError(
            "points must form an (n, d) array with a single shared dimension",
            ndim=int(pts.ndim),
        )
    if pts.shape[0] < 1 or pts.shape[1] < 1:
        raise InvalidParameterError("need at least one point of dimension >= 1")
    if not np.all(np.isfinite(pts)):
        raise InvalidParameterError("coordinates must be finite")
    return pts


def write_cloud_csv(cloud, path) -> None:
    """Write `x1,...,xd[,label]` CSV. Floats use repr for exact round-trips."""
    pts = cloud.points
    labels = getattr(cloud, "labels", None)
    header = [f"x{i + 1}" for i in range(pts.shape[1])]
    if labels is not None:
        header.append("label")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(pts.shape[0]):
            row = [repr(float(v)) for v in pts[i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            w.writerow(row)


def read_cloud_csv(path):
    """Read a dataset CSV; returns LabeledPointCloud when a label column is
    present, PointCloud otherwise."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r, None)
        if not header:
            raise InvalidParameterError(f"empty CSV file: {path}")
        has_label = header[-1].strip().lower() == "label"
        ncols = len(header)
        pts, labels = [], []
        for row in r:
            if not row:
                continue
            if len(row) != ncols:
                raise DimensionMismatchError(
                    "ragged CSV row", expected=ncols, got=len(row), file=str(path)
                )
            if has_label:
                pts.append([float(v) for v in row[:-1]])
                labels.append(int(float(row[-1])))
            else:
                pts.append([float(v) for v in row])
    if has_label:
        return LabeledPointCloud(pts, labels)
    return PointCloud(pts)
