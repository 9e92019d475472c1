"""topoarch: measure the topological complexity of labeled data with
persistent homology, characterize what fully-connected ReLU networks can
express of it, and recommend minimal architectures from the data's homology.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .data import LabeledPointCloud, PointCloud, read_cloud_csv, write_cloud_csv
from .persistence import (
    BettiProfile,
    PersistenceDiagram,
    ThresholdPolicy,
    betti_at,
    compute_persistence,
    lifespan_stats,
    threshold_features,
)
from .rips import FilteredComplex, Simplex, build_rips

__all__ = [
    "KERNEL_BACKEND",
    "PointCloud",
    "LabeledPointCloud",
    "read_cloud_csv",
    "write_cloud_csv",
    "Simplex",
    "FilteredComplex",
    "build_rips",
    "PersistenceDiagram",
    "BettiProfile",
    "ThresholdPolicy",
    "compute_persistence",
    "betti_at",
    "lifespan_stats",
    "threshold_features",
]
