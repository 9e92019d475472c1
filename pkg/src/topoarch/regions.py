"""Support homology of 2-D decision regions.

The positive decision region (logit difference > 0) is rasterized on a grid,
and its Betti numbers are read off the binary mask: beta_0 counts 8-connected
foreground components, beta_1 counts bounded 4-connected background components.
This pairing avoids the digital-topology paradox and is exactly the homology
of the foreground cubical complex (cells glued along shared edges and
corners), so beta_0 - beta_1 equals its Euler characteristic V - E + F.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidParameterError, UnsupportedDimensionError
from .mlp import MLPModel, forward
from .persistence import BettiProfile

DEFAULT_RESOLUTION = 512
DEFAULT_PAD = 0.1

FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
EIGHT_CONN = np.ones((3, 3), dtype=bool)


@dataclass
class DecisionMask:
    grid: np.ndarray           # (res, res) bool, [row=y, col=x]
    bbox: tuple                # ((x0, y0), (x1, y1))
    resolution: int

    def __post_init__(self):
        if self.resolution < 16:
            raise InvalidParameterError(f"resolution must be >= 16, got {self.resolution}")
        self.grid = np.asarray(self.grid, dtype=bool)


def padded_bbox(points, pad=DEFAULT_PAD):
    """Data bounding box inflated by `pad` times its extent per axis."""
    pts = np.asarray(points, dtype=np.float64)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    return (tuple(lo - pad * span), tuple(hi + pad * span))


def rasterize(model: MLPModel, bbox, resolution=DEFAULT_RESOLUTION) -> DecisionMask:
    """Cell = 1 iff logit(class 1) - logit(class 0) > 0 at the cell center
    (exact ties fall to the negative class)."""
    if model.input_dim != 2:
        raise UnsupportedDimensionError(
            f"decision-region rasterization needs 2-D inputs, model has {model.input_dim}")
    (x0, y0), (x1, y1) = bbox
    if not (x1 > x0 and y1 > y0):
        raise InvalidParameterError("bbox is degenerate")
    xs = x0 + (np.arange(resolution) + 0.5) * (x1 - x0) / resolution
    ys = y0 + (np.arange(resolution) + 0.5) * (y1 - y0) / resolution
    grid = np.empty((resolution, resolution), dtype=bool)
    for r in range(0, resolution, 64):
        rows = ys[r:r + 64]
        pts = np.column_stack((
            np.tile(xs, rows.shape[0]),
            np.repeat(rows, xs.shape[0]),
        ))
        logits = forward(model, pts)
        grid[r:r + 64] = (logits[:, 1] - logits[:, 0] > 0.0).reshape(rows.shape[0], resolution)
    return DecisionMask(grid=grid, bbox=bbox, resolution=resolution)


def mask_betti(mask) -> BettiProfile:
    """(beta_0, beta_1) of the foreground: 8-connected components, and
    4-connected background components excluding the unbounded one (the mask is
    padded with a background ring so border-touching background is one
    outside region)."""
    grid = mask.grid if isinstance(mask, DecisionMask) else np.asarray(mask, dtype=bool)
    _, b0 = ndimage.label(grid, structure=EIGHT_CONN)
    bg = np.pad(~grid, 1, constant_values=True)
    _, nbg = ndimage.label(bg, structure=FOUR_CONN)
    return BettiProfile((int(b0), int(nbg) - 1))


def mask_euler_characteristic(mask) -> int:
    """V - E + F of the foreground cubical complex (cells, their edges and
    corner vertices), computed by direct counting."""
    grid = mask.grid if isinstance(mask, DecisionMask) else np.asarray(mask, dtype=bool)
    padded = np.pad(grid, 1, constant_values=False)
    faces = int(grid.sum())
    # vertical edges: between horizontally adjacent cell columns of each cell
    v_edges = int((padded[:, 1:] | padded[:, :-1])[1:-1].sum())
    h_edges = int((padded[1:, :] | padded[:-1, :])[:, 1:-1].sum())
    corners = padded[1:, 1:] | padded[1:, :-1] | padded[:-1, 1:] | padded[:-1, :-1]
    vertices = int(corners.sum())
    return vertices - (v_edges + h_edges) + faces


@dataclass(frozen=True)
class ExpressivityScore:
    """Per-dimension E^p = min(beta_p(f) / beta_p(D), 1); 1 by convention
    where the data has no dimension-p feature."""

    values: tuple

    def __getitem__(self, p):
        return self.values[p]

    def full(self) -> bool:
        return all(v >= 1.0 for v in self.values)


def expressivity(f_profile, d_profile, max_dim=1) -> ExpressivityScore:
    vals = []
    for p in range(max_dim + 1):
        bd = d_profile[p]
        if bd == 0:
            vals.append(1.0)
        else:
            vals.append(min(f_profile[p] / bd, 1.0))
    return ExpressivityScore(tuple(vals))


def homology_match(f_profile, d_profile) -> bool:
    """Equality of the profiles in dimensions 0 and 1."""
    return f_profile[0] == d_profile[0] and f_profile[1] == d_profile[1]


def write_pgm(mask, path) -> None:
    """Binary PGM (P5), one byte per cell, foreground = 255."""
    grid = mask.grid if isinstance(mask, DecisionMask) else np.asarray(mask, dtype=bool)
    h, w = grid.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write((grid.astype(np.uint8) * 255).tobytes())
