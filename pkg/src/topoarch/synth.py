"""Synthetic labeled 2-D datasets with known homology.

Positive points are drawn uniformly from disjoint disks and annuli; negatives
fill the bounding box outside the margin-inflated shapes by rejection. A disk
contributes (+1, 0) to the (beta_0, beta_1) ground truth, an annulus (+1, +1).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .data import LabeledPointCloud
from .errors import (
    InfeasibleSpecError,
    InvalidParameterError,
    LayoutOverflowError,
    RejectionStallError,
)
from .persistence import BettiProfile, compute_persistence, threshold_features
from .rips import build_rips

OUTER_RADIUS = 1.0
ANNULUS_THICKNESS_FRAC = 0.25   # thickness = frac * outer radius
GRID_SLACK = 1.5                # extra center spacing beyond touching inflated shapes
CENTER_JITTER = 0.1
BOX_BORDER = 0.5
MAX_SUITE_SHAPES = 36


@dataclass(frozen=True)
class ShapeSpec:
    kind: str                 # "disk" | "annulus"
    center: tuple
    outer_radius: float
    inner_radius: float = 0.0

    def __post_init__(self):
        if self.kind not in ("disk", "annulus"):
            raise InvalidParameterError(f"unknown shape kind {self.kind!r}")
        if self.outer_radius <= 0:
            raise InvalidParameterError("outer_radius must be positive")
        if self.kind == "annulus" and not (0 < self.inner_radius < self.outer_radius):
            raise InvalidParameterError("annulus needs 0 < inner_radius < outer_radius")
        if self.kind == "disk" and self.inner_radius != 0.0:
            raise InvalidParameterError("disk must have inner_radius 0")

    @property
    def homology(self):
        return (1, 0) if self.kind == "disk" else (1, 1)

    @property
    def min_radius(self) -> float:
        return self.outer_radius

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(pts - np.asarray(self.center), axis=1)
        if self.kind == "disk":
            return d <= self.outer_radius
        return (self.inner_radius <= d) & (d <= self.outer_radius)

    def within_margin(self, pts: np.ndarray, margin: float) -> np.ndarray:
        """True where a point lies inside the shape inflated by `margin`."""
        d = np.linalg.norm(pts - np.asarray(self.center), axis=1)
        if self.kind == "disk":
            return d <= self.outer_radius + margin
        return (self.inner_radius - margin <= d) & (d <= self.outer_radius + margin)

    def to_json_obj(self):
        return {"kind": self.kind, "center": list(self.center),
                "outer_radius": self.outer_radius, "inner_radius": self.inner_radius}

    @classmethod
    def from_json_obj(cls, obj):
        return cls(obj["kind"], tuple(obj["center"]), obj["outer_radius"],
                   obj.get("inner_radius", 0.0))


@dataclass(frozen=True)
class DatasetSpec:
    shapes: tuple
    n_points: int
    margin: float
    bounding_box: tuple       # ((x0, y0), (x1, y1))
    seed: int
    name: str = ""

    def __post_init__(self):
        if not self.shapes:
            raise InfeasibleSpecError("spec needs at least one shape")
        if self.n_points < 2 * len(self.shapes):
            raise InvalidParameterError(
                f"n_points={self.n_points} too small for {len(self.shapes)} shapes")
        if self.margin < 0:
            raise InvalidParameterError("margin must be >= 0")
        (x0, y0), (x1, y1) = self.bounding_box
        if not (x1 > x0 and y1 > y0):
            raise InfeasibleSpecError("bounding box is degenerate")
        for i, s in enumerate(self.shapes):
            cx, cy = s.center
            r = s.outer_radius + self.margin
            if cx - r < x0 or cx + r > x1 or cy - r < y0 or cy + r > y1:
                raise InfeasibleSpecError(
                    f"shape {i} inflated by margin leaves the bounding box",
                    shape=i,
                )
        for i in range(len(self.shapes)):
            for j in range(i + 1, len(self.shapes)):
                si, sj = self.shapes[i], self.shapes[j]
                dist = math.dist(si.center, sj.center)
                if dist <= si.outer_radius + sj.outer_radius + 2 * self.margin:
                    raise InfeasibleSpecError(
                        f"shapes {i} and {j} overlap after margin inflation",
                        pair=(i, j),
                    )

    @property
    def ground_truth(self) -> BettiProfile:
        b0 = sum(s.homology[0] for s in self.shapes)
        b1 = sum(s.homology[1] for s in self.shapes)
        return BettiProfile((b0, b1))

    def to_json_obj(self):
        return {
            "schema": 1,
            "shapes": [s.to_json_obj() for s in self.shapes],
            "n_points": self.n_points,
            "margin": self.margin,
            "bounding_box": [list(self.bounding_box[0]), list(self.bounding_box[1])],
            "seed": self.seed,
            "name": self.name,
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_json_obj(), indent=indent)

    @classmethod
    def from_json_obj(cls, obj):
        return cls(
            shapes=tuple(ShapeSpec.from_json_obj(s) for s in obj["shapes"]),
            n_points=obj["n_points"],
            margin=obj["margin"],
            bounding_box=(tuple(obj["bounding_box"][0]), tuple(obj["bounding_box"][1])),
            seed=obj["seed"],
            name=obj.get("name", ""),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))


def default_margin(shapes) -> float:
    """Half the smallest shape radius (annuli count their inner radius)."""
    return 0.5 * min(s.min_radius for s in shapes)


def _sample_in_shape(shape: ShapeSpec, count: int, rng) -> np.ndarray:
    u = rng.random(count)
    theta = rng.random(count) * 2.0 * np.pi
    if shape.kind == "disk":
        r = shape.outer_radius * np.sqrt(u)
    else:
        r = np.sqrt(shape.inner_radius**2 + u * (shape.outer_radius**2 - shape.inner_radius**2))
    return np.asarray(shape.center) + np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_dataset(spec: DatasetSpec, max_attempt_factor: int = 200) -> LabeledPointCloud:
    """Deterministic draw: positives uniform per shape with balanced per-shape
    counts, negatives by rejection from the box outside every inflated shape.
    Rejection gives up after max_attempt_factor * n_neg candidate draws."""
    rng = np.random.default_rng(spec.seed)
    k = len(spec.shapes)
    n_pos = spec.n_points // 2
    n_neg = spec.n_points - n_pos

    base, extra = divmod(n_pos, k)
    counts = [base + (1 if i < extra else 0) for i in range(k)]
    pos = np.concatenate([
        _sample_in_shape(s, c, rng) for s, c in zip(spec.shapes, counts)
    ])

    (x0, y0), (x1, y1) = spec.bounding_box
    neg_parts = []
    got = 0
    attempts = 0
    max_attempts = max_attempt_factor * max(n_neg, 1)
    while got < n_neg:
        want = n_neg - got
        draw = max(2 * want, 64)
        if attempts + draw > max_attempts:
            raise RejectionStallError(
                f"negative sampling stalled after {attempts} draws "
                f"({got}/{n_neg} accepted)",
                accepted=got, wanted=n_neg,
            )
        attempts += draw
        cand = np.column_stack((
            x0 + rng.random(draw) * (x1 - x0),
            y0 + rng.random(draw) * (y1 - y0),
        ))
        inside = np.zeros(draw, dtype=bool)
        for s in spec.shapes:
            inside |= s.within_margin(cand, spec.margin)
        accepted = cand[~inside]
        neg_parts.append(accepted[:want])
        got += min(len(accepted), want)
    neg = np.concatenate(neg_parts)

    points = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(n_pos, dtype=np.int64),
                             np.zeros(n_neg, dtype=np.int64)])
    return LabeledPointCloud(points, labels, ground_truth=spec.ground_truth)


def make_cell_spec(beta0: int, beta1: int, seed, n_points=5000, name="") -> DatasetSpec:
    """One dataset spec realizing ground truth (beta0, beta1): beta1 annuli and
    beta0 - beta1 disks on a jittered grid with uniform margins."""
    if beta0 < 1:
        raise InvalidParameterError("beta0 must be >= 1")
    if not (0 <= beta1 <= beta0):
        raise InvalidParameterError(
            f"need 0 <= beta1 <= beta0, got ({beta0}, {beta1})")
    k = beta0
    if k > MAX_SUITE_SHAPES:
        raise LayoutOverflowError(f"cannot pack {k} shapes", shapes=k)

    r = OUTER_RADIUS
    inner = (1.0 - ANNULUS_THICKNESS_FRAC) * r
    kinds = ["annulus"] * beta1 + ["disk"] * (beta0 - beta1)
    min_radius = min(inner if kd == "annulus" else r for kd in kinds)
    margin = 0.5 * min_radius

    g = math.ceil(math.sqrt(k))
    rows = (k - 1) // g + 1
    pitch = 2.0 * (r + margin) + GRID_SLACK * r
    jitter_rng = np.random.default_rng(
        np.random.SeedSequence([_seed_int(seed), beta0, beta1, 7]).generate_state(1)[0]
    )
    # grid centered on the origin: training behaves best on centered inputs
    x_off = -(g - 1) * pitch / 2.0
    y_off = -(rows - 1) * pitch / 2.0
    shapes = []
    for i, kd in enumerate(kinds):
        gx, gy = i % g, i // g
        jx, jy = (jitter_rng.random(2) * 2.0 - 1.0) * CENTER_JITTER * r
        center = (x_off + gx * pitch + jx, y_off + gy * pitch + jy)
        shapes.append(ShapeSpec(kd, center,
                                outer_radius=r,
                                inner_radius=inner if kd == "annulus" else 0.0))
    pad = r + margin + BOX_BORDER * r + CENTER_JITTER * r
    half_x = (g - 1) * pitch / 2.0 + pad
    half_y = (rows - 1) * pitch / 2.0 + pad
    box = ((-half_x, -half_y), (half_x, half_y))
    cell_seed = int(np.random.SeedSequence([_seed_int(seed), beta0, beta1]).generate_state(1)[0])
    return DatasetSpec(
        shapes=tuple(shapes), n_points=n_points, margin=margin,
        bounding_box=box, seed=cell_seed,
        name=name or f"b{beta0}_{beta1}",
    )


def make_homology_suite(beta0_max: int, beta1_max: int, seed, n_points=5000):
    """Specs for every cell (b0, b1) with b1 <= min(b0, beta1_max),
    b0 <= beta0_max; annuli count toward beta_0, so beta_1 <= beta_0."""
    if not (1 <= beta0_max <= 30):
        raise InvalidParameterError(f"beta0_max must be in 1..30, got {beta0_max}")
    if not (0 <= beta1_max <= beta0_max):
        raise InvalidParameterError(
            f"beta1_max must be in 0..beta0_max, got {beta1_max}")
    specs = []
    for b0 in range(1, beta0_max + 1):
        for b1 in range(0, min(b0, beta1_max) + 1):
            specs.append(make_cell_spec(b0, b1, seed, n_points=n_points))
    return specs


def recommended_eps_max(spec: DatasetSpec) -> float:
    """Persistence scale for ground-truth recovery: large enough that the
    essential classes dominate the lifespan statistics, below the smallest
    surface-to-surface gap between shapes so distinct shapes never bridge."""
    min_gap = math.inf
    shapes = spec.shapes
    for i in range(len(shapes)):
        for j in range(i + 1, len(shapes)):
            gap = (math.dist(shapes[i].center, shapes[j].center)
                   - shapes[i].outer_radius - shapes[j].outer_radius)
            min_gap = min(min_gap, gap)
    scale = 2.2 * max(s.outer_radius for s in shapes)
    if math.isfinite(min_gap):
        scale = min(scale, 0.9 * min_gap)
    return scale


def recommended_subsample(spec: DatasetSpec, per_shape: int = 100) -> int:
    """Subsample size keeping per-shape density roughly constant across cells."""
    return per_shape * len(spec.shapes)


def fresh_sample(spec: DatasetSpec, n_points: int, salt: int = 1) -> LabeledPointCloud:
    """A new draw from the same distribution with an unrelated seed."""
    new_seed = int(np.random.SeedSequence([spec.seed, 0x5EED, salt]).generate_state(1)[0])
    return sample_dataset(replace(spec, n_points=n_points, seed=new_seed))


DEFAULT_VERIFY_SUBSAMPLE = 1000


def verify_ground_truth(cloud: LabeledPointCloud, eps_max, max_dim=2, policy=None,
                        subsample=DEFAULT_VERIFY_SUBSAMPLE, seed=0) -> BettiProfile:
    """Recover the homology profile of the positive class through the Rips ->
    persistence -> threshold pipeline (deterministic subsample above
    `subsample` points keeps the complex at desk scale)."""
    if cloud.ground_truth is None:
        raise InvalidParameterError("cloud has no ground-truth profile to verify")
    pos = cloud.positives()
    if subsample and pos.shape[0] > subsample:
        idx = np.sort(np.random.default_rng(seed).choice(pos.shape[0], subsample, replace=False))
        pos = pos[idx]
    cx = build_rips(pos, eps_max=eps_max, max_dim=max_dim)
    diagram = compute_persistence(cx)
    return threshold_features(diagram, policy)


def _seed_int(seed) -> int:
    return int(seed) & 0xFFFFFFFFFFFFFFFF
