"""Persistent homology over Z/2: boundary reduction, diagrams, Betti queries,
and lifespan-based feature thresholding."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptyDimensionError, InvalidPolicyError
from .rips import FilteredComplex


class BettiProfile:
    """Non-negative Betti numbers by dimension; trailing zeros are
    insignificant for equality."""

    def __init__(self, betti):
        vals = tuple(int(b) for b in betti)
        if any(b < 0 for b in vals):
            raise ValueError(f"Betti numbers must be non-negative, got {vals}")
        self.betti = vals

    def __getitem__(self, p):
        if 0 <= p < len(self.betti):
            return self.betti[p]
        return 0

    def _trimmed(self):
        vals = list(self.betti)
        while vals and vals[-1] == 0:
            vals.pop()
        return tuple(vals)

    def __eq__(self, other):
        if isinstance(other, BettiProfile):
            return self._trimmed() == other._trimmed()
        if isinstance(other, (tuple, list)):
            return self._trimmed() == BettiProfile(other)._trimmed()
        return NotImplemented

    def __hash__(self):
        return hash(self._trimmed())

    def as_tuple(self, min_len=2):
        vals = list(self.betti)
        while len(vals) < min_len:
            vals.append(0)
        return tuple(vals)

    def __iter__(self):
        return iter(self.betti)

    def __len__(self):
        return len(self.betti)

    def __repr__(self):
        return f"BettiProfile{self.as_tuple()}"


class PersistenceDiagram:
    """(dim, birth, death) triples over Z/2. Zero-length pairs are stored but
    excluded from feature queries; death is +inf for essential classes."""

    def __init__(self, dims, births, deaths, eps_max, max_homology_dim, n_points=None):
        self.dims = np.asarray(dims, dtype=np.int8)
        self.births = np.asarray(births, dtype=np.float64)
        self.deaths = np.asarray(deaths, dtype=np.float64)
        self.eps_max = float(eps_max)
        self.max_homology_dim = int(max_homology_dim)
        self.n_points = n_points
        if not np.all(self.births <= self.deaths):
            raise ValueError("every pair must satisfy birth <= death")

    def __len__(self):
        return int(self.dims.shape[0])

    def select(self, dim=None, include_zero=False, finite=None):
        """Boolean mask over stored pairs; zero-length pairs are dropped
        unless include_zero."""
        mask = np.ones(len(self), dtype=bool)
        if dim is not None:
            mask &= self.dims == dim
        if not include_zero:
            mask &= self.deaths > self.births
        if finite is True:
            mask &= np.isfinite(self.deaths)
        elif finite is False:
            mask &= ~np.isfinite(self.deaths)
        return mask

    def pairs(self, dim=None, include_zero=False):
        m = self.select(dim=dim, include_zero=include_zero)
        return [(int(d), float(b), float(dd)) for d, b, dd in
                zip(self.dims[m], self.births[m], self.deaths[m])]

    def lifespans(self, dim):
        """Definite lifespans in dimension `dim`: death - birth for finite
        pairs, eps_max - birth for essential ones. Zero-length pairs excluded."""
        m = self.select(dim=dim)
        deaths = np.where(np.isfinite(self.deaths[m]), self.deaths[m], self.eps_max)
        return deaths - self.births[m], ~np.isfinite(self.deaths[m])

    def n_essential(self, dim):
        return int(np.count_nonzero(self.select(dim=dim, include_zero=True, finite=False)))

    def betti_at(self, eps, p):
        return betti_at(self, eps, p)

    def to_json_obj(self):
        out = []
        for d, b, dd in zip(self.dims, self.births, self.deaths):
            out.append({
                "dim": int(d),
                "birth": float(b),
                "death": None if math.isinf(dd) else float(dd),
            })
        return {
            "pairs": out,
            "eps_max": self.eps_max,
            "max_homology_dim": self.max_homology_dim,
            "n_points": self.n_points,
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_json_obj(), indent=indent)

    @classmethod
    def from_json_obj(cls, obj):
        pairs = obj["pairs"]
        dims = [p["dim"] for p in pairs]
        births = [p["birth"] for p in pairs]
        deaths = [math.inf if p["death"] is None else p["death"] for p in pairs]
        eps_max = obj.get("eps_max")
        if eps_max is None:
            finite = [d for d in deaths if math.isfinite(d)] or births or [0.0]
            eps_max = max(finite)
        max_dim = obj.get("max_homology_dim")
        if max_dim is None:
            max_dim = max(dims) if dims else 0
        return cls(dims, births, deaths, eps_max, max_dim, obj.get("n_points"))

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))

    def __repr__(self):
        return (f"PersistenceDiagram(pairs={len(self)}, eps_max={self.eps_max}, "
                f"max_homology_dim={self.max_homology_dim})")


def compute_persistence(complex: FilteredComplex) -> PersistenceDiagram:
    """Standard persistence pairing by column reduction of the Z/2 boundary
    matrix in filtration order (clearing optimization in the kernel)."""
    indptr, facets = complex.validate()
    partner = _kernels.reduce_boundary(indptr, facets, complex.dims)
    partner = np.asarray(partner, dtype=np.int64)

    idx = np.arange(len(complex), dtype=np.int64)
    creators_paired = (partner > idx) & (partner >= 0)
    essential = partner < 0

    dims_out = []
    births = []
    deaths = []
    values = complex.values
    cdims = complex.dims

    pi = idx[creators_paired]
    dims_out.append(cdims[pi])
    births.append(values[pi])
    deaths.append(values[partner[pi]])

    ei = idx[essential]
    dims_out.append(cdims[ei])
    births.append(values[ei])
    deaths.append(np.full(ei.shape[0], np.inf))

    dims_all = np.concatenate(dims_out)
    births_all = np.concatenate(births)
    deaths_all = np.concatenate(deaths)
    order = np.lexsort((deaths_all, births_all, dims_all))

    max_h = complex.max_dimension - 1 if complex.clique_truncated else complex.max_dimension
    return PersistenceDiagram(
        dims_all[order], births_all[order], deaths_all[order],
        eps_max=complex.eps_max,
        max_homology_dim=max(max_h, 0),
        n_points=complex.n_points,
    )


def betti_at(diagram: PersistenceDiagram, eps, p) -> int:
    """Count of dimension-p classes alive at scale eps: birth <= eps < death
    (essential classes count for every eps >= birth). Unknown p gives 0."""
    if eps < 0:
        raise InvalidPolicyError(f"eps must be >= 0, got {eps}")
    m = diagram.dims == p
    return int(np.count_nonzero(m & (diagram.births <= eps) & (eps < diagram.deaths)))


def lifespan_stats(diagram: PersistenceDiagram, p):
    """Population mean/std of dimension-p lifespans (essential classes use
    eps_max - birth). Raises EmptyDimensionError when dimension p is empty."""
    spans, _ = diagram.lifespans(p)
    if spans.shape[0] == 0:
        raise EmptyDimensionError(f"no features in dimension {p}", dim=int(p))
    return float(spans.mean()), float(spans.std()), spans


@dataclass(frozen=True)
class ThresholdPolicy:
    """Feature acceptance policy: 'two-sigma' (default), 'absolute' (lifespan
    > eps), or 'top-k' (k longest-lived per dimension)."""

    kind: str = "two-sigma"
    eps: float = None
    k: int = None

    def __post_init__(self):
        if self.kind not in ("two-sigma", "absolute", "top-k"):
            raise InvalidPolicyError(f"unknown policy kind {self.kind!r}")
        if self.kind == "absolute":
            if self.eps is None or self.eps < 0:
                raise InvalidPolicyError(f"absolute policy needs eps >= 0, got {self.eps}")
        if self.kind == "top-k":
            if self.k is None or self.k <= 0:
                raise InvalidPolicyError(f"top-k policy needs k > 0, got {self.k}")

    def describe(self):
        if self.kind == "absolute":
            return {"kind": self.kind, "eps": self.eps}
        if self.kind == "top-k":
            return {"kind": self.kind, "k": self.k}
        return {"kind": self.kind}


TWO_SIGMA = ThresholdPolicy("two-sigma")


def threshold_features(diagram: PersistenceDiagram, policy: ThresholdPolicy = None,
                       max_dim=None) -> BettiProfile:
    """Count features whose lifespan clears the policy, per dimension.

    The two-sigma cutoff (mean + 2 std) is computed over the lifespans of
    every dimension pooled, so the essential components (whose lifespans span
    the whole filtration) calibrate a single scale separating structure from
    sampling noise; a per-dimension cutoff would drown in its own noise tail
    on dimensions that carry no real feature. Essential dimension-0 classes
    are always counted. Cutoffs land on the returned profile
    (`profile.cutoffs`)."""
    if policy is None:
        policy = TWO_SIGMA
    if max_dim is None:
        max_dim = diagram.max_homology_dim

    cut = None
    if policy.kind == "two-sigma":
        pooled = [diagram.lifespans(p)[0] for p in range(max_dim + 1)]
        pooled = np.concatenate(pooled) if pooled else np.empty(0)
        if pooled.shape[0]:
            cut = float(pooled.mean() + 2.0 * pooled.std())

    betti = []
    cutoffs = {}
    for p in range(max_dim + 1):
        spans, is_inf = diagram.lifespans(p)
        if spans.shape[0] == 0:
            betti.append(diagram.n_essential(p) if p == 0 else 0)
            continue
        if policy.kind == "two-sigma":
            keep = spans > cut
            cutoffs[p] = cut
        elif policy.kind == "absolute":
            keep = spans > policy.eps
            cutoffs[p] = float(policy.eps)
        else:  # top-k
            k = min(policy.k, spans.shape[0])
            order = np.argsort(-spans, kind="stable")
            keep = np.zeros(spans.shape[0], dtype=bool)
            keep[order[:k]] = True
        if p == 0:
            keep |= is_inf
        betti.append(int(np.count_nonzero(keep)))
    profile = BettiProfile(betti)
    profile.cutoffs = cutoffs
    profile.policy = policy.describe()
    return profile
