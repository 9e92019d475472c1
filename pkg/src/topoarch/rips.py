"""Vietoris-Rips filtration construction.

A filtered complex is stored columnar (padded vertex rows, dimensions,
filtration values) so that desk-scale complexes with millions of simplices
stay cheap; `Simplex` objects are materialized on demand.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import PointCloud
from .errors import BudgetExceededError, InvalidParameterError, MalformedComplexError

DEFAULT_BUDGET = 50_000_000
MAX_PAD = 4  # vertices per row at max_dim == 3


@dataclass(frozen=True)
class Simplex:
    """A simplex with strictly increasing vertex indices and its filtration
    value (the clique diameter for Rips complexes)."""

    vertices: tuple
    filtration_value: float

    def __post_init__(self):
        v = self.vertices
        if len(v) < 1 or any(v[i] >= v[i + 1] for i in range(len(v) - 1)):
            raise InvalidParameterError(f"vertices must be strictly increasing, got {v}")
        if not (self.filtration_value >= 0.0):
            raise InvalidParameterError(f"filtration value must be >= 0, got {self.filtration_value}")

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def faces(self):
        v = self.vertices
        if len(v) == 1:
            return []
        return [tuple(v[:k] + v[k + 1:]) for k in range(len(v))]


class FilteredComplex:
    """Simplices in filtration order: sorted by (value, dim, lex vertices),
    every face preceding its cofaces."""

    def __init__(self, padded_vertices, dims, values, n_points, max_dimension,
                 eps_max, clique_truncated=False):
        self.padded_vertices = padded_vertices  # (N, MAX_PAD) int32, -1 padded
        self.dims = dims                        # (N,) int8
        self.values = values                    # (N,) float64
        self.n_points = int(n_points)
        self.max_dimension = int(max_dimension)
        self.eps_max = float(eps_max)
        self.clique_truncated = bool(clique_truncated)

    def __len__(self):
        return int(self.dims.shape[0])

    def simplex(self, i) -> Simplex:
        row = self.padded_vertices[i]
        verts = tuple(int(v) for v in row[: self.dims[i] + 1])
        return Simplex(verts, float(self.values[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self.simplex(i)

    def counts_by_dim(self) -> np.ndarray:
        if len(self) == 0:
            return np.zeros(1, dtype=np.int64)
        return np.bincount(self.dims, minlength=self.max_dimension + 1)

    def euler_characteristic(self) -> int:
        counts = self.counts_by_dim()
        signs = (-1) ** np.arange(len(counts))
        return int(np.sum(signs * counts))

    @classmethod
    def from_simplices(cls, simplices, eps_max=None, sort=True, clique_truncated=False):
        """Build from (vertices, value) pairs or Simplex objects; mainly for
        hand-built complexes in tests and tooling."""
        items = []
        for s in simplices:
            if isinstance(s, Simplex):
                items.append((s.vertices, s.filtration_value))
            else:
                verts, val = s
                items.append((tuple(int(v) for v in verts), float(val)))
        if not items:
            raise InvalidParameterError("empty complex")
        if sort:
            items.sort(key=lambda t: (t[1], len(t[0]), t[0]))
        N = len(items)
        max_dim = max(len(v) - 1 for v, _ in items)
        if max_dim + 1 > MAX_PAD:
            raise InvalidParameterError(f"dimension {max_dim} exceeds supported maximum 3")
        padded = np.full((N, MAX_PAD), -1, dtype=np.int32)
        dims = np.empty(N, dtype=np.int8)
        values = np.empty(N, dtype=np.float64)
        for i, (verts, val) in enumerate(items):
            padded[i, : len(verts)] = verts
            dims[i] = len(verts) - 1
            values[i] = val
        n_points = int(padded[:, 0].max()) + 1
        if eps_max is None:
            eps_max = float(values.max())
        return cls(padded, dims, values, n_points, max_dim, eps_max,
                   clique_truncated=clique_truncated)

    def validate(self):
        """Check the ordering invariant and face closure; raises
        MalformedComplexError. Returns the facet CSR used by the reduction."""
        N = len(self)
        keys = (self.padded_vertices[:, 3], self.padded_vertices[:, 2],
                self.padded_vertices[:, 1], self.padded_vertices[:, 0],
                self.dims, self.values)
        order = np.lexsort(keys)
        if not np.array_equal(order, np.arange(N)):
            bad = int(np.nonzero(order != np.arange(N))[0][0])
            raise MalformedComplexError(
                "simplices out of filtration order", first_bad_index=bad
            )
        if N > 1:
            same = np.all(self.padded_vertices[1:] == self.padded_vertices[:-1], axis=1)
            same &= self.dims[1:] == self.dims[:-1]
            if np.any(same):
                bad = int(np.nonzero(same)[0][0])
                raise MalformedComplexError("duplicate simplex", first_bad_index=bad)
        return facet_csr(self)

    def __repr__(self):
        return (f"FilteredComplex(n_simplices={len(self)}, n_points={self.n_points}, "
                f"max_dim={self.max_dimension}, eps_max={self.eps_max})")


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Exact-symmetric Euclidean distance matrix."""
    pts = np.asarray(points, dtype=np.float64)
    gram = pts @ pts.T
    sq = np.diag(gram)
    d2 = sq[:, None] + sq[None, :] - 2.0 * gram
    np.maximum(d2, 0.0, out=d2)
    dmat = np.sqrt(d2)
    upper = np.triu(dmat, 1)
    return upper + upper.T


def build_rips(cloud, eps_max, max_dim=2, budget=DEFAULT_BUDGET) -> FilteredComplex:
    """All simplices of dimension <= max_dim whose vertex sets have pairwise
    distances <= eps_max; filtration value = clique diameter (0 for vertices).
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(getattr(cloud, "points", cloud))
    if not (eps_max > 0):
        raise InvalidParameterError(f"eps_max must be positive, got {eps_max}")
    if not (1 <= max_dim <= 3):
        raise InvalidParameterError(f"max_dim must be between 1 and 3, got {max_dim}")
    n = cloud.n
    if n > budget:
        raise BudgetExceededError(
            f"vertex count {n} alone exceeds the simplex budget {budget}",
            count=n, budget=budget,
        )

    dmat = pairwise_distances(cloud.points)
    iu, iv = np.nonzero(np.triu(dmat <= eps_max, 1))
    n_edges = iu.shape[0]
    if n + n_edges > budget:
        raise BudgetExceededError(
            f"complex would contain at least {n + n_edges} simplices "
            f"(budget {budget})",
            count=n + n_edges, budget=budget,
        )
    edge_vals = dmat[iu, iv]

    # lower-neighbor CSR: for vertex v, all u < v with d(u, v) <= eps_max
    order = np.argsort(iv, kind="stable")
    indices = iu[order].astype(np.int32)
    counts = np.bincount(iv, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])

    tris = np.empty((0, 3), dtype=np.int32)
    tri_vals = np.empty(0)
    tets = np.empty((0, 4), dtype=np.int32)
    tet_vals = np.empty(0)
    if max_dim >= 2 and n_edges:
        remaining = budget - n - n_edges
        tris, tri_vals, tets, tet_vals, emitted, exceeded = _kernels.expand_cliques(
            indptr, indices, dmat, max_dim, remaining
        )
        if exceeded:
            raise BudgetExceededError(
                f"complex would contain at least {n + n_edges + emitted} "
                f"simplices (budget {budget})",
                count=n + n_edges + emitted, budget=budget,
            )

    N = n + n_edges + tris.shape[0] + tets.shape[0]
    padded = np.full((N, MAX_PAD), -1, dtype=np.int32)
    dims = np.empty(N, dtype=np.int8)
    values = np.empty(N, dtype=np.float64)

    padded[:n, 0] = np.arange(n, dtype=np.int32)
    dims[:n] = 0
    values[:n] = 0.0
    a = n
    b = a + n_edges
    padded[a:b, 0] = iu
    padded[a:b, 1] = iv
    dims[a:b] = 1
    values[a:b] = edge_vals
    a, b = b, b + tris.shape[0]
    padded[a:b, :3] = tris
    dims[a:b] = 2
    values[a:b] = tri_vals
    a, b = b, b + tets.shape[0]
    padded[a:b, :4] = tets
    dims[a:b] = 3
    values[a:b] = tet_vals

    order = np.lexsort((padded[:, 3], padded[:, 2], padded[:, 1], padded[:, 0],
                        dims, values))
    return FilteredComplex(
        padded[order], dims[order], values[order],
        n_points=n, max_dimension=max_dim, eps_max=float(eps_max),
        clique_truncated=True,
    )


def facet_csr(complex: FilteredComplex):
    """Per-simplex facet indices in CSR form (each column ascending), raising
    MalformedComplexError when a face is missing or appears after a coface."""
    N = len(complex)
    dims = complex.dims
    padded = complex.padded_vertices
    n = complex.n_points
    global_idx = np.arange(N, dtype=np.int64)

    # per-dimension little-endian integer keys; n**(d+1) must fit in int64
    if n > 0 and complex.max_dimension >= 1 and float(n) ** (complex.max_dimension + 1) >= 2**62:
        raise InvalidParameterError(
            "vertex count too large for integer simplex keys", n_points=n
        )

    def keys_for(rows, d):
        k = np.zeros(rows.shape[0], dtype=np.int64)
        for pos in range(d + 1):
            k = k * n + rows[:, pos].astype(np.int64)
        return k

    per_dim = {}
    for d in range(complex.max_dimension + 1):
        mask = dims == d
        rows = padded[mask][:, : d + 1]
        gidx = global_idx[mask]
        keys = keys_for(rows, d)
        perm = np.argsort(keys, kind="stable")
        per_dim[d] = (keys[perm], gidx[perm])

    nnz = int(np.sum((dims.astype(np.int64) + 1) * (dims > 0)))
    facets = np.empty(nnz, dtype=np.int32)
    indptr = np.zeros(N + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.where(dims > 0, dims.astype(np.int64) + 1, 0))

    for d in range(1, complex.max_dimension + 1):
        mask = dims == d
        if not np.any(mask):
            continue
        rows = padded[mask][:, : d + 1].astype(np.int64)
        gidx = global_idx[mask]
        sorted_keys, sorted_gidx = per_dim[d - 1]
        cols = np.empty((rows.shape[0], d + 1), dtype=np.int64)
        for drop in range(d + 1):
            sub = np.delete(rows, drop, axis=1)
            k = np.zeros(rows.shape[0], dtype=np.int64)
            for pos in range(d):
                k = k * n + sub[:, pos]
            pos_idx = np.searchsorted(sorted_keys, k)
            ok = (pos_idx < sorted_keys.shape[0])
            ok &= np.where(ok, sorted_keys[np.minimum(pos_idx, sorted_keys.shape[0] - 1)] == k, False)
            if not np.all(ok):
                bad = int(np.nonzero(~ok)[0][0])
                raise MalformedComplexError(
                    "face missing from complex",
                    simplex=tuple(int(x) for x in rows[bad]),
                    missing_face=tuple(int(x) for x in np.delete(rows[bad], drop)),
                )
            cols[:, drop] = sorted_gidx[pos_idx]
        if np.any(cols >= gidx[:, None]):
            bad = int(np.nonzero(np.any(cols >= gidx[:, None], axis=1))[0][0])
            raise MalformedComplexError(
                "face appears at or after its coface in the filtration order",
                simplex=tuple(int(x) for x in rows[bad]),
            )
        cols.sort(axis=1)
        starts = indptr[gidx]
        dest = (starts[:, None] + np.arange(d + 1)).ravel()
        facets[dest] = cols.astype(np.int32).ravel()

    return indptr, facets
