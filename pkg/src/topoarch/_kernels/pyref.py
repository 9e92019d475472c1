"""Pure-Python reference implementation of the hot kernels.

Used when the compiled extension is unavailable (or forced via
TOPOARCH_BACKEND=python). Semantics are identical to _compiled; the test suite
cross-checks the two backends pair-for-pair.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def expand_cliques(indptr, indices, dmat, max_dim, budget_remaining):
    """Lower-neighbor clique expansion of a proximity graph.

    indptr/indices: CSR adjacency where indices[indptr[v]:indptr[v+1]] are the
    neighbors u < v (ascending). Emits triangles (and tetrahedra when
    max_dim >= 3) as ascending vertex rows together with their clique
    diameters.

    Returns (tris, tri_vals, tets, tet_vals, emitted, exceeded); when the
    running simplex count crosses budget_remaining, enumeration stops and
    exceeded is True (emitted is then a lower bound on the true count).
    """
    n = len(indptr) - 1
    nbr = [np.asarray(indices[indptr[v]:indptr[v + 1]], dtype=np.int64) for v in range(n)]
    tris, tri_vals, tets, tet_vals = [], [], [], []
    emitted = 0
    exceeded = False

    for v in range(n):
        if exceeded:
            break
        nv = nbr[v]
        for u in nv:
            common = np.intersect1d(nbr[u], nv, assume_unique=True)
            for w in common:
                val = max(dmat[w, u], dmat[w, v], dmat[u, v])
                tris.append((w, u, v))
                tri_vals.append(val)
                emitted += 1
                if emitted > budget_remaining:
                    exceeded = True
                    break
                if max_dim >= 3:
                    common3 = np.intersect1d(nbr[w], common, assume_unique=True)
                    common3 = common3[common3 < w]
                    for x in common3:
                        tv = max(val, dmat[x, w], dmat[x, u], dmat[x, v])
                        tets.append((x, w, u, v))
                        tet_vals.append(tv)
                        emitted += 1
                        if emitted > budget_remaining:
                            exceeded = True
                            break
                    if exceeded:
                        break
            if exceeded:
                break

    tris_arr = np.array(tris, dtype=np.int32).reshape(-1, 3)
    tets_arr = np.array(tets, dtype=np.int32).reshape(-1, 4)
    return (
        tris_arr,
        np.array(tri_vals, dtype=np.float64),
        tets_arr,
        np.array(tet_vals, dtype=np.float64),
        emitted,
        exceeded,
    )


def _symdiff(a, b):
    """Symmetric difference of two ascending int lists (GF(2) column add)."""
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        x, y = a[i], b[j]
        if x == y:
            i += 1
            j += 1
        elif x < y:
            out.append(x)
            i += 1
        else:
            out.append(y)
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return out


def reduce_boundary(indptr, facets, dims):
    """Persistence pairing of an ordered boundary matrix over GF(2).

    Standard column reduction with the clearing (twist) optimization; columns
    of dimension >= 2 are processed top dimension first so that paired
    creators are skipped, and dimension-1 columns are resolved by union-find
    (the elder rule), which yields the same pairing as column reduction.

    Returns partner[i]: the paired column of i, or -1 (essential creator).
    """
    N = len(dims)
    partner = np.full(N, -1, dtype=np.int64)
    if N == 0:
        return partner
    low_owner = {}
    col_data = {}
    max_d = int(dims.max())

    for d in range(max_d, 1, -1):
        for j in np.where(dims == d)[0]:
            j = int(j)
            if partner[j] != -1:  # cleared: already paired as a creator
                continue
            cur = list(facets[indptr[j]:indptr[j + 1]])
            while cur:
                low = cur[-1]
                owner = low_owner.get(low, -1)
                if owner == -1:
                    low_owner[low] = j
                    partner[j] = low
                    partner[low] = j
                    col_data[j] = cur
                    break
                cur = _symdiff(cur, col_data[owner])

    # Dimension-1 columns: union-find with the elder rule. Roots are kept at
    # the component's earliest vertex so the younger creator dies on merge.
    parent = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    for j in np.where(dims == 1)[0]:
        j = int(j)
        u, v = facets[indptr[j]], facets[indptr[j] + 1]
        ru, rv = find(int(u)), find(int(v))
        if ru == rv:
            continue  # cycle edge: creates an H1 class
        old, young = (ru, rv) if ru < rv else (rv, ru)
        parent[young] = old
        partner[young] = j
        partner[j] = young

    return partner
