"""Independent brute-force oracles used to check the library.

Everything here is deliberately naive (exhaustive enumeration, dense GF(2)
linear algebra, union-find, LP feasibility) and shares no code with the
implementation under test.
"""
import itertools

import numpy as np
from scipy.optimize import linprog


def gf2_rank(mat) -> int:
    """Rank over GF(2) by Gaussian elimination on a dense 0/1 matrix."""
    a = np.array(mat, dtype=np.uint8) % 2
    if a.size == 0:
        return 0
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        pivot = None
        for r in range(rank, rows):
            if a[r, c]:
                pivot = r
                break
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def rips_simplices_at(points, eps, max_dim):
    """All simplices of the Rips complex at scale eps, by subset enumeration."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    by_dim = {d: [] for d in range(max_dim + 1)}
    for d in range(max_dim + 1):
        for combo in itertools.combinations(range(n), d + 1):
            if all(dist[a, b] <= eps for a, b in itertools.combinations(combo, 2)):
                by_dim[d].append(combo)
    return by_dim


def simplex_diameter(points, combo):
    pts = np.asarray(points, dtype=float)
    if len(combo) == 1:
        return 0.0
    return max(np.linalg.norm(pts[a] - pts[b]) for a, b in itertools.combinations(combo, 2))


def boundary_matrix(faces, simplices):
    """GF(2) boundary matrix: rows = (d-1)-faces, columns = d-simplices."""
    index = {f: i for i, f in enumerate(faces)}
    mat = np.zeros((len(faces), len(simplices)), dtype=np.uint8)
    for j, s in enumerate(simplices):
        for k in range(len(s)):
            face = s[:k] + s[k + 1:]
            mat[index[face], j] = 1
    return mat


def betti_numbers_at(points, eps, max_p):
    """Betti numbers beta_0..beta_max_p of the Rips complex at scale eps via
    boundary-matrix ranks over GF(2)."""
    by_dim = rips_simplices_at(points, eps, max_p + 1)
    betti = []
    for p in range(max_p + 1):
        n_p = len(by_dim[p])
        if n_p == 0:
            betti.append(0)
            continue
        if p == 0:
            rank_dp = 0
        else:
            rank_dp = gf2_rank(boundary_matrix(by_dim[p - 1], by_dim[p]))
        rank_dp1 = gf2_rank(boundary_matrix(by_dim[p], by_dim[p + 1])) if by_dim[p + 1] else 0
        betti.append(n_p - rank_dp - rank_dp1)
    return betti


def count_components(points, eps) -> int:
    """Union-find connectivity of the eps-neighborhood graph."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(pts[i] - pts[j]) <= eps:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    return len({find(i) for i in range(n)})


def cubical_complex_counts(mask):
    """Vertices, edges, faces of the foreground cell complex (as index sets)."""
    grid = np.asarray(mask, dtype=bool)
    h, w = grid.shape
    vertices, edges, faces = set(), set(), set()
    for i in range(h):
        for j in range(w):
            if not grid[i, j]:
                continue
            faces.add((i, j))
            for vi in (i, i + 1):
                for vj in (j, j + 1):
                    vertices.add((vi, vj))
            edges.add((("h"), i, j))
            edges.add((("h"), i + 1, j))
            edges.add((("v"), i, j))
            edges.add((("v"), i, j + 1))
    return vertices, edges, faces


def cubical_betti(mask):
    """(beta_0, beta_1) of the foreground cubical complex via GF(2) ranks."""
    vertices, edges, faces = cubical_complex_counts(mask)
    v_list = sorted(vertices)
    e_list = sorted(edges)
    f_list = sorted(faces)
    v_idx = {v: i for i, v in enumerate(v_list)}
    e_idx = {e: i for i, e in enumerate(e_list)}

    d1 = np.zeros((len(v_list), len(e_list)), dtype=np.uint8)
    for j, e in enumerate(e_list):
        kind, i, jj = e
        if kind == "h":
            ends = [(i, jj), (i, jj + 1)]
        else:
            ends = [(i, jj), (i + 1, jj)]
        for v in ends:
            d1[v_idx[v], j] = 1

    d2 = np.zeros((len(e_list), len(f_list)), dtype=np.uint8)
    for j, (i, jj) in enumerate(f_list):
        for e in (("h", i, jj), ("h", i + 1, jj), ("v", i, jj), ("v", i, jj + 1)):
            d2[e_idx[e], j] = 1

    r1 = gf2_rank(d1)
    r2 = gf2_rank(d2)
    beta0 = len(v_list) - r1
    beta1 = (len(e_list) - r1) - r2
    return beta0, beta1


def cubical_euler(mask) -> int:
    vertices, edges, faces = cubical_complex_counts(mask)
    return len(vertices) - len(edges) + len(faces)


def linearly_separable(points, labels) -> bool:
    """LP feasibility of a strict linear separator (perceptron feasibility)."""
    pts = np.asarray(points, dtype=float)
    y = np.where(np.asarray(labels) == 1, 1.0, -1.0)
    n, d = pts.shape
    # find w, b with y_i (w x_i + b) >= 1
    a_ub = -(y[:, None] * np.column_stack([pts, np.ones(n)]))
    b_ub = -np.ones(n)
    res = linprog(c=np.zeros(d + 1), A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None)] * (d + 1), method="highs")
    return bool(res.success)
