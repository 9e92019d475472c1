# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: Rips clique expansion and boundary-matrix reduction.

Mirrors topoarch._kernels.pyref exactly; see that module for the contract.
"""
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline Py_ssize_t _isect(const cnp.int32_t* a, Py_ssize_t na,
                              const cnp.int32_t* b, Py_ssize_t nb,
                              cnp.int32_t* out) noexcept nogil:
    cdef Py_ssize_t i = 0, j = 0, k = 0
    while i < na and j < nb:
        if a[i] == b[j]:
            out[k] = a[i]
            k += 1
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return k


cdef inline double _max3(double a, double b, double c) noexcept nogil:
    cdef double m = a
    if b > m:
        m = b
    if c > m:
        m = c
    return m


def expand_cliques(indptr_obj, indices_obj, dmat_obj, int max_dim, long long budget_remaining):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indptr = np.ascontiguousarray(indptr_obj, dtype=np.int64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] indices = np.ascontiguousarray(indices_obj, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dmat = np.ascontiguousarray(dmat_obj, dtype=np.float64)

    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t v, iu, iw, ix, w, u, x, nc, nc3
    cdef Py_ssize_t deg_max = 0
    for v in range(n):
        if indptr[v + 1] - indptr[v] > deg_max:
            deg_max = indptr[v + 1] - indptr[v]

    cdef cnp.int32_t* common = <cnp.int32_t*> malloc((deg_max + 1) * sizeof(cnp.int32_t))
    cdef cnp.int32_t* common3 = <cnp.int32_t*> malloc((deg_max + 1) * sizeof(cnp.int32_t))

    cdef Py_ssize_t tri_cap = 4096, tri_n = 0
    cdef Py_ssize_t tet_cap = 1024, tet_n = 0
    cdef cnp.int32_t* tri_v = <cnp.int32_t*> malloc(tri_cap * 3 * sizeof(cnp.int32_t))
    cdef double* tri_f = <double*> malloc(tri_cap * sizeof(double))
    cdef cnp.int32_t* tet_v = <cnp.int32_t*> malloc(tet_cap * 4 * sizeof(cnp.int32_t))
    cdef double* tet_f = <double*> malloc(tet_cap * sizeof(double))

    cdef long long emitted = 0
    cdef bint exceeded = False
    cdef double val, tval
    cdef const cnp.int32_t* idx = &indices[0] if indices.shape[0] > 0 else NULL
    cdef const cnp.int64_t* ptr = &indptr[0]
    cdef double* dm = &dmat[0, 0]
    cdef Py_ssize_t dn = dmat.shape[0]

    with nogil:
        for v in range(n):
            if exceeded:
                break
            for iu in range(ptr[v], ptr[v + 1]):
                u = idx[iu]
                nc = _isect(idx + ptr[u], ptr[u + 1] - ptr[u],
                            idx + ptr[v], ptr[v + 1] - ptr[v], common)
                for iw in range(nc):
                    w = common[iw]
                    val = _max3(dm[w * dn + u], dm[w * dn + v], dm[u * dn + v])
                    if tri_n == tri_cap:
                        tri_cap *= 2
                        tri_v = <cnp.int32_t*> realloc(tri_v, tri_cap * 3 * sizeof(cnp.int32_t))
                        tri_f = <double*> realloc(tri_f, tri_cap * sizeof(double))
                    tri_v[3 * tri_n] = <cnp.int32_t> w
                    tri_v[3 * tri_n + 1] = <cnp.int32_t> u
                    tri_v[3 * tri_n + 2] = <cnp.int32_t> v
                    tri_f[tri_n] = val
                    tri_n += 1
                    emitted += 1
                    if emitted > budget_remaining:
                        exceeded = True
                        break
                    if max_dim >= 3:
                        nc3 = _isect(idx + ptr[w], ptr[w + 1] - ptr[w], common, nc, common3)
                        for ix in range(nc3):
                            x = common3[ix]
                            tval = val
                            if dm[x * dn + w] > tval:
                                tval = dm[x * dn + w]
                            if dm[x * dn + u] > tval:
                                tval = dm[x * dn + u]
                            if dm[x * dn + v] > tval:
                                tval = dm[x * dn + v]
                            if tet_n == tet_cap:
                                tet_cap *= 2
                                tet_v = <cnp.int32_t*> realloc(tet_v, tet_cap * 4 * sizeof(cnp.int32_t))
                                tet_f = <double*> realloc(tet_f, tet_cap * sizeof(double))
                            tet_v[4 * tet_n] = <cnp.int32_t> x
                            tet_v[4 * tet_n + 1] = <cnp.int32_t> w
                            tet_v[4 * tet_n + 2] = <cnp.int32_t> u
                            tet_v[4 * tet_n + 3] = <cnp.int32_t> v
                            tet_f[tet_n] = tval
                            tet_n += 1
                            emitted += 1
                            if emitted > budget_remaining:
                                exceeded = True
                                break
                        if exceeded:
                            break
                if exceeded:
                    break

    tris = np.empty((tri_n, 3), dtype=np.int32)
    tri_vals = np.empty(tri_n, dtype=np.float64)
    tets = np.empty((tet_n, 4), dtype=np.int32)
    tet_vals = np.empty(tet_n, dtype=np.float64)
    if tri_n:
        memcpy(cnp.PyArray_DATA(tris), tri_v, tri_n * 3 * sizeof(cnp.int32_t))
        memcpy(cnp.PyArray_DATA(tri_vals), tri_f, tri_n * sizeof(double))
    if tet_n:
        memcpy(cnp.PyArray_DATA(tets), tet_v, tet_n * 4 * sizeof(cnp.int32_t))
        memcpy(cnp.PyArray_DATA(tet_vals), tet_f, tet_n * sizeof(double))
    free(common)
    free(common3)
    free(tri_v)
    free(tri_f)
    free(tet_v)
    free(tet_f)
    return tris, tri_vals, tets, tet_vals, int(emitted), bool(exceeded)


cdef inline Py_ssize_t _symdiff(const cnp.int32_t* a, Py_ssize_t na,
                                const cnp.int32_t* b, Py_ssize_t nb,
                                cnp.int32_t* out) noexcept nogil:
    cdef Py_ssize_t i = 0, j = 0, k = 0
    while i < na and j < nb:
        if a[i] == b[j]:
            i += 1
            j += 1
        elif a[i] < b[j]:
            out[k] = a[i]
            k += 1
            i += 1
        else:
            out[k] = b[j]
            k += 1
            j += 1
    while i < na:
        out[k] = a[i]
        k += 1
        i += 1
    while j < nb:
        out[k] = b[j]
        k += 1
        j += 1
    return k


def reduce_boundary(indptr_obj, facets_obj, dims_obj):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indptr = np.ascontiguousarray(indptr_obj, dtype=np.int64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] facets = np.ascontiguousarray(facets_obj, dtype=np.int32)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] dims = np.ascontiguousarray(dims_obj, dtype=np.int8)

    cdef Py_ssize_t N = dims.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] partner = np.full(N, -1, dtype=np.int64)
    if N == 0:
        return partner

    cdef cnp.int64_t* part = &partner[0]
    cdef const cnp.int64_t* ptr = &indptr[0]
    cdef const cnp.int32_t* fac = &facets[0] if facets.shape[0] > 0 else NULL
    cdef const cnp.int8_t* dim = &dims[0]

    cdef cnp.int64_t* low_owner = <cnp.int64_t*> malloc(N * sizeof(cnp.int64_t))
    cdef cnp.int32_t** col_ptr = <cnp.int32_t**> malloc(N * sizeof(cnp.int32_t*))
    cdef cnp.int64_t* col_len = <cnp.int64_t*> malloc(N * sizeof(cnp.int64_t))
    cdef Py_ssize_t i, j
    for i in range(N):
        low_owner[i] = -1
        col_ptr[i] = NULL
        col_len[i] = 0

    cdef int max_d = 0
    for i in range(N):
        if dim[i] > max_d:
            max_d = dim[i]

    cdef Py_ssize_t cap_a = 1024, cap_b = 1024
    cdef cnp.int32_t* buf_a = <cnp.int32_t*> malloc(cap_a * sizeof(cnp.int32_t))
    cdef cnp.int32_t* buf_b = <cnp.int32_t*> malloc(cap_b * sizeof(cnp.int32_t))
    cdef cnp.int32_t* tmp
    cdef Py_ssize_t cur_len, need, k, tmp_cap
    cdef cnp.int64_t low, owner
    cdef int d

    with nogil:
        for d in range(max_d, 1, -1):
            for j in range(N):
                if dim[j] != d or part[j] != -1:
                    continue
                cur_len = ptr[j + 1] - ptr[j]
                if cur_len > cap_a:
                    while cap_a < cur_len:
                        cap_a *= 2
                    buf_a = <cnp.int32_t*> realloc(buf_a, cap_a * sizeof(cnp.int32_t))
                for k in range(cur_len):
                    buf_a[k] = fac[ptr[j] + k]
                while cur_len > 0:
                    low = buf_a[cur_len - 1]
                    owner = low_owner[low]
                    if owner == -1:
                        low_owner[low] = j
                        part[j] = low
                        part[low] = j
                        col_ptr[j] = <cnp.int32_t*> malloc(cur_len * sizeof(cnp.int32_t))
                        for k in range(cur_len):
                            col_ptr[j][k] = buf_a[k]
                        col_len[j] = cur_len
                        break
                    need = cur_len + col_len[owner]
                    if need > cap_b:
                        while cap_b < need:
                            cap_b *= 2
                        buf_b = <cnp.int32_t*> realloc(buf_b, cap_b * sizeof(cnp.int32_t))
                    cur_len = _symdiff(buf_a, cur_len, col_ptr[owner], col_len[owner], buf_b)
                    tmp = buf_a
                    buf_a = buf_b
                    buf_b = tmp
                    tmp_cap = cap_a
                    cap_a = cap_b
                    cap_b = tmp_cap

    # dimension-1 columns: union-find with the elder rule
    cdef cnp.int64_t* parent = <cnp.int64_t*> malloc(N * sizeof(cnp.int64_t))
    for i in range(N):
        parent[i] = i
    cdef cnp.int64_t u, v, ru, rv, old, young, nxt
    with nogil:
        for j in range(N):
            if dim[j] != 1:
                continue
            u = fac[ptr[j]]
            v = fac[ptr[j] + 1]
            ru = u
            while parent[ru] != ru:
                ru = parent[ru]
            while parent[u] != u:
                nxt = parent[u]
                parent[u] = ru
                u = nxt
            rv = v
            while parent[rv] != rv:
                rv = parent[rv]
            while parent[v] != v:
                nxt = parent[v]
                parent[v] = rv
                v = nxt
            if ru == rv:
                continue
            if ru < rv:
                old = ru
                young = rv
            else:
                old = rv
                young = ru
            parent[young] = old
            part[young] = j
            part[j] = young

    for i in range(N):
        if col_ptr[i] != NULL:
            free(col_ptr[i])
    free(col_ptr)
    free(col_len)
    free(low_owner)
    free(parent)
    free(buf_a)
    free(buf_b)
    return partner
