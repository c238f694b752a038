# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; signatures mirror ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs
from libc.stdlib cimport calloc, free
from libc.string cimport memset

cnp.import_array()


def typical_mask(codes, maps, offsets, targets, double thr, bint first_only=False):
    cdef const cnp.int64_t[:, ::1] c = np.ascontiguousarray(codes, dtype=np.int64)
    cdef const cnp.int64_t[:, ::1] mp = np.ascontiguousarray(maps, dtype=np.int64)
    cdef const cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const double[::1] tg = np.ascontiguousarray(targets, dtype=np.float64)
    cdef Py_ssize_t K = c.shape[0], n = c.shape[1]
    cdef Py_ssize_t n_sub = mp.shape[0], n_cells = mp.shape[1]
    cdef Py_ssize_t total = off[n_sub]
    out_arr = np.zeros(K, dtype=np.uint8)
    cdef cnp.uint8_t[::1] out = out_arr
    if K == 0:
        return out_arr
    cdef long *counts = <long *> calloc(n_cells, sizeof(long))
    cdef long *sub = <long *> calloc(total, sizeof(long))
    if counts == NULL or sub == NULL:
        free(counts)
        free(sub)
        raise MemoryError()
    cdef Py_ssize_t k, t, s, cell, j
    cdef double inv_n = 1.0 / n
    cdef bint ok
    try:
        with nogil:
            for k in range(K):
                memset(counts, 0, n_cells * sizeof(long))
                for t in range(n):
                    counts[c[k, t]] += 1
                ok = True
                for s in range(n_sub):
                    memset(sub + off[s], 0, (off[s + 1] - off[s]) * sizeof(long))
                    for cell in range(n_cells):
                        if counts[cell]:
                            sub[off[s] + mp[s, cell]] += counts[cell]
                    for j in range(off[s], off[s + 1]):
                        if not fabs(sub[j] * inv_n - tg[j]) < thr:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    out[k] = 1
                    if first_only:
                        break
    finally:
        free(counts)
        free(sub)
    return out_arr


cdef inline double _plogp(double p) nogil:
    return -p * log(p) if p > 0.0 else 0.0


def pentagon_terms(joint):
    cdef const double[:, :, :, :, :, ::1] q = np.ascontiguousarray(joint, dtype=np.float64)
    cdef Py_ssize_t nv = q.shape[0], ns = q.shape[1], nu = q.shape[2]
    cdef Py_ssize_t nx1 = q.shape[3], nx2 = q.shape[4], ny = q.shape[5]
    cdef double[:, :, :, ::1] vux1y = np.zeros((nv, nu, nx1, ny))
    cdef double[:, :, ::1] vus = np.zeros((nv, nu, ns))
    cdef Py_ssize_t v, s, u, a, b, y
    cdef double p, acc
    with nogil:
        for v in range(nv):
            for s in range(ns):
                for u in range(nu):
                    for a in range(nx1):
                        for b in range(nx2):
                            for y in range(ny):
                                p = q[v, s, u, a, b, y]
                                vux1y[v, u, a, y] += p
                                vus[v, u, s] += p
    # marginal tables derived from the two accumulators
    cdef double h_v = 0, h_vx1 = 0, h_vx1u = 0, h_vx1y = 0, h_vx1uy = 0
    cdef double h_vu = 0, h_vs = 0, h_vus = 0, h_y = 0
    cdef double[::1] py = np.zeros(ny)
    cdef double[::1] pvx1y = np.zeros(ny)
    cdef double[::1] pvs = np.zeros(ns)
    cdef double pv, pvx1, pvx1u, pvu
    with nogil:
        for v in range(nv):
            pv = 0
            for a in range(nx1):
                pvx1 = 0
                for y in range(ny):
                    pvx1y[y] = 0
                for u in range(nu):
                    pvx1u = 0
                    for y in range(ny):
                        p = vux1y[v, u, a, y]
                        h_vx1uy += _plogp(p)
                        pvx1u += p
                        pvx1y[y] += p
                        py[y] += p
                    h_vx1u += _plogp(pvx1u)
                    pvx1 += pvx1u
                for y in range(ny):
                    h_vx1y += _plogp(pvx1y[y])
                h_vx1 += _plogp(pvx1)
                pv += pvx1
            h_v += _plogp(pv)
            for s in range(ns):
                pvs[s] = 0
            for u in range(nu):
                pvu = 0
                for s in range(ns):
                    p = vus[v, u, s]
                    h_vus += _plogp(p)
                    pvu += p
                    pvs[s] += p
                h_vu += _plogp(pvu)
            for s in range(ns):
                h_vs += _plogp(pvs[s])
        for y in range(ny):
            h_y += _plogp(py[y])
    return (
        h_vx1 - h_v,
        h_vx1u + h_vx1y - h_vx1uy - h_vx1,
        h_vu + h_vs - h_vus - h_v,
        h_vx1u + h_y - h_vx1uy,
    )
