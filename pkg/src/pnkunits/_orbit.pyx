# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit-image kernel; mirrors pnkunits._orbit_py exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def orbit_images(const long long[:, ::1] perm,
                 const long long[:, ::1] scal,
                 const long long[::1] odd,
                 const long long[::1] strides,
                 long long level,
                 const long long[:, ::1] monos,
                 const long long[::1] twist):
    cdef Py_ssize_t ng = perm.shape[0]
    cdef Py_ssize_t n = perm.shape[1]
    cdef Py_ssize_t nb = monos.shape[0]
    cdef Py_ssize_t b, s, g, h
    cdef long long tgt, res, e, inv, half = level // 2
    cdef long long[::1] seq = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t nseq
    tgt_arr = np.empty((nb, ng), dtype=np.int64)
    res_arr = np.empty((nb, ng), dtype=np.int64)
    cdef long long[:, ::1] T = tgt_arr
    cdef long long[:, ::1] R = res_arr
    for b in range(nb):
        for s in range(ng):
            tgt = 0
            res = twist[s]
            nseq = 0
            for g in range(n):
                e = monos[b, g]
                if e:
                    tgt += e * strides[perm[s, g]]
                    res += e * scal[s, g]
                    if odd[g]:
                        seq[nseq] = perm[s, g]
                        nseq += 1
            if nseq > 1:
                inv = 0
                for g in range(nseq):
                    for h in range(g + 1, nseq):
                        if seq[g] > seq[h]:
                            inv += 1
                if inv & 1:
                    res += half
            T[b, s] = tgt
            R[b, s] = res % level
    return tgt_arr, res_arr
