# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-vector kernels; same contract as ``_pykernels``."""

import numpy as np


cdef inline void _offsets(int n, const long long[::1] targets, long long* off,
                          long long* tmask):
    cdef int k = targets.shape[0]
    cdef int j
    cdef long long s, o
    tmask[0] = 0
    for j in range(k):
        tmask[0] |= 1LL << (n - 1 - targets[j])
    for s in range(1LL << k):
        o = 0
        for j in range(k):
            if (s >> (k - 1 - j)) & 1:
                o |= 1LL << (n - 1 - targets[j])
        off[s] = o


def apply_gate(const double complex[::1] amps, int n,
               const double complex[:, ::1] u, const long long[::1] targets):
    cdef int k = targets.shape[0]
    cdef long long dim = 1LL << n
    cdef long long sub = 1LL << k
    cdef long long off[64]
    cdef double complex buf[64]
    cdef long long tmask, i, r, c
    cdef double complex acc
    out_arr = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    _offsets(n, targets, off, &tmask)
    for i in range(dim):
        if i & tmask:
            continue
        for c in range(sub):
            buf[c] = amps[i + off[c]]
        for r in range(sub):
            acc = 0
            for c in range(sub):
                acc = acc + u[r, c] * buf[c]
            out[i + off[r]] = acc
    return out_arr


def project_all(const double complex[::1] amps, int n,
                const double complex[:, ::1] basis, const long long[::1] targets):
    cdef int k = targets.shape[0]
    cdef int m = basis.shape[0]
    cdef long long sub = 1LL << k
    cdef long long rest = 1LL << (n - k)
    cdef long long off[64]
    cdef int free_pos[64]
    cdef long long tmask, r, base, s
    cdef int j, nfree = 0, o
    cdef double complex acc
    out_arr = np.empty((m, rest), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    _offsets(n, targets, off, &tmask)
    for j in range(n):
        if not (tmask >> (n - 1 - j)) & 1:
            free_pos[nfree] = j
            nfree += 1
    for r in range(rest):
        base = 0
        for j in range(nfree):
            if (r >> (nfree - 1 - j)) & 1:
                base |= 1LL << (n - 1 - free_pos[j])
        for o in range(m):
            acc = 0
            for s in range(sub):
                acc = acc + (basis[o, s].real - 1j * basis[o, s].imag) * amps[base + off[s]]
            out[o, r] = acc
    return out_arr
