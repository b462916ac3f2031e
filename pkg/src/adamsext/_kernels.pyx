# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense row reduction over F_p.

Entries are int64 residues in [0, p). All loops run without the GIL so
kernel calls from worker threads overlap.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline long long _inv(long long a, long long p) nogil:
    cdef long long t = 0, new_t = 1, r = p, new_r = a, quot, tmp
    while new_r != 0:
        quot = r // new_r
        tmp = t - quot * new_t
        t = new_t
        new_t = tmp
        tmp = r - quot * new_r
        r = new_r
        new_r = tmp
    if t < 0:
        t += p
    return t


def rref_inplace(cnp.int64_t[:, ::1] a, long long p):
    """Reduce ``a`` to reduced row echelon form in place; return pivot columns."""
    cdef Py_ssize_t nrows = a.shape[0], ncols = a.shape[1]
    cdef Py_ssize_t row = 0, col, r, c, sel
    cdef long long inv, f, v
    cdef cnp.int64_t[::1] piv = np.empty(min(nrows, ncols), dtype=np.int64)
    cdef Py_ssize_t npiv = 0
    with nogil:
        for col in range(ncols):
            if row >= nrows:
                break
            sel = -1
            for r in range(row, nrows):
                if a[r, col] != 0:
                    sel = r
                    break
            if sel < 0:
                continue
            if sel != row:
                for c in range(col, ncols):
                    v = a[row, c]
                    a[row, c] = a[sel, c]
                    a[sel, c] = v
            inv = _inv(a[row, col], p)
            if inv != 1:
                for c in range(col, ncols):
                    a[row, c] = (a[row, c] * inv) % p
            for r in range(nrows):
                if r == row:
                    continue
                f = a[r, col]
                if f == 0:
                    continue
                f = p - f
                for c in range(col, ncols):
                    if a[row, c] != 0:
                        a[r, c] = (a[r, c] + f * a[row, c]) % p
            piv[npiv] = col
            npiv += 1
            row += 1
    return [int(piv[i]) for i in range(npiv)]


def reduce_rows(cnp.int64_t[:, ::1] basis, pivots, cnp.int64_t[:, ::1] vecs, long long p):
    """Reduce each row of ``vecs`` in place against an RREF ``basis``."""
    cdef Py_ssize_t nvec = vecs.shape[0], ncols = vecs.shape[1]
    cdef Py_ssize_t nb = len(pivots), k, r, c, pc
    cdef long long f
    cdef cnp.int64_t[::1] pv = np.asarray(pivots, dtype=np.int64)
    with nogil:
        for r in range(nvec):
            for k in range(nb):
                pc = pv[k]
                f = vecs[r, pc]
                if f == 0:
                    continue
                f = p - f
                for c in range(pc, ncols):
                    if basis[k, c] != 0:
                        vecs[r, c] = (vecs[r, c] + f * basis[k, c]) % p
