"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and same results; used when the extension is not built or
when ``ADAMSEXT_PURE=1`` is set.
"""

import numpy as np


def rref_inplace(a, p):
    nrows, ncols = a.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.flatnonzero(a[row:, col])
        if nz.size == 0:
            continue
        sel = row + int(nz[0])
        if sel != row:
            a[[row, sel], col:] = a[[sel, row], col:]
        inv = pow(int(a[row, col]), -1, p)
        if inv != 1:
            a[row, col:] = (a[row, col:] * inv) % p
        factors = a[:, col].copy()
        factors[row] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            a[hit, col:] = (a[hit, col:] - np.outer(factors[hit], a[row, col:])) % p
        pivots.append(col)
        row += 1
    return pivots


def reduce_rows(basis, pivots, vecs, p):
    for k, pc in enumerate(pivots):
        f = vecs[:, pc].copy()
        hit = np.flatnonzero(f)
        if hit.size:
            vecs[hit, pc:] = (vecs[hit, pc:] - np.outer(f[hit], basis[k, pc:])) % p
