"""Exact linear algebra over the prime field F_p.

Matrices are stored row-major as sorted ``(col, value)`` pairs with no zero
entries. Row reduction dispatches to the dense kernel in
:mod:`adamsext.kernels` when the matrix has at most ``DENSE_COLS`` columns
and to a dict-of-rows elimination otherwise. The pivot rule is leftmost
column, topmost unused row; reduced row echelon form is unique, so both
routes return identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels

DENSE_COLS = 64


class FpError(ValueError):
    pass


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 3 or p % 2 == 0:
        raise FpError(f"p must be an odd prime, got {p!r}")
    if any(p % d == 0 for d in range(3, int(p**0.5) + 1, 2)):
        raise FpError(f"p must be an odd prime, got {p!r}")
    return p


@lru_cache(maxsize=None)
def inverse_table(p: int) -> tuple:
    """Multiplicative inverses mod p by extended Euclid; index 0 is unused."""
    table = [0] * p
    for a in range(1, p):
        t, new_t, r, new_r = 0, 1, p, a
        while new_r:
            quot = r // new_r
            t, new_t = new_t, t - quot * new_t
            r, new_r = new_r, r - quot * new_r
        table[a] = t % p
    return tuple(table)


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return inverse_table(p)[a]


@dataclass(frozen=True)
class FpScalar:
    value: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other):
        if isinstance(other, FpScalar):
            if other.p != self.p:
                raise FpError("mixed characteristics")
            return other.value
        return int(other)

    def __add__(self, other):
        return FpScalar(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FpScalar(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FpScalar(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FpScalar(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(-self.value, self.p)

    def __truediv__(self, other):
        return FpScalar(self.value * inv(self._coerce(other), self.p), self.p)

    def inverse(self) -> "FpScalar":
        return FpScalar(inv(self.value, self.p), self.p)

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0


class SparseMatrix:
    """Immutable sparse matrix over F_p."""

    __slots__ = ("nrows", "ncols", "p", "_rows")

    def __init__(self, nrows: int, ncols: int, p: int, rows: Sequence[Sequence[tuple]] = ()):
        check_prime(p)
        if nrows < 0 or ncols < 0:
            raise FpError("negative shape")
        self.nrows = nrows
        self.ncols = ncols
        self.p = p
        if rows:
            if len(rows) != nrows:
                raise FpError("row count mismatch")
            self._rows = tuple(tuple(r) for r in rows)
        else:
            self._rows = tuple(() for _ in range(nrows))

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Iterable[tuple], p: int) -> "SparseMatrix":
        check_prime(p)
        rows = [dict() for _ in range(nrows)]
        for r, c, v in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise FpError(f"entry ({r}, {c}) out of range")
            if c in rows[r]:
                raise FpError(f"duplicate entry ({r}, {c})")
            rows[r][c] = int(v) % p
        return cls(nrows, ncols, p, [sorted((c, v) for c, v in row.items() if v) for row in rows])

    @classmethod
    def from_dense(cls, a, p: int) -> "SparseMatrix":
        a = np.asarray(a, dtype=np.int64)
        if a.ndim != 2:
            raise FpError("expected a 2-d array")
        a = a % p
        rows = [[(int(c), int(a[r, c])) for c in np.flatnonzero(a[r])] for r in range(a.shape[0])]
        return cls(a.shape[0], a.shape[1], p, rows)

    @classmethod
    def identity(cls, n: int, p: int) -> "SparseMatrix":
        return cls(n, n, p, [[(i, 1)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int, p: int) -> "SparseMatrix":
        return cls(nrows, ncols, p)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def row(self, i: int) -> dict:
        return dict(self._rows[i])

    def entries(self) -> list:
        return [(r, c, v) for r, row in enumerate(self._rows) for c, v in row]

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.nrows, self.ncols), dtype=np.int64)
        for r, row in enumerate(self._rows):
            for c, v in row:
                a[r, c] = v
        return a

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_entries(self.ncols, self.nrows, ((c, r, v) for r, c, v in self.entries()), self.p)

    def dot(self, v: Sequence[int]) -> list:
        if len(v) != self.ncols:
            raise FpError("dimension mismatch")
        p = self.p
        return [sum(val * int(v[c]) for c, val in row) % p for row in self._rows]

    def __matmul__(self, v):
        return self.dot(v)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.p, self._rows) == (other.nrows, other.ncols, other.p, other._rows)

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.p, self._rows))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols} over F_{self.p}, nnz={self.nnz()})"


@dataclass(frozen=True)
class Subspace:
    ambient: int
    basis: SparseMatrix

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def vectors(self) -> list:
        return [list(map(int, r)) for r in self.basis.to_dense()]

    def contains(self, v: Sequence[int]) -> bool:
        p = self.basis.p
        w = [int(x) % p for x in v]
        for r in range(self.basis.nrows):
            row = self.basis._rows[r]
            pc = row[0][0]
            f = w[pc]
            if f:
                for c, val in row:
                    w[c] = (w[c] - f * val) % p
        return not any(w)


def rref_array(a: np.ndarray, p: int) -> list:
    """Dense in-place RREF of a C-contiguous int64 array; returns pivot columns."""
    return kernels.rref_inplace(a, p)


def _sparse_rref(m: SparseMatrix) -> tuple:
    p = m.p
    pivot_rows = {}  # pivot col -> row dict
    for row in m._rows:
        w = dict(row)
        for pc in sorted(pivot_rows):
            f = w.get(pc)
            if f:
                for c, v in pivot_rows[pc].items():
                    nv = (w.get(c, 0) - f * v) % p
                    if nv:
                        w[c] = nv
                    else:
                        w.pop(c, None)
        if not w:
            continue
        lead = min(w)
        s = inv(w[lead], p)
        w = {c: (v * s) % p for c, v in w.items()}
        for pc, prow in pivot_rows.items():
            f = prow.get(lead)
            if f:
                for c, v in w.items():
                    nv = (prow.get(c, 0) - f * v) % p
                    if nv:
                        prow[c] = nv
                    else:
                        prow.pop(c, None)
        pivot_rows[lead] = w
    out = [sorted(pivot_rows[pc].items()) for pc in sorted(pivot_rows)]
    rank = len(out)
    out += [()] * (m.nrows - rank)
    return SparseMatrix(m.nrows, m.ncols, p, out), rank


def rref(m: SparseMatrix) -> tuple:
    """Reduced row echelon form and rank; zero rows are moved to the bottom."""
    if m.nrows == 0 or m.ncols == 0:
        return SparseMatrix.zeros(m.nrows, m.ncols, m.p), 0
    if m.ncols <= DENSE_COLS:
        a = np.ascontiguousarray(m.to_dense())
        piv = rref_array(a, m.p)
        return SparseMatrix.from_dense(a, m.p), len(piv)
    return _sparse_rref(m)


def _pivots(r: SparseMatrix, rank: int) -> list:
    return [r._rows[i][0][0] for i in range(rank)]


def kernel_basis(m: SparseMatrix) -> Subspace:
    """Basis (in RREF) of ``{v : m v = 0}``."""
    r, rank = rref(m)
    piv = _pivots(r, rank)
    pivset = set(piv)
    p = m.p
    vecs = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v = {f: 1}
        for i, pc in enumerate(piv):
            val = dict(r._rows[i]).get(f, 0)
            if val:
                v[pc] = (-val) % p
        vecs.append(sorted(v.items()))
    k = SparseMatrix(len(vecs), m.ncols, p, vecs)
    kr, krank = rref(k)
    return Subspace(m.ncols, SparseMatrix(krank, m.ncols, p, kr._rows[:krank]))


def row_space(m: SparseMatrix) -> Subspace:
    r, rank = rref(m)
    return Subspace(m.ncols, SparseMatrix(rank, m.ncols, m.p, r._rows[:rank]))


def solve(m: SparseMatrix, b: Sequence[int]) -> Optional[list]:
    """Some x with ``m x = b``, free variables zero; ``None`` if inconsistent."""
    if len(b) != m.nrows:
        raise FpError("length(b) must equal the number of rows")
    p = m.p
    entries = m.entries() + [(i, m.ncols, int(v) % p) for i, v in enumerate(b) if int(v) % p]
    aug = SparseMatrix.from_entries(m.nrows, m.ncols + 1, entries, p)
    r, rank = rref(aug)
    x = [0] * m.ncols
    for i in range(rank):
        row = r._rows[i]
        pc = row[0][0]
        if pc == m.ncols:
            return None
        x[pc] = dict(row).get(m.ncols, 0)
    return x


class DenseSolver:
    """Repeated solves of ``x A = y`` for a fixed dense matrix ``A``.

    Rows of ``A`` are the images of basis vectors, the layout used for maps
    between free modules. ``row_transform`` records the row operations so a
    right-hand side costs one matrix-vector product.
    """

    def __init__(self, a: np.ndarray, p: int):
        a = np.asarray(a, dtype=np.int64) % p
        self.p = p
        self.nrows, self.ncols = a.shape
        # rref of [A^T | I] gives T with T A^T = R
        at = np.ascontiguousarray(np.concatenate([a.T, np.eye(self.ncols, dtype=np.int64)], axis=1))
        piv = rref_array(at, p) if at.size else []
        piv = [c for c in piv if c < self.nrows]
        self.rank = len(piv)
        self.pivots = piv
        self.transform = at[:, self.nrows:]

    def solve(self, y) -> Optional[np.ndarray]:
        y = np.asarray(y, dtype=np.int64) % self.p
        c = (self.transform @ y) % self.p if self.ncols else np.zeros(0, dtype=np.int64)
        if np.any(c[self.rank:]):
            return None
        x = np.zeros(self.nrows, dtype=np.int64)
        for i, pc in enumerate(self.pivots):
            x[pc] = c[i]
        return x


def rank_of(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    b = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)
    return len(rref_array(b, p))
