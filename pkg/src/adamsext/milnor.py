"""The mod-p Steenrod algebra for odd p in the Milnor basis.

A basis monomial ``Q(E)P(R)`` is a :class:`MilnorElement` with ``q_part = E``
(strictly increasing) and ``p_part = R`` (no trailing zeros). Products follow
Milnor's formula: the Q's of the right factor are commuted left through
``P(R)`` using ``P(R) Q_k = Q_k P(R) + sum_j Q_{k+j} P(R - p^k e_j)``, then the
P-parts are multiplied by summing over Milnor matrices with multinomial
coefficients reduced mod p by Lucas' theorem.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterator, NamedTuple, Tuple

from .fplinalg import check_prime


@dataclass(frozen=True)
class AlgebraContext:
    p: int

    def __post_init__(self):
        check_prime(self.p)

    @property
    def q(self) -> int:
        return 2 * (self.p - 1)


class MilnorElement(NamedTuple):
    q_part: Tuple[int, ...] = ()
    p_part: Tuple[int, ...] = ()

    def __str__(self):
        if not self.q_part and not self.p_part:
            return "1"
        s = "".join(f"Q{e}" for e in self.q_part)
        if self.p_part:
            s += "P(" + ",".join(map(str, self.p_part)) + ")"
        return s


UNIT = MilnorElement()


def make_monomial(q_part=(), p_part=()) -> MilnorElement:
    q_part = tuple(q_part)
    if any(a >= b for a, b in zip(q_part, q_part[1:])) or any(e < 0 for e in q_part):
        raise ValueError(f"q_part must be strictly increasing naturals: {q_part}")
    p_part = list(p_part)
    if any(r < 0 for r in p_part):
        raise ValueError(f"p_part must be naturals: {p_part}")
    while p_part and p_part[-1] == 0:
        p_part.pop()
    return MilnorElement(q_part, tuple(p_part))


def Q(i: int) -> MilnorElement:
    return MilnorElement((i,), ())


def P(*r: int) -> MilnorElement:
    return make_monomial((), r)


def degree_of(x: MilnorElement, ctx: AlgebraContext) -> int:
    p = ctx.p
    return sum(2 * p**e - 1 for e in x.q_part) + sum(2 * (p ** (j + 1) - 1) * r for j, r in enumerate(x.p_part))


def monomial_key(x: MilnorElement) -> tuple:
    """Fixed monomial order: Q-part as a bitset, then the P-part."""
    return (sum(1 << e for e in x.q_part), x.p_part)


def _p_parts(p: int, t: int, j: int) -> Iterator[tuple]:
    """Sequences (r_1..r_j) with sum r_i 2(p^i - 1) = t, using parts up to index j."""
    if j == 0:
        if t == 0:
            yield ()
        return
    w = 2 * (p**j - 1)
    for rj in range(t // w + 1):
        for rest in _p_parts(p, t - rj * w, j - 1):
            yield rest + (rj,)


_basis_lock = threading.Lock()
_basis_cache: Dict[tuple, tuple] = {}


def basis_in_degree(ctx: AlgebraContext, t: int) -> tuple:
    """All Milnor monomials of degree ``t``, sorted by :func:`monomial_key`."""
    key = (ctx.p, t)
    hit = _basis_cache.get(key)
    if hit is not None:
        return hit
    p = ctx.p
    out = []
    if t >= 0:
        qdeg = []
        e = 0
        while 2 * p**e - 1 <= t:
            qdeg.append(2 * p**e - 1)
            e += 1
        jmax = 0
        while 2 * (p ** (jmax + 1) - 1) <= t:
            jmax += 1
        for k in range(len(qdeg) + 1):
            for E in combinations(range(len(qdeg)), k):
                rem = t - sum(qdeg[i] for i in E)
                if rem < 0:
                    continue
                for R in _p_parts(p, rem, jmax):
                    out.append(make_monomial(E, R))
    out.sort(key=monomial_key)
    res = tuple(out)
    with _basis_lock:
        _basis_cache.setdefault(key, res)
    return _basis_cache[key]


# --- coefficients ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _factorials(p: int) -> tuple:
    f = [1] * p
    for i in range(1, p):
        f[i] = f[i - 1] * i % p
    return tuple(f)


def multinomial_mod_p(parts, p: int) -> int:
    """(sum parts)! / prod(parts!) mod p via Lucas: digitwise, zero on any carry."""
    parts = [x for x in parts if x]
    if len(parts) <= 1:
        return 1
    fact = _factorials(p)
    result = 1
    parts = list(parts)
    while any(parts):
        digits = [x % p for x in parts]
        total = sum(digits)
        if total >= p:
            return 0
        num = fact[total]
        den = 1
        for d in digits:
            den = den * fact[d] % p
        result = result * num * pow(den, p - 2, p) % p
        parts = [x // p for x in parts]
    return result


def binomial_mod_p(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    return multinomial_mod_p([k, n - k], p)


# --- products of basis monomials ----------------------------------------------


def _insert_q(q_part: tuple, k: int):
    """Append Q_k on the right of Q(q_part) and sort; returns (sign, new q_part) or None."""
    if k in q_part:
        return None
    larger = sum(1 for e in q_part if e > k)
    new = tuple(sorted(q_part + (k,)))
    return (-1 if larger % 2 else 1), new


def _milnor_matrices(p: int, r: tuple, s: tuple) -> Iterator[list]:
    """Yield Milnor matrices as dict {(i, j): x_ij} for i, j >= 0, excluding (0, 0)."""
    rows = len(r)
    cols = len(s)
    powers = [p**j for j in range(cols + 1)]

    def fill_row(i, colsum_left, acc):
        if i > rows:
            m = dict(acc)
            for j in range(1, cols + 1):
                m[(0, j)] = colsum_left[j - 1]
            yield m
            return
        ri = r[i - 1]

        def fill_col(j, budget, left, row_acc):
            if j > cols:
                m = dict(row_acc)
                m[(i, 0)] = budget
                yield from fill_row(i + 1, left, m)
                return
            pj = powers[j]
            top = min(budget // pj, left[j - 1])
            for x in range(top + 1):
                if x:
                    row_acc[(i, j)] = x
                nl = left
                if x:
                    nl = list(left)
                    nl[j - 1] -= x
                yield from fill_col(j + 1, budget - x * pj, nl, row_acc)
                if x:
                    del row_acc[(i, j)]

        yield from fill_col(1, ri, colsum_left, acc)

    yield from fill_row(1, list(s), {})


@lru_cache(maxsize=None)
def p_part_product(p: int, r: tuple, s: tuple) -> tuple:
    """P(r) P(s) as a tuple of (p_part, coeff) with coeff in [1, p)."""
    if not r:
        return ((s, 1),)
    if not s:
        return ((r, 1),)
    out: Dict[tuple, int] = {}
    ndiag = len(r) + len(s)
    for m in _milnor_matrices(p, r, s):
        coeff = 1
        t = []
        for n in range(1, ndiag + 1):
            diag = [m.get((i, n - i), 0) for i in range(0, n + 1)]
            c = multinomial_mod_p(diag, p)
            if c == 0:
                coeff = 0
                break
            coeff = coeff * c % p
            t.append(sum(diag))
        if coeff == 0:
            continue
        while t and t[-1] == 0:
            t.pop()
        key = tuple(t)
        out[key] = (out.get(key, 0) + coeff) % p
    return tuple(sorted((k, v) for k, v in out.items() if v))


@lru_cache(maxsize=None)
def monomial_product(p: int, a: MilnorElement, b: MilnorElement) -> tuple:
    """Product of two basis monomials as a sorted tuple of (MilnorElement, coeff)."""
    # commute Q(b.q_part) left through P(a.p_part)
    stage: Dict[tuple, int] = {(a.q_part, a.p_part): 1}
    for k in b.q_part:
        nxt: Dict[tuple, int] = {}
        for (qp, rp), c in stage.items():
            ins = _insert_q(qp, k)
            if ins is not None:
                sg, nq = ins
                key = (nq, rp)
                nxt[key] = (nxt.get(key, 0) + sg * c) % p
            pk = p**k
            for j in range(1, len(rp) + 1):
                if rp[j - 1] < pk:
                    continue
                ins = _insert_q(qp, k + j)
                if ins is None:
                    continue
                sg, nq = ins
                nr = list(rp)
                nr[j - 1] -= pk
                while nr and nr[-1] == 0:
                    nr.pop()
                key = (nq, tuple(nr))
                nxt[key] = (nxt.get(key, 0) + sg * c) % p
        stage = {k2: v for k2, v in nxt.items() if v}
    out: Dict[MilnorElement, int] = {}
    for (qp, rp), c in stage.items():
        for t, c2 in p_part_product(p, rp, b.p_part):
            key = MilnorElement(qp, t)
            out[key] = (out.get(key, 0) + c * c2) % p
    return tuple(sorted(((k, v) for k, v in out.items() if v), key=lambda kv: monomial_key(kv[0])))


# --- algebra elements -----------------------------------------------------------


class ContextMismatch(ValueError):
    pass


class AlgebraElement:
    """A homogeneous F_p-linear combination of Milnor monomials."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: AlgebraContext, terms=None):
        self.ctx = ctx
        p = ctx.p
        clean = {}
        degree = None
        for m, c in (terms or {}).items():
            c %= p
            if not c:
                continue
            d = degree_of(m, ctx)
            if degree is None:
                degree = d
            elif d != degree:
                raise ValueError("AlgebraElement terms must share one degree")
            clean[m] = c
        self.terms = clean

    @classmethod
    def monomial(cls, ctx, m: MilnorElement, coeff: int = 1) -> "AlgebraElement":
        return cls(ctx, {m: coeff})

    @property
    def degree(self):
        for m in self.terms:
            return degree_of(m, self.ctx)
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            raise TypeError("expected AlgebraElement")
        if other.ctx != self.ctx:
            raise ContextMismatch(f"contexts differ: p={self.ctx.p} vs p={other.ctx.p}")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return AlgebraElement(self.ctx, t)

    def __neg__(self):
        return AlgebraElement(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "AlgebraElement":
        return AlgebraElement(self.ctx, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=monomial_key):
            c = self.terms[m]
            parts.append(str(m) if c == 1 else f"{c}*{m}")
        return " + ".join(parts)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    if a.ctx != b.ctx:
        raise ContextMismatch(f"contexts differ: p={a.ctx.p} vs p={b.ctx.p}")
    p = a.ctx.p
    out: Dict[MilnorElement, int] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            for m, c in monomial_product(p, ma, mb):
                out[m] = (out.get(m, 0) + ca * cb * c) % p
    return AlgebraElement(a.ctx, out)
