"""The E1 term of the May spectral sequence at an odd prime.

E1 is the free graded-commutative algebra on

* ``h_{m,i}`` (m >= 1, i >= 0), tri-degree (1, 2(p^m - 1)p^i, 2m - 1), exterior;
* ``a_m`` (m >= 0), tri-degree (1, 2p^m - 1, 2m + 1), polynomial;
* ``b_{m,i}`` (m >= 1, i >= 0), tri-degree (2, 2(p^m - 1)p^{i+1}, p(2m - 1)), polynomial.

Signs follow the parity of s + t, so only the h's anticommute. The u-weight
is carried along but never used to decide vanishing.
"""

from __future__ import annotations

import bisect
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .milnor import AlgebraContext

KIND_ORDER = {"a": 0, "h": 1, "b": 2}


@dataclass(frozen=True)
class MayGenerator:
    kind: str
    m: int
    i: int
    p: int
    s: int = field(init=False, compare=False, repr=False)
    t: int = field(init=False, compare=False, repr=False)
    u: int = field(init=False, compare=False, repr=False)
    odd: bool = field(init=False, compare=False, repr=False)
    key: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        p, m, i = self.p, self.m, self.i
        if self.kind == "h":
            s, t, u = 1, 2 * (p**m - 1) * p**i, 2 * m - 1
        elif self.kind == "a":
            s, t, u = 1, 2 * p**m - 1, 2 * m + 1
        elif self.kind == "b":
            s, t, u = 2, 2 * (p**m - 1) * p ** (i + 1), p * (2 * m - 1)
        else:
            raise ValueError(f"unknown May generator kind {self.kind!r}")
        for name, val in (("s", s), ("t", t), ("u", u), ("odd", (s + t) % 2 == 1),
                          ("key", (t, KIND_ORDER[self.kind], m, i))):
            object.__setattr__(self, name, val)

    @property
    def degree(self) -> Tuple[int, int, int]:
        return (self.s, self.t, self.u)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        if self.kind == "a":
            return f"a_{self.m}"
        return f"{self.kind}_{{{self.m},{self.i}}}"


def h(p, m, i):
    return MayGenerator("h", m, i, p)


def a(p, m):
    return MayGenerator("a", m, 0, p)


def b(p, m, i):
    return MayGenerator("b", m, i, p)


@dataclass(frozen=True)
class MayMonomial:
    """Canonical product: factors sorted by generator key, exponents positive."""

    factors: Tuple[Tuple[MayGenerator, int], ...]

    @classmethod
    def of(cls, *gens: MayGenerator) -> "MayMonomial":
        sign, mono = canonicalize(list(gens))
        if mono is None or sign != 1:
            raise ValueError("factors do not form a canonical nonzero monomial with sign +1")
        return mono

    @property
    def degree(self) -> Tuple[int, int, int]:
        s = t = u = 0
        for g, e in self.factors:
            s += g.s * e
            t += g.t * e
            u += g.u * e
        return (s, t, u)

    @property
    def s(self):
        return self.degree[0]

    @property
    def t(self):
        return self.degree[1]

    @property
    def u(self):
        return self.degree[2]

    def word(self) -> List[MayGenerator]:
        return [g for g, e in self.factors for _ in range(e)]

    def __str__(self):
        if not self.factors:
            return "1"
        return "".join(str(g) + (f"^{e}" if e > 1 else "") for g, e in self.factors)


ONE = MayMonomial(())


def canonicalize(word: Sequence) -> Tuple[int, Optional[MayMonomial]]:
    """Sort a product of generators; returns (sign, monomial) or (0, None) if it vanishes.

    Items are generators or ``(generator, exponent)`` pairs.
    """
    counts: Dict[MayGenerator, int] = {}
    odds = []
    for item in word:
        g, e = item if isinstance(item, tuple) else (item, 1)
        if g.odd:
            if e != 1 or g in counts:
                return 0, None
            odds.append(g.key)
        counts[g] = counts.get(g, 0) + e
    inversions = 0
    for x in range(len(odds)):
        kx = odds[x]
        for y in range(x + 1, len(odds)):
            if odds[y] < kx:
                inversions += 1
    factors = tuple(sorted(counts.items(), key=lambda kv: kv[0].key))
    return (-1 if inversions % 2 else 1), MayMonomial(factors)


_NAME = re.compile(r"(a)_(\d+)|([hb])_\{(\d+),(\d+)\}")


def parse_monomial(text: str, p: int) -> MayMonomial:
    """Inverse of ``str``: e.g. ``a_0^2h_{1,1}h_{1,3}``; must already be canonical."""
    pos = 0
    word = []
    text = text.replace(" ", "")
    if text == "1":
        return ONE
    while pos < len(text):
        m = _NAME.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse May monomial at {text[pos:]!r}")
        if m.group(1):
            g = a(p, int(m.group(2)))
        else:
            g = MayGenerator(m.group(3), int(m.group(4)), int(m.group(5)), p)
        pos = m.end()
        e = 1
        em = re.match(r"\^(\d+)", text[pos:])
        if em:
            e = int(em.group(1))
            pos += em.end()
        word.extend([g] * e)
    sign, mono = canonicalize(word)
    if mono is None:
        raise ValueError(f"{text!r} is zero (repeated exterior factor)")
    return mono


# -- generators and enumeration ------------------------------------------------


@lru_cache(maxsize=None)
def _generators(p: int, t_max: int) -> Tuple[MayGenerator, ...]:
    out = []
    m = 0
    while 2 * p**m - 1 <= t_max:
        out.append(a(p, m))
        m += 1
    m = 1
    while 2 * (p**m - 1) <= t_max:
        i = 0
        while 2 * (p**m - 1) * p**i <= t_max:
            out.append(h(p, m, i))
            if 2 * (p**m - 1) * p ** (i + 1) <= t_max:
                out.append(b(p, m, i))
            i += 1
        m += 1
    return tuple(sorted(out, key=lambda g: g.key))


def generators_up_to(ctx: AlgebraContext, t_max: int) -> List[MayGenerator]:
    """Every generator with internal degree at most ``t_max``, ordered by (t, kind, indices)."""
    if t_max <= 0:
        return []
    return list(_generators(ctx.p, t_max))


@dataclass(frozen=True)
class MayE1Piece:
    p: int
    s: int
    t: int
    basis: Tuple[MayMonomial, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __contains__(self, mono):
        return mono in self.basis

    def is_empty(self) -> bool:
        return not self.basis


def _enumerate(p: int, s: int, t: int) -> List[MayMonomial]:
    q = 2 * (p - 1)
    if s < 0 or t < 0:
        return []
    if s == 0:
        return [ONE] if t == 0 else []
    gens = [g for g in _generators(p, t) if not (g.kind == "a" and g.m == 0)]
    ts = [g.t for g in gens]
    # best t/s ratio available among gens[:k]
    best = [0.0]
    for g in gens:
        best.append(max(best[-1], g.t / g.s))
    by_degree: Dict[Tuple[int, int], List[int]] = {}
    for k, g in enumerate(gens):
        by_degree.setdefault((g.s, g.t), []).append(k)
    out: List[List[Tuple[MayGenerator, int]]] = []
    a0 = a(p, 0)

    def rec(limit: int, s_rem: int, t_rem: int, acc: list):
        # every h/b has t divisible by q and each a_m (m >= 1) has t = 1 mod q;
        # a_0 also has t = 1, so at most s_rem factors can make up the residue
        if t_rem % q > s_rem:
            return
        # finish with a_0^s_rem
        if t_rem == s_rem:
            out.append(acc + ([(a0, s_rem)] if s_rem else []))
        # any other factor raises t - s, so t_rem must exceed s_rem
        if s_rem == 0 or t_rem <= s_rem:
            return
        if t_rem > s_rem * best[limit]:
            return
        if s_rem == 1:
            for k in by_degree.get((1, t_rem), ()):
                if k < limit:
                    out.append(acc + [(gens[k], 1)])
            return
        hi = min(limit, bisect.bisect_right(ts, t_rem))
        for k in range(hi - 1, -1, -1):
            g = gens[k]
            # at most s_rem further factors, none of degree above g.t
            if g.t * s_rem < t_rem:
                break
            emax = 1 if g.odd else min(s_rem // g.s, t_rem // g.t)
            for e in range(1, emax + 1):
                rec(k, s_rem - e * g.s, t_rem - e * g.t, acc + [(g, e)])

    rec(len(gens), s, t, [])
    monos = [MayMonomial(tuple(sorted(f, key=lambda kv: kv[0].key))) for f in out]
    return sorted(set(monos), key=_mono_key)


def _mono_key(mono: MayMonomial):
    return tuple((g.key, e) for g, e in mono.factors)


@lru_cache(maxsize=4096)
def _e1_cached(p: int, s: int, t: int) -> MayE1Piece:
    return MayE1Piece(p, s, t, tuple(_enumerate(p, s, t)))


def e1_basis(ctx: AlgebraContext, s: int, t: int) -> MayE1Piece:
    """All E1 monomials of cohomological degree s and internal degree t (every u)."""
    return _e1_cached(ctx.p, s, t)


# -- d1 --------------------------------------------------------------------------

FormalSum = Dict[MayMonomial, int]


@lru_cache(maxsize=None)
def d1_generator(g: MayGenerator) -> Tuple[Tuple[int, Tuple[MayGenerator, ...]], ...]:
    """d1 of one generator as (coeff, word) pairs."""
    p = g.p
    if g.kind == "h":
        return tuple((-1, (h(p, g.m - k, k + g.i), h(p, k, g.i))) for k in range(1, g.m))
    if g.kind == "a":
        return tuple((-1, (h(p, g.m - k, k), a(p, k))) for k in range(0, g.m))
    return ()


def d1(x: Union[MayMonomial, FormalSum]) -> FormalSum:
    """Leibniz extension of d1 with Koszul signs; coefficients mod p.

    For an even factor d(g^e) = e g^(e-1) d(g), so powers are never expanded.
    """
    if isinstance(x, MayMonomial):
        x = {x: 1}
    out: FormalSum = {}
    for mono, c in x.items():
        if not mono.factors:
            continue
        facs = mono.factors
        p = facs[0][0].p
        sign = 1
        for pos, (g, e) in enumerate(facs):
            terms = d1_generator(g)
            if terms:
                before = facs[:pos]
                after = facs[pos + 1:]
                rest = ((g, e - 1),) if e > 1 else ()
                for coeff, repl in terms:
                    sg, res = canonicalize(before + tuple((r, 1) for r in repl) + rest + after)
                    if res is None:
                        continue
                    v = (out.get(res, 0) + sg * sign * coeff * c * e) % p
                    if v:
                        out[res] = v
                    else:
                        out.pop(res, None)
            if g.odd:
                sign = -sign
    return out


def d1_squared(mono: MayMonomial) -> FormalSum:
    return d1(d1(mono))


def monomials_up_to(ctx: AlgebraContext, t_max: int, include_a0: bool = True) -> Iterable[MayMonomial]:
    """Every monomial with 0 < t <= t_max (s is unbounded when a_0 is allowed)."""
    p = ctx.p
    gens = [g for g in generators_up_to(ctx, t_max) if include_a0 or not (g.kind == "a" and g.m == 0)]

    def rec(k, t_rem, acc):
        if k == len(gens):
            if acc:
                yield MayMonomial(tuple(acc))
            return
        g = gens[k]
        yield from rec(k + 1, t_rem, acc)
        emax = 1 if g.odd else t_rem // g.t
        for e in range(1, emax + 1):
            if e * g.t > t_rem:
                break
            yield from rec(k + 1, t_rem - e * g.t, acc + [(g, e)])

    yield from rec(0, t_max, [])


# -- scans and reports -------------------------------------------------------------


def scan_entry(p: int, s: int, t: int) -> dict:
    piece = _e1_cached(p, s, t)
    return {"p": p, "s": s, "t": t, "empty": piece.is_empty(), "witnesses": [str(m) for m in piece.basis]}


def vanishing_scan(ctx: AlgebraContext, s: int, t_formula: Union[str, Callable[..., int]], n_range: Iterable[int]) -> List[dict]:
    """E1 emptiness at (s, t(n)) for each n; nonempty entries list their monomials."""
    from .formula import compile_formula

    f = compile_formula(t_formula) if isinstance(t_formula, str) else t_formula
    out = []
    for n in n_range:
        t = f(ctx.p, n)
        if t < 0:
            raise ValueError(f"degree formula gives {t} < 0 at n={n}")
        entry = scan_entry(ctx.p, s, t)
        entry["n"] = n
        out.append(entry)
    return out


class UpperBoundViolation(AssertionError):
    pass


def upper_bound_check(chart, raise_on_violation: bool = True) -> dict:
    """dim Ext^{s,t} <= dim E1^{s,t} over the chart's certified window."""
    ctx = AlgebraContext(chart.p)
    violations = []
    checked = 0
    for s in range(chart.max_s + 1):
        for t in range(chart.max_t + 1):
            checked += 1
            ext = chart.entries.get((s, t), 0)
            if ext == 0:
                continue
            e1 = e1_basis(ctx, s, t).dim
            if ext > e1:
                violations.append({"s": s, "t": t, "ext": ext, "e1": e1})
    report = {"p": chart.p, "max_s": chart.max_s, "max_t": chart.max_t, "checked": checked,
              "violations": violations, "ok": not violations}
    if violations and raise_on_violation:
        raise UpperBoundViolation(f"Ext exceeds E1 at {[(v['s'], v['t']) for v in violations]}")
    return report


def report_json(entries: List[dict]) -> str:
    return json.dumps(entries, sort_keys=True, indent=1)
