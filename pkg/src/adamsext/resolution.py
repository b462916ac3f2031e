"""Degree-truncated minimal free resolutions over the Steenrod algebra.

Filtrations are computed in order. Inside filtration ``s`` the kernels of
``d_{s-1}`` at each internal degree are independent (optionally computed on
a thread pool); new generators are then adjoined serially in increasing
degree, each one hitting the next kernel vector not yet covered by the image.
Since every choice runs through RREF with a fixed pivot rule, the output does
not depend on the schedule.

Free-module elements are dicts ``{(generator, MilnorElement): coeff}``; the
basis of ``(F_s)_t`` lists ``(g, m)`` by generator index, then by the fixed
monomial order.
"""

from __future__ import annotations

import json
import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .amodules import FDModule, ModuleMap, ModuleSES
from .fplinalg import DenseSolver, rank_of, rref_array
from . import kernels
from .milnor import UNIT, AlgebraContext, MilnorElement, basis_in_degree, monomial_product

FORMAT_NAME = "adamsext-resolution"
FORMAT_VERSION = 1

FreeElement = Dict[Tuple[int, MilnorElement], int]


class ResolutionError(RuntimeError):
    pass


class LiftError(ResolutionError):
    pass


class WindowError(ValueError):
    pass


class CorruptResolution(ValueError):
    pass


class VersionMismatch(CorruptResolution):
    pass


def _kernel_of_rows(a: np.ndarray, p: int) -> np.ndarray:
    """RREF basis (as rows) of {x : x a = 0} for a dense matrix ``a``."""
    n, m = a.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    aug = np.zeros((n, m + n), dtype=np.int64)
    aug[:, :m] = a % p
    aug[:, m:] = np.eye(n, dtype=np.int64)
    piv = rref_array(aug, p)
    first_free = sum(1 for c in piv if c < m)
    ker = np.ascontiguousarray(aug[first_free:len(piv), m:])
    if ker.shape[0]:
        piv2 = rref_array(ker, p)
        ker = np.ascontiguousarray(ker[: len(piv2)])
    return ker


class FreeResolution:
    """A minimal resolution ``... -> F_1 -> F_0 -> module`` in a finite window."""

    def __init__(self, module: FDModule):
        self.module = module
        self.ctx: AlgebraContext = module.ctx
        self.p = module.ctx.p
        self.gens: List[List[int]] = []
        self.diffs: List[list] = []
        self.computed_t: List[int] = []
        self.partial = False
        self._basis_cache: Dict[Tuple[int, int], tuple] = {}
        self._matrix_cache: Dict[Tuple[int, int], np.ndarray] = {}

    # -- shape --------------------------------------------------------------

    @property
    def max_s(self) -> int:
        return len(self.gens) - 1

    @property
    def max_t(self) -> int:
        return min(self.computed_t) if self.computed_t else -1

    def window(self) -> Tuple[int, int]:
        return self.max_s, self.max_t

    def covers(self, s: int, t: int) -> bool:
        return 0 <= s <= self.max_s and t <= self.computed_t[s]

    def generators(self, s: int) -> List[int]:
        return self.gens[s] if s <= self.max_s else []

    def gens_in_degree(self, s: int, t: int) -> List[int]:
        return [g for g, d in enumerate(self.generators(s)) if d == t]

    def dim_ext(self, s: int, t: int) -> int:
        if not self.covers(s, t):
            raise WindowError(f"Ext^{{{s},{t}}} lies outside the computed window {self.window()}")
        return len(self.gens_in_degree(s, t))

    # -- bases and matrices -------------------------------------------------

    def basis(self, s: int, t: int) -> tuple:
        """Basis of (F_s)_t as a tuple of (generator, monomial)."""
        key = (s, t)
        hit = self._basis_cache.get(key)
        if hit is not None:
            return hit
        out = []
        for g, d in enumerate(self.gens[s]):
            if d <= t:
                out.extend((g, m) for m in basis_in_degree(self.ctx, t - d))
        res = tuple(out)
        if t <= self.computed_t[s]:
            self._basis_cache[key] = res
        return res

    def target_basis(self, s: int, t: int):
        if s == 0:
            return self.module.indices_in_degree(t)
        return self.basis(s - 1, t)

    def act_free(self, m: MilnorElement, x: FreeElement) -> FreeElement:
        p = self.p
        out: FreeElement = {}
        for (h, b), c in x.items():
            for prod, c2 in monomial_product(p, m, b):
                key = (h, prod)
                out[key] = (out.get(key, 0) + c * c2) % p
        return {k: v for k, v in out.items() if v}

    def _image_of_basis(self, s: int, g: int, m: MilnorElement):
        """d_s(m . g): a free element of F_{s-1}, or a module vector if s = 0."""
        if s == 0:
            return _module_act(self.module, m, self.diffs[0][g])
        return self.act_free(m, self.diffs[s][g])

    def _row_matrix(self, s: int, t: int, rows) -> np.ndarray:
        tb = self.target_basis(s, t)
        col = {b: k for k, b in enumerate(tb)}
        a = np.zeros((len(rows), len(tb)), dtype=np.int64)
        for r, (g, m) in enumerate(rows):
            for key, c in self._image_of_basis(s, g, m).items():
                a[r, col[key]] = c
        return a

    def differential_matrix(self, s: int, t: int) -> np.ndarray:
        """Matrix of d_s: (F_s)_t -> (F_{s-1})_t (or the module for s = 0), rows = source."""
        key = (s, t)
        hit = self._matrix_cache.get(key)
        if hit is not None:
            return hit
        a = self._row_matrix(s, t, self.basis(s, t))
        if t <= self.computed_t[s]:
            self._matrix_cache[key] = a
        return a

    def to_vector(self, s: int, t: int, x: FreeElement) -> np.ndarray:
        idx = {b: k for k, b in enumerate(self.basis(s, t))}
        v = np.zeros(len(idx), dtype=np.int64)
        for key, c in x.items():
            v[idx[key]] = c
        return v

    def from_vector(self, s: int, t: int, v) -> FreeElement:
        return {b: int(c) for b, c in zip(self.basis(s, t), v) if int(c) % self.p}

    # -- computation --------------------------------------------------------

    def _kernel_at(self, s: int, t: int) -> np.ndarray:
        """Rows spanning the cycles that filtration s must cover in degree t."""
        if s == 0:
            n = self.module.dim_in_degree(t)
            return np.eye(n, dtype=np.int64)
        return _kernel_of_rows(self.differential_matrix(s - 1, t), self.p)

    def extend(self, max_s: int, max_t: int, workers: int = 1, time_budget: Optional[float] = None) -> "FreeResolution":
        if max_s < 0 or max_t < 0:
            raise ValueError("bounds must be nonnegative")
        deadline = None if time_budget is None else time.monotonic() + time_budget
        for s in range(max_s + 1):
            if s > self.max_s:
                self.gens.append([])
                self.diffs.append([])
                self.computed_t.append(-1)
            start = self.computed_t[s] + 1
            stop = max_t if s == 0 else min(max_t, self.computed_t[s - 1])
            if stop < start:
                continue
            degrees = list(range(start, stop + 1))
            if workers > 1 and len(degrees) > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    kers = list(pool.map(lambda t: self._kernel_at(s, t), degrees))
            else:
                kers = [self._kernel_at(s, t) for t in degrees]
            for t, ker in zip(degrees, kers):
                if deadline is not None and time.monotonic() > deadline:
                    self.partial = True
                    return self
                self._adjoin(s, t, ker)
                self.computed_t[s] = t
        return self

    def _adjoin(self, s: int, t: int, ker: np.ndarray):
        p = self.p
        if ker.shape[0] == 0:
            return
        old = self.basis(s, t)
        img = self._row_matrix(s, t, old) if old else np.zeros((0, ker.shape[1]), dtype=np.int64)
        img = np.ascontiguousarray(img % p)
        piv = rref_array(img, p) if img.shape[0] else []
        span = np.ascontiguousarray(img[: len(piv)])
        tb = self.target_basis(s, t)
        for row in ker:
            v = np.ascontiguousarray(row.reshape(1, -1).copy())
            if len(piv):
                kernels.reduce_rows(span, piv, v, p)
            if not np.any(v):
                continue
            vec = v[0]
            if s == 0:
                elem = {int(tb[k]): int(c) for k, c in enumerate(vec) if c}
            else:
                elem = {tb[k]: int(c) for k, c in enumerate(vec) if c}
            self.gens[s].append(t)
            self.diffs[s].append(elem)
            span = np.ascontiguousarray(np.vstack([span, vec.reshape(1, -1)]))
            piv = rref_array(span, p)
            span = np.ascontiguousarray(span[: len(piv)])
        self._basis_cache.pop((s, t), None)
        self._matrix_cache.pop((s, t), None)

    # -- checks -------------------------------------------------------------

    def check(self) -> List[str]:
        """d^2 = 0 on every generator and minimality of every differential."""
        problems = []
        for s in range(1, self.max_s + 1):
            for g, elem in enumerate(self.diffs[s]):
                if any(m == UNIT for (_, m) in elem):
                    problems.append(f"non-minimal: d_{s}(g{g}) has a degree-0 coefficient")
                if s == 1:
                    out: Dict[int, int] = {}
                    for (h, m), c in elem.items():
                        for j, cj in _module_act(self.module, m, self.diffs[0][h]).items():
                            out[j] = (out.get(j, 0) + c * cj) % self.p
                    if any(out.values()):
                        problems.append(f"d^2 != 0 at s=1, g{g}")
                else:
                    out2: FreeElement = {}
                    for (h, m), c in elem.items():
                        for key, c2 in self.act_free(m, self.diffs[s - 1][h]).items():
                            out2[key] = (out2.get(key, 0) + c * c2) % self.p
                    if any(out2.values()):
                        problems.append(f"d^2 != 0 at s={s}, g{g}")
        return problems


def _module_act(mod: FDModule, m: MilnorElement, v: Dict[int, int]) -> Dict[int, int]:
    p = mod.ctx.p
    out: Dict[int, int] = {}
    for i, c in v.items():
        for j, cj in mod.act_monomial(m, i).items():
            out[j] = (out.get(j, 0) + c * cj) % p
    return {j: c for j, c in out.items() if c}


def minimal_resolve(module: FDModule, max_s: int, max_t: int, workers: int = 1,
                    time_budget: Optional[float] = None) -> FreeResolution:
    return FreeResolution(module).extend(max_s, max_t, workers=workers, time_budget=time_budget)


# -- Ext charts --------------------------------------------------------------


@dataclass
class ExtChart:
    p: int
    module: str
    max_s: int
    max_t: int
    entries: Dict[Tuple[int, int], int]
    labels: Dict[Tuple[int, int], List[str]] = field(default_factory=dict)

    def dim(self, s: int, t: int) -> int:
        if not (0 <= s <= self.max_s and t <= self.max_t):
            raise WindowError(f"(s, t) = ({s}, {t}) is outside the certified window ({self.max_s}, {self.max_t})")
        return self.entries.get((s, t), 0)

    def nonzero(self, s: int) -> List[int]:
        return sorted(t for (ss, t), d in self.entries.items() if ss == s and d)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "module": self.module,
            "max_s": self.max_s,
            "max_t": self.max_t,
            "entries": [
                {"s": s, "t": t, "dim": d, "labels": list(self.labels.get((s, t), []))}
                for (s, t), d in sorted(self.entries.items())
                if d
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "ExtChart":
        entries = {}
        labels = {}
        for e in data["entries"]:
            key = (int(e["s"]), int(e["t"]))
            entries[key] = int(e["dim"])
            if e.get("labels"):
                labels[key] = list(e["labels"])
        return cls(int(data["p"]), data["module"], int(data["max_s"]), int(data["max_t"]), entries, labels)


def sphere_labels(p: int, s: int, t: int) -> List[str]:
    """Names from the classical Ext^1 / Ext^2 lists; advisory metadata only."""
    q = 2 * (p - 1)
    out: List[str] = []
    if s == 0 and t == 0:
        return ["1"]
    if s == 1:
        if t == 1:
            out.append("a_0")
        i = 0
        while p**i * q <= t:
            if p**i * q == t:
                out.append(f"h_{i}")
            i += 1
    if s == 2:
        if t == 2:
            out.append("a_0^2")
        if t == 2 * q + 1:
            out.append("alpha_2")
        i = 0
        while p**i * q <= t:
            pi = p**i
            if i > 0 and pi * q + 1 == t:
                out.append(f"a_0h_{i}")
            if p * pi * q + 2 * pi * q == t:
                out.append(f"g_{i}")
            if 2 * p * pi * q + pi * q == t:
                out.append(f"k_{i}")
            if p * pi * q == t:
                out.extend([f"b_{i}", f"e_{i}"])
            j = i + 2
            while pi * q + p**j * q <= t:
                if pi * q + p**j * q == t:
                    out.append(f"h_{i}h_{j}")
                j += 1
            i += 1
    return out


def ext_chart(r: FreeResolution, labels: Optional[bool] = None) -> ExtChart:
    max_s, max_t = r.window()
    entries = {}
    for s in range(max_s + 1):
        for d in r.gens[s]:
            if d <= max_t:
                entries[(s, d)] = entries.get((s, d), 0) + 1
    lab = {}
    if labels is None:
        labels = r.module.name == "sphere"
    if labels:
        for key in entries:
            names = sphere_labels(r.p, *key)
            if names:
                lab[key] = names
    return ExtChart(r.p, r.module.name, max_s, max_t, entries, lab)


def ext2_degree_audit(chart: ExtChart) -> List[dict]:
    """Compare the chart with the classical Ext^2 degree list, formula by formula.

    The list as usually printed gives ``2p^{i+1} + p^i q`` for ``k_i``; the
    degree used here is ``2p^{i+1}q + p^i q``. Both are reported so that any
    disagreement stays visible.
    """
    p = chart.p
    q = 2 * (p - 1)
    rows = []

    def add(name, t, source):
        if t > chart.max_t:
            return
        rows.append({"name": name, "t": t, "formula": source, "dim": chart.dim(2, t) if chart.max_s >= 2 else None})

    add("alpha_2", 2 * q + 1, "2q+1")
    add("a_0^2", 2, "2")
    i = 0
    while p**i * q <= chart.max_t:
        pi = p**i
        if i > 0:
            add(f"a_0h_{i}", pi * q + 1, "p^iq+1")
        add(f"g_{i}", p * pi * q + 2 * pi * q, "p^{i+1}q+2p^iq")
        add(f"k_{i}", 2 * p * pi + pi * q, "2p^{i+1}+p^iq (as printed)")
        add(f"k_{i}", 2 * p * pi * q + pi * q, "2p^{i+1}q+p^iq (adopted)")
        add(f"e_{i}", p * pi * q, "p^{i+1}q")
        j = i + 2
        while pi * q + p**j * q <= chart.max_t:
            add(f"h_{i}h_{j}", pi * q + p**j * q, "p^iq+p^jq")
            j += 1
        i += 1
    for r in rows:
        r["consistent"] = r["dim"] is None or r["dim"] >= 1
    return rows


# -- chain maps -----------------------------------------------------------------


@dataclass
class ChainMap:
    """Maps f_k: F_{s0+k}(source) -> F_k(target), lowering internal degree by ``shift``."""

    source: FreeResolution
    target: FreeResolution
    s0: int
    shift: int
    maps: List[Dict[int, FreeElement]]

    def induced(self, k: int, t: int) -> np.ndarray:
        """Matrix of Ext^{k, t}(target) -> Ext^{s0+k, t+shift}(source) on generator functionals.

        Rows: target generators of degree t; columns: source generators of
        degree t + shift.
        """
        tgt = self.target.gens_in_degree(k, t)
        src = self.source.gens_in_degree(self.s0 + k, t + self.shift)
        col = {g: j for j, g in enumerate(src)}
        row = {h: i for i, h in enumerate(tgt)}
        a = np.zeros((len(tgt), len(src)), dtype=np.int64)
        if k < len(self.maps):
            for g in src:
                for (h, m), c in self.maps[k].get(g, {}).items():
                    if m == UNIT and h in row:
                        a[row[h], col[g]] = c
        return a

    def apply_to_cocycle(self, k: int, t: int, phi: Sequence[int]) -> np.ndarray:
        a = self.induced(k, t)
        return (np.asarray(phi, dtype=np.int64) @ a) % self.source.p if a.size else np.zeros(a.shape[1], dtype=np.int64)


def lift_chain_map(source: FreeResolution, target: FreeResolution, s0: int, shift: int,
                   initial: Callable[[int], Dict[int, int]], max_k: int, max_t: int) -> ChainMap:
    """Lift an A-map F_{s0}(source) -> target.module to a chain map.

    ``initial(g)`` is the image of generator g (of degree d) in the target
    module, in degree ``d - shift``. Generators of source degree above
    ``max_t`` are skipped.
    """
    p = source.p
    if s0 + max_k > source.max_s or max_k > target.max_s:
        raise WindowError(f"lift needs source filtration {s0 + max_k} and target filtration {max_k}")
    maps: List[Dict[int, FreeElement]] = []
    solvers: Dict[Tuple[int, int], DenseSolver] = {}

    def solver(k, t):
        key = (k, t)
        if key not in solvers:
            solvers[key] = DenseSolver(target.differential_matrix(k, t), p)
        return solvers[key]

    for k in range(max_k + 1):
        fk: Dict[int, FreeElement] = {}
        for g, d in enumerate(source.gens[s0 + k]):
            if d > max_t or d > source.computed_t[s0 + k]:
                continue
            tdeg = d - shift
            if tdeg < 0 or not target.covers(k, tdeg):
                if tdeg >= 0:
                    raise WindowError(f"target resolution does not cover (s, t) = ({k}, {tdeg})")
                fk[g] = {}
                continue
            if k == 0:
                v = initial(g)
                tb = target.module.indices_in_degree(tdeg)
                y = np.zeros(len(tb), dtype=np.int64)
                pos = {j: i for i, j in enumerate(tb)}
                for j, c in v.items():
                    y[pos[j]] = c
            else:
                prev = maps[k - 1]
                acc: FreeElement = {}
                for (h, m), c in source.diffs[s0 + k][g].items():
                    for key, c2 in target.act_free(m, prev.get(h, {})).items():
                        acc[key] = (acc.get(key, 0) + c * c2) % p
                y = target.to_vector(k - 1, tdeg, acc)
            if not np.any(y):
                fk[g] = {}
                continue
            x = solver(k, tdeg).solve(y)
            if x is None:
                raise LiftError(f"no lift at filtration {k}, degree {tdeg}")
            fk[g] = target.from_vector(k, tdeg, x)
        maps.append(fk)
    return ChainMap(source, target, s0, shift, maps)


def lift_module_map(f: ModuleMap, rs: FreeResolution, rt: FreeResolution, max_s: Optional[int] = None,
                    max_t: Optional[int] = None) -> ChainMap:
    """Chain map over ``f: rs.module -> rt.module`` (f raises degree by ``f.shift``)."""
    if max_s is None:
        max_s = min(rs.max_s, rt.max_s)
    if max_t is None:
        max_t = min(rs.max_t, rt.max_t - f.shift)

    def initial(g):
        return f.apply(rs.diffs[0][g])

    return lift_chain_map(rs, rt, 0, -f.shift, initial, max_s, max_t)


def connecting_chain_map(ses: ModuleSES, r_sub: FreeResolution, r_quot: FreeResolution,
                         max_s: Optional[int] = None, max_t: Optional[int] = None) -> ChainMap:
    """Chain map F_{1+k}(quotient) -> F_k(sub) realising the extension class of ``ses``.

    Its induced map is the connecting homomorphism
    Ext^{s, t}(sub) -> Ext^{s+1, t + shift}(quotient), with the sub taken
    unsuspended.
    """
    p = r_quot.p
    mid = ses.middle
    k = ses.shift
    if max_s is None:
        max_s = min(r_quot.max_s - 1, r_sub.max_s)
    if max_t is None:
        max_t = min(r_quot.max_t, r_sub.max_t + k)
    if max_s < 0:
        return ChainMap(r_quot, r_sub, 1, k, [])
    # lambda: F_0(quotient) -> middle lifting the augmentation
    lam: Dict[int, Dict[int, int]] = {}
    for g, d in enumerate(r_quot.gens[0]):
        target = r_quot.diffs[0][g]
        pm = ses.projection.matrix_in_degree(d)
        mids = mid.indices_in_degree(d)
        quos = ses.quotient.indices_in_degree(d)
        y = np.zeros(len(quos), dtype=np.int64)
        pos = {j: i for i, j in enumerate(quos)}
        for j, c in target.items():
            y[pos[j]] = c
        x = DenseSolver(pm, p).solve(y)
        if x is None:
            raise LiftError("projection is not surjective")
        lam[g] = {mids[i]: int(c) for i, c in enumerate(x) if c}

    def initial(g):
        d = r_quot.gens[1][g]
        acc: Dict[int, int] = {}
        for (h, m), c in r_quot.diffs[1][g].items():
            for j, cj in _module_act(mid, m, lam[h]).items():
                acc[j] = (acc.get(j, 0) + c * cj) % p
        im = ses.inclusion.matrix_in_degree(d - k)
        subs = ses.sub.indices_in_degree(d - k)
        mids = mid.indices_in_degree(d)
        y = np.zeros(len(mids), dtype=np.int64)
        pos = {j: i for i, j in enumerate(mids)}
        for j, c in acc.items():
            if c:
                y[pos[j]] = c
        if not np.any(y):
            return {}
        x = DenseSolver(im, p).solve(y)
        if x is None:
            raise LiftError("boundary does not land in the sub module")
        return {subs[i]: int(c) for i, c in enumerate(x) if c}

    return lift_chain_map(r_quot, r_sub, 1, k, initial, max_s, max_t)


def connecting_homomorphism(ses: ModuleSES, r_sub: FreeResolution, r_quot: FreeResolution,
                            max_s: Optional[int] = None, max_t: Optional[int] = None) -> Dict[Tuple[int, int], np.ndarray]:
    """Matrices of delta: Ext^{s,t}(sub) -> Ext^{s+1,t+shift}(quotient), keyed by (s, t).

    Rows index sub-side generators, columns quotient-side generators.
    """
    cm = connecting_chain_map(ses, r_sub, r_quot, max_s, max_t)
    out = {}
    if not cm.maps:
        return out
    top_t = min(r_quot.max_t, r_sub.max_t + ses.shift) if max_t is None else max_t
    for s in range(len(cm.maps)):
        for t in range(0, top_t - ses.shift + 1):
            if not r_sub.covers(s, t) or not r_quot.covers(s + 1, t + ses.shift):
                continue
            out[(s, t)] = cm.induced(s, t)
    return out


def induced_map(cm: ChainMap, k: int, t: int) -> np.ndarray:
    return cm.induced(k, t)


# -- cocycles and Yoneda products ---------------------------------------------


@dataclass
class Cocycle:
    resolution: FreeResolution
    s: int
    t: int
    vector: Tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.vector)


def basis_cocycle(r: FreeResolution, s: int, t: int, index: int = 0) -> Cocycle:
    n = r.dim_ext(s, t)
    if not 0 <= index < n:
        raise WindowError(f"Ext^{{{s},{t}}} has dimension {n}; no basis element {index}")
    v = [0] * n
    v[index] = 1
    return Cocycle(r, s, t, tuple(v))


def yoneda_product(a: Cocycle, b: Cocycle) -> Cocycle:
    """The product a . b, computed as a composed with the chain-map lift of b."""
    r = a.resolution
    if b.resolution is not r:
        raise ValueError("both cocycles must live on the same resolution")
    s, t = a.s + b.s, a.t + b.t
    if not r.covers(s, t):
        raise WindowError(f"product lands in Ext^{{{s},{t}}}; resolve to at least max_s={s}, max_t={t}")
    b_gens = r.gens_in_degree(b.s, b.t)
    coeff = dict(zip(b_gens, b.vector))
    iota = r.module.indices_in_degree(0)
    if r.module.dim_in_degree(0) != 1 or len(r.module.basis) != 1:
        raise ValueError("Yoneda products are implemented over the sphere resolution")

    def initial(g):
        c = coeff.get(g, 0) % r.p
        return {iota[0]: c} if c else {}

    cm = lift_chain_map(r, r, b.s, b.t, initial, a.s, t)
    vec = cm.apply_to_cocycle(a.s, a.t, a.vector)
    return Cocycle(r, s, t, tuple(int(x) for x in vec))


# -- persistence ---------------------------------------------------------------


def _payload(r: FreeResolution) -> dict:
    diffs = []
    for s, layer in enumerate(r.diffs):
        out = []
        for elem in layer:
            if s == 0:
                out.append([[j, c] for j, c in sorted(elem.items())])
            else:
                out.append([[h, list(m.q_part), list(m.p_part), c] for (h, m), c in sorted(elem.items(), key=lambda kv: (kv[0][0], kv[0][1]))])
        diffs.append(out)
    return {
        "p": r.p,
        "module": r.module.to_json(),
        "computed_t": list(r.computed_t),
        "partial": r.partial,
        "generators": [list(g) for g in r.gens],
        "differentials": diffs,
    }


def dumps(r: FreeResolution) -> str:
    payload = json.dumps(_payload(r), sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(payload.encode()).hexdigest()
    return json.dumps({"format": FORMAT_NAME, "version": FORMAT_VERSION, "sha256": digest, "payload": json.loads(payload)},
                      sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> FreeResolution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptResolution(f"unreadable resolution file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise CorruptResolution("not an adamsext resolution file")
    if doc.get("version") != FORMAT_VERSION:
        raise VersionMismatch(f"format version {doc.get('version')!r}, expected {FORMAT_VERSION}")
    payload = doc.get("payload")
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    if hashlib.sha256(canon.encode()).hexdigest() != doc.get("sha256"):
        raise CorruptResolution("checksum mismatch")
    try:
        module = FDModule.from_json(payload["module"])
        r = FreeResolution(module)
        r.gens = [list(map(int, g)) for g in payload["generators"]]
        r.computed_t = list(map(int, payload["computed_t"]))
        r.partial = bool(payload["partial"])
        for s, layer in enumerate(payload["differentials"]):
            out = []
            for terms in layer:
                if s == 0:
                    out.append({int(j): int(c) for j, c in terms})
                else:
                    out.append({(int(h), MilnorElement(tuple(q), tuple(pp))): int(c) for h, q, pp, c in terms})
            r.diffs.append(out)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptResolution(f"malformed payload: {exc}") from exc
    if not (len(r.gens) == len(r.diffs) == len(r.computed_t)):
        raise CorruptResolution("inconsistent filtration count")
    problems = r.check()
    if problems:
        raise CorruptResolution("invariant check failed: " + "; ".join(problems[:5]))
    return r


def save(r: FreeResolution, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(r))


def load(path) -> FreeResolution:
    with open(path) as fh:
        return loads(fh.read())
