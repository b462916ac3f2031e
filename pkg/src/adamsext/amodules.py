"""Finite-dimensional graded A-modules.

H*V(n) = E(Q_0, ..., Q_n) is built as the cyclic quotient ``A / A B+`` where
B is spanned by the Milnor monomials whose Q-part avoids {0..n}; a monomial
survives the projection exactly when its P-part is empty and its Q-part lies
in {0..n}. Action tables are stored for every Milnor monomial up to the top
degree of the module; anything higher acts as zero by grading.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from .milnor import (
    UNIT,
    AlgebraContext,
    AlgebraElement,
    MilnorElement,
    basis_in_degree,
    degree_of,
    monomial_product,
)

MODULE_NAMES = {-1: "sphere", 0: "M", 1: "K", 2: "V2"}


class ModuleError(ValueError):
    pass


@dataclass
class FDModule:
    """Graded module with basis ``(name, degree)`` and a sparse action table.

    ``action[(m, i)]`` is a dict ``{j: coeff}`` giving ``m . b_i``; missing
    keys act as zero.
    """

    ctx: AlgebraContext
    name: str
    basis: List[Tuple[str, int]]
    action: Dict[Tuple[MilnorElement, int], Dict[int, int]] = field(default_factory=dict)

    @property
    def top_degree(self) -> int:
        return max((d for _, d in self.basis), default=0)

    @property
    def bottom_degree(self) -> int:
        return min((d for _, d in self.basis), default=0)

    def degree(self, i: int) -> int:
        return self.basis[i][1]

    def indices_in_degree(self, t: int) -> List[int]:
        return [i for i, (_, d) in enumerate(self.basis) if d == t]

    def dim_in_degree(self, t: int) -> int:
        return len(self.indices_in_degree(t))

    def act_monomial(self, m: MilnorElement, i: int) -> Dict[int, int]:
        if m == UNIT:
            return {i: 1}
        return self.action.get((m, i), {})

    def act(self, a: AlgebraElement, v: Dict[int, int]) -> Dict[int, int]:
        p = self.ctx.p
        out: Dict[int, int] = {}
        for m, c in a.terms.items():
            for i, ci in v.items():
                for j, cj in self.act_monomial(m, i).items():
                    out[j] = (out.get(j, 0) + c * ci * cj) % p
        return {j: c for j, c in out.items() if c}

    def poincare(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for _, d in self.basis:
            out[d] = out.get(d, 0) + 1
        return out

    def to_json(self) -> dict:
        entries = []
        for (m, i), vec in sorted(self.action.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            for j, c in sorted(vec.items()):
                entries.append({"op": [list(m.q_part), list(m.p_part)], "src": i, "dst": j, "coeff": c})
        return {
            "p": self.ctx.p,
            "name": self.name,
            "basis": [{"name": n, "degree": d} for n, d in self.basis],
            "action": entries,
        }

    @classmethod
    def from_json(cls, data: dict) -> "FDModule":
        ctx = AlgebraContext(int(data["p"]))
        basis = [(b["name"], int(b["degree"])) for b in data["basis"]]
        action: Dict[Tuple[MilnorElement, int], Dict[int, int]] = {}
        for e in data["action"]:
            m = MilnorElement(tuple(e["op"][0]), tuple(e["op"][1]))
            action.setdefault((m, int(e["src"])), {})[int(e["dst"])] = int(e["coeff"]) % ctx.p
        return cls(ctx, data["name"], basis, action)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def sphere_module(ctx: AlgebraContext) -> FDModule:
    return FDModule(ctx, "sphere", [("iota", 0)], {})


def _subset_name(S) -> str:
    return "e_" + ("".join(f"Q{i}" for i in S) if S else "1")


def toda_smith_module(ctx: AlgebraContext, n: int) -> FDModule:
    """H*V(n) = E(Q_0..Q_n); ``n = -1`` gives the sphere module."""
    if n == -1:
        return sphere_module(ctx)
    if n < -1 or n > 2:
        raise ModuleError(f"V({n}) is unsupported; n must lie in -1..2")
    p = ctx.p
    subsets = [S for k in range(n + 2) for S in combinations(range(n + 1), k)]
    deg = {S: sum(2 * p**i - 1 for i in S) for S in subsets}
    subsets.sort(key=lambda S: (deg[S], sum(1 << i for i in S)))
    index = {S: k for k, S in enumerate(subsets)}
    basis = [(_subset_name(S), deg[S]) for S in subsets]
    top = max(deg.values())
    allowed = set(range(n + 1))
    action: Dict[Tuple[MilnorElement, int], Dict[int, int]] = {}
    for S in subsets:
        src = MilnorElement(S, ())
        for d in range(1, top - deg[S] + 1):
            for m in basis_in_degree(ctx, d):
                vec = {}
                for prod, c in monomial_product(p, m, src):
                    if prod.p_part or not set(prod.q_part) <= allowed:
                        continue
                    j = index[prod.q_part]
                    vec[j] = (vec.get(j, 0) + c) % p
                vec = {j: c for j, c in vec.items() if c}
                if vec:
                    action[(m, index[S])] = vec
    return FDModule(ctx, MODULE_NAMES[n], basis, action)


@dataclass
class ValidationReport:
    ok: bool
    checked: int
    failures: List[str]

    def __bool__(self):
        return self.ok


def validate_module(mod: FDModule, max_failures: int = 20) -> ValidationReport:
    """Check unit action, grading, and (ab).x = a.(b.x) for all stored degrees."""
    ctx = mod.ctx
    failures: List[str] = []
    checked = 0
    for (m, i), vec in mod.action.items():
        checked += 1
        want = mod.degree(i) + degree_of(m, ctx)
        for j in vec:
            if mod.degree(j) != want:
                failures.append(f"grading: {m} . {mod.basis[i][0]} hits {mod.basis[j][0]} in degree {mod.degree(j)}, expected {want}")
        if m == UNIT and vec != {i: 1}:
            failures.append(f"unit: 1 . {mod.basis[i][0]} = {vec}")
    for i, (bname, bdeg) in enumerate(mod.basis):
        room = mod.top_degree - bdeg
        for da in range(0, room + 1):
            for db in range(0, room - da + 1):
                if da == 0 and db == 0:
                    continue
                for a in basis_in_degree(ctx, da):
                    for b in basis_in_degree(ctx, db):
                        checked += 1
                        ab = AlgebraElement(ctx, dict(monomial_product(ctx.p, a, b)))
                        lhs = mod.act(ab, {i: 1})
                        rhs = mod.act(AlgebraElement.monomial(ctx, a), mod.act_monomial(b, i))
                        if lhs != rhs:
                            failures.append(f"associativity: ({a})({b}) . {bname}: {lhs} != {rhs}")
                            if len(failures) >= max_failures:
                                return ValidationReport(False, checked, failures)
    return ValidationReport(not failures, checked, failures)


@dataclass
class ModuleMap:
    """A-linear map raising degree by ``shift``; ``images[i]`` is the image of basis i."""

    source: FDModule
    target: FDModule
    shift: int
    images: Dict[int, Dict[int, int]]

    def apply(self, v: Dict[int, int]) -> Dict[int, int]:
        p = self.source.ctx.p
        out: Dict[int, int] = {}
        for i, c in v.items():
            for j, cj in self.images.get(i, {}).items():
                out[j] = (out.get(j, 0) + c * cj) % p
        return {j: c for j, c in out.items() if c}

    def matrix_in_degree(self, t: int) -> np.ndarray:
        """Rows: source basis in degree t; columns: target basis in degree t + shift."""
        src = self.source.indices_in_degree(t)
        tgt = self.target.indices_in_degree(t + self.shift)
        col = {j: k for k, j in enumerate(tgt)}
        a = np.zeros((len(src), len(tgt)), dtype=np.int64)
        for r, i in enumerate(src):
            for j, c in self.images.get(i, {}).items():
                a[r, col[j]] = c
        return a

    def degrees(self) -> List[int]:
        return sorted({d for _, d in self.source.basis})

    def is_linear(self) -> bool:
        ctx = self.source.ctx
        for i, (_, d) in enumerate(self.source.basis):
            for j in self.images.get(i, {}):
                if self.target.degree(j) != d + self.shift:
                    return False
            room = max(self.source.top_degree, self.target.top_degree - self.shift) - d
            for dm in range(1, room + 1):
                for m in basis_in_degree(ctx, dm):
                    lhs = self.apply(self.source.act_monomial(m, i))
                    rhs = self.target.act(AlgebraElement.monomial(ctx, m), self.apply({i: 1}))
                    if lhs != rhs:
                        return False
        return True


@dataclass
class ModuleSES:
    """0 -> sub --(inclusion)--> middle --(projection)--> quotient -> 0.

    ``inclusion.shift`` is the suspension of the sub: the sub module is
    ``Sigma^shift inclusion.source``.
    """

    inclusion: ModuleMap
    projection: ModuleMap
    n: Optional[int] = None

    @property
    def sub(self) -> FDModule:
        return self.inclusion.source

    @property
    def middle(self) -> FDModule:
        return self.inclusion.target

    @property
    def quotient(self) -> FDModule:
        return self.projection.target

    @property
    def shift(self) -> int:
        return self.inclusion.shift

    def check_exact(self) -> List[str]:
        from .fplinalg import rank_of

        p = self.middle.ctx.p
        problems = []
        if not self.inclusion.is_linear():
            problems.append("inclusion is not A-linear")
        if not self.projection.is_linear():
            problems.append("projection is not A-linear")
        for t in sorted({d for _, d in self.middle.basis}):
            inc = self.inclusion.matrix_in_degree(t - self.shift)
            proj = self.projection.matrix_in_degree(t)
            dmid = self.middle.dim_in_degree(t)
            dsub = self.sub.dim_in_degree(t - self.shift)
            dquo = self.quotient.dim_in_degree(t)
            if dmid != dsub + dquo:
                problems.append(f"degree {t}: dims {dsub} + {dquo} != {dmid}")
            if rank_of(inc, p) != dsub:
                problems.append(f"degree {t}: inclusion not injective")
            if rank_of(proj, p) != dquo:
                problems.append(f"degree {t}: projection not surjective")
            if inc.size and proj.size and np.any((inc @ proj) % p):
                problems.append(f"degree {t}: projection . inclusion != 0")
        return problems


def cofibration_ses(ctx: AlgebraContext, n: int) -> ModuleSES:
    """0 -> Sigma^{2p^n-1} H*V(n-1) -> H*V(n) -> H*V(n-1) -> 0.

    The inclusion sends the generator to Q_n . e_1, so e_S maps to
    e_{S + {n}}; the projection kills every e_S with n in S.
    """
    if not 0 <= n <= 2:
        raise ModuleError("cofibration index must be 0, 1 or 2")
    lower = toda_smith_module(ctx, n - 1)
    mid = toda_smith_module(ctx, n)
    shift = 2 * ctx.p**n - 1
    mid_index = {name: k for k, (name, _) in enumerate(mid.basis)}
    lower_subsets = [()] if n == 0 else [S for k in range(n + 1) for S in combinations(range(n), k)]
    lower_index = {_subset_name(S) if n else "iota": S for S in lower_subsets}
    inc_images = {}
    proj_images = {}
    for i, (name, _) in enumerate(lower.basis):
        S = lower_index[name]
        inc_images[i] = {mid_index[_subset_name(S + (n,))]: 1}
        proj_images[mid_index[_subset_name(S)]] = {i: 1}
    inc = ModuleMap(lower, mid, shift, inc_images)
    proj = ModuleMap(mid, lower, 0, proj_images)
    return ModuleSES(inc, proj, n)
