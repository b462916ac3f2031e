"""Dimension chasing along long exact Ext sequences.

Groups are ``Ext^{s,t}(X, Y)`` with X, Y among Z_p, H*M, H*K, H*V(2) and the
internal degree written ``const + c * p^n * q`` so statements hold for a
symbolic n. The cofibration ``V(n-1) -> V(n) -> Sigma^k V(n-1)`` with
``k = 2p^n - 1`` gives, for a fixed module B,

* covariant (first argument varies), X = Ext(H*V(n-1), B), Y = Ext(H*V(n), B)::

      X^{s,t} --i_*--> Y^{s,t} --j_*--> X^{s,t-k} --alpha_*--> X^{s+1,t} --> ...

* contravariant (second argument varies), X = Ext(B, H*V(n-1)), Y = Ext(B, H*V(n))::

      X^{s,t+k} --j^*--> Y^{s,t} --i^*--> X^{s,t} --alpha^*--> X^{s+1,t+k} --> ...

Rules only use exactness, so every conclusion holds for each value of n at
which the input facts hold.

Facts are propositions ``dim(node) = d``, ``rank(edge) = r``, ``inj(edge)``,
``surj(edge)`` and ``ub(node) = b``; each one is either an input (with a
citation) or derived by a named rule from earlier propositions.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

MODULE_N = {"Z": -1, "M": 0, "K": 1, "V2": 2}
MODULE_BY_N = {v: k for k, v in MODULE_N.items()}
MODULE_TEXT = {"Z": "Z_p", "M": "H*M", "K": "H*K", "V2": "H*V(2)"}
MAP_NAMES = {0: ("i", "j", "p"), 1: ("i'", "j'", "alpha"), 2: ("ibar", "jbar", "beta")}
RULES = ("R0", "R1", "R2", "R3", "R4", "R5", "R6", "R7", "RB")
DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


class DegreeExpr(NamedTuple):
    """``const + pn_coeff * p^n * q``."""

    const: int
    pn_coeff: int = 0

    def __add__(self, k):
        if isinstance(k, DegreeExpr):
            return DegreeExpr(self.const + k.const, self.pn_coeff + k.pn_coeff)
        return DegreeExpr(self.const + int(k), self.pn_coeff)

    def __sub__(self, k):
        return self + (-int(k))

    def at(self, p: int, n: int) -> int:
        return self.const + self.pn_coeff * p**n * 2 * (p - 1)

    def render(self) -> str:
        if not self.pn_coeff:
            return str(self.const)
        head = "p^nq" if self.pn_coeff == 1 else f"{self.pn_coeff}p^nq"
        if self.const > 0:
            return f"{head}+{self.const}"
        if self.const < 0:
            return f"{head}{self.const}"
        return head

    def to_json(self):
        return {"const": self.const, "pn_coeff": self.pn_coeff}

    @classmethod
    def from_json(cls, d) -> "DegreeExpr":
        if isinstance(d, int):
            return cls(d, 0)
        return cls(int(d["const"]), int(d.get("pn_coeff", 0)))


def as_expr(t) -> DegreeExpr:
    return t if isinstance(t, DegreeExpr) else DegreeExpr(int(t), 0)


class NodeKey(NamedTuple):
    X: str
    Y: str
    s: int
    t: DegreeExpr

    def render(self) -> str:
        return f"Ext^{{{self.s},{self.t.render()}}}({MODULE_TEXT[self.X]},{MODULE_TEXT[self.Y]})"

    def to_json(self):
        return {"X": self.X, "Y": self.Y, "s_expr": self.s, "t_expr": self.t.to_json()}

    @classmethod
    def from_json(cls, d) -> "NodeKey":
        s = d["s_expr"] if "s_expr" in d else d["s"]
        t = d["t_expr"] if "t_expr" in d else d["t"]
        for sym in (d["X"], d["Y"]):
            if sym not in MODULE_N:
                raise ValueError(f"unknown module symbol {sym!r}")
        return cls(d["X"], d["Y"], int(s), DegreeExpr.from_json(t))


class EdgeKey(NamedTuple):
    label: str
    src: NodeKey
    dst: NodeKey

    def render(self) -> str:
        return f"{self.label}: {self.src.render()} -> {self.dst.render()}"

    def to_json(self):
        return {"label": self.label, "source": self.src.to_json(), "target": self.dst.to_json()}

    @classmethod
    def from_json(cls, d) -> "EdgeKey":
        return cls(d["label"], NodeKey.from_json(d["source"]), NodeKey.from_json(d["target"]))


@dataclass
class Chain:
    """Nodes N_0..N_m and edges N_k -> N_{k+1}, exact at every interior node."""

    nodes: List[NodeKey]
    edges: List[EdgeKey]
    family: str = ""
    n: Optional[int] = None
    fixed: Optional[str] = None

    def __len__(self):
        return len(self.nodes)

    def render(self) -> str:
        if not self.nodes:
            return "(empty)"
        parts = [self.nodes[0].render()]
        for e in self.edges:
            parts.append(f" --{e.label}--> {e.dst.render()}")
        return "".join(parts)


def instantiate_les(family: str, n: int, fixed: str, anchor, s_lo: int, s_hi: int, p: int = 5) -> Chain:
    """The segment of the LES at fixed internal degree ``anchor`` covering s_lo..s_hi.

    The chain runs from the node just before ``Ext^{s_lo}`` of the lower
    module to the node just after the last ``Ext^{s_hi}`` term.
    """
    if family not in ("covariant", "contravariant"):
        raise ValueError("family must be 'covariant' or 'contravariant'")
    if not 0 <= n <= 2:
        raise ValueError("cofibration index must be 0, 1 or 2")
    if fixed not in MODULE_N:
        raise ValueError(f"unknown module symbol {fixed!r}")
    lower, upper = MODULE_BY_N[n - 1], MODULE_BY_N[n]
    k = 2 * p**n - 1
    t = as_expr(anchor)
    iname, jname, aname = MAP_NAMES[n]
    if s_hi < s_lo:
        return Chain([], [], family, n, fixed)
    nodes: List[NodeKey] = []
    labels: List[str] = []
    if family == "covariant":
        X = lambda s, tt: NodeKey(lower, fixed, s, tt)
        Y = lambda s, tt: NodeKey(upper, fixed, s, tt)
        nodes.append(X(s_lo - 1, t - k))
        for s in range(s_lo, s_hi + 1):
            nodes += [X(s, t), Y(s, t), X(s, t - k)]
            labels += [aname + "_*", iname + "_*", jname + "_*"]
        nodes.append(X(s_hi + 1, t))
        labels.append(aname + "_*")
    else:
        X = lambda s, tt: NodeKey(fixed, lower, s, tt)
        Y = lambda s, tt: NodeKey(fixed, upper, s, tt)
        nodes.append(X(s_lo - 1, t))
        for s in range(s_lo, s_hi + 1):
            nodes += [X(s, t + k), Y(s, t), X(s, t)]
            labels += [aname + "^*", jname + "^*", iname + "^*"]
        nodes.append(X(s_hi + 1, t + k))
        labels.append(aname + "^*")
    edges = [EdgeKey(lab, nodes[i], nodes[i + 1]) for i, lab in enumerate(labels)]
    return Chain(nodes, edges, family, n, fixed)


# -- facts ----------------------------------------------------------------------------

EDGE_STATUSES = ("zero", "injective", "surjective", "iso")


@dataclass
class Fact:
    kind: str
    target: Union[NodeKey, EdgeKey]
    value: Union[int, str]
    citation: str = ""
    provenance: str = "cited"
    inert: bool = False
    note: str = ""

    def __post_init__(self):
        if self.kind not in ("node", "edge"):
            raise ValueError(f"fact kind must be node or edge, got {self.kind!r}")
        if self.provenance not in ("cited", "computed", "derived"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.provenance != "derived" and not self.citation:
            raise ValueError(f"fact about {self.target.render()} has no citation")
        if self.kind == "node" and not self.inert and (not isinstance(self.value, int) or self.value < 0):
            raise ValueError("node facts carry a nonnegative dimension")
        if self.kind == "edge" and not self.inert and self.value not in EDGE_STATUSES and not isinstance(self.value, int):
            raise ValueError(f"edge status must be one of {EDGE_STATUSES} or a rank")

    def propositions(self) -> List[tuple]:
        if self.inert:
            return []
        if self.kind == "node":
            return [(("dim", self.target), self.value)]
        if isinstance(self.value, int):
            return [(("rank", self.target), self.value)]
        return {
            "zero": [(("rank", self.target), 0)],
            "injective": [(("inj", self.target), True)],
            "surjective": [(("surj", self.target), True)],
            "iso": [(("inj", self.target), True), (("surj", self.target), True)],
        }[self.value]

    def to_json(self) -> dict:
        d = {"kind": self.kind, "target": self.target.to_json(), "citation": self.citation, "provenance": self.provenance}
        d["dim" if self.kind == "node" and not self.inert else "status"] = self.value
        if self.inert:
            d["inert"] = True
        if self.note:
            d["note"] = self.note
        return d

    @classmethod
    def from_json(cls, d) -> "Fact":
        kind = d["kind"]
        inert = bool(d.get("inert", False))
        if kind == "node":
            target = NodeKey.from_json(d["target"])
            value = d.get("dim", d.get("status"))
        else:
            target = EdgeKey.from_json(d["target"])
            value = d.get("status", d.get("rank"))
        return cls(kind, target, value, d.get("citation", ""), d.get("provenance", "cited"), inert, d.get("note", ""))


@dataclass
class FactBase:
    p: int
    facts: List[Fact]
    version: int = 1

    def to_json(self) -> dict:
        return {"version": self.version, "p": self.p, "facts": [f.to_json() for f in self.facts]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data, p: Optional[int] = None) -> "FactBase":
        if isinstance(data, list):
            if p is None:
                raise ValueError("a bare fact list needs an explicit p")
            return cls(p, [Fact.from_json(d) for d in data])
        return cls(int(data.get("p", p or 0)), [Fact.from_json(d) for d in data["facts"]], int(data.get("version", 1)))

    def node_fact(self, key: NodeKey) -> Optional[Fact]:
        for f in self.facts:
            if f.kind == "node" and f.target == key and not f.inert:
                return f
        return None

    def edge_fact(self, key: EdgeKey) -> Optional[Fact]:
        for f in self.facts:
            if f.kind == "edge" and f.target == key and not f.inert:
                return f
        return None

    def without(self, key) -> "FactBase":
        return FactBase(self.p, [f for f in self.facts if f.target != key], self.version)


def default_factbase_path(p: int) -> str:
    return os.path.join(DATA_DIR, f"facts_p{p}.json")


def load_factbase(path: Optional[str] = None, p: int = 5) -> FactBase:
    path = path or default_factbase_path(p)
    with open(path) as fh:
        return FactBase.from_json(json.load(fh), p)


# -- derivations ----------------------------------------------------------------------


@dataclass
class Step:
    index: int
    rule: str
    premises: List[int]
    prop: tuple
    value: object
    citation: str = ""
    provenance: str = "derived"

    def statement(self) -> str:
        return render_prop(self.prop, self.value)

    def to_json(self) -> dict:
        kind, target = self.prop
        return {
            "step": self.index,
            "rule": self.rule,
            "premises": list(self.premises),
            "conclusion": {"kind": kind, "target": target.to_json(), "value": self.value},
            "statement": self.statement(),
            "citation": self.citation,
            "provenance": self.provenance,
        }


def render_prop(prop, value) -> str:
    kind, target = prop
    if kind == "dim":
        return f"dim {target.render()} = {value}"
    if kind == "ub":
        return f"dim {target.render()} <= {value}"
    if kind == "rank":
        return f"{target.label} has rank {value}" + (" (zero map)" if value == 0 else "") + f" [{target.src.render()} -> {target.dst.render()}]"
    word = "injective" if kind == "inj" else "surjective"
    return f"{target.label} is {word} [{target.src.render()} -> {target.dst.render()}]"


RULE_TEXT = {
    "fact": "input",
    "R0": "a map out of or into a zero group is zero",
    "R1": "flanked by zero groups, the middle map is an isomorphism",
    "R2": "between zero groups, exactness forces zero",
    "R3": "an isomorphism forces its neighbouring maps to vanish",
    "R4": "an isomorphism transports dimension",
    "R5": "a zero map makes the next map injective and the previous one surjective, and conversely",
    "R6": "exactness: dim = rank of incoming map + rank of outgoing map",
    "R7": "rank versus injectivity and surjectivity",
    "RB": "exactness bound: dim <= dim of predecessor + dim of successor",
}


class ContradictionError(ValueError):
    def __init__(self, message: str, premises: List[Step]):
        super().__init__(message)
        self.premises = premises

    def citations(self) -> List[str]:
        return [f"{s.statement()} ({s.citation})" for s in self.premises]


@dataclass
class Derivation:
    steps: List[Step] = field(default_factory=list)
    known: Dict[tuple, int] = field(default_factory=dict)  # prop -> step index

    def value(self, prop):
        i = self.known.get(prop)
        return None if i is None else self.steps[i].value

    def dim(self, node: NodeKey) -> Optional[int]:
        return self.value(("dim", node))

    def upper_bound(self, node: NodeKey) -> Optional[int]:
        return self.value(("ub", node))

    def rank(self, edge: EdgeKey) -> Optional[int]:
        return self.value(("rank", edge))

    def is_injective(self, edge: EdgeKey) -> bool:
        return bool(self.value(("inj", edge)))

    def is_surjective(self, edge: EdgeKey) -> bool:
        return bool(self.value(("surj", edge)))

    def node_status(self, node: NodeKey) -> str:
        d = self.dim(node)
        if d is not None:
            return f"dim {d}"
        b = self.upper_bound(node)
        return f"bounded by {b}" if b is not None else "unknown"

    def edge_status(self, edge: EdgeKey) -> str:
        if self.rank(edge) == 0:
            return "zero"
        inj, surj = self.is_injective(edge), self.is_surjective(edge)
        if inj and surj:
            return "iso"
        if inj:
            return "injective"
        if surj:
            return "surjective"
        return "unknown"

    def conclusions(self) -> Dict[tuple, object]:
        return {prop: self.steps[i].value for prop, i in self.known.items()}

    def ancestors(self, index: int) -> List[Step]:
        seen = set()
        stack = [index]
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            stack.extend(self.steps[i].premises)
        return [self.steps[i] for i in sorted(seen)]

    def proof_of(self, prop) -> List[Step]:
        i = self.known.get(prop)
        return [] if i is None else self.ancestors(i)

    def to_json(self, steps: Optional[List[Step]] = None) -> list:
        return [s.to_json() for s in (self.steps if steps is None else steps)]

    def to_text(self, steps: Optional[List[Step]] = None) -> str:
        lines = []
        for s in self.steps if steps is None else steps:
            if s.rule == "fact":
                lines.append(f"({s.index}) We know that {s.statement()} (cf. {s.citation}).")
            else:
                refs = ", ".join(f"({i})" for i in s.premises)
                lines.append(f"({s.index}) From {refs}, since {RULE_TEXT[s.rule]} [{s.rule}], {s.statement()}.")
        return "\n".join(lines)


class _Saturator:
    def __init__(self, chains: Sequence[Chain], facts: Iterable[Fact], rule_order: Optional[Sequence[str]] = None):
        self.chains = [c for c in chains if c.nodes]
        self.d = Derivation()
        self.rule_order = list(rule_order or RULES)
        self.nodes = set()
        self.edges = set()
        self.triples = []  # (prev edge or None, edge, next edge or None)
        self.interior = []  # (in edge, node, out edge)
        self.windows4 = []  # (e1, e2, e3) consecutive
        self.windows2 = []  # (e1, e2) consecutive
        for c in self.chains:
            self.nodes.update(c.nodes)
            self.edges.update(c.edges)
            E = c.edges
            for k, e in enumerate(E):
                self.triples.append((E[k - 1] if k > 0 else None, e, E[k + 1] if k + 1 < len(E) else None))
                if k + 1 < len(E):
                    self.interior.append((e, e.dst, E[k + 1]))
                    self.windows2.append((e, E[k + 1]))
                if k + 2 < len(E):
                    self.windows4.append((e, E[k + 1], E[k + 2]))
        for node in sorted(self.nodes):
            if node.s < 0:
                self._set(("dim", node), 0, "fact", [], citation="Ext vanishes in negative filtration", provenance="cited")
        for f in facts:
            if f.inert:
                continue
            if f.kind == "node" and f.target not in self.nodes:
                continue
            if f.kind == "edge" and f.target not in self.edges:
                continue
            for prop, value in f.propositions():
                self._set(prop, value, "fact", [], citation=f.citation, provenance=f.provenance)

    # -- bookkeeping ------------------------------------------------------------------

    def get(self, kind, target):
        return self.d.value((kind, target))

    def _premise_ids(self, props):
        return sorted({self.d.known[p] for p in props})

    def _contradiction(self, msg, props_or_ids):
        ids = set()
        for x in props_or_ids:
            ids.add(x if isinstance(x, int) else self.d.known[x])
        leaves = {}
        for i in ids:
            for s in self.d.ancestors(i):
                if s.rule == "fact":
                    leaves[s.index] = s
        raise ContradictionError(msg, [leaves[i] for i in sorted(leaves)])

    def _set(self, prop, value, rule, premises, citation="", provenance="derived") -> bool:
        kind, target = prop
        if kind == "ub":
            old = self.d.value(prop)
            if old is not None and old <= value:
                return False
        elif prop in self.d.known:
            if self.d.value(prop) == value:
                return False
            idx = len(self.d.steps)
            self.d.steps.append(Step(idx, rule, self._premise_ids(premises), prop, value, citation, provenance))
            self._contradiction(f"conflicting conclusions: {render_prop(prop, self.d.value(prop))} versus {render_prop(prop, value)}",
                                [self.d.known[prop], idx])
        idx = len(self.d.steps)
        self.d.steps.append(Step(idx, rule, self._premise_ids(premises), prop, value, citation, provenance))
        self.d.known[prop] = idx
        self._check(prop, idx)
        return True

    def _check(self, prop, idx):
        kind, target = prop
        if kind in ("dim", "ub"):
            d, u = self.get("dim", target), self.get("ub", target)
            if d is not None and u is not None and d > u:
                self._contradiction(f"{target.render()} has dim {d} above its bound {u}",
                                    [("dim", target), ("ub", target)])
            edges = [e for e in self.edges if target in (e.src, e.dst)]
        else:
            edges = [target]
        for e in sorted(edges):
            r = self.get("rank", e)
            if r is None:
                continue
            for end in (e.src, e.dst):
                d = self.get("dim", end)
                if d is not None and r > d:
                    self._contradiction(f"{e.label} has rank {r} but {end.render()} has dim {d}",
                                        [("rank", e), ("dim", end)])

    # -- rules -----------------------------------------------------------------------

    def R0(self):
        ch = False
        for e in sorted(self.edges):
            for end in (e.src, e.dst):
                if self.get("dim", end) == 0:
                    ch |= self._set(("rank", e), 0, "R0", [("dim", end)])
        return ch

    def R1(self):
        ch = False
        for e1, e2, e3 in self.windows4:
            if self.get("dim", e1.src) == 0 and self.get("dim", e3.dst) == 0:
                prem = [("dim", e1.src), ("dim", e3.dst)]
                ch |= self._set(("inj", e2), True, "R1", prem)
                ch |= self._set(("surj", e2), True, "R1", prem)
        return ch

    def R2(self):
        ch = False
        for e1, e2 in self.windows2:
            if self.get("dim", e1.src) == 0 and self.get("dim", e2.dst) == 0:
                ch |= self._set(("dim", e1.dst), 0, "R2", [("dim", e1.src), ("dim", e2.dst)])
        return ch

    def R3(self):
        ch = False
        for prev, e, nxt in self.triples:
            if self.get("inj", e) and self.get("surj", e):
                prem = [("inj", e), ("surj", e)]
                if prev is not None:
                    ch |= self._set(("rank", prev), 0, "R3", prem)
                if nxt is not None:
                    ch |= self._set(("rank", nxt), 0, "R3", prem)
        return ch

    def R4(self):
        ch = False
        for e in sorted(self.edges):
            if self.get("inj", e) and self.get("surj", e):
                prem = [("inj", e), ("surj", e)]
                a, b = self.get("dim", e.src), self.get("dim", e.dst)
                if a is not None:
                    ch |= self._set(("dim", e.dst), a, "R4", prem + [("dim", e.src)])
                if b is not None:
                    ch |= self._set(("dim", e.src), b, "R4", prem + [("dim", e.dst)])
        return ch

    def R5(self):
        ch = False
        for prev, e, nxt in self.triples:
            if self.get("rank", e) == 0:
                if nxt is not None:
                    ch |= self._set(("inj", nxt), True, "R5", [("rank", e)])
                if prev is not None:
                    ch |= self._set(("surj", prev), True, "R5", [("rank", e)])
            if nxt is not None and self.get("inj", nxt):
                ch |= self._set(("rank", e), 0, "R5", [("inj", nxt)])
            if prev is not None and self.get("surj", prev):
                ch |= self._set(("rank", e), 0, "R5", [("surj", prev)])
        return ch

    def R6(self):
        ch = False
        for a, node, b in self.interior:
            d, ra, rb = self.get("dim", node), self.get("rank", a), self.get("rank", b)
            if ra is not None and rb is not None:
                ch |= self._set(("dim", node), ra + rb, "R6", [("rank", a), ("rank", b)])
            elif d is not None and ra is not None:
                if d - ra < 0:
                    self._contradiction(f"rank {ra} into {node.render()} exceeds its dim {d}", [("dim", node), ("rank", a)])
                ch |= self._set(("rank", b), d - ra, "R6", [("dim", node), ("rank", a)])
            elif d is not None and rb is not None:
                if d - rb < 0:
                    self._contradiction(f"rank {rb} out of {node.render()} exceeds its dim {d}", [("dim", node), ("rank", b)])
                ch |= self._set(("rank", a), d - rb, "R6", [("dim", node), ("rank", b)])
        return ch

    def R7(self):
        ch = False
        for e in sorted(self.edges):
            r = self.get("rank", e)
            ds, dt = self.get("dim", e.src), self.get("dim", e.dst)
            inj, surj = self.get("inj", e), self.get("surj", e)
            if inj and ds is not None:
                ch |= self._set(("rank", e), ds, "R7", [("inj", e), ("dim", e.src)])
            if surj and dt is not None:
                ch |= self._set(("rank", e), dt, "R7", [("surj", e), ("dim", e.dst)])
            r = self.get("rank", e)
            if r is not None:
                if ds is not None and r == ds:
                    ch |= self._set(("inj", e), True, "R7", [("rank", e), ("dim", e.src)])
                if dt is not None and r == dt:
                    ch |= self._set(("surj", e), True, "R7", [("rank", e), ("dim", e.dst)])
                if inj:
                    ch |= self._set(("dim", e.src), r, "R7", [("inj", e), ("rank", e)])
                if surj:
                    ch |= self._set(("dim", e.dst), r, "R7", [("surj", e), ("rank", e)])
        return ch

    def RB(self):
        ch = False
        for a, node, b in self.interior:
            da, db = self.get("dim", a.src), self.get("dim", b.dst)
            if da is not None and db is not None:
                ch |= self._set(("ub", node), da + db, "RB", [("dim", a.src), ("dim", b.dst)])
        return ch

    def run(self) -> Derivation:
        while True:
            changed = False
            for name in self.rule_order:
                changed |= getattr(self, name)()
            if not changed:
                return self.d


def saturate(chains: Union[Chain, Sequence[Chain]], facts: Union[FactBase, Iterable[Fact]],
             rule_order: Optional[Sequence[str]] = None) -> Derivation:
    """Apply the rules to a fixed point; raises ContradictionError on inconsistent input."""
    if isinstance(chains, Chain):
        chains = [chains]
    if isinstance(facts, FactBase):
        facts = facts.facts
    return _Saturator(chains, list(facts), rule_order).run()


# -- proposition scripts ------------------------------------------------------------------


@dataclass
class Script:
    ident: str
    statement: str
    target: NodeKey
    expected: int
    chains: List[tuple]  # (family, n, fixed, anchor, s_lo, s_hi)
    generators: List[str]
    needs: List[tuple]  # (NodeKey or EdgeKey, citation as given in the proof)


def _scripts(p: int) -> Dict[str, Script]:
    q = 2 * (p - 1)
    P = lambda c: DegreeExpr(c, 1)
    Ta, Tb, Tc = P((p + 2) * q), P((p + 1) * q), P(p * q)
    Z = lambda s, t: NodeKey("Z", "Z", s, t)
    lab = lambda n, kind: MAP_NAMES[n][{"i": 0, "j": 1, "a": 2}[kind]]

    def edge(label, src, dst):
        return EdgeKey(label, src, dst)

    pstar = lambda s, t: edge("p_*", Z(s - 1, t - 1), Z(s, t))
    scripts = {
        "2.2": Script(
            "2.2", "Ext^{3,p^nq+(p+2)q+1}(H*M,H*M) has a unique generator",
            NodeKey("M", "M", 3, Ta + 1), 1,
            [("contravariant", 0, "Z", Ta, 3, 3), ("contravariant", 0, "Z", Ta + 1, 3, 4),
             ("covariant", 0, "M", Ta + 1, 3, 3)],
            [r"\bar\bar{h_ng_0}"],
            [(Z(3, Ta), "[6, Table 8.1]"), (Z(3, Ta + 1), "[6, Table 8.1]"), (Z(3, Ta + 2), "[6, Table 8.1]"),
             (Z(4, Ta + 1), "[7, Proposition 2.1]"), (Z(4, Ta + 2), "[7, Proposition 2.1]")],
        ),
        "2.3": Script(
            "2.3", "Ext^{3,p^nq+(p+2)q}(H*M,H*M) has dimension 2",
            NodeKey("M", "M", 3, Ta), 2,
            [("contravariant", 0, "Z", Ta, 3, 3), ("contravariant", 0, "Z", Ta - 1, 2, 3),
             ("covariant", 0, "M", Ta, 3, 3)],
            [r"i_*j_*\bar\bar{h_ng_0}", r"j^*i^*\bar\bar{h_ng_0}"],
            [(Z(3, Ta), "[6, Table 8.1]"), (Z(3, Ta + 1), "[6, Table 8.1]"), (Z(4, Ta + 1), "[7, Proposition 2.1]"),
             (Z(2, Ta - 1), "[6, Table 8.1]"), (Z(3, Ta - 1), "[6, Table 8.1]"), (Z(2, Ta), "[2]"),
             (edge("p_*", NodeKey("Z", "M", 3, Ta - 1), NodeKey("Z", "M", 4, Ta)), "p_*j^*(h_ng_0) = j^*p^*(g_0h_n) = 0")],
        ),
        "2.5": Script(
            "2.5", "Ext^{3,p^nq+(p+1)q+2}(H*K,H*M) = 0",
            NodeKey("K", "M", 3, Tb + 2), 0,
            [("covariant", 0, "Z", Tb + 3, 3, 3), ("covariant", 0, "Z", Tb + 2, 3, 3),
             ("contravariant", 0, "M", Tb + 2, 3, 3),
             ("covariant", 0, "Z", Tc + 2, 3, 3), ("covariant", 0, "Z", Tc + 1, 3, 3),
             ("contravariant", 0, "M", Tc + 1, 3, 3),
             ("covariant", 1, "M", Tb + 2, 3, 3)],
            [],
            [(Z(3, Tb + 1), "[6, Table 8.1]"), (Z(3, Tb + 2), "[6, Table 8.1]"), (Z(3, Tb + 3), "[6, Table 8.1]"),
             (Z(3, Tc + 1), "[6, Table 8.1]"), (Z(4, Tc + 2), "Wang [3, Theorem 4.1]"),
             (Z(3, Tc + 2), "[6, Table 8.1]"), (Z(2, Tc), "[6, Table 8.1]"), (Z(3, Tc), "[6, Table 8.1]"),
             (Z(4, Tc + 1), "[7, Proposition 2.1]"),
             (pstar(4, Tc + 2), "a_0-towers: [6, Table 8.1], [3, Theorem 4.1]"),
             (pstar(3, Tc + 1), "a_0-towers: [6, Table 8.1]"),
             (pstar(4, Tc + 1), "a_0-towers: [6, Table 8.1], [7, Proposition 2.1]")],
        ),
        "2.6": Script(
            "2.6", "Ext^{2,p^nq+(p+1)q+1}(H*K,Z_p) has dimension 1",
            NodeKey("K", "Z", 2, Tb + 1), 1,
            [("covariant", 0, "Z", Tc, 2, 2), ("covariant", 0, "Z", Tb + 1, 2, 3),
             ("covariant", 1, "Z", Tb + 1, 2, 2)],
            [r"beta_*i'_*i_*(h_n)"],
            [(Z(1, Tc - 1), "[2]"), (Z(2, Tc - 1), "[2]"), (Z(2, Tc), "[6, Table 8.1]"),
             (Z(2, Tb), "[2]"), (Z(2, Tb + 1), "[2]"), (Z(3, Tb), "[6, Table 8.1]"), (Z(3, Tb + 1), "[6, Table 8.1]")],
        ),
        "2.7": Script(
            "2.7", "Ext^{2,p^nq+(p+1)q+1}(H*K,H*M) has dimension 1",
            NodeKey("K", "M", 2, Tb + 1), 1,
            [("covariant", 0, "Z", Tc + 1, 2, 2), ("covariant", 0, "Z", Tb + 2, 2, 2),
             ("covariant", 1, "Z", Tb + 2, 2, 3),
             ("covariant", 0, "Z", Tb + 2, 3, 3), ("covariant", 0, "Z", Tc + 1, 3, 3),
             ("covariant", 0, "Z", Tc, 2, 2), ("covariant", 0, "Z", Tb + 1, 2, 3), ("covariant", 1, "Z", Tb + 1, 2, 2),
             ("contravariant", 0, "K", Tb + 1, 2, 2)],
            [r"beta_*i'_*(\tilde{h}_n)"],
            [(Z(2, Tc + 1), "[2]"), (Z(2, Tc), "[6, Table 8.1]"), (Z(3, Tc + 1), "[6, Table 8.1]"),
             (pstar(3, Tc + 1), "a_0-towers: [6, Table 8.1]"),
             (pstar(4, Tc + 1), "a_0-towers: [6, Table 8.1], [7, Proposition 2.1]"),
             (Z(2, Tb), "[2]"), (Z(2, Tb + 1), "[2]"), (Z(2, Tb + 2), "[2]"),
             (Z(3, Tb), "[6, Table 8.1]"), (Z(3, Tb + 1), "[6, Table 8.1]"), (Z(3, Tb + 2), "[6, Table 8.1]"),
             (Z(1, Tc - 1), "[2]"), (Z(2, Tc - 1), "[2]")],
        ),
    }
    return scripts


PROPOSITIONS = ("2.2", "2.3", "2.5", "2.6", "2.7")


@dataclass
class ReplayReport:
    ident: str
    statement: str
    target: NodeKey
    expected: int
    concluded: Optional[int]
    generators: List[str]
    missing: List[dict]
    proof: List[Step]
    derivation: Derivation
    chains: List[Chain]
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.concluded == self.expected and not self.missing and not self.error

    def uncited_premises(self) -> List[Step]:
        return [s for s in self.proof if s.rule == "fact" and not s.citation]

    def to_json(self) -> dict:
        return {
            "proposition": self.ident,
            "statement": self.statement,
            "target": self.target.to_json(),
            "target_text": self.target.render(),
            "expected_dim": self.expected,
            "concluded_dim": self.concluded,
            "ok": self.ok,
            "generators": self.generators,
            "missing": self.missing,
            "error": self.error,
            "proof": [s.to_json() for s in self.proof],
        }

    def to_text(self) -> str:
        head = f"Proposition {self.ident}: {self.statement}"
        if self.error:
            return head + f"\n  FAILED: {self.error}"
        body = self.derivation.to_text(self.proof)
        tail = f"Hence dim {self.target.render()} = {self.concluded}."
        if self.generators:
            tail += " Generators: " + ", ".join(self.generators) + "."
        if self.missing:
            tail += "\nMissing: " + "; ".join(f"{m['target_text']} ({m['citation']})" for m in self.missing)
        return "\n".join([head, body, tail])


def build_chains(specs: Iterable[tuple], p: int) -> List[Chain]:
    return [instantiate_les(fam, n, fixed, anchor, lo, hi, p) for fam, n, fixed, anchor, lo, hi in specs]


def replay_proposition(ident: str, factbase: Optional[FactBase] = None, p: int = 5) -> ReplayReport:
    """Instantiate the chains used for one proposition, saturate, and report."""
    scripts = _scripts(p)
    if ident not in scripts:
        raise KeyError(f"unknown proposition {ident!r}; choose from {', '.join(PROPOSITIONS)}")
    sc = scripts[ident]
    fb = factbase if factbase is not None else load_factbase(p=p)
    missing = []
    for key, citation in sc.needs:
        present = fb.node_fact(key) if isinstance(key, NodeKey) else fb.edge_fact(key)
        if present is None:
            missing.append({"target": key.to_json(), "target_text": key.render(), "citation": citation})
    chains = build_chains(sc.chains, p)
    error = ""
    try:
        d = saturate(chains, fb)
    except ContradictionError as exc:
        d = Derivation()
        error = f"{exc}; premises: " + "; ".join(exc.citations())
    concluded = d.dim(sc.target)
    proof = d.proof_of(("dim", sc.target))
    return ReplayReport(ident, sc.statement, sc.target, sc.expected, concluded, sc.generators, missing,
                        proof, d, chains, error)


def replay_all(factbase: Optional[FactBase] = None, p: int = 5) -> List[ReplayReport]:
    fb = factbase if factbase is not None else load_factbase(p=p)
    return [replay_proposition(i, fb, p) for i in PROPOSITIONS]


# -- cross-check against computed charts ------------------------------------------------


def cross_check(p: int = 5, n: int = 0, max_s: int = 3, max_t: int = 60, workers: int = 1) -> dict:
    """Feed computed Ext(H*V(n-1), Z_p) dims and connecting-map ranks into the solver.

    The solver's dims for Ext(H*V(n), Z_p) are then compared with a direct
    resolution of H*V(n).
    """
    from .amodules import cofibration_ses, toda_smith_module
    from .fplinalg import rank_of
    from .milnor import AlgebraContext
    from .resolution import connecting_homomorphism, minimal_resolve

    ctx = AlgebraContext(p)
    ses = cofibration_ses(ctx, n)
    lower = MODULE_BY_N[n - 1]
    upper = MODULE_BY_N[n]
    k = ses.shift
    r_low = minimal_resolve(toda_smith_module(ctx, n - 1), max_s + 1, max_t, workers=workers)
    r_up = minimal_resolve(toda_smith_module(ctx, n), max_s, max_t, workers=workers)
    delta = connecting_homomorphism(ses, r_low, r_low, max_s=max_s, max_t=max_t)
    facts = []
    cite = f"computed: minimal resolution of {MODULE_TEXT[lower]} at p={p}"
    for s in range(max_s + 2):
        for t in range(-k, 0):
            facts.append(Fact("node", NodeKey(lower, "Z", s, DegreeExpr(t)), 0, "connective module: no classes in negative degree", "computed"))
        for t in range(max_t + 1):
            facts.append(Fact("node", NodeKey(lower, "Z", s, DegreeExpr(t)), r_low.dim_ext(s, t), cite, "computed"))
    for (s, t), mat in delta.items():
        e = EdgeKey(MAP_NAMES[n][2] + "_*", NodeKey(lower, "Z", s, DegreeExpr(t)), NodeKey(lower, "Z", s + 1, DegreeExpr(t + k)))
        facts.append(Fact("edge", e, rank_of(mat, p), f"computed: connecting homomorphism of the cofibration for V({n})", "computed"))
    chains = [instantiate_les("covariant", n, "Z", t, 0, max_s, p) for t in range(max_t + 1)]
    d = saturate(chains, facts)
    rows = []
    mismatches = []
    for s in range(max_s + 1):
        for t in range(max_t + 1):
            node = NodeKey(upper, "Z", s, DegreeExpr(t))
            got = d.dim(node)
            want = r_up.dim_ext(s, t)
            rows.append((s, t, got, want))
            if got is not None and got != want:
                mismatches.append({"s": s, "t": t, "solver": got, "direct": want})
    decided = sum(1 for r in rows if r[2] is not None)
    return {"p": p, "n": n, "max_s": max_s, "max_t": max_t, "nodes": len(rows), "decided": decided,
            "mismatches": mismatches, "ok": not mismatches}


def shuffled_rule_order(rng: random.Random) -> List[str]:
    order = list(RULES)
    rng.shuffle(order)
    return order
