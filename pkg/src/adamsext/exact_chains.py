"""Random exact chains of F_p vector spaces with known ground truth.

Used to test that the LES rules never conclude anything false. The chain is
built from explicit matrices (a split exact sequence conjugated by random
changes of basis), and every dim, rank, injectivity and surjectivity value
is then read off those matrices, not off the construction parameters.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from .fplinalg import rank_of
from .les_solver import Chain, DegreeExpr, EdgeKey, Fact, NodeKey


def _random_invertible(rng: random.Random, n: int, p: int) -> np.ndarray:
    while True:
        a = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64).reshape(n, n)
        if rank_of(a, p) == n:
            return a


def _inverse_mod(a: np.ndarray, p: int) -> np.ndarray:
    from .fplinalg import rref_array

    n = a.shape[0]
    aug = np.ascontiguousarray(np.concatenate([a % p, np.eye(n, dtype=np.int64)], axis=1))
    rref_array(aug, p)
    return np.ascontiguousarray(aug[:, n:])


@dataclass
class ExactChain:
    chain: Chain
    matrices: List[np.ndarray]
    truth: Dict[tuple, object]
    p: int

    def check_exact(self) -> bool:
        p = self.p
        for a, b in zip(self.matrices, self.matrices[1:]):
            if a.size and b.size and np.any((a @ b) % p):
                return False
            mid = a.shape[1]
            if rank_of(a, p) + rank_of(b, p) != mid:
                return False
        return True


def random_exact_chain(rng: random.Random, length: int, p: int = 5, max_rank: int = 3, max_extra: int = 2) -> ExactChain:
    """A chain with ``length`` edges, exact at each interior node (row-vector maps x -> x M)."""
    ranks = [rng.randint(0, max_rank) for _ in range(length)]
    head, tail = rng.randint(0, max_extra), rng.randint(0, max_extra)
    dims = [head + ranks[0]] + [ranks[k - 1] + ranks[k] for k in range(1, length)] + [ranks[-1] + tail]
    changes = [_random_invertible(rng, d, p) if d else np.zeros((0, 0), dtype=np.int64) for d in dims]
    mats = []
    for k in range(length):
        src, dst = dims[k], dims[k + 1]
        m = np.zeros((src, dst), dtype=np.int64)
        lead = head if k == 0 else ranks[k - 1]
        for j in range(ranks[k]):
            m[lead + j, j] = 1
        if src and dst:
            m = (_inverse_mod(changes[k], p) @ m @ changes[k + 1]) % p
        mats.append(m)
    nodes = [NodeKey("Z", "Z", k, DegreeExpr(k)) for k in range(length + 1)]
    edges = [EdgeKey(f"f{k}", nodes[k], nodes[k + 1]) for k in range(length)]
    truth: Dict[tuple, object] = {}
    for k, node in enumerate(nodes):
        truth[("dim", node)] = int(mats[k].shape[0]) if k < length else int(mats[-1].shape[1])
    for k, e in enumerate(edges):
        r = rank_of(mats[k], p)
        truth[("rank", e)] = r
        truth[("inj", e)] = r == truth[("dim", e.src)]
        truth[("surj", e)] = r == truth[("dim", e.dst)]
    return ExactChain(Chain(nodes, edges, "random"), mats, truth, p)


def reveal(ex: ExactChain, rng: random.Random, fraction: float = 0.4) -> List[Fact]:
    """A random subset of true statements, phrased as facts."""
    facts = []
    cite = "ground truth of a random exact chain"
    for prop, value in sorted(ex.truth.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        if rng.random() >= fraction:
            continue
        kind, target = prop
        if kind == "dim":
            facts.append(Fact("node", target, value, cite))
        elif kind == "rank":
            facts.append(Fact("edge", target, value, cite))
        elif value:
            facts.append(Fact("edge", target, "injective" if kind == "inj" else "surjective", cite))
    return facts


def false_conclusions(ex: ExactChain, derivation) -> List[str]:
    """Every derived statement that disagrees with the matrices."""
    bad = []
    for prop, value in derivation.conclusions().items():
        kind, target = prop
        if kind == "ub":
            if ex.truth[("dim", target)] > value:
                bad.append(f"bound {value} below true dim of {target.render()}")
            continue
        if ex.truth.get(prop) != value:
            bad.append(f"{kind} {target.render()}: concluded {value}, truth {ex.truth.get(prop)}")
    return bad
