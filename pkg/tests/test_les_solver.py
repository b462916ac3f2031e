import json
import random

import pytest

from adamsext.exact_chains import false_conclusions, random_exact_chain, reveal
from adamsext.les_solver import (PROPOSITIONS, ContradictionError, DegreeExpr, EdgeKey, Fact, FactBase, NodeKey,
                                 cross_check, instantiate_les, load_factbase, replay_all, replay_proposition,
                                 saturate, shuffled_rule_order)
from adamsext.les_solver import _scripts

EXPECTED = {"2.2": 1, "2.3": 2, "2.5": 0, "2.6": 1, "2.7": 1}


def test_degree_expressions():
    e = DegreeExpr(56, 1)
    assert e.at(5, 3) == 1000 + 56
    assert (e + 1).render() == "p^nq+57"
    assert (e - 49) == DegreeExpr(7, 1)
    assert DegreeExpr(-9, 0).render() == "-9"
    assert DegreeExpr.from_json(e.to_json()) == e


def test_covariant_chain_shape():
    c = instantiate_les("covariant", 1, "Z", DegreeExpr(49, 1), 2, 2)
    assert [n.render() for n in c.nodes] == [
        "Ext^{1,p^nq+40}(H*M,Z_p)", "Ext^{2,p^nq+49}(H*M,Z_p)", "Ext^{2,p^nq+49}(H*K,Z_p)",
        "Ext^{2,p^nq+40}(H*M,Z_p)", "Ext^{3,p^nq+49}(H*M,Z_p)"]
    assert [e.label for e in c.edges] == ["alpha_*", "i'_*", "j'_*", "alpha_*"]


def test_contravariant_chain_shape():
    c = instantiate_les("contravariant", 0, "M", DegreeExpr(56, 1), 3, 3)
    assert [n.s for n in c.nodes] == [2, 3, 3, 3, 4]
    assert c.nodes[1].t == DegreeExpr(57, 1) and c.nodes[3].t == DegreeExpr(56, 1)
    assert [e.label for e in c.edges] == ["p^*", "j^*", "i^*", "p^*"]


def test_bad_chain_arguments():
    with pytest.raises(ValueError):
        instantiate_les("sideways", 0, "Z", 0, 0, 1)
    with pytest.raises(ValueError):
        instantiate_les("covariant", 3, "Z", 0, 0, 1)


@pytest.mark.parametrize("p", [5, 7])
def test_replays(p):
    for rep in replay_all(p=p):
        assert rep.ok, rep.to_text()
        assert rep.concluded == EXPECTED[rep.ident]
        assert rep.proof and rep.uncited_premises() == []
        facts = [s for s in rep.proof if s.rule == "fact"]
        assert facts and all(s.citation for s in facts)


def test_generator_labels():
    assert len(replay_proposition("2.3").generators) == 2
    assert replay_proposition("2.6").generators == ["beta_*i'_*i_*(h_n)"]


def test_replay_logs_are_deterministic():
    a = [json.dumps(r.to_json(), sort_keys=True) for r in replay_all()]
    b = [json.dumps(r.to_json(), sort_keys=True) for r in replay_all()]
    assert a == b
    text = replay_proposition("2.5").to_text()
    assert "Hence dim" in text and "[" in text


@pytest.mark.parametrize("ident", PROPOSITIONS)
def test_missing_fact_is_named(ident):
    fb = load_factbase(p=5)
    for key, citation in _scripts(5)[ident].needs:
        rep = replay_proposition(ident, fb.without(key))
        assert not rep.ok
        assert rep.missing == [{"target": key.to_json(), "target_text": key.render(), "citation": citation}]
        assert citation in rep.to_text()


def test_unknown_proposition():
    with pytest.raises(KeyError):
        replay_proposition("2.4")


def test_factbase_round_trip():
    fb = load_factbase(p=5)
    again = FactBase.from_json(json.loads(fb.dumps()))
    assert again.dumps() == fb.dumps()
    assert all(f.citation for f in fb.facts)
    inert = [f for f in fb.facts if f.inert]
    assert len(inert) == 2 and all("d_2" in str(f.value) for f in inert)


def test_uncited_fact_rejected():
    node = NodeKey("Z", "Z", 1, DegreeExpr(3))
    with pytest.raises(ValueError):
        Fact("node", node, 0, "")
    with pytest.raises(ValueError):
        Fact("node", node, -1, "x")


def test_contradiction_reports_premises():
    c = random_exact_chain(random.Random(1), 2).chain
    a, b, d = c.nodes
    facts = [Fact("node", a, 0, "first"), Fact("node", d, 0, "second"), Fact("node", b, 1, "third"),
             Fact("node", b, 1, "third again")]
    # a 0 -> X -> 0 segment with X of dim 1 is impossible
    with pytest.raises(ContradictionError) as info:
        saturate(c, facts)
    cites = " ".join(info.value.citations())
    assert "first" in cites and "second" in cites and "third" in cites


def test_soundness_on_random_chains():
    rng = random.Random(7)
    for _ in range(300):
        ex = random_exact_chain(rng, rng.randint(2, 7))
        assert ex.check_exact()
        assert false_conclusions(ex, saturate(ex.chain, reveal(ex, rng))) == []


def test_confluence_under_rule_and_fact_order():
    rng = random.Random(11)
    for _ in range(200):
        ex = random_exact_chain(rng, rng.randint(2, 6))
        facts = reveal(ex, rng, 0.5)
        base = saturate(ex.chain, facts).conclusions()
        for _ in range(3):
            shuffled = facts[:]
            rng.shuffle(shuffled)
            got = saturate(ex.chain, shuffled, shuffled_rule_order(rng)).conclusions()
            assert got == base


def test_full_reveal_decides_everything():
    rng = random.Random(5)
    ex = random_exact_chain(rng, 5)
    facts = [Fact("node", n, ex.truth[("dim", n)], "truth") for n in ex.chain.nodes]
    facts += [Fact("edge", e, ex.truth[("rank", e)], "truth") for e in ex.chain.edges]
    d = saturate(ex.chain, facts)
    for e in ex.chain.edges:
        assert d.rank(e) == ex.truth[("rank", e)]


@pytest.mark.parametrize("n", [0, 1])
def test_cross_check(n):
    rep = cross_check(5, n, 2, 45)
    assert rep["ok"] and rep["mismatches"] == []
    assert rep["decided"] == rep["nodes"]
