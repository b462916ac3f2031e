from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamsext.may import (ONE, MayGenerator, MayMonomial, UpperBoundViolation, a, b, canonicalize, d1, e1_basis,
                          generators_up_to, h, monomials_up_to, parse_monomial, scan_entry, upper_bound_check,
                          vanishing_scan)
from adamsext.milnor import AlgebraContext
from adamsext.resolution import ExtChart

P = 5
CTX = AlgebraContext(P)


def test_generator_degrees():
    assert h(P, 1, 0).degree[:2] == (1, 8)
    assert h(P, 2, 0).degree[:2] == (1, 48)
    assert a(P, 0).degree[:2] == (1, 1)
    assert a(P, 1).degree[:2] == (1, 9)
    assert b(P, 1, 0).degree[:2] == (2, 40)
    assert [str(g) for g in generators_up_to(CTX, 48)] == ["a_0", "h_{1,0}", "a_1", "h_{1,1}", "b_{1,0}", "h_{2,0}"]
    with pytest.raises(ValueError):
        MayGenerator("x", 1, 0, P)


def test_pinpoints():
    for n in range(5):
        assert [str(m) for m in e1_basis(CTX, 1, 5**n * 8)] == [f"h_{{1,{n}}}"]
    assert [str(m) for m in e1_basis(CTX, 2, 88)] == ["h_{1,1}h_{2,0}"]
    assert parse_monomial("a_0^2h_{1,1}h_{1,3}", P) in e1_basis(CTX, 4, 1042)
    assert e1_basis(CTX, 0, 7).is_empty()
    assert list(e1_basis(CTX, 0, 0)) == [ONE]


def test_vanishing_scan():
    entries = vanishing_scan(CTX, 5, "p^n*q+(p+2)*q", range(3, 11))
    assert [e["n"] for e in entries] == list(range(3, 11))
    assert all(e["empty"] and e["witnesses"] == [] for e in entries)
    assert entries[0]["t"] == 125 * 8 + 56
    with pytest.raises(ValueError):
        vanishing_scan(CTX, 5, "n-20", range(3, 4))


def test_nonempty_scan_lists_witnesses():
    e = scan_entry(P, 2, 88)
    assert not e["empty"] and e["witnesses"] == ["h_{1,1}h_{2,0}"]


def brute_force_table(t_max, s_max):
    table = defaultdict(set)
    for m in monomials_up_to(CTX, t_max):
        if m.s <= s_max:
            table[(m.s, m.t)].add(m)
    return table


def test_enumeration_matches_brute_force():
    table = brute_force_table(300, 4)
    for s in range(1, 5):
        for t in range(301):
            assert set(e1_basis(CTX, s, t)) == table.get((s, t), set()), (s, t)


def test_enumeration_p3():
    ctx = AlgebraContext(3)
    table = defaultdict(set)
    for m in monomials_up_to(ctx, 120):
        if m.s <= 4:
            table[(m.s, m.t)].add(m)
    for s in range(1, 5):
        for t in range(121):
            assert set(e1_basis(ctx, s, t)) == table.get((s, t), set())


def test_canonicalize_signs():
    x, y = h(P, 1, 0), h(P, 1, 1)
    assert canonicalize([x, y]) == (1, MayMonomial.of(x, y))
    assert canonicalize([y, x]) == (-1, MayMonomial.of(x, y))
    assert canonicalize([x, x]) == (0, None)
    # b's and a's are even
    assert canonicalize([b(P, 1, 0), a(P, 0), a(P, 0)])[0] == 1
    with pytest.raises(ValueError):
        MayMonomial.of(y, x)


def test_parse_round_trip():
    for text in ["a_0^2h_{1,1}h_{1,3}", "h_{1,0}b_{1,0}^3", "a_1h_{2,0}", "1"]:
        assert str(parse_monomial(text, P)) == text
    with pytest.raises(ValueError):
        parse_monomial("h_{1,0}h_{1,0}", P)
    with pytest.raises(ValueError):
        parse_monomial("x_3", P)


def test_d1_values():
    assert d1(MayMonomial.of(h(P, 2, 0))) == {MayMonomial.of(h(P, 1, 0), h(P, 1, 1)): 1}
    assert d1(MayMonomial.of(a(P, 1))) == {MayMonomial.of(a(P, 0), h(P, 1, 0)): P - 1}
    assert d1(MayMonomial.of(h(P, 1, 3))) == {}
    assert d1(MayMonomial.of(b(P, 1, 0))) == {}


def product(x, y):
    sign, m = canonicalize(x.word() + y.word())
    return ({m: sign % P} if m is not None else {})


def add(acc, terms, c):
    for m, v in terms.items():
        acc[m] = (acc.get(m, 0) + c * v) % P
        if not acc[m]:
            del acc[m]


POOL = [m for m in monomials_up_to(CTX, 130) if m.s <= 4]


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(POOL), st.sampled_from(POOL))
def test_leibniz_rule(x, y):
    lhs = {}
    for m, c in product(x, y).items():
        add(lhs, d1(m), c)
    rhs = {}
    for m, c in d1(x).items():
        add(rhs, product(m, y), c)
    sign = -1 if (x.s + x.t) % 2 else 1
    for m, c in d1(y).items():
        add(rhs, product(x, m), sign * c)
    assert lhs == rhs


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(POOL))
def test_d1_squared_and_degrees(x):
    dx = d1(x)
    s, t, u = x.degree
    assert all(m.degree == (s + 1, t, u - 1) for m in dx)
    assert d1(dx) == {}


def test_upper_bound_check():
    chart = ExtChart(P, "sphere", 1, 10, {(0, 0): 1, (1, 1): 1, (1, 8): 1}, {})
    assert upper_bound_check(chart)["ok"]
    bad = ExtChart(P, "sphere", 1, 10, {(0, 0): 1, (1, 3): 1}, {})
    with pytest.raises(UpperBoundViolation):
        upper_bound_check(bad)
    assert upper_bound_check(bad, raise_on_violation=False)["violations"] == [{"s": 1, "t": 3, "ext": 1, "e1": 0}]
