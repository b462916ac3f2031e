from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamsext.milnor import (UNIT, AlgebraContext, AlgebraElement, ContextMismatch, P, Q, basis_in_degree,
                             binomial_mod_p, degree_of, make_monomial, monomial_product, multinomial_mod_p, multiply)


def el(ctx, m):
    return AlgebraElement.monomial(ctx, m)


def dual_poincare(p, top):
    """Coefficients of the Poincare series of E(tau_0, ...) (x) P(xi_1, ...)."""
    series = [1] + [0] * top
    d = 1
    while 2 * d - 1 <= top:  # tau_i in degree 2p^i - 1
        deg = 2 * d - 1
        series = [series[t] + (series[t - deg] if t >= deg else 0) for t in range(top + 1)]
        d *= p
    d = p
    while 2 * d - 2 <= top:  # xi_i in degree 2p^i - 2
        deg = 2 * d - 2
        for t in range(deg, top + 1):
            series[t] += series[t - deg]
        d *= p
    return series


@pytest.mark.parametrize("p,top", [(3, 80), (5, 120), (7, 100)])
def test_basis_dimensions(p, top):
    ctx = AlgebraContext(p)
    want = dual_poincare(p, top)
    for t in range(top + 1):
        basis = basis_in_degree(ctx, t)
        assert len(basis) == want[t], t
        assert all(degree_of(m, ctx) == t for m in basis)
        assert len(set(basis)) == len(basis)


def test_monomial_validation():
    with pytest.raises(ValueError):
        make_monomial((1, 0))
    with pytest.raises(ValueError):
        make_monomial((), (-1,))
    assert make_monomial((), (1, 0, 0)) == P(1)


def test_multinomials_against_factorials():
    for p in (3, 5, 7):
        for parts in [(1, 2), (3, 4), (p, p), (2 * p + 1, p - 1), (1, 1, 1), (p - 1, 1, 2)]:
            n = sum(parts)
            exact = factorial(n)
            for x in parts:
                exact //= factorial(x)
            assert multinomial_mod_p(parts, p) == exact % p
        for n in range(40):
            for k in range(n + 1):
                assert binomial_mod_p(n, k, p) == comb(n, k) % p


@pytest.mark.parametrize("p", [3, 5])
def test_single_row_products(p):
    """P(a)P(b) = sum_j C(a+b-(p+1)j, a-pj) P(a+b-(p+1)j, j)."""
    ctx = AlgebraContext(p)
    for a in range(0, 3 * p):
        for b in range(0, 3 * p):
            want = {}
            for j in range(0, min(a // p, b) + 1):
                c = comb(a + b - (p + 1) * j, a - p * j) % p
                if c:
                    want[make_monomial((), (a + b - (p + 1) * j, j))] = c
            assert multiply(el(ctx, P(a)), el(ctx, P(b))).terms == want


def test_adem_relations_p5():
    p = 5
    ctx = AlgebraContext(p)
    q = ctx.q
    for a in range(1, 6):
        for b in range(1, 6):
            if a >= p * b or (a + b) * q > 5 * q:
                continue
            lhs = multiply(el(ctx, P(a)), el(ctx, P(b)))
            rhs = AlgebraElement(ctx)
            for i in range(a // p + 1):
                c = (-1) ** (a + i) * comb((p - 1) * (b - i) - 1, a - p * i)
                if c % p:
                    rhs = rhs + multiply(el(ctx, P(a + b - i)), el(ctx, P(i))).scale(c)
            assert lhs == rhs, (a, b)


def test_q_relations():
    for p in (3, 5):
        ctx = AlgebraContext(p)
        q0 = el(ctx, Q(0))
        assert multiply(q0, q0).is_zero()
        for k in range(2):
            # Q_{k+1} = P^{p^k} Q_k - Q_k P^{p^k}
            pk = el(ctx, make_monomial((), (p**k,)))
            qk = el(ctx, Q(k))
            assert multiply(pk, qk) - multiply(qk, pk) == el(ctx, Q(k + 1))


def test_unit_and_context_errors():
    ctx = AlgebraContext(5)
    x = el(ctx, make_monomial((0,), (2, 1)))
    one = el(ctx, UNIT)
    assert multiply(one, x) == x == multiply(x, one)
    with pytest.raises(ContextMismatch):
        multiply(x, el(AlgebraContext(3), UNIT))
    with pytest.raises(ValueError):
        AlgebraElement(ctx, {P(1): 1, Q(0): 1})


def basis_elements(ctx, top):
    pool = [m for t in range(top + 1) for m in basis_in_degree(ctx, t)]
    return st.sampled_from(pool)


CTX3 = AlgebraContext(3)


@settings(max_examples=150, deadline=None)
@given(basis_elements(CTX3, 24), basis_elements(CTX3, 24), basis_elements(CTX3, 24))
def test_associativity(a, b, c):
    x, y, z = (el(CTX3, m) for m in (a, b, c))
    assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))


@settings(max_examples=150, deadline=None)
@given(basis_elements(CTX3, 30), basis_elements(CTX3, 30))
def test_products_are_homogeneous(a, b):
    deg = degree_of(a, CTX3) + degree_of(b, CTX3)
    for m, c in monomial_product(3, a, b):
        assert degree_of(m, CTX3) == deg
        assert 0 < c < 3
