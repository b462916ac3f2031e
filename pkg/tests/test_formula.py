import pytest

from adamsext.formula import FormulaError, compile_formula, evaluate, parse_range


def test_evaluate():
    assert evaluate("p^n*q+(p+2)*q", 5, 3) == 1056
    assert evaluate("2*p*q+q", 5) == 88
    assert evaluate("q*(p^n+2*p+1)+1", 5, 3) == 1089
    assert evaluate("2^3^2", 5) == 512
    f = compile_formula("p^n")
    assert f.uses_n and f.text == "p^n" and f(7, 2) == 49
    assert not compile_formula("q").uses_n


@pytest.mark.parametrize("bad", ["", "p-1", "x", "p^", "(p+1", "p q", "import os", "1/2", "p**2"])
def test_rejects(bad):
    with pytest.raises(FormulaError):
        compile_formula(bad)


def test_n_required():
    with pytest.raises(FormulaError):
        evaluate("p^n", 5)


def test_ranges():
    assert parse_range("3..10") == list(range(3, 11))
    assert parse_range("4") == [4]
    assert parse_range("1,3,5") == [1, 3, 5]
    for bad in ("3..", "a", "5..2"):
        with pytest.raises(FormulaError):
            parse_range(bad)
