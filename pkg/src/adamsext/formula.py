"""Degree formulas: integers, the symbols p, q, n, and the operators + * ^ with parentheses.

Anything else (minus signs, division, other names) is rejected, so a formula
always evaluates to a nonnegative integer.
"""

from __future__ import annotations

import re
from typing import Callable, List

_TOKEN = re.compile(r"\s*(?:(\d+)|([pqn])|([+*^()]))")


class FormulaError(ValueError):
    pass


def _tokenize(text: str) -> List[str]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos:pos + 1]!r} at position {pos} in {text!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    if not out:
        raise FormulaError("empty formula")
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise FormulaError("formula ends unexpectedly")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() == "+":
            self.take()
            node = ("+", node, self.term())
        return node

    def term(self):
        node = self.power()
        while self.peek() == "*":
            self.take()
            node = ("*", node, self.power())
        return node

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            return ("^", base, self.power())
        return base

    def atom(self):
        tok = self.take()
        if tok == "(":
            node = self.expr()
            if self.take() != ")":
                raise FormulaError("missing closing parenthesis")
            return node
        if tok.isdigit():
            return ("num", int(tok))
        if tok in ("p", "q", "n"):
            return ("var", tok)
        raise FormulaError(f"unexpected token {tok!r}")


def _eval(node, env):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "var":
        if node[1] not in env:
            raise FormulaError(f"formula uses {node[1]!r} but no value was given")
        return env[node[1]]
    a, b = _eval(node[1], env), _eval(node[2], env)
    if kind == "+":
        return a + b
    if kind == "*":
        return a * b
    return a**b


def compile_formula(text: str) -> Callable[..., int]:
    """Parse once; the result is called as ``f(p=5, n=3)`` (q is derived from p)."""
    parser = _Parser(_tokenize(text))
    tree = parser.expr()
    if parser.peek() is not None:
        raise FormulaError(f"trailing input after position {parser.i} in {text!r}")

    def f(p: int, n: int | None = None) -> int:
        env = {"p": p, "q": 2 * (p - 1)}
        if n is not None:
            env["n"] = n
        return _eval(tree, env)

    f.text = text
    f.uses_n = any(tok == "n" for tok in parser.toks)
    return f


def evaluate(text: str, p: int, n: int | None = None) -> int:
    return compile_formula(text)(p, n)


def parse_range(text: str) -> List[int]:
    """``"3..10"`` (inclusive), ``"4"`` or ``"1,3,5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise FormulaError(f"empty range {text!r}")
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise FormulaError(f"malformed range {text!r}") from exc
