"""Recursive-descent parser for the expression language.

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := rational | ident | call | '(' expr ')'
    call   := ident '(' expr (',' expr)* ')'

Rationals are ``p`` or ``p/q``; ``/`` has no other meaning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        detail = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")
        self.offset = offset
        self.expected = expected


# function name -> arity; the first argument of the starred ones is an integer k
FUNCTIONS = {
    "ch": 1, "psi": 2, "psiH": 2, "td": 1, "rho": 2, "push": 2,
    "L": 1, "exp": 1, "log": 1, "inv": 1,
}
INDEXED = {"psi", "psiH", "rho"}


@dataclass(frozen=True)
class Num:
    num: int
    den: int = 1


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


Expr = Union[Num, Sym, Neg, BinOp, Pow, Call]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("int", m.group(1), start))
        elif m.group(2):
            tokens.append(("ident", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^/(),":
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        if self.tok[0] != kind:
            raise ParseError(f"unexpected {self.tok[1] or 'end of input'!r}",
                             self.tok[2], frozenset({kind}))
        t = self.tok
        self.i += 1
        return t

    def expr(self) -> Expr:
        if self.tok[0] == "-":
            self.i += 1
            node: Expr = Neg(self.term())
        else:
            node = self.term()
        while self.tok[0] in ("+", "-"):
            op = self.take(self.tok[0])[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.tok[0] == "*":
            self.i += 1
            node = BinOp("*", node, self.factor())
        return node

    def factor(self) -> Expr:
        node = self.atom()
        if self.tok[0] == "^":
            self.i += 1
            node = Pow(node, int(self.take("int")[1]))
        return node

    def atom(self) -> Expr:
        kind, value, offset = self.tok
        if kind == "int":
            self.i += 1
            if self.tok[0] == "/":
                self.i += 1
                return Num(int(value), int(self.take("int")[1]))
            return Num(int(value))
        if kind == "ident":
            self.i += 1
            if self.tok[0] != "(":
                return Sym(value)
            return self.call(value, offset)
        if kind == "(":
            self.i += 1
            node = self.expr()
            self.take(")")
            return node
        raise ParseError(f"unexpected {value or 'end of input'!r}", offset,
                         frozenset({"int", "ident", "("}))

    def call(self, name: str, offset: int) -> Call:
        if name not in FUNCTIONS:
            raise ParseError(f"unknown function {name!r}", offset, frozenset(FUNCTIONS))
        self.take("(")
        args = [self.expr()]
        while self.tok[0] == ",":
            self.i += 1
            args.append(self.expr())
        self.take(")")
        if len(args) != FUNCTIONS[name]:
            raise ParseError(f"{name} takes {FUNCTIONS[name]} argument(s), got {len(args)}",
                             offset)
        if name in INDEXED and integer_value(args[0]) is None:
            raise ParseError(f"first argument of {name} must be an integer", offset)
        return Call(name, tuple(args))


def integer_value(node: Expr) -> int | None:
    if isinstance(node, Num) and node.den == 1:
        return node.num
    if isinstance(node, Neg) and isinstance(node.operand, Num) and node.operand.den == 1:
        return -node.operand.num
    return None


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    if p.tok[0] != "eof":
        raise ParseError(f"unexpected {p.tok[1]!r}", p.tok[2],
                         frozenset({"+", "-", "*", "^", "eof"}))
    return node


def to_source(node: Expr) -> str:
    """Render an AST so that ``parse_expr(to_source(n)) == n``."""
    if isinstance(node, Num):
        return str(node.num) if node.den == 1 else f"{node.num}/{node.den}"
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, Pow):
        base = to_source(node.base)
        if not isinstance(node.base, (Sym, Call)) and not (
                isinstance(node.base, Num) and node.base.den == 1):
            base = f"({base})"
        return f"{base}^{node.exp}"
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        if isinstance(node.operand, (Neg,)) or (
                isinstance(node.operand, BinOp) and node.operand.op in "+-"):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        left, right = to_source(node.left), to_source(node.right)
        if node.op in "+-":
            if _is_sum(node.right) or isinstance(node.right, Neg):
                right = f"({right})"
            return f"{left} {node.op} {right}"
        if _is_sum(node.left) or isinstance(node.left, Neg):
            left = f"({left})"
        if _is_sum(node.right) or isinstance(node.right, Neg) or (
                isinstance(node.right, BinOp) and node.right.op == "*"):
            right = f"({right})"
        return f"{left}*{right}"
    raise TypeError(f"not an expression node: {node!r}")


def _is_sum(node: Expr) -> bool:
    return isinstance(node, BinOp) and node.op in "+-"
