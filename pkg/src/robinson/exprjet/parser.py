"""Recursive-descent parser for coordinate expressions.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | factor
    factor := base ('^' ['+' | '-'] integer)?
    base   := number | 'i' | identifier | function '(' expr ')' | '(' expr ')'

Unary signs and negative integer exponents extend the bare grammar so that
catalog formulas such as ``-u/conj(z)`` and ``(1 + w*conj(w)/4)^-2`` can be
written directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .jet import FUNCTIONS


class ExpressionError(ValueError):
    pass


class ParseError(ExpressionError):
    def __init__(self, message, text="", position=None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}: {text!r}" if text else f"{message}{where}")
        self.position = position


class UnknownIdentifier(ParseError):
    pass


class ArityError(ParseError):
    pass


# --- tree ----------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, ImagUnit, Sym, Neg, BinOp, Pow, Call]


def to_text(node):
    """Print a tree so that parsing the output reproduces the same tree."""
    if isinstance(node, Num):
        v = complex(node.value)
        if v.imag == 0:
            return repr(v.real)
        return f"({v.real!r} + {v.imag!r}*i)"
    if isinstance(node, ImagUnit):
        return "i"
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if not isinstance(node.base, (Sym, ImagUnit, Call, BinOp, Neg)):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def count_nodes(node):
    if isinstance(node, (Num, ImagUnit, Sym)):
        return 1
    if isinstance(node, (Neg, Call)):
        return 1 + count_nodes(node.operand if isinstance(node, Neg) else node.arg)
    if isinstance(node, Pow):
        return 1 + count_nodes(node.base)
    return 1 + count_nodes(node.left) + count_nodes(node.right)


def contains_nonholomorphic(node):
    if isinstance(node, Call):
        return node.func in ("conj", "re", "im") or contains_nonholomorphic(node.arg)
    if isinstance(node, Neg):
        return contains_nonholomorphic(node.operand)
    if isinstance(node, Pow):
        return contains_nonholomorphic(node.base)
    if isinstance(node, BinOp):
        return contains_nonholomorphic(node.left) or contains_nonholomorphic(node.right)
    return False


# --- tokenizer ------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError("unexpected character", text, pos + (len(text[pos:]) - len(text[pos:].lstrip())))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, names, definitions):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.names = names
        self.definitions = definitions

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected '{value}', found '{val or 'end of input'}'", self.text, pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected '{val}'", self.text, pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            operand = self.unary()
            return operand if val == "+" else Neg(operand)
        return self.factor()

    def factor(self):
        base = self.base()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] in ("+", "-"):
                sign = -1 if self.take()[1] == "-" else 1
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                raise ParseError("exponent must be an integer (use exp/log for other powers)",
                                 self.text, pos)
            return Pow(base, sign * int(val))
        return base

    def base(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if val in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ArityError(f"function '{val}' needs one argument", self.text, pos)
                self.take()
                arg = self.expr()
                if self.peek()[1] == ",":
                    raise ArityError(f"function '{val}' takes exactly one argument",
                                     self.text, self.peek()[2])
                self.expect(")")
                return Call(val, arg)
            if self.peek()[1] == "(" and val not in FUNCTIONS:
                raise UnknownIdentifier(f"unknown function '{val}'", self.text, pos)
            if val == "i":
                return ImagUnit()
            if val in self.definitions:
                return self.definitions[val]
            if val in self.names:
                return Sym(val)
            raise UnknownIdentifier(f"unknown identifier '{val}'", self.text, pos)
        raise ParseError(f"unexpected '{val or 'end of input'}'", self.text, pos)


def parse_tree(text, names=(), definitions=None):
    """Parse ``text`` into a tree; identifiers must be in ``names`` or
    ``definitions`` (name to already-parsed tree, inlined)."""
    return _Parser(text, frozenset(names), definitions or {}).parse()
