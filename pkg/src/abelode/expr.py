"""Parser and evaluator for one-variable coefficient expressions.

Coefficient functions a_k(x) enter the system as strings like
``"1 - 1/x"`` or ``"3 - 2*exp(-2*x)"``.  This module turns them into
small immutable syntax trees that can be evaluated repeatedly during
root finding and integration.

Grammar (EBNF, whitespace insignificant):

    expr    = term   { ("+" | "-") term } ;
    term    = factor { ("*" | "/") factor } ;
    factor  = "-" factor | power ;
    power   = atom [ "^" factor ] ;
    atom    = NUMBER | "x" | "pi" | "e"
            | FUNC "(" expr ")" | "(" expr ")" ;
    FUNC    = "exp" | "log" | "sqrt" | "abs" ;

"^" binds tightest and is right-associative ("2^3^2" is 2^(3^2) = 512),
unary minus binds tighter than "*" and "/" but looser than "^"
("-x^2" is -(x^2)), everything else is left-associative.  Unary minus
evaluates as (0 - operand).

Evaluation is strict about domains: log/sqrt outside their domain,
division by zero, and overflow to a non-finite value raise
ExprDomainError instead of producing NaN or inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "ExprDomainError",
    "parse",
]

_FUNCTIONS = {
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}

_CONSTANTS = {
    "pi": math.pi,
    "e": math.e,
}


class ExprError(ValueError):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    """Malformed expression text.  ``offset`` is the byte offset of the fault."""

    def __init__(self, message: str, source: str, position: int):
        # position is a character index; report the byte offset into the
        # UTF-8 encoding so editors and logs agree on the location.
        offset = len(source[:position].encode("utf-8"))
        super().__init__(f"{message} at byte {offset} in {source!r}")
        self.offset = offset


class ExprDomainError(ExprError):
    """Evaluation left the real domain (log/sqrt argument, zero divisor,
    or overflow to a non-finite value)."""


@dataclass(frozen=True)
class _Num:
    value: float

    def eval(self, x: float) -> float:
        return self.value

    def pretty(self) -> str:
        return _format_number(self.value)

    precedence = 5


@dataclass(frozen=True)
class _Var:
    def eval(self, x: float) -> float:
        return x

    def pretty(self) -> str:
        return "x"

    precedence = 5


@dataclass(frozen=True)
class _Const:
    name: str

    def eval(self, x: float) -> float:
        return _CONSTANTS[self.name]

    def pretty(self) -> str:
        return self.name

    precedence = 5


@dataclass(frozen=True)
class _Neg:
    operand: object

    precedence = 3

    def eval(self, x: float) -> float:
        return 0.0 - self.operand.eval(x)

    def pretty(self) -> str:
        inner = self.operand.pretty()
        if self.operand.precedence < self.precedence:
            inner = f"({inner})"
        return f"-{inner}"


_BIN_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


@dataclass(frozen=True)
class _Bin:
    op: str
    left: object
    right: object

    @property
    def precedence(self) -> int:
        return _BIN_PRECEDENCE[self.op]

    def eval(self, x: float) -> float:
        a = self.left.eval(x)
        b = self.right.eval(x)
        try:
            if self.op == "+":
                return a + b
            if self.op == "-":
                return a - b
            if self.op == "*":
                return a * b
            if self.op == "/":
                if b == 0.0:
                    raise ExprDomainError(f"division by zero at x={x!r}")
                return a / b
            # right-associative power; math.pow rejects negative bases with
            # fractional exponents instead of wandering into complex values
            return math.pow(a, b)
        except OverflowError:
            raise ExprDomainError(f"overflow evaluating {self.op!r} at x={x!r}") from None
        except ValueError:
            raise ExprDomainError(
                f"domain error evaluating {self.op!r} at x={x!r}"
            ) from None

    def pretty(self) -> str:
        prec = self.precedence
        left = self.left.pretty()
        right = self.right.pretty()
        # "^" is right-associative, the rest left-associative: parenthesize
        # the side whose implicit grouping the bare text would get wrong.
        if self.op == "^":
            if self.left.precedence <= prec:
                left = f"({left})"
            if self.right.precedence < prec:
                right = f"({right})"
        else:
            if self.left.precedence < prec:
                left = f"({left})"
            if self.right.precedence <= prec:
                right = f"({right})"
        return f"{left} {self.op} {right}" if prec == 1 else f"{left}{self.op}{right}"


@dataclass(frozen=True)
class _Call:
    name: str
    argument: object

    precedence = 5

    def eval(self, x: float) -> float:
        value = self.argument.eval(x)
        try:
            result = _FUNCTIONS[self.name](value)
        except OverflowError:
            raise ExprDomainError(
                f"overflow in {self.name}({value!r}) at x={x!r}"
            ) from None
        except ValueError:
            raise ExprDomainError(
                f"{self.name}({value!r}) outside real domain at x={x!r}"
            ) from None
        return result

    def pretty(self) -> str:
        return f"{self.name}({self.argument.pretty()})"


def _format_number(value: float) -> str:
    text = repr(value)
    return text[:-2] if text.endswith(".0") else text


class _Tokenizer:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0

    def error(self, message: str, position: int | None = None) -> ExprSyntaxError:
        where = self.pos if position is None else position
        return ExprSyntaxError(message, self.source, where)

    def _skip_space(self) -> None:
        while self.pos < len(self.source) and self.source[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self._skip_space()
        if self.pos >= len(self.source):
            return None
        return self.source[self.pos]

    def take_operator(self, chars: str) -> str | None:
        ch = self.peek()
        if ch is not None and ch in chars:
            self.pos += 1
            return ch
        return None

    def expect(self, ch: str) -> None:
        if self.take_operator(ch) is None:
            raise self.error(f"expected {ch!r}")

    def take_number(self) -> float | None:
        self._skip_space()
        src, i = self.source, self.pos
        start = i
        while i < len(src) and src[i].isdigit():
            i += 1
        if i < len(src) and src[i] == ".":
            i += 1
            while i < len(src) and src[i].isdigit():
                i += 1
        if i == start or (i == start + 1 and src[start] == "."):
            return None
        if i < len(src) and src[i] in "eE":
            j = i + 1
            if j < len(src) and src[j] in "+-":
                j += 1
            if j < len(src) and src[j].isdigit():
                while j < len(src) and src[j].isdigit():
                    j += 1
                i = j
        text = src[start:i]
        self.pos = i
        try:
            return float(text)
        except ValueError:
            raise self.error(f"bad number {text!r}", start) from None

    def take_name(self) -> tuple[str, int] | None:
        self._skip_space()
        src, i = self.source, self.pos
        start = i
        while i < len(src) and (src[i].isalpha() or src[i] == "_"):
            i += 1
        if i == start:
            return None
        self.pos = i
        return src[start:i], start

    def at_end(self) -> bool:
        return self.peek() is None


class _Parser:
    def __init__(self, source: str):
        self.tokens = _Tokenizer(source)

    def parse(self) -> object:
        node = self.parse_expr()
        if not self.tokens.at_end():
            raise self.tokens.error("unexpected trailing input")
        return node

    def parse_expr(self) -> object:
        node = self.parse_term()
        while True:
            op = self.tokens.take_operator("+-")
            if op is None:
                return node
            node = _Bin(op, node, self.parse_term())

    def parse_term(self) -> object:
        node = self.parse_factor()
        while True:
            op = self.tokens.take_operator("*/")
            if op is None:
                return node
            node = _Bin(op, node, self.parse_factor())

    def parse_factor(self) -> object:
        if self.tokens.take_operator("-"):
            return _Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self) -> object:
        base = self.parse_atom()
        if self.tokens.take_operator("^"):
            # recurse through factor so "2^-3" parses and "^" right-associates
            return _Bin("^", base, self.parse_factor())
        return base

    def parse_atom(self) -> object:
        number = self.tokens.take_number()
        if number is not None:
            return _Num(number)
        if self.tokens.take_operator("("):
            node = self.parse_expr()
            self.tokens.expect(")")
            return node
        name_token = self.tokens.take_name()
        if name_token is not None:
            name, start = name_token
            if name in _FUNCTIONS:
                self.tokens.expect("(")
                argument = self.parse_expr()
                self.tokens.expect(")")
                return _Call(name, argument)
            if name == "x":
                return _Var()
            if name in _CONSTANTS:
                return _Const(name)
            raise self.tokens.error(f"unknown identifier {name!r}", start)
        raise self.tokens.error("expected a number, name or parenthesis")


class Expr:
    """A parsed expression in the single variable x.

    Immutable; safe to share between threads and equations.
    """

    __slots__ = ("source", "ast")

    def __init__(self, source: str, ast: object):
        self.source = source
        self.ast = ast

    def __call__(self, x: float) -> float:
        return self.eval(x)

    def eval(self, x: float) -> float:
        """Evaluate at x.  Raises ExprDomainError on any non-real outcome."""
        value = self.ast.eval(float(x))
        if not math.isfinite(value):
            raise ExprDomainError(f"non-finite value {value!r} at x={x!r}")
        return value

    def pretty(self) -> str:
        """Render with minimal parentheses; parse(pretty()) evaluates identically."""
        return self.ast.pretty()

    def __repr__(self) -> str:
        return f"Expr({self.source!r})"


def parse(source: str) -> Expr:
    """Parse an expression string; raises ExprSyntaxError with a byte offset."""
    if not isinstance(source, str):
        raise ExprSyntaxError("expression must be a string", str(source), 0)
    if not source.strip():
        raise ExprSyntaxError("empty expression", source, 0)
    return Expr(source, _Parser(source).parse())
