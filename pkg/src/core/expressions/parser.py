"""
Recursive descent parser for coefficient, delay, forcing and initial-function
expressions.

Grammar (lowest to highest precedence):

    additive       := multiplicative (("+" | "-") multiplicative)*
    multiplicative := unary (("*" | "/") unary)*
    unary          := ("-" | "+") unary | power
    power          := primary (("^" | "**") unary)?
    primary        := NUMBER | "t" | NAME "(" args ")" | "(" additive ")"

Unary minus binds looser than the power operator, so "-2^2" is -(2^2) = -4.
The power operator is right associative and accepts a signed exponent ("2^-3").
"""

import re
from typing import Dict, Iterable, List, Mapping, NamedTuple, Set, Tuple

from src.core.errors import ExprSyntaxError
from .ast import Binary, Constant, Expr, Unary, Variable

_TOKEN_PATTERN = re.compile(
    r"""
    (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    |(?P<name>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>\*\*|[-+*/^(),])
    |(?P<space>\s+)
    """,
    re.VERBOSE,
)

UNARY_FUNCTIONS = ("neg", "abs", "sin", "cos", "exp", "sqrt")
BINARY_FUNCTIONS = ("pow",)


class Token(NamedTuple):
    kind: str
    text: str
    position: int


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    while position < len(source):
        match = _TOKEN_PATTERN.match(source, position)
        if match is None:
            raise ExprSyntaxError(f"unexpected character {source[position]!r}", position, source)
        kind = match.lastgroup
        if kind != "space":
            text = match.group(kind)
            tokens.append(Token("op" if text == "**" else kind, "^" if text == "**" else text, position))
        position = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class ExpressionParser:
    """Turns expression text into an immutable Expr tree"""

    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _error(self, message: str, token: Token = None) -> ExprSyntaxError:
        token = token or self.current
        return ExprSyntaxError(message, token.position, self.source)

    def _expect(self, text: str) -> Token:
        if self.current.kind != "op" or self.current.text != text:
            found = self.current.text or "end of expression"
            raise self._error(f"expected {text!r}, found {found!r}")
        return self._advance()

    def parse(self) -> Expr:
        if self.current.kind == "end":
            raise self._error("empty expression")
        tree = self._additive()
        if self.current.kind != "end":
            raise self._error(f"unexpected {self.current.text!r}")
        return tree

    def _additive(self) -> Expr:
        left = self._multiplicative()
        while self.current.kind == "op" and self.current.text in ("+", "-"):
            op = self._advance().text
            left = Binary(op=op, left=left, right=self._multiplicative())
        return left

    def _multiplicative(self) -> Expr:
        left = self._unary()
        while self.current.kind == "op" and self.current.text in ("*", "/"):
            op = self._advance().text
            left = Binary(op=op, left=left, right=self._unary())
        return left

    def _unary(self) -> Expr:
        if self.current.kind == "op" and self.current.text == "-":
            self._advance()
            return Unary(op="neg", operand=self._unary())
        if self.current.kind == "op" and self.current.text == "+":
            self._advance()
            return self._unary()
        return self._power()

    def _power(self) -> Expr:
        base = self._primary()
        if self.current.kind == "op" and self.current.text == "^":
            self._advance()
            return Binary(op="^", left=base, right=self._unary())
        return base

    def _primary(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Constant(value=float(token.text))
        if token.kind == "name":
            return self._name()
        if token.kind == "op" and token.text == "(":
            self._advance()
            inner = self._additive()
            self._expect(")")
            return inner
        if token.kind == "end":
            raise self._error("dangling operator: expression ends where an operand is expected")
        raise self._error(f"unexpected {token.text!r} where an operand is expected")

    def _name(self) -> Expr:
        token = self._advance()
        if token.text == "t":
            return Variable()
        if token.text not in UNARY_FUNCTIONS + BINARY_FUNCTIONS:
            raise self._error(f"unknown identifier {token.text!r}", token)
        if not (self.current.kind == "op" and self.current.text == "("):
            raise self._error(f"function {token.text!r} must be followed by '('")
        self._advance()
        first = self._additive()
        if token.text in BINARY_FUNCTIONS:
            self._expect(",")
            second = self._additive()
            self._expect(")")
            return Binary(op="^", left=first, right=second)
        self._expect(")")
        return Unary(op=token.text, operand=first)


def parse(source: str) -> Expr:
    """
    Parse an expression in the variable t

    Raises:
        ExprSyntaxError: unbalanced parentheses, unknown identifiers or
            dangling operators, with the offending position
    """
    return ExpressionParser(source).parse()


def parse_value(value) -> Expr:
    """Config values may be numbers or expression strings"""
    if isinstance(value, bool):
        raise ExprSyntaxError("boolean is not an expression", 0, str(value))
    if isinstance(value, (int, float)):
        return Constant(value=float(value))
    return parse(str(value))


def substitute_parameters(source: str, parameters: Mapping[str, float]) -> Tuple[str, Set[str]]:
    """
    Replace named scalars by numeric literals before parsing

    Returns the rewritten text and the set of parameter names that occurred.
    """
    used: Set[str] = set()
    for name, value in parameters.items():
        pattern = re.compile(rf"\b{re.escape(name)}\b")
        if pattern.search(source):
            used.add(name)
            source = pattern.sub(f"({float(value)!r})", source)
    return source, used


def parameters_used(sources: Iterable[str], parameters: Mapping[str, float]) -> Dict[str, bool]:
    """Which parameters appear in at least one of the sources"""
    seen = {name: False for name in parameters}
    for source in sources:
        _, used = substitute_parameters(source, parameters)
        for name in used:
            seen[name] = True
    return seen
