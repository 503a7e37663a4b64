"""
Expression language for time-varying coefficients

- ast: immutable expression tree, vectorized evaluation and unparsing
- parser: recursive descent parser and parameter substitution
"""

from .ast import Binary, Constant, Expr, Unary, Variable, ZERO, evaluate, unparse
from .parser import parse, parse_value, parameters_used, substitute_parameters

__all__ = [
    "Binary",
    "Constant",
    "Expr",
    "Unary",
    "Variable",
    "ZERO",
    "evaluate",
    "parse",
    "parse_value",
    "parameters_used",
    "substitute_parameters",
    "unparse",
]
