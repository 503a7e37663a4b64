import math
from typing import Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.core.errors import ExprDomainError

TimeArg = Union[float, np.ndarray]

UnaryOp = Literal["neg", "abs", "sin", "cos", "exp", "sqrt"]
BinaryOp = Literal["+", "-", "*", "/", "^"]

_UNARY_UFUNCS = {
    "neg": np.negative,
    "abs": np.abs,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
}

_BINARY_UFUNCS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}


class Expr(BaseModel):
    """Immutable expression tree in the single variable t"""

    model_config = ConfigDict(frozen=True)

    def evaluate(self, t: TimeArg) -> TimeArg:
        """
        Evaluate at a scalar time or elementwise over an array of times

        Raises:
            ExprDomainError: division by zero, sqrt of a negative number or an
                undefined power at one of the requested times
        """
        with np.errstate(all="ignore"):
            value = self._eval(np.asarray(t, dtype=float))
        if np.ndim(t) == 0:
            return float(value)
        return np.array(np.broadcast_to(value, np.shape(t)), dtype=float)

    def _eval(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def unparse(self) -> str:
        raise NotImplementedError

    @property
    def depends_on_t(self) -> bool:
        return False

    def __str__(self) -> str:
        return self.unparse()


class Constant(Expr):
    value: float

    @field_validator("value")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("expression constants must be finite")
        return value

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return np.float64(self.value)

    def unparse(self) -> str:
        text = repr(float(self.value))
        # a leading sign would re-parse as unary minus; keep it grouped
        return f"({text})" if text.startswith("-") else text


class Variable(Expr):
    name: Literal["t"] = "t"

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return t

    def unparse(self) -> str:
        return "t"

    @property
    def depends_on_t(self) -> bool:
        return True


class Unary(Expr):
    op: UnaryOp
    operand: Expr

    def _eval(self, t: np.ndarray) -> np.ndarray:
        arg = self.operand._eval(t)
        if self.op == "sqrt" and np.any(arg < 0):
            raise ExprDomainError("sqrt of a negative number", t=_first_time(t, arg < 0))
        return _UNARY_UFUNCS[self.op](arg)

    def unparse(self) -> str:
        if self.op == "neg":
            return f"(-{self.operand.unparse()})"
        return f"{self.op}({self.operand.unparse()})"

    @property
    def depends_on_t(self) -> bool:
        return self.operand.depends_on_t


class Binary(Expr):
    op: BinaryOp
    left: Expr
    right: Expr

    def _eval(self, t: np.ndarray) -> np.ndarray:
        lhs = self.left._eval(t)
        rhs = self.right._eval(t)
        if self.op == "/" and np.any(rhs == 0):
            raise ExprDomainError("division by zero", t=_first_time(t, rhs == 0))
        result = _BINARY_UFUNCS[self.op](lhs, rhs)
        if self.op == "^":
            undefined = np.isnan(result) & ~np.isnan(lhs) & ~np.isnan(rhs)
            if np.any(undefined):
                raise ExprDomainError("power of a negative base is undefined", t=_first_time(t, undefined))
            zero_division = (np.asarray(lhs) == 0) & (np.asarray(rhs) < 0)
            if np.any(zero_division):
                raise ExprDomainError("division by zero", t=_first_time(t, zero_division))
        return result

    def unparse(self) -> str:
        return f"({self.left.unparse()} {self.op} {self.right.unparse()})"

    @property
    def depends_on_t(self) -> bool:
        return self.left.depends_on_t or self.right.depends_on_t


def _first_time(t: np.ndarray, mask) -> float:
    """Time of the first offending sample, for error messages"""
    if np.ndim(t) == 0:
        return float(t)
    mask = np.broadcast_to(mask, np.shape(t))
    return float(t[np.argmax(mask)])


def evaluate(ast: Expr, t: TimeArg) -> TimeArg:
    return ast.evaluate(t)


def unparse(ast: Expr) -> str:
    return ast.unparse()


ZERO = Constant(value=0.0)
