"""Tiny arithmetic language for trend functions in config files.

Grammar: numbers, the variable ``t``, ``+ - * /``, unary minus, parentheses
and calls to ``sin``, ``cos``, ``exp`` and ``abs``. Expressions are parsed
with :mod:`ast` and every node outside that set is rejected, so evaluating
a config never runs arbitrary code.
"""

from __future__ import annotations

import ast
import operator

import numpy as np

from .errors import NumericalError, ValidationError

FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs}
BINARY = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


class TrendSyntaxError(ValidationError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}", index=position)
        self.position = position


def _compile(node, source):
    def fail(msg, n=node):
        raise TrendSyntaxError(msg, getattr(n, "col_offset", 0))

    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            fail(f"unsupported constant {node.value!r}")
        value = float(node.value)
        return lambda t: value
    if isinstance(node, ast.Name):
        if node.id != "t":
            fail(f"unknown name {node.id!r}")
        return lambda t: t
    if isinstance(node, ast.BinOp):
        op = BINARY.get(type(node.op))
        if op is None:
            fail(f"unsupported operator {type(node.op).__name__}")
        left, right = _compile(node.left, source), _compile(node.right, source)
        return lambda t: op(left(t), right(t))
    if isinstance(node, ast.UnaryOp):
        op = UNARY.get(type(node.op))
        if op is None:
            fail(f"unsupported operator {type(node.op).__name__}")
        arg = _compile(node.operand, source)
        return lambda t: op(arg(t))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            fail("only sin, cos, exp and abs may be called")
        if node.keywords or len(node.args) != 1:
            fail(f"{node.func.id} takes exactly one argument")
        fn = FUNCTIONS[node.func.id]
        arg = _compile(node.args[0], source)
        return lambda t: fn(arg(t))
    fail(f"unsupported syntax {type(node).__name__}")


class TrendExpression:
    """Parsed trend; call it with a scalar or array of ``t`` in ``[0, 1]``."""

    def __init__(self, source: str):
        if not isinstance(source, str):
            raise ValidationError(f"trend expression must be a string, got {type(source).__name__}")
        self.source = source
        try:
            tree = ast.parse(source.strip(), mode="eval")
        except SyntaxError as exc:
            raise TrendSyntaxError(f"invalid trend expression {source!r}: {exc.msg}", (exc.offset or 1) - 1) from None
        self._fn = _compile(tree.body, source)

    def __repr__(self):
        return f"TrendExpression({self.source!r})"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="raise"):
            try:
                out = np.broadcast_to(np.asarray(self._fn(t), dtype=float), t.shape).copy()
            except (FloatingPointError, ZeroDivisionError, OverflowError) as exc:
                raise NumericalError(f"trend {self.source!r} failed to evaluate: {exc}") from None
        if not np.all(np.isfinite(out)):
            raise NumericalError(f"trend {self.source!r} is not finite on the requested points")
        return float(out) if out.ndim == 0 else out


def parse_trend(expr: str) -> TrendExpression:
    return TrendExpression(expr)
