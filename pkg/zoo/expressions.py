"""Opcode expressions over two inputs, compiled into value tables.

Expressions use the names ``a`` and ``b`` (first and second input), integer
literals, arithmetic and bitwise operators, comparisons, conditional
expressions and ``min``/``max``. The result is reduced modulo ``|V|``.
"""

import ast
import operator
from typing import Callable, Dict, Tuple

from core.shared import ConfigError

ValueTable = Tuple[Tuple[int, ...], ...]

_BINARY_OPS: Dict[type, Callable[[int, int], int]] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
    ast.BitAnd: operator.and_,
    ast.BitOr: operator.or_,
    ast.BitXor: operator.xor,
    ast.LShift: operator.lshift,
    ast.RShift: operator.rshift,
}

_UNARY_OPS: Dict[type, Callable[[int], int]] = {
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
    ast.Invert: operator.invert,
}

_COMPARE_OPS: Dict[type, Callable[[int, int], bool]] = {
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
}

_FUNCTIONS = {"min": min, "max": max}

# Bounds on shift counts, exponents and intermediate results.
_MAX_SHIFT = 4096
_MAX_BITS = 1 << 16


def _check(node: ast.AST, text: str) -> None:
    for child in ast.walk(node):
        if isinstance(child, (ast.Expression, ast.Load, ast.operator, ast.unaryop, ast.cmpop)):
            continue
        if isinstance(child, ast.BinOp) and type(child.op) in _BINARY_OPS:
            continue
        if isinstance(child, ast.UnaryOp) and type(child.op) in _UNARY_OPS:
            continue
        if isinstance(child, ast.Compare) and all(type(op) in _COMPARE_OPS for op in child.ops):
            continue
        if isinstance(child, ast.IfExp):
            continue
        if isinstance(child, ast.Name) and child.id in ("a", "b"):
            continue
        if isinstance(child, ast.Name) and child.id in _FUNCTIONS:
            continue
        if isinstance(child, ast.Constant) and type(child.value) is int:
            continue
        if (isinstance(child, ast.Call) and isinstance(child.func, ast.Name)
                and child.func.id in _FUNCTIONS and not child.keywords):
            continue
        raise ConfigError(f"unsupported construct {type(child).__name__} in expression {text!r}")


def _evaluate(node: ast.AST, env: Dict[str, int]) -> int:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, env)
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.BinOp):
        left, right = _evaluate(node.left, env), _evaluate(node.right, env)
        if isinstance(node.op, ast.Pow) and right < 0:
            raise ZeroDivisionError("negative exponent")
        if isinstance(node.op, (ast.Pow, ast.LShift)):
            if right > _MAX_SHIFT:
                raise ConfigError(f"operand {right} of {type(node.op).__name__} exceeds {_MAX_SHIFT}")
            grown = left.bit_length() * right if isinstance(node.op, ast.Pow) else left.bit_length() + right
            if grown > _MAX_BITS:
                raise ConfigError(f"intermediate value exceeds {_MAX_BITS} bits")
        result = _BINARY_OPS[type(node.op)](left, right)
        if result.bit_length() > _MAX_BITS:
            raise ConfigError(f"intermediate value exceeds {_MAX_BITS} bits")
        return result
    if isinstance(node, ast.UnaryOp):
        return _UNARY_OPS[type(node.op)](_evaluate(node.operand, env))
    if isinstance(node, ast.Compare):
        left = _evaluate(node.left, env)
        for op, comparator in zip(node.ops, node.comparators):
            right = _evaluate(comparator, env)
            if not _COMPARE_OPS[type(op)](left, right):
                return 0
            left = right
        return 1
    if isinstance(node, ast.IfExp):
        branch = node.body if _evaluate(node.test, env) else node.orelse
        return _evaluate(branch, env)
    if isinstance(node, ast.Call):
        return _FUNCTIONS[node.func.id](*(_evaluate(arg, env) for arg in node.args))
    raise ConfigError(f"unsupported construct {type(node).__name__}")


def compile_expression(text: str, modulus: int) -> ValueTable:
    """Evaluate ``text`` on all of ``Z_modulus x Z_modulus``.

    Raises ConfigError for syntax errors, unsupported constructs and inputs on
    which the expression is undefined (division by zero).
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ConfigError(f"invalid expression {text!r}: {e.msg}") from e
    _check(tree, text)

    rows = []
    for a in range(modulus):
        row = []
        for b in range(modulus):
            try:
                row.append(int(_evaluate(tree, {"a": a, "b": b})) % modulus)
            except (ZeroDivisionError, ValueError, OverflowError) as e:
                raise ConfigError(
                    f"expression {text!r} is not total: undefined at a={a}, b={b} ({e})"
                ) from e
            except ConfigError as e:
                raise ConfigError(f"expression {text!r} at a={a}, b={b}: {e}") from e
        rows.append(tuple(row))
    return tuple(rows)


def is_idempotent(table: ValueTable) -> bool:
    """``f(a, a) == a`` for every value."""
    return all(table[a][a] == a for a in range(len(table)))
