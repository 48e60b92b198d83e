"""Small arithmetic expression language for user-defined problems.

Allowed: numbers, ``x``, ``y``, ``t``, ``pi``, the operators ``+ - * / **``
and the functions ``sin cos sinh cosh exp log``. ``^`` is accepted as a
synonym for ``**``. Expressions compile to numpy-vectorised callables.
"""

import ast

import numpy as np

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "exp": np.exp,
    "log": np.log,
}
CONSTANTS = {"pi": np.pi}
VARIABLES = ("x", "y", "t")

_ALLOWED_OPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


class ExpressionError(ValueError):
    pass


def _check(node, source):
    if isinstance(node, ast.Expression):
        return _check(node.body, source)
    if isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_OPS):
            raise ExpressionError(f"operator not allowed in {source!r}")
        _check(node.left, source)
        _check(node.right, source)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _ALLOWED_OPS):
            raise ExpressionError(f"operator not allowed in {source!r}")
        _check(node.operand, source)
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in FUNCTIONS):
            raise ExpressionError(f"unknown function in {source!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"functions take exactly one argument in {source!r}")
        _check(node.args[0], source)
    elif isinstance(node, ast.Name):
        if node.id not in VARIABLES and node.id not in CONSTANTS:
            raise ExpressionError(f"unknown name {node.id!r} in {source!r}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ExpressionError(f"only numeric literals allowed in {source!r}")
    else:
        raise ExpressionError(f"unsupported syntax {type(node).__name__} in {source!r}")


def compile_expression(text):
    """Compile `text` into ``f(x, y, t)`` returning arrays broadcast over the inputs."""
    source = text.strip().replace("^", "**")
    if not source:
        raise ExpressionError("empty expression")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    _check(tree, text)
    code = compile(tree, "<expression>", "eval")
    namespace = {"__builtins__": {}, **FUNCTIONS, **CONSTANTS}

    def f(x, y, t):
        x, y, t = np.broadcast_arrays(
            np.asarray(x, float), np.asarray(y, float), np.asarray(t, float)
        )
        val = eval(code, namespace, {"x": x, "y": y, "t": t})
        return np.broadcast_to(np.asarray(val, dtype=float), x.shape) + 0.0

    f.source = text.strip()
    return f
