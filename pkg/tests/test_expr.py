import math

import numpy as np
import pytest

from telegraph_dqm.expr import ExpressionError, compile_expression


def test_scalar_and_vector_evaluation():
    f = compile_expression("exp(-t) * sinh(x) * sinh(y)")
    assert f(0.3, 0.4, 1.0) == pytest.approx(math.exp(-1) * math.sinh(0.3) * math.sinh(0.4))
    xs = np.linspace(0, 1, 5)
    assert f(xs, 0.5, 0.0).shape == (5,)
    assert f.source == "exp(-t) * sinh(x) * sinh(y)"


def test_constants_broadcast():
    f = compile_expression("2")
    assert np.array_equal(f(np.zeros(3), 0.0, 0.0), [2.0, 2.0, 2.0])


def test_caret_and_pi():
    f = compile_expression("x^2 + sin(pi*y) - log(1 + t) + cos(x) + -x")
    val = 0.25 + math.sin(math.pi * 0.3) - math.log(2.0) + math.cos(0.5) - 0.5
    assert f(0.5, 0.3, 1.0) == pytest.approx(val)


@pytest.mark.parametrize("text", [
    "", "x +", "__import__('os')", "x.real", "z", "sqrt(x)", "sin(x, y)",
    "x if y else t", "[x]", "'a'", "x // 2", "x % 2", "lambda: 1", "True",
])
def test_rejected(text):
    with pytest.raises(ExpressionError):
        compile_expression(text)
