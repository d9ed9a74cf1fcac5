"""Independent reference implementations the tests compare against.

Nothing here touches the package's numerics: derivatives come from
central differences, the special functions from direct series summation,
and expression evaluation from a postfix stack machine.  Expected values
frozen into the tests were produced by these routines.
"""

import math


def central_d1(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def central_d2(f, x, h=1e-4):
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def central_gradient(f, p, h=1e-6):
    x, y = p
    return ((f(x + h, y) - f(x - h, y)) / (2.0 * h),
            (f(x, y + h) - f(x, y - h)) / (2.0 * h))


def central_mixed(f, p, h=1e-4):
    x, y = p
    return (f(x + h, y + h) - f(x + h, y - h)
            - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h)


def central_jacobian(field_at, p, h=1e-6):
    """2x2 Jacobian of a plane field given as field_at(x, y) -> (a, b)."""
    x, y = p
    ax_p, bx_p = field_at(x + h, y)
    ax_m, bx_m = field_at(x - h, y)
    ay_p, by_p = field_at(x, y + h)
    ay_m, by_m = field_at(x, y - h)
    return ((ax_p - ax_m) / (2 * h), (ay_p - ay_m) / (2 * h)), \
           ((bx_p - bx_m) / (2 * h), (by_p - by_m) / (2 * h))


def shc_series(x, tol=1e-22):
    """sh(x)/x summed term by term: sum x^{2k} / (2k+1)!."""
    term = 1.0
    total = 1.0
    k = 0
    while abs(term) > tol * abs(total):
        k += 1
        term *= x * x / ((2 * k) * (2 * k + 1))
        total += term
        if k > 400:
            raise RuntimeError("series did not converge")
    return total


def shc_prime_series(x, tol=1e-22):
    """d/dx sh(x)/x = sum 2k x^{2k-1} / (2k+1)!."""
    if x == 0.0:
        return 0.0
    coeff = 1.0  # x^{2k} / (2k+1)! at k = 0
    total = 0.0
    k = 0
    while True:
        k += 1
        coeff *= x * x / ((2 * k) * (2 * k + 1))
        term = 2 * k * coeff / x
        total += term
        if abs(term) <= tol * max(abs(total), 1e-300):
            return total
        if k > 400:
            raise RuntimeError("series did not converge")


def sinc_series(x, tol=1e-22):
    """sin(x)/x summed term by term: sum (-1)^k x^{2k} / (2k+1)!."""
    term = 1.0
    total = 1.0
    k = 0
    while abs(term) > tol * max(abs(total), 1e-300):
        k += 1
        term *= -x * x / ((2 * k) * (2 * k + 1))
        total += term
        if k > 400:
            raise RuntimeError("series did not converge")
    return total


_POSTFIX_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sh": math.sinh,
    "ch": math.cosh,
    "th": math.tanh,
    "sqrt": math.sqrt,
    "shc": lambda v: shc_series(v) if abs(v) < 1.0 else math.sinh(v) / v,
}

_POSTFIX_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": math.pow,
}


def postfix_eval(tokens, t):
    """Stack evaluation of a postfix token list.

    Tokens: floats, "t", unary "neg", function names, binary operators.
    Mirrors the coefficient grammar's semantics operation for operation so
    agreement can be checked to the last bit.
    """
    stack = []
    for tok in tokens:
        if isinstance(tok, float):
            stack.append(tok)
        elif tok == "t":
            stack.append(t)
        elif tok == "neg":
            stack.append(-stack.pop())
        elif tok in _POSTFIX_FUNCTIONS:
            stack.append(_POSTFIX_FUNCTIONS[tok](stack.pop()))
        else:
            b = stack.pop()
            a = stack.pop()
            stack.append(_POSTFIX_BINARY[tok](a, b))
    if len(stack) != 1:
        raise ValueError("malformed postfix expression")
    return stack[0]
