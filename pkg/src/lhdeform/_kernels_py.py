"""Pure-Python hot kernels: scalar hyperbolic-sinc family and the closed-form
right-hand sides of the three deformed systems.

This module is the fallback twin of the compiled extension `_kernels`; both
expose the same functions with identical semantics, and `backend` picks one at
import time.  Float in, float out; the dual-number and array paths live in
`numkit` and do not come through here.
"""

import math

from .errors import DomainError, RangeOverflowError

# the wide radius keeps the shc_prime quotient clear of cancellation
SERIES_CUTOFF = 0.1
OVERFLOW_LIMIT = 700.0


def _guard(x):
    if math.isinf(x) or math.isnan(x):
        raise DomainError(f"non-finite argument {x!r}")
    if abs(x) > OVERFLOW_LIMIT:
        raise RangeOverflowError(f"|{x!r}| exceeds the sh/ch overflow guard")


def _shc_val(x):
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        x4 = x2 * x2
        return (1.0 + x2 / 6.0 + x4 / 120.0 + x2 * x4 / 5040.0
                + x4 * x4 / 362880.0)
    return math.sinh(x) / x


def shc(x):
    """sh(x)/x extended with value 1 at x = 0 (even, >= 1 on the real line)."""
    x = float(x)
    _guard(x)
    return _shc_val(x)


def shc_prime(x):
    """First derivative of shc: (ch(x) - shc(x))/x, odd, 0 at x = 0."""
    x = float(x)
    _guard(x)
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        x4 = x2 * x2
        return x * (1.0 / 3.0 + x2 / 30.0 + x4 / 840.0 + x2 * x4 / 45360.0
                    + x4 * x4 / 3991680.0)
    return (math.cosh(x) - math.sinh(x) / x) / x


def _shc_minus_ch_over(q):
    """(shc(q) - ch(q)) / q; series below 0.05 where the quotient cancels."""
    if abs(q) < 0.05:
        q2 = q * q
        return -q * (1.0 / 3.0 + q2 * (1.0 / 30.0 + q2 * (1.0 / 840.0
                                                          + q2 / 45360.0)))
    return (math.sinh(q) / q - math.cosh(q)) / q


def mp_rhs(x, y, z, c, b1, b2, b3):
    """Field of the deformed oscillator system: b1*X1 + b2*X2 + b3*X3 at (x, y).

    X1 = -x d/dy
    X2 = (ch(q) - shc(q)/2) y d/dy - shc(q) x/2 d/dx          q = z x^2
    X3 = shc(q) y d/dx + (c ch(q)/(x^3 shc(q)^2)
                          + (shc(q) - ch(q)) y^2 / x) d/dy

    At c = 0 the barrier term drops and the X3 quotient continues
    smoothly through x = 0.
    """
    q = z * x * x
    _guard(q)
    s = _shc_val(q)
    ch = math.cosh(q)
    dx = -0.5 * b2 * s * x + b3 * s * y
    if c == 0.0:
        dy3 = z * x * y * y * _shc_minus_ch_over(q)
    else:
        dy3 = c * ch / (x * x * x * s * s) + (s - ch) * y * y / x
    dy = -b1 * x + b2 * (ch - 0.5 * s) * y + b3 * dy3
    return dx, dy


def cr_rhs(u, v, z, b1, b2, b3):
    """Field of the deformed Riccati system: b1*X1 + b2*X2 + b3*X3 at (u, v).

    X1 = d/du
    X2 = u ch(w) d/du + v shc(w) d/dv                          w = 2 z / v
    X3 = (u^2 - v^2/shc(w)^2) ch(w) d/du + 2 u v shc(w) d/dv
    """
    w = 2.0 * z / v
    _guard(w)
    s = _shc_val(w)
    ch = math.cosh(w)
    du = b1 + b2 * u * ch + b3 * (u * u - v * v / (s * s)) * ch
    dv = b2 * v * s + b3 * 2.0 * u * v * s
    return du, dv


def r2_rhs(u, v, z, b1, b2, b3):
    """Field of the deformed two-Riccati system: b1*X1 + b2*X2 + b3*X3.

    With w = 2 z/(u - v), p = u + v, m = u - v:
    X1 = d/du + d/dv
    X2 = p ch(w)/2 (d/du + d/dv) + m shc(w)/2 (d/du - d/dv)
    X3 = (p^2 + m^2/shc(w)^2) ch(w)/4 (d/du + d/dv)
         + p m shc(w)/2 (d/du - d/dv)
    """
    m = u - v
    w = 2.0 * z / m
    _guard(w)
    s = _shc_val(w)
    ch = math.cosh(w)
    p = u + v
    sym = 0.5 * b2 * p * ch + 0.25 * b3 * (p * p + m * m / (s * s)) * ch
    alt = 0.5 * b2 * m * s + 0.5 * b3 * p * m * s
    du = b1 + sym + alt
    dv = b1 + sym - alt
    return du, dv
