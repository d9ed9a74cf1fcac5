# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled hot kernels; mirror of `_kernels_py` (see that module for docs)."""

from libc.math cimport cosh as c_cosh, fabs, isfinite, sinh as c_sinh

from .errors import DomainError, RangeOverflowError

# the wide radius keeps the shc_prime quotient clear of cancellation
SERIES_CUTOFF = 0.1
OVERFLOW_LIMIT = 700.0

cdef double _CUTOFF = 0.1
cdef double _LIMIT = 700.0


cdef inline int _guard(double x) except -1:
    if not isfinite(x):
        raise DomainError(f"non-finite argument {x!r}")
    if fabs(x) > _LIMIT:
        raise RangeOverflowError(f"|{x!r}| exceeds the sh/ch overflow guard")
    return 0


cdef inline double _shc(double x):
    cdef double x2, x4
    if fabs(x) < _CUTOFF:
        x2 = x * x
        x4 = x2 * x2
        return (1.0 + x2 / 6.0 + x4 / 120.0 + x2 * x4 / 5040.0
                + x4 * x4 / 362880.0)
    return c_sinh(x) / x


def shc(double x):
    """sh(x)/x extended with value 1 at x = 0 (even, >= 1 on the real line)."""
    _guard(x)
    return _shc(x)


def shc_prime(double x):
    """First derivative of shc: (ch(x) - shc(x))/x, odd, 0 at x = 0."""
    cdef double x2, x4
    _guard(x)
    if fabs(x) < _CUTOFF:
        x2 = x * x
        x4 = x2 * x2
        return x * (1.0 / 3.0 + x2 / 30.0 + x4 / 840.0 + x2 * x4 / 45360.0
                    + x4 * x4 / 3991680.0)
    return (c_cosh(x) - c_sinh(x) / x) / x


cdef inline double _shc_minus_ch_over(double q):
    cdef double q2
    if fabs(q) < 0.05:
        q2 = q * q
        return -q * (1.0 / 3.0 + q2 * (1.0 / 30.0 + q2 * (1.0 / 840.0
                                                          + q2 / 45360.0)))
    return (c_sinh(q) / q - c_cosh(q)) / q


def mp_rhs(double x, double y, double z, double c,
           double b1, double b2, double b3):
    cdef double q = z * x * x
    cdef double s, ch, dx, dy3, dy
    _guard(q)
    s = _shc(q)
    ch = c_cosh(q)
    dx = -0.5 * b2 * s * x + b3 * s * y
    if c == 0.0:
        dy3 = z * x * y * y * _shc_minus_ch_over(q)
    else:
        dy3 = c * ch / (x * x * x * s * s) + (s - ch) * y * y / x
    dy = -b1 * x + b2 * (ch - 0.5 * s) * y + b3 * dy3
    return dx, dy


def cr_rhs(double u, double v, double z, double b1, double b2, double b3):
    cdef double w = 2.0 * z / v
    cdef double s, ch, du, dv
    _guard(w)
    s = _shc(w)
    ch = c_cosh(w)
    du = b1 + b2 * u * ch + b3 * (u * u - v * v / (s * s)) * ch
    dv = b2 * v * s + b3 * 2.0 * u * v * s
    return du, dv


def r2_rhs(double u, double v, double z, double b1, double b2, double b3):
    cdef double m = u - v
    cdef double w = 2.0 * z / m
    cdef double s, ch, p, sym, alt
    _guard(w)
    s = _shc(w)
    ch = c_cosh(w)
    p = u + v
    sym = 0.5 * b2 * p * ch + 0.25 * b3 * (p * p + m * m / (s * s)) * ch
    alt = 0.5 * b2 * m * s + 0.5 * b3 * p * m * s
    return b1 + sym + alt, b1 + sym - alt
