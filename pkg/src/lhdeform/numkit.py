"""Numeric foundation: tolerance policy, a forward-mode second-order dual
number, and the scalar special functions used by the realizations.

Every function here accepts plain floats, numpy arrays / numpy float scalars
(including longdouble, used where identities cancel catastrophically in
double), and `Dual2` jets.  Dual components may themselves be `Dual2`, which
is how second derivatives of derived quantities (Hamiltonian vector field
components, bracket functions) are obtained; the arithmetic is closed under
that nesting because the special functions are evaluated either as truncated
series or as algebraic combinations of exp/sh/ch, both of which propagate
through jets of any depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend as _backend
from .errors import DomainError, RangeOverflowError

# switch to the Taylor tails below this |x|: wide enough that the direct
# quotients (ch - sh/x)/x etc. never run into subtractive cancellation,
# small enough that the tails are exact to double rounding
SERIES_CUTOFF = 0.1
OVERFLOW_LIMIT = 700.0


@dataclass(frozen=True)
class Tolerances:
    """Numeric policy shared across modules.

    rel_identity   relative tolerance for algebraic identity checks
    abs_identity   absolute tolerance for quantities that should vanish
    fd_step        step for finite-difference test oracles
    domain_margin  half-width of the excluded strip around chart singular sets
    """

    rel_identity: float = 1e-9
    abs_identity: float = 1e-12
    fd_step: float = 1e-6
    domain_margin: float = 1e-8

    def __post_init__(self):
        for name in ("rel_identity", "abs_identity", "fd_step", "domain_margin"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        # fd_step**2 may only reach equality here in binary floating point
        # (squaring 1e-6 rounds to exactly 1e-12), hence >= rather than >.
        if not self.fd_step ** 2 >= self.abs_identity:
            raise ValueError("fd_step^2 must not fall below abs_identity; "
                             "the finite-difference noise floor would cross "
                             "the identity tolerance")


DEFAULT_TOLS = Tolerances()


class Dual2:
    """Second-order jet: value, first and second derivative along one seed.

    Arithmetic follows the product/chain rules truncated at second order.
    Components are floats for ordinary use; they may be `Dual2` themselves
    when a derivative is differentiated again (nesting discipline: wrap every
    coordinate of the inner evaluation, constants with zero seeds, so that
    the two jet levels never meet in one binary operation).
    """

    __slots__ = ("value", "d1", "d2")

    def __init__(self, value, d1=0.0, d2=0.0):
        self.value = value
        self.d1 = d1
        self.d2 = d2

    @classmethod
    def seed(cls, x):
        """Jet of the identity function at x."""
        return cls(x, 1.0, 0.0)

    def __repr__(self):
        return f"Dual2({self.value!r}, {self.d1!r}, {self.d2!r})"

    def __add__(self, other):
        if isinstance(other, Dual2):
            return Dual2(self.value + other.value, self.d1 + other.d1,
                         self.d2 + other.d2)
        return Dual2(self.value + other, self.d1, self.d2)

    __radd__ = __add__

    def __neg__(self):
        return Dual2(-self.value, -self.d1, -self.d2)

    def __sub__(self, other):
        if isinstance(other, Dual2):
            return Dual2(self.value - other.value, self.d1 - other.d1,
                         self.d2 - other.d2)
        return Dual2(self.value - other, self.d1, self.d2)

    def __rsub__(self, other):
        return Dual2(other - self.value, -self.d1, -self.d2)

    def __mul__(self, other):
        if isinstance(other, Dual2):
            return Dual2(self.value * other.value,
                         self.d1 * other.value + self.value * other.d1,
                         self.d2 * other.value + 2.0 * self.d1 * other.d1
                         + self.value * other.d2)
        return Dual2(self.value * other, self.d1 * other, self.d2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual2):
            q = self.value / other.value
            q1 = (self.d1 - q * other.d1) / other.value
            q2 = (self.d2 - q * other.d2 - 2.0 * q1 * other.d1) / other.value
            return Dual2(q, q1, q2)
        return Dual2(self.value / other, self.d1 / other, self.d2 / other)

    def __rtruediv__(self, other):
        q = other / self.value
        q1 = -q * self.d1 / self.value
        q2 = (-q * self.d2 - 2.0 * q1 * self.d1) / self.value
        return Dual2(q, q1, q2)

    def __pow__(self, n):
        if isinstance(n, Dual2):
            raise TypeError("only constant exponents are supported")
        if n == 2:
            return self * self
        f = self.value ** n
        f1 = n * self.value ** (n - 1)
        f2 = n * (n - 1) * self.value ** (n - 2)
        return Dual2(f, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)


def float_value(x):
    """Underlying float of a possibly nested jet (used for branch decisions)."""
    while isinstance(x, Dual2):
        x = x.value
    return float(x)


def _check_scalar(x):
    if math.isnan(x) or math.isinf(x):
        raise DomainError(f"non-finite argument {x!r}")


def _check_np(x, limit=None):
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite argument")
    if limit is not None and np.any(np.abs(x) > limit):
        raise RangeOverflowError("argument exceeds the sh/ch overflow guard")


def _is_np(x):
    return isinstance(x, (np.ndarray, np.floating))


# -- elementary functions, jet- and array-transparent ------------------------

def exp(x):
    if isinstance(x, Dual2):
        e = exp(x.value)
        return Dual2(e, e * x.d1, e * x.d1 * x.d1 + e * x.d2)
    if _is_np(x):
        if not np.all(np.isfinite(x)):
            raise DomainError("non-finite argument")
        if np.any(x > OVERFLOW_LIMIT):
            raise RangeOverflowError("exp argument exceeds the overflow guard")
        return np.exp(x)
    x = float(x)
    _check_scalar(x)
    if x > OVERFLOW_LIMIT:
        raise RangeOverflowError(f"exp({x!r}) exceeds the overflow guard")
    return math.exp(x)


def sh(x):
    if isinstance(x, Dual2):
        s, c = sh(x.value), ch(x.value)
        return Dual2(s, c * x.d1, s * x.d1 * x.d1 + c * x.d2)
    if _is_np(x):
        _check_np(x, OVERFLOW_LIMIT)
        return np.sinh(x)
    x = float(x)
    _check_scalar(x)
    if abs(x) > OVERFLOW_LIMIT:
        raise RangeOverflowError(f"sh({x!r}) exceeds the overflow guard")
    return math.sinh(x)


def ch(x):
    if isinstance(x, Dual2):
        s, c = sh(x.value), ch(x.value)
        return Dual2(c, s * x.d1, c * x.d1 * x.d1 + s * x.d2)
    if _is_np(x):
        _check_np(x, OVERFLOW_LIMIT)
        return np.cosh(x)
    x = float(x)
    _check_scalar(x)
    if abs(x) > OVERFLOW_LIMIT:
        raise RangeOverflowError(f"ch({x!r}) exceeds the overflow guard")
    return math.cosh(x)


def th(x):
    if isinstance(x, Dual2):
        t = th(x.value)
        sech2 = 1.0 - t * t
        return Dual2(t, sech2 * x.d1,
                     -2.0 * t * sech2 * x.d1 * x.d1 + sech2 * x.d2)
    if _is_np(x):
        _check_np(x)
        return np.tanh(x)
    x = float(x)
    _check_scalar(x)
    return math.tanh(x)


def sin(x):
    if isinstance(x, Dual2):
        s, c = sin(x.value), cos(x.value)
        return Dual2(s, c * x.d1, -s * x.d1 * x.d1 + c * x.d2)
    if _is_np(x):
        _check_np(x)
        return np.sin(x)
    x = float(x)
    _check_scalar(x)
    return math.sin(x)


def cos(x):
    if isinstance(x, Dual2):
        s, c = sin(x.value), cos(x.value)
        return Dual2(c, -s * x.d1, -c * x.d1 * x.d1 - s * x.d2)
    if _is_np(x):
        _check_np(x)
        return np.cos(x)
    x = float(x)
    _check_scalar(x)
    return math.cos(x)


def sqrt(x):
    if isinstance(x, Dual2):
        r = sqrt(x.value)
        f1 = 0.5 / r
        return Dual2(r, f1 * x.d1,
                     f1 * x.d2 - 0.25 / (x.value * r) * x.d1 * x.d1)
    if _is_np(x):
        _check_np(x)
        return np.sqrt(x)
    x = float(x)
    _check_scalar(x)
    return math.sqrt(x)


# -- the hyperbolic/trigonometric sinc pair ----------------------------------

def _shc_series(x):
    x2 = x * x
    x4 = x2 * x2
    return 1.0 + x2 / 6.0 + x4 / 120.0 + x2 * x4 / 5040.0 + x4 * x4 / 362880.0


def _shc_prime_series(x):
    x2 = x * x
    x4 = x2 * x2
    return x * (1.0 / 3.0 + x2 / 30.0 + x4 / 840.0 + x2 * x4 / 45360.0
                + x4 * x4 / 3991680.0)


def shc(x):
    """sh(x)/x, extended with shc(0) = 1.  Even, >= 1, increasing in |x|."""
    if isinstance(x, Dual2):
        if abs(float_value(x)) < SERIES_CUTOFF:
            return _shc_series(x)
        return sh(x) / x
    if _is_np(x):
        _check_np(x, OVERFLOW_LIMIT)
        if np.ndim(x) == 0:
            return _shc_series(x) if abs(x) < SERIES_CUTOFF else np.sinh(x) / x
        out = np.empty_like(x)
        small = np.abs(x) < SERIES_CUTOFF
        out[small] = _shc_series(x[small])
        xl = x[~small]
        out[~small] = np.sinh(xl) / xl
        return out
    return _backend.shc(x)


def shc_prime(x):
    """d/dx shc(x) = (ch(x) - shc(x))/x, odd, shc_prime(0) = 0."""
    if isinstance(x, Dual2):
        if abs(float_value(x)) < SERIES_CUTOFF:
            return _shc_prime_series(x)
        return (ch(x) - shc(x)) / x
    if _is_np(x):
        _check_np(x, OVERFLOW_LIMIT)
        if np.ndim(x) == 0:
            if abs(x) < SERIES_CUTOFF:
                return _shc_prime_series(x)
            return (np.cosh(x) - np.sinh(x) / x) / x
        out = np.empty_like(x)
        small = np.abs(x) < SERIES_CUTOFF
        out[small] = _shc_prime_series(x[small])
        xl = x[~small]
        out[~small] = (np.cosh(xl) - np.sinh(xl) / xl) / xl
        return out
    return _backend.shc_prime(x)


def _sinc_series(x):
    x2 = x * x
    x4 = x2 * x2
    return 1.0 - x2 / 6.0 + x4 / 120.0 - x2 * x4 / 5040.0 + x4 * x4 / 362880.0


def sinc(x):
    """sin(x)/x with sinc(0) = 1 (unnormalized)."""
    if isinstance(x, Dual2):
        if abs(float_value(x)) < SERIES_CUTOFF:
            return _sinc_series(x)
        return sin(x) / x
    if _is_np(x):
        _check_np(x)
        if np.ndim(x) == 0:
            return _sinc_series(x) if abs(x) < SERIES_CUTOFF else np.sin(x) / x
        out = np.empty_like(x)
        small = np.abs(x) < SERIES_CUTOFF
        out[small] = _sinc_series(x[small])
        xl = x[~small]
        out[~small] = np.sin(xl) / xl
        return out
    x = float(x)
    _check_scalar(x)
    if abs(x) < SERIES_CUTOFF:
        return _sinc_series(x)
    return math.sin(x) / x


# -- derivatives of plane functions ------------------------------------------

def jet_value(r):
    return r.value if isinstance(r, Dual2) else r


def jet_d1(r):
    """First-derivative slot; a non-jet result means a constant expression."""
    return r.d1 if isinstance(r, Dual2) else 0.0


def jet_d2(r):
    return r.d2 if isinstance(r, Dual2) else 0.0


@dataclass(frozen=True)
class Diff2:
    value: float
    gradient: tuple
    hessian: tuple  # ((hxx, hxy), (hxy, hyy)), symmetric by construction


def diff2(f, p, tols: Tolerances = DEFAULT_TOLS):
    """Value, gradient and Hessian of f at p = (x, y) via three jet sweeps.

    The mixed derivative comes from the diagonal seed (1, 1):
    H_xy = (D^2_(1,1) - D^2_(1,0) - D^2_(0,1)) / 2.
    """
    x, y = p
    chart = getattr(f, "chart", None)
    if chart is not None:
        chart.require(x, y, tols.domain_margin)
    ex = f(Dual2.seed(x), Dual2(y))
    ey = f(Dual2(x), Dual2.seed(y))
    exy = f(Dual2.seed(x), Dual2.seed(y))
    hxy = 0.5 * (jet_d2(exy) - jet_d2(ex) - jet_d2(ey))
    return Diff2(jet_value(ex), (jet_d1(ex), jet_d1(ey)),
                 ((jet_d2(ex), hxy), (hxy, jet_d2(ey))))


def value_and_grad(f, p):
    """Cheaper companion of diff2 when the Hessian is not needed."""
    x, y = p
    ex = f(Dual2.seed(x), Dual2(y))
    ey = f(Dual2(x), Dual2.seed(y))
    return jet_value(ex), (jet_d1(ex), jet_d1(ey))


def d_dx(f, x, y):
    """Partial in the first slot; x, y may be jets (nested differentiation)."""
    return jet_d1(f(Dual2(x, 1.0, 0.0), Dual2(y)))


def d_dy(f, x, y):
    """Partial in the second slot; x, y may be jets."""
    return jet_d1(f(Dual2(x), Dual2(y, 1.0, 0.0)))
