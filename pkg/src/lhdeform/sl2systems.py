"""sl(2) Lie-Hamilton systems on planar charts and their one-parameter
hyperbolic deformations.

Three families share one abstract structure (a Hamiltonian triple h1, h2, h3
closing the deformed bracket relations

    {h1, h2} = -shc(2 z h1) h1,   {h1, h3} = -2 h2,   {h2, h3} = -ch(2 z h1) h3

together with vector fields X1, X2, X3 satisfying the matching commutators):

    mp  oscillator with centrifugal term on x != 0, omega = dx ^ dy, free c
    cr  Riccati pair from the complex equation on v != 0, omega = du ^ dv / v^2,
        normalization pins c = 4
    2r  coupled Riccati system on u != v, omega = du ^ dv / (u - v)^2, c = -1

The z = 0 members are the undeformed systems; all formulas below reduce to
them exactly at z = 0 because shc(0) = ch(0) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from . import backend
from .errors import DomainError
from .geometry import (
    Chart,
    PlaneVectorField,
    ScalarField,
    SymplecticDensity,
)
from .numkit import DEFAULT_TOLS, ch, float_value, jet_d1, shc
from .numkit import Dual2


class Family(str, Enum):
    MP = "mp"
    CR = "cr"
    R2 = "2r"


FIXED_C = {Family.CR: 4.0, Family.R2: -1.0}


@dataclass(frozen=True)
class SL2Realization:
    """A symplectic realization of the (deformed) sl(2) triple on one chart.

    `h` are the Hamiltonians, `fields` independent closed-form transcriptions
    of the corresponding vector fields (so Hamiltonian consistency is a real
    cross-check, not a tautology), `W` the symplectic density.
    """

    family: Family
    z: float
    c: float
    h: tuple
    fields: tuple
    W: SymplecticDensity
    chart: Chart

    def deformation_argument(self, x, y):
        """The argument fed to shc/ch in this chart: 2 z h1(x, y)."""
        return 2.0 * self.z * self.h[0](x, y)


def _shc_minus_ch_over(q):
    """(shc(q) - ch(q)) / q, regular at q = 0 (series sum -2k q^{2k-1}/(2k+1)!).

    The direct quotient cancels near 0, so the series branch reaches far
    enough (|q| < 0.05) that the crossover error stays below 1e-14.
    """
    if abs(float_value(q)) < 0.05:
        q2 = q * q
        return -q * (1.0 / 3.0 + q2 * (1.0 / 30.0 + q2 * (1.0 / 840.0
                                                          + q2 / 45360.0)))
    return (shc(q) - ch(q)) / q


def _build_mp(z, c):
    # the barrier term vanishes identically at c = 0 and the system extends
    # smoothly across x = 0; build that case on the full plane so motion may
    # pass through the origin of the x axis
    if c == 0.0:
        chart = Chart("plane", None)
    else:
        chart = Chart("x != 0", lambda x, y: abs(x))
    W = SymplecticDensity(lambda x, y: 1.0, chart, "dx^dy")

    def h1(x, y):
        return x * x / 2.0

    def h2(x, y):
        return -shc(z * x * x) * x * y / 2.0

    if c == 0.0:
        def h3(x, y):
            return shc(z * x * x) * y * y / 2.0
    else:
        def h3(x, y):
            s = shc(z * x * x)
            return (s * y * y + c / (x * x * s)) / 2.0

    X1 = PlaneVectorField(lambda x, y: 0.0, lambda x, y: -x, chart, "X1")
    X2 = PlaneVectorField(
        lambda x, y: -shc(z * x * x) * x / 2.0,
        lambda x, y: (ch(z * x * x) - shc(z * x * x) / 2.0) * y,
        chart, "X2")

    if c == 0.0:
        def x3_b(x, y):
            # (shc - ch) y^2 / x rewritten through the even-series quotient
            return z * x * y * y * _shc_minus_ch_over(z * x * x)
    else:
        def x3_b(x, y):
            q = z * x * x
            s = shc(q)
            co = ch(q)
            return c * co / (x * x * x * s * s) + (s - co) * y * y / x

    X3 = PlaneVectorField(lambda x, y: shc(z * x * x) * y, x3_b, chart, "X3")
    hs = tuple(ScalarField(f, chart, n)
               for f, n in ((h1, "h1"), (h2, "h2"), (h3, "h3")))
    return hs, (X1, X2, X3), W, chart


def _build_cr(z, c):
    chart = Chart("v != 0", lambda u, v: abs(v))
    W = SymplecticDensity(lambda u, v: 1.0 / (v * v), chart, "du^dv/v^2")

    def h1(u, v):
        return -1.0 / v

    def h2(u, v):
        return -shc(2.0 * z / v) * u / v

    def h3(u, v):
        s = shc(2.0 * z / v)
        return -(s * s * u * u + v * v) / (s * v)

    X1 = PlaneVectorField(lambda u, v: 1.0, lambda u, v: 0.0, chart, "X1")
    X2 = PlaneVectorField(
        lambda u, v: u * ch(2.0 * z / v),
        lambda u, v: v * shc(2.0 * z / v),
        chart, "X2")

    def x3_a(u, v):
        s = shc(2.0 * z / v)
        return (u * u - v * v / (s * s)) * ch(2.0 * z / v)

    X3 = PlaneVectorField(
        x3_a,
        lambda u, v: 2.0 * u * v * shc(2.0 * z / v),
        chart, "X3")
    hs = tuple(ScalarField(f, chart, n)
               for f, n in ((h1, "h1"), (h2, "h2"), (h3, "h3")))
    return hs, (X1, X2, X3), W, chart


def _build_2r(z, c):
    chart = Chart("u != v", lambda u, v: abs(u - v))
    W = SymplecticDensity(lambda u, v: 1.0 / ((u - v) * (u - v)), chart,
                          "du^dv/(u-v)^2")

    def h1(u, v):
        return 1.0 / (u - v)

    def h2(u, v):
        return shc(2.0 * z / (u - v)) * (u + v) / (2.0 * (u - v))

    def h3(u, v):
        m = u - v
        s = shc(2.0 * z / m)
        p = u + v
        return (s * s * p * p - m * m) / (4.0 * s * m)

    X1 = PlaneVectorField(lambda u, v: 1.0, lambda u, v: 1.0, chart, "X1")

    def x2_parts(u, v):
        m = u - v
        w = 2.0 * z / m
        sym = (u + v) * ch(w) / 2.0
        alt = m * shc(w) / 2.0
        return sym, alt

    X2 = PlaneVectorField(
        lambda u, v: sum(x2_parts(u, v)),
        lambda u, v: x2_parts(u, v)[0] - x2_parts(u, v)[1],
        chart, "X2")

    def x3_parts(u, v):
        m = u - v
        w = 2.0 * z / m
        s = shc(w)
        p = u + v
        sym = (p * p + m * m / (s * s)) * ch(w) / 4.0
        alt = p * m * s / 2.0
        return sym, alt

    X3 = PlaneVectorField(
        lambda u, v: sum(x3_parts(u, v)),
        lambda u, v: x3_parts(u, v)[0] - x3_parts(u, v)[1],
        chart, "X3")
    hs = tuple(ScalarField(f, chart, n)
               for f, n in ((h1, "h1"), (h2, "h2"), (h3, "h3")))
    return hs, (X1, X2, X3), W, chart


_BUILDERS = {Family.MP: _build_mp, Family.CR: _build_cr, Family.R2: _build_2r}


def build_realization(family, z=0.0, c=None) -> SL2Realization:
    """Construct a realization.  For mp, c is the centrifugal coupling and
    must be given; for cr and 2r the chart normalization fixes c (any value
    passed is ignored)."""
    family = Family(family)
    z = float(z)
    if family is Family.MP:
        if c is None:
            raise ValueError("the mp family needs an explicit c")
        c = float(c)
    else:
        c = FIXED_C[family]
    hs, fields, W, chart = _BUILDERS[family](z, c)
    return SL2Realization(family, z, c, hs, fields, W, chart)


def structure_coefficients(r: SL2Realization, i, j, p):
    """Coefficients (g1, g2, g3) with [X_i, X_j] = g1 X1 + g2 X2 + g3 X3 at p.

    Indices are 1-based.  The brackets close with point-dependent
    coefficients:

        [X1, X2] = ch(arg) X1
        [X1, X3] = 2 X2
        [X2, X3] = ch(arg) X3 + kappa(p) X1

    where arg = 2 z h1(p) and kappa collects the z^2 correction.
    """
    if i == j:
        return (0.0, 0.0, 0.0)
    if i > j:
        g = structure_coefficients(r, j, i, p)
        return (-g[0], -g[1], -g[2])
    x, y = p
    z = r.z
    arg = 2.0 * z * r.h[0](x, y)
    if (i, j) == (1, 2):
        return (ch(arg), 0.0, 0.0)
    if (i, j) == (1, 3):
        return (0.0, 2.0, 0.0)
    if (i, j) != (2, 3):
        raise ValueError("indices must lie in {1, 2, 3}")
    s = shc(arg)
    if r.family is Family.MP:
        kappa = z * z * (r.c + x * x * y * y * s * s)
    elif r.family is Family.CR:
        kappa = 4.0 * z * z * (1.0 + (x * x) / (y * y) * s * s)
    else:
        ratio = (x + y) / (x - y)
        kappa = -z * z * (1.0 - ratio * ratio * s * s)
    return (kappa, 0.0, ch(arg))


@dataclass(frozen=True)
class CoefficientSet:
    """Time-dependent weights b1, b2, b3 of the field b1 X1 + b2 X2 + b3 X3."""

    b1: Callable
    b2: Callable
    b3: Callable
    label: str = ""

    def at(self, t):
        return (float(self.b1(t)), float(self.b2(t)), float(self.b3(t)))


def constant_coefficients(b1, b2, b3):
    return CoefficientSet(lambda t: b1, lambda t: b2, lambda t: b3,
                          f"({b1:g}, {b2:g}, {b3:g})")


def mp_coefficients(omega_sq) -> CoefficientSet:
    """The oscillator form: X = X3 + omega^2(t) X1, i.e. b = (omega^2, 0, 1).

    omega_sq may be a callable of t or a constant.
    """
    if not callable(omega_sq):
        w = float(omega_sq)
        omega_sq = lambda t: w
    return CoefficientSet(omega_sq, lambda t: 0.0, lambda t: 1.0, "oscillator")


@dataclass(frozen=True)
class AssembledSystem:
    """Non-autonomous system p' = sum_i b_i(t) X_i(p) on the realization chart."""

    realization: SL2Realization
    coeffs: CoefficientSet

    @property
    def chart(self):
        return self.realization.chart

    def rhs(self, t, x, y):
        """Fast kernel evaluation (float path; used by the integrator)."""
        r = self.realization
        b1, b2, b3 = self.coeffs.at(t)
        if r.family is Family.MP:
            return backend.mp_rhs(x, y, r.z, r.c, b1, b2, b3)
        if r.family is Family.CR:
            return backend.cr_rhs(x, y, r.z, b1, b2, b3)
        return backend.r2_rhs(x, y, r.z, b1, b2, b3)

    def rhs_reference(self, t, x, y):
        """Same field assembled from the closed-form X_i (jet-capable)."""
        b = self.coeffs.at(t)
        ax = bx = 0.0
        for bi, Xi in zip(b, self.realization.fields):
            if bi != 0.0:
                ax = ax + bi * Xi.a(x, y)
                bx = bx + bi * Xi.b(x, y)
        return ax, bx

    def hamiltonian(self, t, x, y):
        """h(t, p) = sum_i b_i(t) h_i(p), the time-dependent Hamiltonian."""
        b = self.coeffs.at(t)
        return sum(bi * hi(x, y) for bi, hi in zip(b, self.realization.h))


def assemble_system(r: SL2Realization, coeffs: CoefficientSet) -> AssembledSystem:
    return AssembledSystem(r, coeffs)


def deformed_mp_second_order_residual(r: SL2Realization, omega_sq, t, x,
                                      xdot, xddot):
    """Residual of the second-order oscillator form at one sample.

    The first-order mp system with b = (omega^2, 0, 1) eliminates y into

        x'' + (1/x)(1 - ch(q)/shc(q)) x'^2
            + omega^2(t) x shc(q) - c ch(q) / (x^3 shc(q)) = 0,  q = z x^2,

    written here through ch/shc so that z = 0 is regular (the coefficient of
    x'^2 vanishes and the classical x'' + omega^2 x - c/x^3 remains).
    """
    if r.family is not Family.MP:
        raise DomainError("second-order reduction applies to the mp family")
    q = r.z * x * x
    s = shc(q)
    co = ch(q)
    return (xddot + (1.0 - co / s) * xdot * xdot / x
            + omega_sq(t) * x * s - r.c * co / (x * x * x * s))


def mp_second_order_data(system: AssembledSystem, t, x, y):
    """(x', x'') along the flow at state (x, y), for feeding the residual.

    Valid for the oscillator coefficient form (b2 = 0, b3 = 1), where the
    first component of the field has no explicit time dependence.
    """
    f1, f2 = system.rhs(t, x, y)

    def a_of(xx, yy):
        return system.rhs_reference(t, xx, yy)[0]

    ax = jet_d1(a_of(Dual2.seed(x), Dual2(y)))
    ay = jet_d1(a_of(Dual2(x), Dual2.seed(y)))
    return f1, ax * f1 + ay * f2


@dataclass(frozen=True)
class PDMProfile:
    """Position-dependent-mass reading of the deformed oscillator.

    mass(x)     = 1 / shc(z x^2)
    u_osc(x)    = x^2 shc(z x^2)            (oscillator potential)
    u_rw(x)     = 1 / (x^2 shc(z x^2)^2)    (centrifugal/barrier potential)

    At z = 0 these collapse to m = 1, U_osc = x^2, U_rw = 1/x^2.
    """

    z: float

    def mass(self, x):
        return 1.0 / shc(self.z * x * x)

    def u_osc(self, x):
        return x * x * shc(self.z * x * x)

    def u_rw(self, x):
        if float_value(x) == 0.0:
            return float("inf")
        s = shc(self.z * x * x)
        return 1.0 / (x * x * s * s)

    def rows(self, xs):
        return [(float(x), self.z, float(self.mass(x)),
                 float(self.u_osc(x)), float(self.u_rw(x))) for x in xs]


def pdm_profile(z) -> PDMProfile:
    return PDMProfile(float(z))
