"""Two-copy lifts of the realizations and the invariants they produce.

The deformed triple lifts to N = 2 copies by the twisted coproduct

    H1 = h1(p1) + h1(p2)
    Hj = hj(p1) e^{2 z h1(p2)} + e^{-2 z h1(p1)} hj(p2),   j = 2, 3,

and applying the deformed Casimir

    C_z(v1, v2, v3) = shc(2 z v1) v1 v3 - v2^2

to the lifted triple yields a function that Poisson-commutes with every Hi,
hence a constant of the motion of the two-copy flow the Hi generate (both
copies driven by the same t-dependent coefficients).  At z = 0 the coproduct
is the plain sum, the lifted flow is the plain diagonal one, and C_z
degenerates to C = v1 v3 - v2^2; at z != 0 the exponential factors couple
the copies and the naive uncoupled flow no longer conserves the invariant.

Each family also ships a transcribed closed form of the two-copy invariant;
the generic coproduct path and the closed form are independent computations
of the same function and are cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import RangeOverflowError
from .numkit import (
    DEFAULT_TOLS,
    Dual2,
    exp,
    float_value,
    jet_d1,
    shc,
    value_and_grad,
)
from .sl2systems import Family, SL2Realization

OVERFLOW_LIMIT = 700.0


@dataclass(frozen=True)
class NCopyState:
    """Points of N >= 1 copies of one chart, as ((x1, y1), ..., (xN, yN))."""

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in p) for p in self.points)
        if len(pts) < 1:
            raise ValueError("need at least one copy")
        if any(len(p) != 2 for p in pts):
            raise ValueError("each copy is a planar point (x, y)")
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return len(self.points)

    def swap(self, i, j):
        pts = list(self.points)
        pts[i], pts[j] = pts[j], pts[i]
        return NCopyState(tuple(pts))


@dataclass(frozen=True)
class CasimirSpec:
    """Choice between C (deformed=False) and C_z; C_z at z = 0 equals C."""

    deformed: bool = True

    def value(self, triple, z):
        v1, v2, v3 = triple
        if self.deformed:
            return shc(2.0 * z * v1) * v1 * v3 - v2 * v2
        return v1 * v3 - v2 * v2


def casimir_expected(r: SL2Realization) -> float:
    """Constant value of the Casimir on the realization: c/4, 1, or -1/4."""
    if r.family is Family.MP:
        return r.c / 4.0
    return 1.0 if r.family is Family.CR else -0.25


def casimir_value(r: SL2Realization, spec: CasimirSpec, p) -> float:
    """C or C_z on the one-copy triple (h1(p), h2(p), h3(p)).

    The combination cancels the large products almost exactly, so the triple
    is evaluated in extended precision; the returned double then reflects the
    identity rather than double-rounding noise.
    """
    x, y = np.longdouble(p[0]), np.longdouble(p[1])
    triple = tuple(h(x, y) for h in r.h)
    return float(spec.value(triple, r.z))


def _guard_exponent(arg):
    if abs(float_value(arg)) > OVERFLOW_LIMIT:
        raise RangeOverflowError(
            "coproduct exponent |2 z h1| exceeds the overflow guard")
    return arg


def lifted_functions(r: SL2Realization):
    """The two-copy triple as three callables of (x1, y1, x2, y2).

    Jet- and array-transparent, like the one-copy Hamiltonians.
    """
    h1, h2, h3 = r.h
    two_z = 2.0 * r.z

    def H1(x1, y1, x2, y2):
        return h1(x1, y1) + h1(x2, y2)

    def _twisted(hj):
        def H(x1, y1, x2, y2):
            e_right = exp(_guard_exponent(two_z * h1(x2, y2)))
            e_left = exp(_guard_exponent(-two_z * h1(x1, y1)))
            return hj(x1, y1) * e_right + e_left * hj(x2, y2)
        return H

    return H1, _twisted(h2), _twisted(h3)


def lift(r: SL2Realization, state: NCopyState):
    """Values (H1, H2, H3) of the lifted triple on a two-copy state."""
    if state.n != 2:
        raise ValueError("lift is defined on two-copy states")
    (x1, y1), (x2, y2) = state.points
    return tuple(H(x1, y1, x2, y2) for H in lifted_functions(r))


def lifted_field(r: SL2Realization, coeffs):
    """Right-hand side (t, (x1,y1,x2,y2)) -> 4-tuple of the two-copy flow
    generated by sum_i b_i(t) Hi on the product structure.

    The gradient of the twisted sum regroups into the one-copy Hamiltonian
    fields with state-dependent weights: with a_k = 2 z h1(p_k), copy 1 sees

        (b1 - 2z e^{-a1} (b2 h2(p2) + b3 h3(p2)),  b2 e^{a2},  b3 e^{a2})

    and copy 2 the mirror image

        (b1 + 2z e^{a2} (b2 h2(p1) + b3 h3(p1)),  b2 e^{-a1},  b3 e^{-a1}),

    so both copies run through the same fast kernels and the z = 0 limit is
    the plain diagonal flow.
    """
    h1, h2, h3 = r.h
    z = r.z
    if r.family is Family.MP:
        c = r.c
        def kern(x, y, b1, b2, b3):
            return backend.mp_rhs(x, y, z, c, b1, b2, b3)
    elif r.family is Family.CR:
        def kern(x, y, b1, b2, b3):
            return backend.cr_rhs(x, y, z, b1, b2, b3)
    else:
        def kern(x, y, b1, b2, b3):
            return backend.r2_rhs(x, y, z, b1, b2, b3)

    def rhs(t, y):
        x1, y1, x2, y2 = y
        b1, b2, b3 = coeffs.at(t)
        if z == 0.0:
            return (*kern(x1, y1, b1, b2, b3), *kern(x2, y2, b1, b2, b3))
        e_right = math.exp(_guard_exponent(2.0 * z * h1(x2, y2)))
        e_left = math.exp(_guard_exponent(-2.0 * z * h1(x1, y1)))
        cross1 = b2 * h2(x2, y2) + b3 * h3(x2, y2)
        cross2 = b2 * h2(x1, y1) + b3 * h3(x1, y1)
        d1 = kern(x1, y1, b1 - 2.0 * z * e_left * cross1,
                  b2 * e_right, b3 * e_right)
        d2 = kern(x2, y2, b1 + 2.0 * z * e_right * cross2,
                  b2 * e_left, b3 * e_left)
        return (*d1, *d2)

    return rhs


def f2_invariant(r: SL2Realization, state: NCopyState, pair=(0, 1)) -> float:
    """C_z of the lifted triple on copies `pair` (0-based) of `state`.

    Constant along the lifted flows (lifted_field); the generic path used
    here never touches the per-family closed forms (see f2_closed_form).
    """
    i, j = pair
    (x1, y1), (x2, y2) = state.points[i], state.points[j]
    H1, H2, H3 = lifted_functions(r)
    triple = (H1(x1, y1, x2, y2), H2(x1, y1, x2, y2), H3(x1, y1, x2, y2))
    return CasimirSpec(deformed=True).value(triple, r.z)


def f2_closed_form(r: SL2Realization, state: NCopyState, pair=(0, 1)) -> float:
    """Transcribed closed form of the two-copy invariant (per family)."""
    i, j = pair
    (x1, y1), (x2, y2) = state.points[i], state.points[j]
    z = r.z
    if r.family is Family.MP:
        a1, a2 = z * x1 * x1, z * x2 * x2
        s1, s2 = shc(a1), shc(a2)
        sA = shc(a1 + a2)
        cross = x1 * y2 - x2 * y1
        xs = x1 * x1 + x2 * x2
        return 0.25 * (s1 * s2 * cross * cross
                       + r.c * sA * sA / (s1 * s2)
                       * xs * xs / (x1 * x1 * x2 * x2)) * exp(a2 - a1)
    if r.family is Family.CR:
        w1, w2 = 2.0 * z / y1, 2.0 * z / y2
        s1, s2 = shc(w1), shc(w2)
        sA = shc(w1 + w2)
        du = x1 - x2
        sv = y1 + y2
        return (s1 * s2 * du * du / (y1 * y2)
                + sA * sA / (s1 * s2) * sv * sv / (y1 * y2)) * exp(w1 - w2)
    m1, m2 = x1 - y1, x2 - y2
    w1, w2 = 2.0 * z / m1, 2.0 * z / m2
    s1, s2 = shc(w1), shc(w2)
    sA = shc(w1 + w2)
    dall = x1 - x2 + y1 - y2
    sall = x1 + x2 - y1 - y2
    term1 = s1 * s2 * dall * dall
    term2 = (exp(w1) * m1 / s1 + exp(-w2) * m2 / s2) * sA * sall
    return exp(w2 - w1) / (4.0 * m1 * m2) * (term1 - term2)


def product_bracket(F, G, r: SL2Realization, state: NCopyState,
                    tols=DEFAULT_TOLS):
    """Poisson bracket of two functions of a two-copy state, the product
    structure being the sum of the per-copy brackets."""
    (x1, y1), (x2, y2) = state.points
    args = (x1, y1, x2, y2)

    def partial(H, k):
        seeded = [Dual2(a) for a in args]
        seeded[k] = Dual2.seed(args[k])
        return jet_d1(H(*seeded))

    total = 0.0
    for copy, p in enumerate(state.points):
        w = r.W.checked(p[0], p[1], tols.domain_margin)
        ix, iy = 2 * copy, 2 * copy + 1
        total += (partial(F, ix) * partial(G, iy)
                  - partial(F, iy) * partial(G, ix)) / w
    return total


def independence_test(r: SL2Realization, state: NCopyState) -> float:
    """Jacobian determinant of (F2 on copies (1,2), F2 on copies (1,3)) with
    respect to the first copy's coordinates.  Nonzero means the two invariants
    are functionally independent at the state; equal second and third copies
    force an exact zero."""
    if state.n < 3:
        raise ValueError("independence test needs a three-copy state")
    p1, p2, p3 = state.points[:3]
    spec = CasimirSpec(deformed=True)
    H1, H2, H3 = lifted_functions(r)

    def paired(pj):
        def F(xx, yy):
            triple = (H1(xx, yy, pj[0], pj[1]),
                      H2(xx, yy, pj[0], pj[1]),
                      H3(xx, yy, pj[0], pj[1]))
            return spec.value(triple, r.z)
        return F

    _, g12 = value_and_grad(paired(p2), p1)
    _, g13 = value_and_grad(paired(p3), p1)
    return g12[0] * g13[1] - g12[1] * g13[0]
