"""Planar symplectic geometry with a density W: Poisson brackets, Hamiltonian
vector fields, commutators, and the Lie derivative of the area form.

Conventions, fixed once so the realization identities hold literally:

    omega           = W(x, y) dx ^ dy
    {f, g}          = (d_x f d_y g - d_y f d_x g) / W
    X_h             = ( (d_y h)/W, -(d_x h)/W )

With these signs {f, h} is the derivative of f along X_h, and the commutator
of two Hamiltonian fields is the Hamiltonian field of minus the bracket:
[X_f, X_g] = X_{-{f,g}}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DomainError, SingularFormError
from .numkit import (
    DEFAULT_TOLS,
    Dual2,
    Tolerances,
    d_dx,
    d_dy,
    float_value,
    jet_d1,
)


@dataclass(frozen=True)
class Chart:
    """Open subset of the plane, cut out by a positive gap function.

    `gap` is a distance-like function to the excluded set (e.g. |x| for the
    punctured plane x != 0, or x itself for the half-plane x > 0); points with
    gap <= margin count as outside.  gap=None means the whole plane.
    """

    name: str
    gap: Optional[Callable] = field(default=None, compare=False)

    def contains(self, x, y, margin=DEFAULT_TOLS.domain_margin):
        return self.gap is None or self.gap(x, y) > margin

    def require(self, x, y, margin=DEFAULT_TOLS.domain_margin):
        if not self.contains(float_value(x), float_value(y), margin):
            raise DomainError(
                f"point ({x!r}, {y!r}) outside chart {self.name!r} "
                f"(margin {margin:g})")

    def intersect(self, other: "Chart") -> "Chart":
        if self.gap is None:
            return other
        if other.gap is None or other.name == self.name:
            return self
        return Chart(f"{self.name} & {other.name}",
                     lambda x, y: min(self.gap(x, y), other.gap(x, y)))


PLANE = Chart("plane")


@dataclass(frozen=True)
class ScalarField:
    """Real function on a chart, built from jet-transparent arithmetic so
    first and second derivatives are exact (no finite differencing)."""

    fn: Callable
    chart: Chart = PLANE
    name: str = ""

    def __call__(self, x, y):
        return self.fn(x, y)


@dataclass(frozen=True)
class SymplecticDensity:
    """Coefficient W of the area form W dx ^ dy; must not vanish on the chart."""

    fn: Callable
    chart: Chart = PLANE
    name: str = ""

    def __call__(self, x, y):
        return self.fn(x, y)

    def checked(self, x, y, margin=DEFAULT_TOLS.domain_margin):
        w = self.fn(x, y)
        if abs(float_value(w)) <= margin:
            raise SingularFormError(
                f"|W| <= {margin:g} at ({float_value(x):g}, {float_value(y):g})")
        return w


@dataclass(frozen=True)
class PlaneVectorField:
    """Vector field a d/dx + b d/dy with jet-transparent components."""

    a: Callable
    b: Callable
    chart: Chart = PLANE
    name: str = ""

    def at(self, x, y):
        return self.a(x, y), self.b(x, y)


def _as_fn(f):
    return f.fn if isinstance(f, (ScalarField, SymplecticDensity)) else f


def _chart_of(f):
    return getattr(f, "chart", PLANE)


def poisson_bracket(f, g, W: SymplecticDensity, p, tols: Tolerances = DEFAULT_TOLS):
    """{f, g} at p = (x, y)."""
    x, y = p
    _chart_of(f).require(x, y, tols.domain_margin)
    _chart_of(g).require(x, y, tols.domain_margin)
    W.chart.require(x, y, tols.domain_margin)
    w = W.checked(x, y, tols.domain_margin)
    ffn, gfn = _as_fn(f), _as_fn(g)
    fx, fy = d_dx(ffn, x, y), d_dy(ffn, x, y)
    gx, gy = d_dx(gfn, x, y), d_dy(gfn, x, y)
    return (fx * gy - fy * gx) / w


def hamiltonian_field(h, W: SymplecticDensity, name: str = "") -> PlaneVectorField:
    """X_h = ((d_y h)/W, -(d_x h)/W); components stay differentiable."""
    hfn, wfn = _as_fn(h), W.fn
    margin = DEFAULT_TOLS.domain_margin

    def a(x, y):
        w = wfn(x, y)
        if abs(float_value(w)) <= margin:
            raise SingularFormError(f"|W| <= {margin:g} in Hamiltonian field")
        return d_dy(hfn, x, y) / w

    def b(x, y):
        w = wfn(x, y)
        if abs(float_value(w)) <= margin:
            raise SingularFormError(f"|W| <= {margin:g} in Hamiltonian field")
        return -d_dx(hfn, x, y) / w

    return PlaneVectorField(a, b, _chart_of(h).intersect(W.chart),
                            name or f"X[{getattr(h, 'name', '')}]")


def jacobian(X: PlaneVectorField, p):
    """2x2 Jacobian of the components of X at p."""
    x, y = p
    ax = X.a(Dual2.seed(x), Dual2(y))
    ay = X.a(Dual2(x), Dual2.seed(y))
    bx = X.b(Dual2.seed(x), Dual2(y))
    by = X.b(Dual2(x), Dual2.seed(y))
    return ((jet_d1(ax), jet_d1(ay)), (jet_d1(bx), jet_d1(by)))


def commutator(X: PlaneVectorField, Y: PlaneVectorField, p,
               tols: Tolerances = DEFAULT_TOLS):
    """[X, Y] = (X . grad) Y - (Y . grad) X at p, componentwise."""
    x, y = p
    X.chart.require(x, y, tols.domain_margin)
    Y.chart.require(x, y, tols.domain_margin)
    xa, xb = X.at(x, y)
    ya, yb = Y.at(x, y)
    jx = jacobian(X, p)
    jy = jacobian(Y, p)
    return (jy[0][0] * xa + jy[0][1] * xb - (jx[0][0] * ya + jx[0][1] * yb),
            jy[1][0] * xa + jy[1][1] * xb - (jx[1][0] * ya + jx[1][1] * yb))


def lie_derivative_omega(X: PlaneVectorField, W: SymplecticDensity, p,
                         tols: Tolerances = DEFAULT_TOLS):
    """Coefficient of L_X omega against dx ^ dy: d_x(W a) + d_y(W b).

    Vanishes exactly when the flow of X preserves the form; this is the
    symplecticity check used on the realization fields.
    """
    x, y = p
    X.chart.require(x, y, tols.domain_margin)
    W.chart.require(x, y, tols.domain_margin)
    wfn = W.fn

    def wa(u, v):
        return wfn(u, v) * X.a(u, v)

    def wb(u, v):
        return wfn(u, v) * X.b(u, v)

    return d_dx(wa, x, y) + d_dy(wb, x, y)
