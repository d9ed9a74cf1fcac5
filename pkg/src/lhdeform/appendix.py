"""Executable checks behind the `appendix` CLI surface.

Two ingredients: the second-order equation solved by shc and its
trigonometric twin solved by sinc, and the four-field gl(2) system on the
plane with its hyperbolic-chart normal form.  The gl(2) system is a Lie
system that admits no compatible symplectic structure, so it lives here
rather than next to the Hamiltonian families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError
from .geometry import PlaneVectorField, commutator
from .integrator import integrate
from .numkit import Dual2, ch, cos, jet_d1, jet_d2, jet_value, shc, sinc
from .transforms import i7_chart, pushforward_check

__all__ = [
    "ShcODEParams",
    "SincODEParams",
    "shc_ode_residual",
    "sinc_ode_residual",
    "fit_coefficients",
    "integrate_and_fit",
    "FitReport",
    "gl2_fields",
    "gl2_normal_form_fields",
    "Gl2Report",
    "gl2_commutator_check",
]


@dataclass(frozen=True)
class ShcODEParams:
    """Closed-form solution x(t) = A shc(eta t) + B ch(eta t)/t of

        t x'' + 2 x' - eta^2 t x = 0.

    The shc branch is entire; the ch/t branch is singular at t = 0.
    """

    eta: float
    A: float
    B: float

    def __post_init__(self):
        if self.eta == 0.0:
            raise ValueError("eta must be nonzero")

    def value(self, t):
        out = self.A * shc(self.eta * t)
        if self.B != 0.0:
            out = out + self.B * ch(self.eta * t) / t
        return out

    def residual_coefficients(self):
        # t x'' + 2 x' + k x with k = -eta^2 t
        return -self.eta * self.eta

    def rhs(self, t, state):
        x, xdot = state
        return (xdot, -2.0 / t * xdot + self.eta * self.eta * x)

    def basis(self, t):
        return (shc(self.eta * t), ch(self.eta * t) / t)


@dataclass(frozen=True)
class SincODEParams:
    """Closed-form solution x(t) = A sinc(lam t) + B cos(lam t)/t of

        t x'' + 2 x' + lam^2 t x = 0.
    """

    lam: float
    A: float
    B: float

    def __post_init__(self):
        if self.lam == 0.0:
            raise ValueError("lam must be nonzero")

    def value(self, t):
        out = self.A * sinc(self.lam * t)
        if self.B != 0.0:
            out = out + self.B * cos(self.lam * t) / t
        return out

    def residual_coefficients(self):
        return self.lam * self.lam

    def rhs(self, t, state):
        x, xdot = state
        return (xdot, -2.0 / t * xdot - self.lam * self.lam * x)

    def basis(self, t):
        return (sinc(self.lam * t), cos(self.lam * t) / t)


def _ode_residual(params, t):
    t = float(t)
    if t == 0.0 and params.B != 0.0:
        raise DomainError("the second fundamental solution is singular at "
                          "t = 0")
    jet = params.value(Dual2.seed(t))
    x, xdot, xddot = jet_value(jet), jet_d1(jet), jet_d2(jet)
    return t * xddot + 2.0 * xdot + params.residual_coefficients() * t * x


def shc_ode_residual(params: ShcODEParams, t) -> float:
    """Substitute the closed form into t x'' + 2x' - eta^2 t x (derivatives
    from the dual engine); zero up to roundoff certifies the solution."""
    return _ode_residual(params, t)


def sinc_ode_residual(params: SincODEParams, t) -> float:
    return _ode_residual(params, t)


def fit_coefficients(params, t0):
    """Solve the 2x2 system matching (x, x') at t0 > 0 back to (A, B).

    Returns (A, B, scaled_det) where scaled_det is the determinant of the
    row-normalized fit matrix, a Wronskian-style independence measure of
    the two fundamental solutions at t0.
    """
    if not t0 > 0.0:
        raise DomainError("fit requires t0 > 0")
    # basis values and derivatives at t0
    cols = []
    for (a, b) in ((1.0, 0.0), (0.0, 1.0)):
        jet = replace(params, A=a, B=b).value(Dual2.seed(t0))
        cols.append((jet_value(jet), jet_d1(jet)))
    (m11, m21), (m12, m22) = cols
    det = m11 * m22 - m12 * m21
    r1 = math.hypot(m11, m12)
    r2 = math.hypot(m21, m22)
    scaled_det = det / (r1 * r2) if r1 > 0 and r2 > 0 else 0.0
    x0 = params.value(Dual2.seed(t0))
    x, xdot = jet_value(x0), jet_d1(x0)
    A = (x * m22 - xdot * m12) / det
    B = (m11 * xdot - m21 * x) / det
    return A, B, scaled_det


@dataclass
class FitReport:
    fitted_A: float
    fitted_B: float
    scaled_det: float
    max_deviation: float
    n_samples: int


def integrate_and_fit(params, t0, t1, rtol=1e-10, atol=1e-12,
                      n_samples=200) -> FitReport:
    """Integrate the first-order form x' = y, y' = -(2/t) y -+ k x from the
    closed-form initial data at t0 > 0, refit (A, B) from that data, and
    report the worst gap between the numerical and closed-form solutions.
    """
    if not 0.0 < t0 < t1:
        raise DomainError("need 0 < t0 < t1")
    x0 = params.value(Dual2.seed(t0))
    y0 = (jet_value(x0), jet_d1(x0))
    A, B, scaled_det = fit_coefficients(params, t0)
    fitted = replace(params, A=A, B=B)
    t_eval = [t0 + (t1 - t0) * i / (n_samples - 1) for i in range(n_samples)]
    traj = integrate(params.rhs, y0, (t0, t1), rtol=rtol, atol=atol,
                     t_eval=t_eval)
    dev = max(abs(state[0] - float(fitted.value(ts)))
              for ts, state in traj.samples())
    return FitReport(A, B, scaled_det, dev, len(traj.times))


def gl2_fields():
    """X1 = y dy, X2 = y dx, X3 = x dy, X4 = x dx + y dy."""
    return (
        PlaneVectorField(lambda x, y: 0.0 * x, lambda x, y: y, name="X1"),
        PlaneVectorField(lambda x, y: y, lambda x, y: 0.0 * y, name="X2"),
        PlaneVectorField(lambda x, y: 0.0 * y, lambda x, y: x, name="X3"),
        PlaneVectorField(lambda x, y: x, lambda x, y: y, name="X4"),
    )


def gl2_normal_form_fields():
    """Images under (x, y) -> (u, v) = (y/x, 1/x):
    X1 = u du, X2 = -u^2 du - u v dv, X3 = du, X4 = -v dv."""
    return (
        PlaneVectorField(lambda u, v: u, lambda u, v: 0.0 * u, name="Y1"),
        PlaneVectorField(lambda u, v: -u * u, lambda u, v: -u * v, name="Y2"),
        PlaneVectorField(lambda u, v: 1.0 + 0.0 * u, lambda u, v: 0.0 * u,
                         name="Y3"),
        PlaneVectorField(lambda u, v: 0.0 * u, lambda u, v: -v, name="Y4"),
    )


@dataclass
class Gl2Report:
    commutator_residuals: dict
    pushforward_residuals: dict

    @property
    def max_residual(self):
        return max(list(self.commutator_residuals.values())
                   + list(self.pushforward_residuals.values()))


def _field_diff(got, want_a, want_b):
    return math.hypot(got[0] - want_a, got[1] - want_b)


def gl2_commutator_check(p) -> Gl2Report:
    """Verify [X1,X2] = X2, [X1,X3] = -X3, [X2,X3] = 2X1 - X4 and that X4
    commutes with everything, all at the point p; then verify the
    hyperbolic-chart images of all four fields by pushforward."""
    x, y = float(p[0]), float(p[1])
    if x == 0.0:
        raise DomainError("the normal-form chart needs x != 0")
    X1, X2, X3, X4 = gl2_fields()

    com = {}
    got = commutator(X1, X2, (x, y))
    com["[X1,X2]-X2"] = _field_diff(got, *X2.at(x, y))
    got = commutator(X1, X3, (x, y))
    a, b = X3.at(x, y)
    com["[X1,X3]+X3"] = _field_diff(got, -a, -b)
    got = commutator(X2, X3, (x, y))
    a1, b1 = X1.at(x, y)
    a4, b4 = X4.at(x, y)
    com["[X2,X3]-(2X1-X4)"] = _field_diff(got, 2 * a1 - a4, 2 * b1 - b4)
    for name, X in (("X1", X1), ("X2", X2), ("X3", X3)):
        got = commutator(X4, X, (x, y))
        com[f"[X4,{name}]"] = _field_diff(got, 0.0, 0.0)

    chart = i7_chart()
    push = {}
    for X, Y in zip(gl2_fields(), gl2_normal_form_fields()):
        push[f"{X.name}->{Y.name}"] = pushforward_check(chart, X, Y, (x, y))
    return Gl2Report(com, push)
