"""Changes of variables between the planar charts.

Each map stores one sign branch (the closed forms carry a free sign on the
square root).  The conventions are pinned so that the maps are symplectic:
the pullback of the target density equals the source density with
coefficient +1, which also transports the Hamiltonian triples and the
two-copy invariants with multiplicative constant +1 at the pinned couplings
(c = 4 for the complex chart, c = -1 for the coupled one).

For oscillator <-> complex-Riccati that forces the target ordinate negative
(v = -sqrt(c)/x^2); for oscillator <-> coupled-Riccati it forces u > v on
the image, with the branch selecting only the sign of x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BranchError
from .geometry import Chart
from .numkit import DEFAULT_TOLS, float_value, jet_d1, sqrt, value_and_grad

PLUS, MINUS = "plus", "minus"

MP_CHART = Chart("x != 0", lambda x, y: abs(x))
CR_CHART = Chart("v != 0", lambda u, v: abs(v))
R2_CHART = Chart("u != v", lambda u, v: abs(u - v))

CR_COUPLING = 4.0
R2_COUPLING = -1.0


@dataclass(frozen=True)
class ChartMap:
    """A sign-resolved diffeomorphism between two planar charts.

    forward and inverse are jet-transparent callables (x, y) -> (u, v);
    the Jacobian therefore comes straight off the dual engine.
    """

    name: str
    forward: Callable
    inverse: Callable
    branch: str
    source_chart: Chart
    target_chart: Chart


def _sign_of(branch):
    if branch == PLUS:
        return 1.0
    if branch == MINUS:
        return -1.0
    raise ValueError(f"branch must be '{PLUS}' or '{MINUS}'")


def _require_branch(x, sign, margin=DEFAULT_TOLS.domain_margin):
    if float_value(x) * sign <= margin:
        side = "x > 0" if sign > 0 else "x < 0"
        raise BranchError(f"point is outside the {side} half-plane of this "
                          "branch")


def mp_to_cr(branch=PLUS) -> ChartMap:
    """Oscillator chart (c = 4) to the complex-Riccati chart.

        u = -y/x,  v = -sqrt(c)/x^2;   x = s c^(1/4)/sqrt|v|,  y = -u x

    with s the branch sign.  The forward map lands on v < 0 (the symplectic
    sign); the inverse accepts either sign of v through |v|.
    """
    s = _sign_of(branch)
    root_c = math.sqrt(CR_COUPLING)
    quarter_c = CR_COUPLING ** 0.25

    def forward(x, y):
        MP_CHART.require(x, y)
        _require_branch(x, s)
        return -y / x, -root_c / (x * x)

    def inverse(u, v):
        CR_CHART.require(u, v)
        x = s * quarter_c / sqrt(_abs(v))
        return x, -u * x

    return ChartMap(f"mp->cr/{branch}", forward, inverse, branch,
                    MP_CHART, CR_CHART)


def mp_to_2r(branch=PLUS) -> ChartMap:
    """Oscillator chart (c = -1) to the coupled-Riccati chart.

        u = |c|^(1/2)/x^2 - y/x,   v = -|c|^(1/2)/x^2 - y/x,
        x = s (4|c|)^(1/4)/sqrt|u-v|,   y = -s (4|c|)^(1/4)(u+v)/(2 sqrt|u-v|).

    u - v = 2|c|^(1/2)/x^2 > 0 on the image for either branch; flipping that
    sign pair would flip the pulled-back density to -1.
    """
    s = _sign_of(branch)
    a = math.sqrt(abs(R2_COUPLING))
    root4 = (4.0 * abs(R2_COUPLING)) ** 0.25

    def forward(x, y):
        MP_CHART.require(x, y)
        _require_branch(x, s)
        return a / (x * x) - y / x, -a / (x * x) - y / x

    def inverse(u, v):
        R2_CHART.require(u, v)
        rad = sqrt(_abs(u - v))
        return s * root4 / rad, -s * root4 * (u + v) / (2.0 * rad)

    return ChartMap(f"mp->2r/{branch}", forward, inverse, branch,
                    MP_CHART, R2_CHART)


def i7_chart() -> ChartMap:
    """The hyperbolic chart (x, y) -> (u, v) = (y/x, 1/x) used to move the
    four-field system onto its canonical form.  Bijective between x != 0
    and v != 0; no free sign."""

    def forward(x, y):
        MP_CHART.require(x, y)
        return y / x, 1.0 / x

    def inverse(u, v):
        CR_CHART.require(u, v)
        return 1.0 / v, u / v

    return ChartMap("i7", forward, inverse, PLUS, MP_CHART, CR_CHART)


def identity_map(chart: Chart) -> ChartMap:
    def same(x, y):
        return x, y
    return ChartMap("identity", same, same, PLUS, chart, chart)


def _abs(w):
    # |w| for jets: the charts exclude w = 0, where this would kink
    return -w if float_value(w) < 0 else w


def map_point(m: ChartMap, p):
    """Closed-form image of p; branch errors--wrong half-plane--propagate."""
    return m.forward(p[0], p[1])


def invert_point(m: ChartMap, q):
    return m.inverse(q[0], q[1])


def map_jacobian(m: ChartMap, p):
    """Rows ((du/dx, du/dy), (dv/dx, dv/dy)) at p, via the dual engine."""
    x, y = p
    _, gu = value_and_grad(lambda a, b: m.forward(a, b)[0], (x, y))
    _, gv = value_and_grad(lambda a, b: m.forward(a, b)[1], (x, y))
    return gu, gv


def pushforward_check(m: ChartMap, X_src, X_dst, p) -> float:
    """|J_m(p) X_src(p) - X_dst(m(p))|; zero certifies that the map
    intertwines the two fields."""
    (jux, juy), (jvx, jvy) = map_jacobian(m, p)
    a, b = X_src.at(p[0], p[1])
    q = m.forward(p[0], p[1])
    c, d = X_dst.at(q[0], q[1])
    return math.hypot(jux * a + juy * b - c, jvx * a + jvy * b - d)


def pullback_density_residual(m: ChartMap, W_src, W_dst, p) -> float:
    """det J(p) W_dst(m(p)) - W_src(p): zero iff m pulls the target area
    form back onto the source one with coefficient +1."""
    (jux, juy), (jvx, jvy) = map_jacobian(m, p)
    det = jux * jvy - juy * jvx
    q = m.forward(p[0], p[1])
    return det * W_dst(q[0], q[1]) - W_src(p[0], p[1])


def matching_branch(make_map, q, tol=1e-9):
    """Try both sign branches of a map factory on the target point q and
    report (source_point, branch) for the branch whose forward image
    reproduces q.  The closed forms leave the sign free; this resolves it
    empirically, per point."""
    last = None
    for branch in (PLUS, MINUS):
        m = make_map(branch)
        try:
            p = m.inverse(q[0], q[1])
            image = m.forward(p[0], p[1])
        except BranchError as exc:
            last = exc
            continue
        err = math.hypot(image[0] - q[0], image[1] - q[1])
        scale = max(1.0, abs(q[0]), abs(q[1]))
        if err <= tol * scale:
            return p, branch
    raise BranchError("no branch reproduces the target point"
                      + (f" ({last})" if last else ""))
