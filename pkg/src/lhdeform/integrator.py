"""Adaptive Runge-Kutta integration tailored to fields with chart boundaries.

The workhorse is the Dormand-Prince 5(4) embedded pair with a
proportional-integral step controller and the classical quartic dense-output
interpolant, so invariants can be sampled at arbitrary times without
re-stepping.  A fixed-step RK4 companion exists for order measurements and
cross-checks.

Termination semantics: a trajectory either runs to the end of the span
("completed"), stops short of a chart boundary ("singular-approach", when the
gap function drops below the guard threshold), or stops because the solution
left any reasonable range ("overflow").  A step size collapsing to the
roundoff floor raises StiffnessError with the partial trajectory attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import DomainError, RangeOverflowError, StiffnessError

COMPLETED = "completed"
SINGULAR = "singular-approach"
OVERFLOW = "overflow"

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# y5 - y4, applied to the stages
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525,
      -1 / 40)
# quartic dense-output weights
_D = (-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
      -10690763975 / 1880347072, 701980252875 / 199316789632,
      -1453857185 / 822651844, 69997945 / 29380423)

_STATE_LIMIT = 1e50
_BLOWUP_SCALE = 1e6
_UNDERFLOW_FACTOR = 1e-14

_RETRYABLE = (DomainError, RangeOverflowError, ZeroDivisionError,
              OverflowError, ValueError)


@dataclass
class Trajectory:
    times: list
    states: list
    accepted: int = 0
    rejected: int = 0
    max_error_estimate: float = 0.0
    termination: str = COMPLETED
    termination_time: Optional[float] = None

    @property
    def final_time(self):
        return self.times[-1]

    @property
    def final_state(self):
        return self.states[-1]

    def samples(self):
        return list(zip(self.times, self.states))


def _norm_err(err, y0, y1, rtol, atol):
    s = 0.0
    for e, a, b in zip(err, y0, y1):
        sc = atol + rtol * max(abs(a), abs(b))
        s += (e / sc) ** 2
    return math.sqrt(s / len(err))


def _finite(y):
    return all(math.isfinite(c) for c in y)


class _DenseSegment:
    """Quartic interpolant over one accepted step [t, t + h]."""

    __slots__ = ("t", "h", "r1", "r2", "r3", "r4", "r5")

    def __init__(self, t, h, y0, y1, k):
        self.t, self.h = t, h
        n = len(y0)
        ydiff = [y1[i] - y0[i] for i in range(n)]
        bspl = [h * k[0][i] - ydiff[i] for i in range(n)]
        self.r1 = list(y0)
        self.r2 = ydiff
        self.r3 = bspl
        self.r4 = [ydiff[i] - h * k[6][i] - bspl[i] for i in range(n)]
        self.r5 = [h * sum(_D[j] * k[j][i] for j in range(7)) for i in range(n)]

    def at(self, ts):
        th = (ts - self.t) / self.h
        th1 = 1.0 - th
        return tuple(
            self.r1[i] + th * (self.r2[i] + th1 * (self.r3[i] + th * (
                self.r4[i] + th1 * self.r5[i])))
            for i in range(len(self.r1)))


def _first_crossing(seg, guard, threshold):
    """Earliest theta in (0, 1] with gap <= threshold, given gap(0) > it."""
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if guard(seg.at(seg.t + seg.h * mid)) <= threshold:
            hi = mid
        else:
            lo = mid
    return hi


def _guard_scan(seg, guard, g_start, threshold):
    """Minimum of the gap function along one dense-output segment.

    Returns (gap_min, theta).  theta is the fractional position of the
    boundary encounter when one happens, else None.  The quartic
    interpolant deviates from the segment start by at most the sum of the
    absolute interpolation coefficients per component, so when the gap at
    both ends clears that wiggle bound (times a Lipschitz margin) the
    boundary cannot be touched and the scan is skipped.  Otherwise a coarse
    sweep brackets the minimum and a ternary search refines it; this
    resolves transversal crossings whose dip below the threshold is far
    narrower than any fixed sampling grid.
    """
    g_end = guard(seg.at(seg.t + seg.h))
    if g_end <= threshold:
        # the step ends at or past the boundary; report the first crossing,
        # not the step end (steps can be huge when the local error vanishes)
        th = _first_crossing(seg, guard, threshold)
        return g_end, th
    wiggle = max(abs(seg.r2[i]) + abs(seg.r3[i]) + abs(seg.r4[i])
                 + abs(seg.r5[i]) for i in range(len(seg.r1)))
    if min(g_start, g_end) > 4.0 * wiggle + threshold:
        return min(g_start, g_end), None
    nt = 16
    gs = [g_start]
    for j in range(1, nt):
        gs.append(guard(seg.at(seg.t + seg.h * j / nt)))
    gs.append(g_end)
    best = min(range(nt + 1), key=gs.__getitem__)
    if gs[best] <= threshold:
        return gs[best], best / nt
    lo, hi = max(best - 1, 0) / nt, min(best + 1, nt) / nt
    g_min, th_min = gs[best], best / nt
    for _ in range(40):
        m1, m2 = lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0
        g1 = guard(seg.at(seg.t + seg.h * m1))
        g2 = guard(seg.at(seg.t + seg.h * m2))
        if g1 < g_min:
            g_min, th_min = g1, m1
        if g2 < g_min:
            g_min, th_min = g2, m2
        if g_min <= threshold:
            return g_min, th_min
        if g1 <= g2:
            hi = m2
        else:
            lo = m1
    return g_min, th_min if g_min <= threshold else None


def _initial_step(rhs, t0, y0, f0, t1, rtol, atol):
    sc = [atol + rtol * abs(c) for c in y0]
    d0 = math.sqrt(sum((c / s) ** 2 for c, s in zip(y0, sc)) / len(y0))
    d1 = math.sqrt(sum((c / s) ** 2 for c, s in zip(f0, sc)) / len(y0))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, t1 - t0)
    try:
        y1 = tuple(y0[i] + h0 * f0[i] for i in range(len(y0)))
        f1 = rhs(t0 + h0, y1)
        d2 = math.sqrt(sum(((f1[i] - f0[i]) / sc[i]) ** 2
                           for i in range(len(y0))) / len(y0)) / h0
    except _RETRYABLE:
        d2 = 0.0
    dm = max(d1, d2)
    h1 = (0.01 / dm) ** 0.2 if dm > 1e-15 else max(1e-6, h0 * 1e-3)
    return min(100.0 * h0, h1, t1 - t0)


def integrate(rhs, y0, t_span, rtol=1e-9, atol=1e-12, t_eval=None,
              guard: Optional[Callable] = None, guard_threshold=1e-6,
              max_steps=10_000_000, first_step=None) -> Trajectory:
    """Integrate y' = rhs(t, y) over t_span = (t0, t1), t1 > t0.

    rhs maps (t, tuple) -> tuple.  If `t_eval` is given, the trajectory holds
    dense-output samples at exactly those times (ascending, within the span);
    otherwise it holds the accepted steps.  `guard` is an optional gap
    function of the state; when it drops to `guard_threshold` anywhere along
    a step the integration stops cleanly with termination
    "singular-approach" instead of stepping onto or across the singular set.
    The recorded points then end at the last state with clearance;
    `termination_time` locates the boundary encounter itself.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("need t1 > t0")
    y = tuple(float(c) for c in y0)
    if t_eval is not None:
        t_eval = [float(t) for t in t_eval]
        if any(b <= a for a, b in zip(t_eval, t_eval[1:])):
            raise ValueError("t_eval must be strictly increasing")
        if t_eval and (t_eval[0] < t0 or t_eval[-1] > t1):
            raise ValueError("t_eval outside the span")

    traj = Trajectory([], [])
    emit_idx = 0

    def emit_initial():
        nonlocal emit_idx
        if t_eval is None:
            traj.times.append(t0)
            traj.states.append(y)
        else:
            while emit_idx < len(t_eval) and t_eval[emit_idx] <= t0:
                traj.times.append(t_eval[emit_idx])
                traj.states.append(y)
                emit_idx += 1

    def finish(reason, t_stop):
        traj.termination = reason
        traj.termination_time = t_stop
        return traj

    emit_initial()
    g_here = guard(y) if guard is not None else None
    if guard is not None and g_here <= guard_threshold:
        return finish(SINGULAR, t0)

    f = rhs(t0, y)
    if len(f) != len(y):
        raise ValueError("rhs dimension mismatch")
    h = first_step if first_step is not None else _initial_step(
        rhs, t0, y, f, t1, rtol, atol)
    h_floor = _UNDERFLOW_FACTOR * (t1 - t0)
    scale0 = max(max(abs(c) for c in y), 1.0)
    t = t0
    facold = 1e-4
    n = len(y)

    steps = 0
    while t < t1:
        if steps >= max_steps:
            raise StiffnessError(f"no convergence within {max_steps} steps",
                                 traj)
        steps += 1
        if h < h_floor:
            # a collapsing step with a runaway state is a finite-time
            # blow-up, not stiffness
            if max(abs(c) for c in y) > _BLOWUP_SCALE * scale0:
                return finish(OVERFLOW, t)
            raise StiffnessError(
                f"step size underflow (h = {h:.3e}) near t = {t:.6g}", traj)
        h = min(h, t1 - t)

        try:
            k = [f]
            for s in range(1, 7):
                ys = tuple(
                    y[i] + h * sum(_A[s][j] * k[j][i] for j in range(s))
                    for i in range(n))
                k.append(rhs(t + _C[s] * h, ys))
            ynew = tuple(
                y[i] + h * sum(_B5[j] * k[j][i] for j in range(6))
                for i in range(n))
            # k[6] was evaluated at (t + h, ynew) by construction of the
            # tableau (FSAL): stage 7 nodes equal the 5th-order weights.
            errvec = [h * sum(_E[j] * k[j][i] for j in range(7))
                      for i in range(n)]
            if not (_finite(ynew) and _finite(errvec)):
                raise DomainError("non-finite step")
        except _RETRYABLE:
            traj.rejected += 1
            h *= 0.5
            continue

        err = _norm_err(errvec, y, ynew, rtol, atol)
        if err > 1.0:
            traj.rejected += 1
            fac11 = err ** 0.17
            h /= min(5.0, fac11 / 0.9)
            continue

        # accepted
        traj.accepted += 1
        traj.max_error_estimate = max(traj.max_error_estimate, err)
        seg = _DenseSegment(t, h, y, ynew, k)
        tnew = t + h

        stop_reason = None
        stop_time = tnew
        g_new = None
        if max(abs(c) for c in ynew) > _STATE_LIMIT:
            stop_reason, stop_time = OVERFLOW, t
        elif guard is not None:
            g_min, th = _guard_scan(seg, guard, g_here, guard_threshold)
            if g_min <= guard_threshold:
                stop_reason, stop_time = SINGULAR, t + th * h
            else:
                g_new = guard(ynew)

        if t_eval is None:
            if stop_reason is None:
                traj.times.append(tnew)
                traj.states.append(ynew)
        else:
            while emit_idx < len(t_eval) and (
                    t_eval[emit_idx] <= tnew if stop_reason is None
                    else t_eval[emit_idx] < stop_time):
                traj.times.append(t_eval[emit_idx])
                traj.states.append(seg.at(t_eval[emit_idx]))
                emit_idx += 1

        if stop_reason is not None:
            return finish(stop_reason, stop_time)

        t, y, g_here = tnew, ynew, g_new
        f = k[6]
        facold_new = max(err, 1e-4)
        fac11 = err ** 0.17
        fac = fac11 / (facold ** 0.04)
        fac = max(0.1, min(5.0, fac / 0.9))
        h = h / fac
        facold = facold_new

    return finish(COMPLETED, None)


def integrate_rk4(rhs, y0, t_span, n_steps, guard=None,
                  guard_threshold=1e-6) -> Trajectory:
    """Classical fixed-step fourth-order Runge-Kutta over a uniform grid."""
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (t1 > t0 and n_steps >= 1):
        raise ValueError("need t1 > t0 and n_steps >= 1")
    h = (t1 - t0) / n_steps
    y = tuple(float(c) for c in y0)
    traj = Trajectory([t0], [y])
    n = len(y)
    for m in range(n_steps):
        t = t0 + m * h
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, tuple(y[i] + 0.5 * h * k1[i] for i in range(n)))
        k3 = rhs(t + 0.5 * h, tuple(y[i] + 0.5 * h * k2[i] for i in range(n)))
        k4 = rhs(t + h, tuple(y[i] + h * k3[i] for i in range(n)))
        y = tuple(y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
                  for i in range(n))
        traj.accepted += 1
        if guard is not None and guard(y) <= guard_threshold:
            traj.termination = SINGULAR
            traj.termination_time = t
            return traj
        traj.times.append(t0 + (m + 1) * h)
        traj.states.append(y)
    traj.termination = COMPLETED
    return traj


@dataclass
class DriftReport:
    """How well a supposed constant of motion held along a trajectory."""

    invariant: str
    initial_value: float
    max_abs_drift: float
    rel_drift: float
    n_samples: int
    rtol: float
    atol: float
    termination: str


def _copies_guard(chart, n_copies):
    gap = chart.gap
    if gap is None:
        return None

    def guard(y):
        return min(gap(y[2 * k], y[2 * k + 1]) for k in range(n_copies))
    return guard


def drift_series(r, coeffs, states, t_span, rtol=1e-10, atol=1e-12,
                 n_samples=201, invariant=None, name="F2"):
    """Track an invariant along the two-copy flow of the lifted triple.

    Both copies evolve under the same coefficients; the flow is generated by
    the coproduct-lifted Hamiltonians (see coalgebra.lifted_field), which is
    the plain diagonal flow at z = 0 and couples the copies for z != 0.
    `invariant` maps an NCopyState to a float; the default is the lifted
    deformed Casimir f2_invariant, whose drift for a correct implementation
    is integrator error, not deformation error.  Returns
    (times, values, DriftReport).
    """
    from .coalgebra import NCopyState, f2_invariant, lifted_field
    from .numkit import DEFAULT_TOLS

    if states.n != 2:
        raise ValueError("drift tracking is defined on two-copy states")
    if invariant is None:
        def invariant(st):
            return f2_invariant(r, st)

    t0, t1 = float(t_span[0]), float(t_span[1])
    (x1, y1), (x2, y2) = states.points
    t_eval = [t0 + (t1 - t0) * i / (n_samples - 1) for i in range(n_samples)]
    traj = integrate(lifted_field(r, coeffs), (x1, y1, x2, y2), (t0, t1),
                     rtol=rtol, atol=atol, t_eval=t_eval,
                     guard=_copies_guard(r.chart, 2))
    times, values = [], []
    for ts, ys in traj.samples():
        st = NCopyState(((ys[0], ys[1]), (ys[2], ys[3])))
        times.append(ts)
        values.append(invariant(st))
    v0 = values[0]
    max_abs = max(abs(v - v0) for v in values)
    rel = max_abs / max(abs(v0), DEFAULT_TOLS.abs_identity)
    report = DriftReport(name, v0, max_abs, rel, len(values), rtol, atol,
                         traj.termination)
    return times, values, report


def drift(r, coeffs, states, t_span, rtol=1e-10, atol=1e-12,
          n_samples=201) -> DriftReport:
    """Drift summary of the lifted deformed Casimir; see drift_series."""
    return drift_series(r, coeffs, states, t_span, rtol=rtol, atol=atol,
                        n_samples=n_samples)[2]
