"""Acceptance gate: ten end-to-end criteria, one verdict line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the measured
margins; each criterion also carries a wall-clock budget.
"""

import math
import random
import time

from lhdeform.appendix import (ShcODEParams, SincODEParams,
                               gl2_commutator_check, integrate_and_fit,
                               shc_ode_residual, sinc_ode_residual)
from lhdeform.coalgebra import NCopyState, f2_closed_form, f2_invariant
from lhdeform.coeffexpr import as_function
from lhdeform.integrator import drift_series, integrate, integrate_rk4
from lhdeform.sl2systems import build_realization, mp_coefficients
from lhdeform.transforms import (MINUS, PLUS, map_point, mp_to_2r, mp_to_cr,
                                 pushforward_check)
from lhdeform.verify import (ORDER_REQUIRED_F2, ORDER_REQUIRED_H,
                             bracket_closure, casimir_constancy,
                             classical_limit, commutator_structure,
                             hamiltonian_consistency,
                             lie_derivative_flatness, sample_points)

Z_GRID = (0.0, 0.1, -0.1, 1.0, -1.0)
MP_COUPLINGS = (-2.0, 0.5, 4.0)


def _grid():
    for z in Z_GRID:
        for c in MP_COUPLINGS:
            yield build_realization("mp", z, c)
        yield build_realization("cr", z)
        yield build_realization("2r", z)


def _report(num, label, ok, detail, t0, budget):
    elapsed = time.perf_counter() - t0
    in_budget = elapsed < budget
    verdict = "PASS" if (ok and in_budget) else "FAIL"
    print(f"[{num:02d}] {verdict} {label}: {detail} "
          f"({elapsed:.2f}s, budget {budget:g}s)")
    assert ok, detail
    assert in_budget, f"runtime {elapsed:.2f}s exceeded {budget:g}s"


def test_01_deformed_bracket_closure():
    t0 = time.perf_counter()
    rng = random.Random(11)
    worst = 0.0
    for r in _grid():
        pts = sample_points(r.family, 200, rng)
        for res in bracket_closure(r, pts):
            worst = max(worst, res.max_residual)
    _report(1, "bracket closure", worst < 1e-9,
            f"max rel residual {worst:.2e} < 1e-9", t0, 5.0)


def test_02_casimir_constancy():
    t0 = time.perf_counter()
    rng = random.Random(13)
    worst = 0.0
    for r in _grid():
        pts = sample_points(r.family, 500, rng)
        worst = max(worst, casimir_constancy(r, pts)[0].max_residual)
    _report(2, "casimir constancy", worst < 1e-11,
            f"max abs residual {worst:.2e} < 1e-11", t0, 2.0)


def test_03_commutator_structure():
    t0 = time.perf_counter()
    rng = random.Random(17)
    worst = 0.0
    for r in _grid():
        pts = sample_points(r.family, 100, rng)
        for res in commutator_structure(r, pts):
            worst = max(worst, res.max_residual)
    _report(3, "commutator structure", worst < 1e-8,
            f"max rel residual {worst:.2e} < 1e-8 "
            "(function-coefficient terms included)", t0, 10.0)


def test_04_field_consistency():
    t0 = time.perf_counter()
    rng = random.Random(19)
    worst_rel = worst_abs = 0.0
    for r in _grid():
        pts = sample_points(r.family, 100, rng)
        for res in hamiltonian_consistency(r, pts):
            worst_rel = max(worst_rel, res.max_residual)
        for res in lie_derivative_flatness(r, pts):
            worst_abs = max(worst_abs, res.max_residual)
    _report(4, "hamiltonian fields", worst_rel < 1e-10 and worst_abs < 1e-10,
            f"field gap {worst_rel:.2e} < 1e-10 rel, "
            f"L_X omega {worst_abs:.2e} < 1e-10 abs", t0, 5.0)


def _oscillator_drift(z, rtol):
    r = build_realization("mp", z, 4.0)
    coeffs = mp_coefficients(as_function("1 + 0.2 * cos(t)"))
    state = NCopyState(((1.0, 0.0), (2.0, 1.0)))
    _, _, rep = drift_series(r, coeffs, state, (0.0, 10.0),
                             rtol=rtol, atol=1e-12, n_samples=201)
    return rep.rel_drift


def test_05_invariant_drift():
    t0 = time.perf_counter()
    drifts = {z: _oscillator_drift(z, 1e-10) for z in (0.0, 0.3)}
    ratios = {z: drifts[z] / _oscillator_drift(z, 1e-11)
              for z in (0.0, 0.3)}
    ok = all(d < 1e-6 for d in drifts.values()) \
        and all(r >= 5.0 for r in ratios.values())
    _report(5, "two-copy invariant drift", ok,
            f"rel drift {max(drifts.values()):.2e} < 1e-6 at rtol 1e-10, "
            f"shrink x{min(ratios.values()):.1f} >= x5 at rtol/10", t0, 5.0)


def test_06_classical_limits():
    t0 = time.perf_counter()
    results = classical_limit("mp", 4.0)
    h_order = min(ORDER_REQUIRED_H - res.max_residual
                  for res in results if res.identity.startswith("order(h")
                  or res.identity.startswith("order(grad"))
    f2_order = next(ORDER_REQUIRED_F2 - res.max_residual
                    for res in results if "F2" in res.identity)
    ok = all(res.passed for res in results)
    _report(6, "classical limits", ok,
            f"h and gradient order {h_order:.2f} >= 1.9, "
            f"F2 order {f2_order:.2f} >= 0.9 under z-halving", t0, 1.0)


def test_07_chart_map_transport():
    t0 = time.perf_counter()
    rng = random.Random(23)
    worst_push = worst_transport = 0.0
    for z in (0.0, 0.35):
        for factory, family, c in ((mp_to_cr, "cr", 4.0),
                                   (mp_to_2r, "2r", -1.0)):
            src = build_realization("mp", z, c)
            dst = build_realization(family, z)
            for branch in (PLUS, MINUS):
                m = factory(branch)
                sign = 1.0 if branch == PLUS else -1.0
                for _ in range(100):
                    p = (sign * rng.uniform(0.4, 2.0),
                         rng.uniform(-2.0, 2.0))
                    for Xs, Xd in zip(src.fields, dst.fields):
                        worst_push = max(worst_push,
                                         pushforward_check(m, Xs, Xd, p))
                    q = map_point(m, p)
                    # both transport constants equal one at the pinned
                    # couplings: c/4 = 1 under the square root either way
                    for hs, hd in zip(src.h, dst.h):
                        a, b = hs(*p), hd(*q)
                        worst_transport = max(
                            worst_transport,
                            abs(a - b) / max(1.0, abs(a), abs(b)))
    ok = worst_push < 1e-8 and worst_transport < 1e-10
    _report(7, "chart maps", ok,
            f"pushforward residual {worst_push:.2e} < 1e-8, "
            f"invariant transport gap {worst_transport:.2e} < 1e-10", t0, 5.0)


def test_08_auxiliary_functions():
    t0 = time.perf_counter()
    ts = [0.1 + (6.0 - 0.1) * i / 199 for i in range(200)]
    worst_ode = 0.0
    for params in (ShcODEParams(1.0, 1.0, 0.5), ShcODEParams(0.3, -2.0, 1.0),
                   ShcODEParams(2.0, 0.0, 1.0), ShcODEParams(0.8, 1.0, 0.0)):
        worst_ode = max(worst_ode,
                        max(abs(shc_ode_residual(params, t)) for t in ts))
    for params in (SincODEParams(1.0, -0.3, 1.2), SincODEParams(0.5, 1.0, 0.0),
                   SincODEParams(2.0, 0.4, -0.7)):
        worst_ode = max(worst_ode,
                        max(abs(sinc_ode_residual(params, t)) for t in ts))
    fit = integrate_and_fit(ShcODEParams(0.9, 0.7, -0.4), 0.5, 4.0)
    gl2 = gl2_commutator_check((0.7, -1.3))
    ok = worst_ode < 1e-10 and fit.max_deviation < 1e-6 \
        and gl2.max_residual < 1e-10
    _report(8, "auxiliary functions", ok,
            f"ODE residual {worst_ode:.2e} < 1e-10, "
            f"fit deviation {fit.max_deviation:.2e} < 1e-6, "
            f"gl2 table {gl2.max_residual:.2e} < 1e-10", t0, 3.0)


def test_09_invariant_dual_paths():
    t0 = time.perf_counter()
    rng = random.Random(29)
    worst = 0.0
    # |z| <= 0.3 keeps the closed forms away from the deep cancellation
    # region of their exponential differences
    for family in ("mp", "cr", "2r"):
        pts = sample_points(family, 400, rng)
        states = [NCopyState(pair) for pair in zip(pts[0::2], pts[1::2])]
        for z in (0.0, 0.1, -0.1, 0.3, -0.3):
            r = build_realization(family, z, 0.5 if family == "mp" else None)
            for st in states:
                a = f2_invariant(r, st)
                b = f2_closed_form(r, st)
                worst = max(worst, abs(a - b) / max(1.0, abs(a), abs(b)))
    _report(9, "invariant dual paths", worst < 1e-12,
            f"generic vs closed form {worst:.2e} < 1e-12 rel "
            "(200 two-copy states per family)", t0, 3.0)


def test_10_integrator_order():
    t0 = time.perf_counter()

    def osc(t, y):
        return (y[1], -y[0])

    period = 2.0 * math.pi
    errs = []
    for n in (40, 80, 160, 320):
        traj = integrate_rk4(osc, (0.0, 1.0), (0.0, period), n)
        x, y = traj.states[-1]
        errs.append(math.hypot(x, y - 1.0))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    traj = integrate(osc, (0.0, 1.0), (0.0, period))
    x, y = traj.states[-1]
    adaptive_err = math.hypot(x, y - 1.0)
    ok = all(3.8 <= o <= 4.2 for o in orders) and adaptive_err < 1e-8
    _report(10, "integrator order", ok,
            f"rk4 order {min(orders):.3f}..{max(orders):.3f} in [3.8, 4.2], "
            f"adaptive endpoint error {adaptive_err:.2e} < 1e-8", t0, 2.0)
