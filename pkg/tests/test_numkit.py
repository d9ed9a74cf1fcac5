import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lhdeform.errors import DomainError, RangeOverflowError
from lhdeform.numkit import (DEFAULT_TOLS, Dual2, Tolerances, ch, cos, diff2,
                             d_dx, d_dy, exp, float_value, jet_d1, jet_d2,
                             jet_value, sh, shc, shc_prime, sin, sinc, sqrt,
                             th, value_and_grad)

import oracles


# ---------------------------------------------------------------- scalars

@pytest.mark.parametrize("x", [0.0, 1e-12, 1e-6, 0.005, 0.099999, 0.100001,
                               0.3, 1.0, 5.0, 30.0, -0.007, -2.5])
def test_shc_matches_series_oracle(x):
    assert shc(x) == pytest.approx(oracles.shc_series(x), rel=5e-15)


def test_shc_at_zero_is_exactly_one():
    assert shc(0.0) == 1.0


@pytest.mark.parametrize("x", [600.0, 699.0])
def test_shc_large_argument(x):
    # sh overflows long before 700 exceeds float range; quotient stays finite
    assert shc(x) == pytest.approx(math.sinh(x) / x, rel=1e-14)


@given(st.floats(min_value=-650, max_value=650))
@settings(max_examples=200, deadline=None)
def test_shc_even_and_at_least_one(x):
    assert shc(x) == shc(-x)
    assert shc(x) >= 1.0


@pytest.mark.parametrize("bad", [701.0, -720.0])
def test_shc_overflow_guard(bad):
    with pytest.raises(RangeOverflowError):
        shc(bad)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_shc_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        shc(bad)


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.004, 0.02, 0.099999, 0.100001,
                               0.7, -3.0, 12.0])
def test_shc_prime_matches_series_oracle(x):
    assert shc_prime(x) == pytest.approx(oracles.shc_prime_series(x),
                                         rel=1e-13, abs=1e-18)


@pytest.mark.parametrize("x", [0.03, 0.5, 2.0, -1.2])
def test_shc_prime_matches_central_difference(x):
    assert shc_prime(x) == pytest.approx(oracles.central_d1(shc, x), rel=1e-8)


@pytest.mark.parametrize("x", [0.0, 1e-9, 0.0099, 0.02, 1.5, -0.4])
def test_sinc_matches_series_oracle(x):
    assert sinc(x) == pytest.approx(oracles.sinc_series(x), rel=1e-14,
                                    abs=1e-17)


def test_sinc_large_argument():
    # the alternating series is useless out here; compare the quotient itself
    assert sinc(20.0) == pytest.approx(math.sin(20.0) / 20.0, rel=1e-15)


def test_sinc_at_zero():
    assert sinc(0.0) == 1.0


# ------------------------------------------------------------------- jets

def _composite(x):
    # exercises every elementary in one chain
    return exp(sin(x)) * sh(x) / (1.0 + x * x) + th(x) * sqrt(4.0 + x) \
        + ch(x / 3.0) + cos(x) + shc(x) + sinc(x / 2.0)


@pytest.mark.parametrize("x", [-1.3, -0.2, 0.0, 0.41, 2.2])
def test_dual_first_derivative_vs_central_difference(x):
    jet = _composite(Dual2.seed(x))
    fd = oracles.central_d1(lambda u: float(_composite(u)), x)
    assert jet_value(jet) == _composite(x)
    assert jet_d1(jet) == pytest.approx(fd, rel=2e-8, abs=2e-8)


@pytest.mark.parametrize("x", [-1.3, 0.41, 2.2])
def test_dual_second_derivative_vs_central_difference(x):
    jet = _composite(Dual2.seed(x))
    fd = oracles.central_d2(lambda u: float(_composite(u)), x)
    assert jet_d2(jet) == pytest.approx(fd, rel=5e-6, abs=5e-6)


def test_dual_arithmetic_identities():
    x = Dual2.seed(0.7)
    q = (x * x - 1.0) / (x + 2.0)
    r = x * x / (x + 2.0) - 1.0 / (x + 2.0)
    assert jet_value(q) == pytest.approx(jet_value(r), rel=1e-15)
    assert jet_d1(q) == pytest.approx(jet_d1(r), rel=1e-15)
    assert jet_d2(q) == pytest.approx(jet_d2(r), rel=1e-14)


def test_shc_jet_smooth_across_series_cutoff():
    # both branches agree with the reference series right at the switch
    for x in (0.0999999, 0.1000001):
        assert shc_prime(x) == pytest.approx(oracles.shc_prime_series(x),
                                             rel=1e-13)
    j = shc(Dual2.seed(0.1))
    assert jet_d1(j) == pytest.approx(shc_prime(0.1), rel=1e-13)


def test_float_value_unwraps_nested_jets():
    assert float_value(1.25) == 1.25
    assert float_value(Dual2.seed(2.5)) == 2.5
    assert float_value(Dual2(Dual2.seed(3.5), 1.0, 0.0)) == 3.5


# ------------------------------------------------------------- two slots

def _scalar_field(x, y):
    return sin(x) * exp(y) + x * x * x * y * y


def test_diff2_against_analytic_hessian():
    x, y = 0.6, -0.8
    d = diff2(_scalar_field, (x, y))
    assert d.value == pytest.approx(math.sin(x) * math.exp(y)
                                    + x ** 3 * y ** 2, rel=1e-14)
    assert d.gradient[0] == pytest.approx(math.cos(x) * math.exp(y)
                                          + 3 * x * x * y * y, rel=1e-13)
    assert d.gradient[1] == pytest.approx(math.sin(x) * math.exp(y)
                                          + 2 * x ** 3 * y, rel=1e-13)
    hxx = -math.sin(x) * math.exp(y) + 6 * x * y * y
    hxy = math.cos(x) * math.exp(y) + 6 * x * x * y
    hyy = math.sin(x) * math.exp(y) + 2 * x ** 3
    assert d.hessian[0][0] == pytest.approx(hxx, rel=1e-12)
    assert d.hessian[0][1] == pytest.approx(hxy, rel=1e-12)
    assert d.hessian[1][1] == pytest.approx(hyy, rel=1e-12)
    assert d.hessian[0][1] == d.hessian[1][0]


def test_diff2_mixed_matches_central_oracle():
    p = (1.1, 0.3)
    d = diff2(_scalar_field, p)
    fd = oracles.central_mixed(
        lambda a, b: math.sin(a) * math.exp(b) + a ** 3 * b ** 2, p)
    assert d.hessian[0][1] == pytest.approx(fd, rel=1e-6)


def test_value_and_grad_matches_central_oracle():
    p = (0.9, -1.4)
    v, g = value_and_grad(_scalar_field, p)
    fd = oracles.central_gradient(
        lambda a, b: math.sin(a) * math.exp(b) + a ** 3 * b ** 2, p)
    assert g[0] == pytest.approx(fd[0], rel=1e-8)
    assert g[1] == pytest.approx(fd[1], rel=1e-8)


def test_partials_support_nesting():
    # d2f/dxdy of x^2 y^3 is 6 x y^2
    mixed = d_dx(lambda x, y: d_dy(lambda u, v: u * u * v * v * v, x, y),
                 0.5, 2.0)
    assert mixed == pytest.approx(6 * 0.5 * 4.0, rel=1e-13)


# ------------------------------------------------------------- tolerances

def test_default_tolerances_consistent():
    assert DEFAULT_TOLS.fd_step ** 2 >= DEFAULT_TOLS.abs_identity


def test_tolerances_reject_fd_step_below_identity_floor():
    with pytest.raises(ValueError):
        Tolerances(fd_step=1e-7)


def test_tolerances_reject_non_positive():
    with pytest.raises(ValueError):
        Tolerances(rel_identity=0.0)
