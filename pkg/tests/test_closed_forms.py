import math
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wishart_moments.closed_forms import (
    BIVARIATE_VARS,
    complex_2x2_is_zero,
    complex_2x2_moment,
    complex_2x2_moment_exponents,
    hermite_coeffs,
    kibble_moment,
    laguerre_coeffs,
    noncentral_chisq_moment,
    real_2x2_is_zero,
    real_2x2_moment,
    real_2x2_moment_exponents,
)
from wishart_moments.engine import MomentSpec, expand_moment, specialize
from wishart_moments.polynomial import MultiPoly, NuPolynomial

NU_ONLY = ("nu",)


def _identity_sigma(variables):
    one, zero = MultiPoly.constant(variables, 1), MultiPoly(variables)
    return lambda pr: one if pr[0] == pr[1] else zero


def _engine_identity(flavor, factors):
    poly = expand_moment(MomentSpec(flavor, 2, tuple(factors)))
    zero = MultiPoly(NU_ONLY)
    return specialize(poly, NU_ONLY, _identity_sigma(NU_ONLY), lambda pr: zero)


# -- chi-square ------------------------------------------------------------------------


def test_chisq_examples():
    nu = MultiPoly.var(BIVARIATE_VARS, "nu")
    d = MultiPoly.var(BIVARIATE_VARS, "delta")
    assert noncentral_chisq_moment(1) == nu + d
    assert noncentral_chisq_moment(2) == nu * nu + nu * 2 + nu * d * 2 + d * 4 + d * d
    assert noncentral_chisq_moment(0) == MultiPoly.constant(BIVARIATE_VARS)


@pytest.mark.parametrize("n", range(1, 6))
def test_chisq_matches_engine(n):
    poly = expand_moment(MomentSpec("real", 1, ((1, 1),) * n))
    one = MultiPoly.constant(BIVARIATE_VARS)
    d = MultiPoly.var(BIVARIATE_VARS, "delta")
    assert specialize(poly, BIVARIATE_VARS, lambda pr: one, lambda pr: d) == noncentral_chisq_moment(n)


def test_chisq_central_is_rising_product():
    for n in range(1, 7):
        m = noncentral_chisq_moment(n)
        for nu in (1, 3, 7):
            assert m(nu=nu, rho2=0, delta=0) == math.prod(nu + 2 * i for i in range(n))


# -- Laguerre and Hermite ------------------------------------------------------------------


def test_laguerre_small():
    l1 = laguerre_coeffs(1)
    assert l1.coefficients == (NuPolynomial((0, -1)), NuPolynomial((1,)))
    l2 = laguerre_coeffs(2)
    # x^2 - 2(nu + 2) x + nu(nu + 2)
    assert l2.coefficients == (NuPolynomial((0, 2, 1)), NuPolynomial((-4, -2)), NuPolynomial((1,)))


@pytest.mark.parametrize("n", range(0, 8))
def test_laguerre_is_signed_chisq_moment(n):
    lag = laguerre_coeffs(n)
    m = noncentral_chisq_moment(n)
    for nu, x in [(1, 2), (3, -1), (6, 5)]:
        assert lag(nu, x) == (-1) ** n * m(nu=nu, rho2=0, delta=-x)


def test_laguerre_generating_function():
    nu, x, t = 3.0, 1.5, 0.05
    series = math.fsum((-1) ** n * t**n / factorial(n) * laguerre_coeffs(n)(nu, x) for n in range(40))
    closed = (1 - 2 * t) ** (-nu / 2) * math.exp(-(x / 2) * (1 / (1 - 2 * t) - 1))
    assert abs(series - closed) <= 1e-8 * abs(closed)


def test_hermite_examples():
    assert hermite_coeffs(0) == (1,)
    assert hermite_coeffs(1) == (0, 1)
    assert hermite_coeffs(2) == (-1, 0, 1)
    assert hermite_coeffs(3) == (0, -3, 0, 1)
    assert hermite_coeffs(4) == (3, 0, -6, 0, 1)


def test_hermite_three_term_recurrence():
    prev, cur = [1], [0, 1]
    for n in range(1, 11):
        assert tuple(cur) == hermite_coeffs(n)
        nxt = [0] + cur
        for k, c in enumerate(prev):
            nxt[k] -= n * c
        prev, cur = cur, nxt


def test_hermite_constant_terms_count_perfect_matchings():
    for n in range(0, 12, 2):
        assert abs(hermite_coeffs(n)[0]) == math.prod(range(1, n, 2))


# -- Kibble --------------------------------------------------------------------------------


def test_kibble_examples():
    nu = MultiPoly.var(BIVARIATE_VARS, "nu")
    r = MultiPoly.var(BIVARIATE_VARS, "rho2")
    assert kibble_moment(1, 1) == nu * nu + nu * r * 2
    assert kibble_moment(1, 0) == nu


@given(st.integers(0, 5), st.integers(0, 5))
def test_kibble_symmetry_and_limits(b, c):
    k = kibble_moment(b, c)
    assert k == kibble_moment(c, b)
    for nu in (1, 2, 5):
        indep = math.prod(nu + 2 * i for i in range(b)) * math.prod(nu + 2 * i for i in range(c))
        assert k(nu=nu, rho2=0, delta=0) == indep
        assert k(nu=nu, rho2=1, delta=0) == math.prod(nu + 2 * i for i in range(b + c))


def _rho_to_rho2(poly):
    out = {}
    for (e_nu, e_rho, e_d), c in poly.items():
        assert e_rho % 2 == 0
        out[(e_nu, e_rho // 2, e_d)] = out.get((e_nu, e_rho // 2, e_d), 0) + c
    return MultiPoly(BIVARIATE_VARS, out)


@pytest.mark.parametrize("b, c", [(b, c) for b in range(6) for c in range(6) if 1 <= b + c <= 5])
def test_kibble_matches_engine(b, c):
    variables = ("nu", "rho", "delta")
    one, rho = MultiPoly.constant(variables), MultiPoly.var(variables, "rho")
    zero = MultiPoly(variables)
    poly = expand_moment(MomentSpec("real", 2, ((1, 1),) * b + ((2, 2),) * c))
    got = specialize(poly, variables, lambda pr: one if pr[0] == pr[1] else rho, lambda pr: zero)
    assert _rho_to_rho2(got) == kibble_moment(b, c)


# -- 2x2 Wishart with identity scale ------------------------------------------------------------


def test_real_2x2_examples():
    assert real_2x2_moment(0, 0, 0) == NuPolynomial((1,))
    assert real_2x2_moment(1, 0, 0) == NuPolynomial((0, 1))
    assert real_2x2_moment(1, 1, 0) == NuPolynomial((0, 2, 1))
    assert real_2x2_moment(0, 2, 0) == NuPolynomial((0, 2, 1))
    # E[w12^4] = 3 nu (nu + 2)
    assert real_2x2_moment(2, 0, 0) == NuPolynomial((0, 6, 3))
    assert real_2x2_is_zero(3) and not real_2x2_is_zero(2)
    assert real_2x2_moment_exponents(3, 1, 1).is_zero()


def test_complex_2x2_examples():
    assert complex_2x2_moment(1, 0, 0) == NuPolynomial((0, 1))
    assert complex_2x2_moment(1, 1, 0) == NuPolynomial((0, 1, 1))
    assert complex_2x2_moment(0, 1, 0) == NuPolynomial((0, 1))
    # nu (nu + 1)^2
    assert complex_2x2_moment(1, 1, 1) == NuPolynomial((0, 1, 2, 1))
    # E[(w12 w21)^2] = 2 nu (nu + 1)
    assert complex_2x2_moment(2, 0, 0) == NuPolynomial((0, 2, 2))
    assert complex_2x2_is_zero(2, 1) and not complex_2x2_is_zero(1, 1)
    assert complex_2x2_moment_exponents(1, 2, 0, 0).is_zero()


REAL_CASES = [(k, b, c) for k in range(6) for b in range(6) for c in range(6) if 1 <= k + b + c <= 5]


@pytest.mark.parametrize("k, b, c", REAL_CASES)
def test_real_2x2_matches_engine(k, b, c):
    got = _engine_identity("real", [(1, 2)] * k + [(1, 1)] * b + [(2, 2)] * c)
    assert got == MultiPoly.from_nu(NU_ONLY, real_2x2_moment_exponents(k, b, c))


COMPLEX_CASES = [
    (k12, k21, b, c)
    for k12 in range(4)
    for k21 in range(4)
    for b in range(4)
    for c in range(4)
    if 1 <= k12 + k21 + b + c <= 5
]


@pytest.mark.parametrize("k12, k21, b, c", COMPLEX_CASES)
def test_complex_2x2_matches_engine(k12, k21, b, c):
    got = _engine_identity("complex", [(1, 2)] * k12 + [(2, 1)] * k21 + [(1, 1)] * b + [(2, 2)] * c)
    assert got == MultiPoly.from_nu(NU_ONLY, complex_2x2_moment_exponents(k12, k21, b, c))


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_complex_real_2x2_bridge(a, b, c):
    lhs = complex_2x2_moment(a, b, c) * (factorial(2 * a) * 2 ** (b + c))
    rhs = real_2x2_moment(a, b, c).scale_argument(2) * factorial(a) ** 2
    assert lhs == rhs


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_2x2_values_reduce_to_factorials(a, b, c):
    assert complex_2x2_moment(a, b, c)(1) == factorial(a + b) * factorial(a + c)
    odd = math.prod(range(1, 2 * a, 2))
    expected = odd * 2 ** (a + b + c) * factorial(a + b) * factorial(a + c) // factorial(a)
    assert real_2x2_moment(a, b, c)(2) == expected


def test_negative_exponents_rejected():
    for fn in (real_2x2_moment, complex_2x2_moment):
        with pytest.raises(ValueError):
            fn(-1, 0, 0)
    with pytest.raises(ValueError):
        kibble_moment(-1, 2)
