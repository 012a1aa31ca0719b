"""Closed-form moment polynomials for degenerate Wishart cases.

All results are exact.  Multivariate results are ``MultiPoly`` objects over
``BIVARIATE_VARS = ("nu", "rho2", "delta")``; unused variables simply carry
exponent zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

from .combinatorics import double_factorial, phi
from .polynomial import MultiPoly, NuPolynomial

BIVARIATE_VARS = ("nu", "rho2", "delta")


def _even_shifts(top: int, count: int) -> NuPolynomial:
    """prod_{i=1..count} (nu + 2(top - i))."""
    return NuPolynomial.product_of_shifts(2 * (top - i) for i in range(1, count + 1))


def _shifts(top: int, count: int) -> NuPolynomial:
    """prod_{i=1..count} (nu + top - i)."""
    return NuPolynomial.product_of_shifts(top - i for i in range(1, count + 1))


def noncentral_chisq_moment(n: int) -> MultiPoly:
    """n-th moment of a noncentral chi-square with ``nu`` degrees of freedom
    and noncentrality ``delta``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return MultiPoly.constant(BIVARIATE_VARS)
    delta = MultiPoly.var(BIVARIATE_VARS, "delta")
    total = MultiPoly(BIVARIATE_VARS)
    for m in range(n + 1):
        total = total + MultiPoly.from_nu(BIVARIATE_VARS, phi(m, n)) * delta ** (n - m)
    return total


@dataclass(frozen=True)
class LaguerreCoefficients:
    """L_n(x) = sum_k coefficients[k](nu) * x**k."""

    n: int
    coefficients: tuple[NuPolynomial, ...]

    def __call__(self, nu, x):
        return sum(c(nu) * x**k for k, c in enumerate(self.coefficients))


def laguerre_coeffs(n: int) -> LaguerreCoefficients:
    """Laguerre polynomial in the normalisation whose generating function is
    sum_n (-1)^n t^n/n! L_n(x) = (1-2t)^(-nu/2) exp(-(x/2)((1-2t)^-1 - 1)).

    The coefficient of x**(n-m) is (-1)^m C(n,m) prod_{i=1..m}(nu + 2(n-i)).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    coeffs = [NuPolynomial()] * (n + 1)
    for m in range(n + 1):
        sign = (-1) ** n * (-1) ** (n - m)
        coeffs[n - m] = _even_shifts(n, m) * (comb(n, m) * sign)
    return LaguerreCoefficients(n, tuple(coeffs))


def hermite_coeffs(n: int) -> tuple[int, ...]:
    """Probabilists' Hermite polynomial H_n; entry k multiplies x**k.

    Built from pairing counts: the coefficient of x**(n-2m) is
    (-1)^m n! / ((n-2m)! 2^m m!).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    coeffs = [0] * (n + 1)
    for m in range(n // 2 + 1):
        a = factorial(n) // (factorial(n - 2 * m) * 2**m * factorial(m))
        coeffs[n - 2 * m] = (-1) ** m * a
    return tuple(coeffs)


def kibble_moment(b: int, c: int) -> MultiPoly:
    """E[w11^b w22^c] for Kibble's bivariate chi-square (unit variances,
    correlation rho), as a polynomial in (nu, rho2)."""
    if b < 0 or c < 0:
        raise ValueError("exponents must be nonnegative")
    total = MultiPoly(BIVARIATE_VARS)
    rho2 = MultiPoly.var(BIVARIATE_VARS, "rho2")
    for a in range(min(b, c) + 1):
        weight = 2**a * factorial(b) * factorial(c) // (factorial(b - a) * factorial(c - a) * factorial(a))
        nu_part = _even_shifts(a, a) * _even_shifts(b, b - a) * _even_shifts(c, c - a) * weight
        total = total + MultiPoly.from_nu(BIVARIATE_VARS, nu_part) * rho2**a
    return total


def real_2x2_moment(a: int, b: int, c: int) -> NuPolynomial:
    """E[w12^(2a) w11^b w22^c] for W ~ W_2(nu, I)."""
    if min(a, b, c) < 0:
        raise ValueError("exponents must be nonnegative")
    return (
        _even_shifts(a, a) * _even_shifts(a + b, b) * _even_shifts(a + c, c) * double_factorial(2 * a - 1)
    )


def real_2x2_is_zero(k12: int) -> bool:
    """An odd power of w12 has zero expectation when Sigma = I."""
    return k12 % 2 == 1


def real_2x2_moment_exponents(k12: int, b: int, c: int) -> NuPolynomial:
    """E[w12^k12 w11^b w22^c] for any k12, zero when k12 is odd."""
    if real_2x2_is_zero(k12):
        return NuPolynomial()
    return real_2x2_moment(k12 // 2, b, c)


def complex_2x2_moment(a: int, b: int, c: int) -> NuPolynomial:
    """E[w11^b (w12 w21)^a w22^c] for W ~ CW_2(nu, I)."""
    if min(a, b, c) < 0:
        raise ValueError("exponents must be nonnegative")
    return _shifts(a, a) * _shifts(a + b, b) * _shifts(a + c, c) * factorial(a)


def complex_2x2_is_zero(k12: int, k21: int) -> bool:
    return k12 != k21


def complex_2x2_moment_exponents(k12: int, k21: int, b: int, c: int) -> NuPolynomial:
    """E[w12^k12 w21^k21 w11^b w22^c], zero unless k12 == k21."""
    if complex_2x2_is_zero(k12, k21):
        return NuPolynomial()
    return complex_2x2_moment(k12, b, c)
