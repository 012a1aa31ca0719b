"""Exact integer polynomials.

``NuPolynomial`` is a dense univariate polynomial in the degrees of freedom
``nu``.  ``MultiPoly`` is a sparse polynomial over a fixed tuple of named
variables, used for moments in (nu, rho^2, delta) and similar.  Both use
Python integers, so coefficients never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class NuPolynomial:
    """Univariate polynomial in ``nu``; ``coefficients[k]`` multiplies nu**k.

    The zero polynomial has an empty coefficient tuple.
    """

    coefficients: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _trim(int(c) for c in self.coefficients))

    @classmethod
    def constant(cls, c: int) -> NuPolynomial:
        return cls((c,))

    @classmethod
    def nu(cls) -> NuPolynomial:
        return cls((0, 1))

    @classmethod
    def product_of_shifts(cls, shifts: Iterable[int]) -> NuPolynomial:
        """Return prod (nu + s) over ``shifts`` (empty product is 1)."""
        coeffs = [1]
        for s in shifts:
            nxt = [0] * (len(coeffs) + 1)
            for k, c in enumerate(coeffs):
                nxt[k] += c * s
                nxt[k + 1] += c
            coeffs = nxt
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def coeff(self, k: int) -> int:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else 0

    def __add__(self, other):
        if isinstance(other, int):
            other = NuPolynomial.constant(other)
        if not isinstance(other, NuPolynomial):
            return NotImplemented
        n = max(len(self.coefficients), len(other.coefficients))
        return NuPolynomial([self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return NuPolynomial([-c for c in self.coefficients])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return NuPolynomial([c * other for c in self.coefficients])
        if not isinstance(other, NuPolynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return NuPolynomial()
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return NuPolynomial(out)

    __rmul__ = __mul__

    def scale_argument(self, factor: int) -> NuPolynomial:
        """Return p(factor * nu)."""
        return NuPolynomial([c * factor**k for k, c in enumerate(self.coefficients)])

    def __call__(self, nu):
        result = 0
        for c in reversed(self.coefficients):
            result = result * nu + c
        return result

    def to_json(self) -> dict:
        return {"coefficients": [str(c) for c in self.coefficients] or ["0"]}

    @classmethod
    def from_json(cls, obj: Mapping) -> NuPolynomial:
        return cls([int(c) for c in obj["coefficients"]])

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("nu" if k == 1 else f"nu^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


class MultiPoly:
    """Sparse polynomial with integer coefficients in named variables.

    Terms are stored as ``{exponent tuple: coefficient}`` with zero
    coefficients dropped.  Instances are treated as immutable.
    """

    __slots__ = ("variables", "_terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, int] | None = None):
        self.variables = tuple(variables)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(self.variables):
                raise ValueError("exponent tuple length does not match variables")
            if c:
                clean[exps] = clean.get(exps, 0) + int(c)
        self._terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def constant(cls, variables, c: int = 1) -> MultiPoly:
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name: str) -> MultiPoly:
        exps = tuple(1 if v == name else 0 for v in variables)
        if sum(exps) != 1:
            raise KeyError(name)
        return cls(variables, {exps: 1})

    @classmethod
    def from_nu(cls, variables, poly: NuPolynomial, nu_name: str = "nu") -> MultiPoly:
        idx = variables.index(nu_name)
        terms = {}
        for k, c in enumerate(poly.coefficients):
            exps = [0] * len(variables)
            exps[idx] = k
            terms[tuple(exps)] = c
        return cls(variables, terms)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other):
        if other.variables != self.variables:
            raise ValueError("polynomials over different variables")

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self._terms == other._terms

    def __hash__(self):
        return hash((self.variables, frozenset(self._terms.items())))

    def __add__(self, other):
        if isinstance(other, int):
            other = MultiPoly.constant(self.variables, other)
        self._check(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return MultiPoly(self.variables, {e: c * other for e, c in self._terms.items()})
        self._check(other)
        out: dict[tuple, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = MultiPoly.constant(self.variables)
        for _ in range(k):
            result = result * self
        return result

    def __call__(self, **values):
        total = 0
        for exps, c in self._terms.items():
            term = c
            for name, e in zip(self.variables, exps):
                if e:
                    term = term * values[name] ** e
            total += term
        return total

    def __repr__(self):
        return f"MultiPoly({self.variables!r}, {dict(self.items())!r})"
