"""Symbolic mixed moments of real and complex noncentral Wishart matrices.

A product ``w[a1,b1] w[a2,b2] ... w[an,bn]`` is expanded by relabelling:
vertex 2k-1 (real) or the row/column slot of vertex k (complex) carries the
matrix indices of factor k, and every pairing / partial injection contributes
one monomial ``nu^cycles * prod sigma * prod delta``.  Like terms are
collected with exact integer coefficients; ``nu`` stays symbolic until
:func:`evaluate` binds it.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import chain
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import combinatorics as cb
from .errors import (
    DimensionMismatch,
    FlavorMismatch,
    IndexOutOfRange,
    LimitExceeded,
    NotHermitian,
    NotSymmetric,
    SchemaError,
)
from .polynomial import MultiPoly

REAL = "real"
COMPLEX = "complex"
FLAVORS = (REAL, COMPLEX)

Pair = tuple[int, int]


@dataclass(frozen=True)
class MomentSpec:
    """Which product of Wishart entries to expand.

    ``factors`` holds 1-based (row, column) pairs; real factors are stored
    with row <= column, complex factors keep their order.
    """

    flavor: str
    p: int
    factors: tuple[Pair, ...]

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
        if self.p < 1:
            raise ValueError("p must be positive")
        factors = []
        for a, b in self.factors:
            a, b = int(a), int(b)
            if not (1 <= a <= self.p and 1 <= b <= self.p):
                raise IndexOutOfRange(f"factor w[{a},{b}] has an index outside 1..{self.p}")
            if self.flavor == REAL and a > b:
                a, b = b, a
            factors.append((a, b))
        object.__setattr__(self, "factors", tuple(factors))

    @property
    def n(self) -> int:
        return len(self.factors)

    def __str__(self):
        return " ".join(f"w[{a},{b}]" for a, b in self.factors) or "1"


def _canon_pairs(pairs: Iterable[Pair], symmetric: bool) -> tuple[Pair, ...]:
    if symmetric:
        return tuple(sorted((a, b) if a <= b else (b, a) for a, b in pairs))
    return tuple(sorted(pairs))


@dataclass(frozen=True, order=True)
class MomentMonomial:
    """``nu**nu_exp * prod sigma[i,j] * prod delta[i,j]`` in canonical form."""

    nu_exp: int
    sigma: tuple[Pair, ...] = ()
    delta: tuple[Pair, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.sigma) + len(self.delta)

    def sort_key(self):
        return (len(self.delta), -self.nu_exp, self.sigma, self.delta)

    def relabel(self, perm: Mapping[int, int], symmetric: bool) -> MomentMonomial:
        return MomentMonomial(
            self.nu_exp,
            _canon_pairs(((perm[a], perm[b]) for a, b in self.sigma), symmetric),
            _canon_pairs(((perm[a], perm[b]) for a, b in self.delta), symmetric),
        )

    def __str__(self):
        parts = []
        if self.nu_exp:
            parts.append("nu" if self.nu_exp == 1 else f"nu^{self.nu_exp}")
        parts += [f"s{a},{b}" for a, b in self.sigma]
        parts += [f"d{a},{b}" for a, b in self.delta]
        return "*".join(parts) or "1"


class MomentPolynomial:
    """Collected expansion of a moment; immutable after construction."""

    __slots__ = ("spec", "_terms")

    def __init__(self, spec: MomentSpec, terms: Mapping[MomentMonomial, int]):
        self.spec = spec
        self._terms = {k: int(v) for k, v in terms.items() if v}

    @property
    def terms(self) -> dict[MomentMonomial, int]:
        return dict(self._terms)

    def items(self) -> list[tuple[MomentMonomial, int]]:
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, MomentPolynomial):
            return NotImplemented
        return self.spec == other.spec and self._terms == other._terms

    def __repr__(self):
        return f"MomentPolynomial({self.spec}, {len(self._terms)} terms)"

    def total_mass(self) -> int:
        return sum(self._terms.values())

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for mono, c in self.items():
            out.append(str(mono) if c == 1 else f"{c}*{mono}")
        return " + ".join(out)

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "nu_exp": mono.nu_exp,
                "sigma": [list(pr) for pr in mono.sigma],
                "delta": [list(pr) for pr in mono.delta],
                "coeff": str(c),
            }
            for mono, c in self.items()
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, data, spec: MomentSpec) -> MomentPolynomial:
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        symmetric = spec.flavor == REAL
        terms: dict[MomentMonomial, int] = {}
        try:
            for obj in data:
                mono = MomentMonomial(
                    int(obj["nu_exp"]),
                    _canon_pairs((tuple(map(int, pr)) for pr in obj["sigma"]), symmetric),
                    _canon_pairs((tuple(map(int, pr)) for pr in obj["delta"]), symmetric),
                )
                terms[mono] = terms.get(mono, 0) + int(obj["coeff"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed polynomial JSON: {exc}") from exc
        return cls(spec, terms)


# -- expansion ---------------------------------------------------------------


def _real_labels(spec: MomentSpec) -> list[int]:
    return list(chain.from_iterable(spec.factors))


def _expand_real_chunk(labels: Sequence[int], first: int | None) -> Counter:
    size = len(labels)
    acc: Counter = Counter()
    for partner in cb._partner_arrays(size, first):
        cycles, terms = cb.real_components(partner)
        sig = []
        for v in range(size):
            w = partner[v]
            if w > v:
                a, b = labels[v], labels[w]
                sig.append((a, b) if a <= b else (b, a))
        dlt = []
        for v, w in terms:
            a, b = labels[v], labels[w]
            dlt.append((a, b) if a <= b else (b, a))
        sig.sort()
        dlt.sort()
        acc[cycles, tuple(sig), tuple(dlt)] += 1
    return acc


def _expand_complex_chunk(rows: Sequence[int], cols: Sequence[int], first: int | None) -> Counter:
    n = len(rows)
    acc: Counter = Counter()
    for pi in cb._injection_arrays(n, first):
        cycles, terms = cb.directed_components(pi)
        sig = sorted((rows[i], cols[j]) for i, j in enumerate(pi) if j >= 0)
        dlt = sorted((rows[e], cols[s]) for e, s in terms)
        acc[cycles, tuple(sig), tuple(dlt)] += 1
    return acc


def _merge(spec: MomentSpec, counters: Iterable[Counter]) -> MomentPolynomial:
    total: Counter = Counter()
    for c in counters:
        total.update(c)
    return MomentPolynomial(spec, {MomentMonomial(l, s, d): k for (l, s, d), k in total.items()})


def _run_chunks(func, args_list, workers: int):
    if workers <= 1 or len(args_list) <= 1:
        return [func(*args) for args in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, *zip(*args_list)))


def _check_n(spec: MomentSpec, max_n: int | None):
    cap = cb.DEFAULT_MAX_N if max_n is None else max_n
    if spec.n > cap:
        raise LimitExceeded(f"moment of degree {spec.n} exceeds the enumeration cap {cap}")


def expand_real_moment(spec: MomentSpec, max_n: int | None = None, workers: int = 1) -> MomentPolynomial:
    """Expand E[prod w[a_k,b_k]] for a real noncentral Wishart matrix.

    ``workers > 1`` splits the enumeration by the partner of the first
    vertex and merges the partial term maps; the result is identical.
    """
    if spec.flavor != REAL:
        raise FlavorMismatch("expand_real_moment needs a real spec")
    _check_n(spec, max_n)
    if spec.n == 0:
        return MomentPolynomial(spec, {MomentMonomial(0): 1})
    labels = _real_labels(spec)
    if workers <= 1:
        return _merge(spec, [_expand_real_chunk(labels, None)])
    args = [(labels, first) for first in cb.real_prefixes(spec.n)]
    return _merge(spec, _run_chunks(_expand_real_chunk, args, workers))


def expand_complex_moment(spec: MomentSpec, max_n: int | None = None, workers: int = 1) -> MomentPolynomial:
    """Expand E[prod w[a_k,b_k]] for a complex noncentral Wishart matrix.

    An arrow i -> j contributes sigma[a_i, b_j]; a chain ending at e and
    starting at s contributes delta[a_e, b_s].
    """
    if spec.flavor != COMPLEX:
        raise FlavorMismatch("expand_complex_moment needs a complex spec")
    _check_n(spec, max_n)
    if spec.n == 0:
        return MomentPolynomial(spec, {MomentMonomial(0): 1})
    rows = [a for a, _ in spec.factors]
    cols = [b for _, b in spec.factors]
    if workers <= 1:
        return _merge(spec, [_expand_complex_chunk(rows, cols, None)])
    args = [(rows, cols, first) for first in cb.complex_prefixes(spec.n)]
    return _merge(spec, _run_chunks(_expand_complex_chunk, args, workers))


def expand_moment(spec: MomentSpec, max_n: int | None = None, workers: int = 1) -> MomentPolynomial:
    if spec.flavor == REAL:
        return expand_real_moment(spec, max_n, workers)
    return expand_complex_moment(spec, max_n, workers)


# -- parameters and numeric evaluation --------------------------------------


@dataclass(frozen=True)
class WishartParams:
    """Degrees of freedom, covariance and mean square matrix of one flavor."""

    flavor: str
    nu: float
    sigma: np.ndarray
    delta: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}")
        dtype = float if self.flavor == REAL else complex
        sigma = np.array(self.sigma, dtype=dtype)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise DimensionMismatch("sigma must be a square matrix")
        delta = np.zeros_like(sigma) if self.delta is None else np.array(self.delta, dtype=dtype)
        if delta.shape != sigma.shape:
            raise DimensionMismatch("sigma and delta must have the same shape")
        for name, mat in (("sigma", sigma), ("delta", delta)):
            if self.flavor == REAL and not np.array_equal(mat, mat.T):
                raise NotSymmetric(f"{name} is not symmetric")
            if self.flavor == COMPLEX and not np.array_equal(mat, mat.conj().T):
                raise NotHermitian(f"{name} is not Hermitian")
            mat.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "delta", delta)

    @property
    def p(self) -> int:
        return self.sigma.shape[0]


def _check_params(spec: MomentSpec, params: WishartParams):
    if spec.flavor != params.flavor:
        raise FlavorMismatch(f"spec is {spec.flavor} but parameters are {params.flavor}")
    if spec.p != params.p:
        raise DimensionMismatch(f"spec has p={spec.p} but parameters have p={params.p}")


def _fsum_scalar(values: list, is_complex: bool):
    if not is_complex:
        return math.fsum(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def evaluate(poly: MomentPolynomial, params: WishartParams):
    """Substitute numeric (nu, sigma, delta); real flavor returns a float."""
    _check_params(poly.spec, params)
    is_complex = params.flavor == COMPLEX
    S = params.sigma.tolist()
    D = params.delta.tolist()
    nu = params.nu
    values = []
    for mono, c in poly.items():
        term = float(c) * nu**mono.nu_exp
        for a, b in mono.sigma:
            term *= S[a - 1][b - 1]
        for a, b in mono.delta:
            term *= D[a - 1][b - 1]
        values.append(term)
    return _fsum_scalar(values, is_complex)


def evaluate_inflated(spec: MomentSpec, params: WishartParams, max_n: int | None = None):
    """Evaluate the moment by building the inflated 2n x 2n (real) or n x n
    (complex) parameter matrices and summing over the canonical product
    w[1,2] w[3,4] ... (real) or w[1,1'] ... w[n,n'] (complex).

    Independent of the symbolic relabelling path; used to cross-check it.
    """
    _check_params(spec, params)
    _check_n(spec, max_n)
    n, nu = spec.n, params.nu
    is_complex = params.flavor == COMPLEX
    values = []
    if not is_complex:
        idx = np.array(_real_labels(spec)) - 1
        St = params.sigma[np.ix_(idx, idx)].tolist()
        Dt = params.delta[np.ix_(idx, idx)].tolist()
        for partner in cb._partner_arrays(2 * n):
            cycles, terms = cb.real_components(partner)
            term = nu**cycles
            for v, w in enumerate(partner):
                if w > v:
                    term *= St[v][w]
            for v, w in terms:
                term *= Dt[v][w]
            values.append(term)
    else:
        rows = np.array([a for a, _ in spec.factors]) - 1
        cols = np.array([b for _, b in spec.factors]) - 1
        St = params.sigma[np.ix_(rows, cols)].tolist()
        Dt = params.delta[np.ix_(rows, cols)].tolist()
        for pi in cb._injection_arrays(n):
            cycles, terms = cb.directed_components(pi)
            term = complex(nu**cycles)
            for i, j in enumerate(pi):
                if j >= 0:
                    term *= St[i][j]
            for e, s in terms:
                term *= Dt[e][s]
            values.append(term)
    return _fsum_scalar(values, is_complex)


# -- symbolic specialisation -------------------------------------------------

PairValue = Callable[[Pair], MultiPoly]


def specialize(poly: MomentPolynomial, variables: Sequence[str], sigma: PairValue, delta: PairValue) -> MultiPoly:
    """Substitute each sigma/delta entry by a polynomial in ``variables``.

    ``variables`` must contain ``"nu"``, which receives the cycle exponent.
    ``sigma``/``delta`` map a 1-based index pair to a ``MultiPoly``.
    """
    variables = tuple(variables)
    nu = MultiPoly.var(variables, "nu")
    cache: dict = {}

    def value(kind, pr):
        key = (kind, pr)
        if key not in cache:
            cache[key] = (sigma if kind == "s" else delta)(pr)
        return cache[key]

    total = MultiPoly(variables)
    for mono, c in poly.items():
        term = nu**mono.nu_exp * c
        for pr in mono.sigma:
            term = term * value("s", pr)
            if term.is_zero():
                break
        else:
            for pr in mono.delta:
                term = term * value("d", pr)
                if term.is_zero():
                    break
        total = total + term
    return total


def degenerate_collapse(poly: MomentPolynomial, sigma_value: int = 1) -> MultiPoly:
    """Set every sigma entry to ``sigma_value`` and every delta entry to a
    single symbol ``delta``; returns a polynomial in (nu, delta)."""
    variables = ("nu", "delta")
    s = MultiPoly.constant(variables, sigma_value)
    d = MultiPoly.var(variables, "delta")
    return specialize(poly, variables, lambda pr: s, lambda pr: d)


# -- grouping into shapes ----------------------------------------------------


def spec_automorphisms(spec: MomentSpec, limit: int = 200_000) -> list[dict[int, int]]:
    """All permutations of the used indices mapping the factor multiset to itself."""
    symmetric = spec.flavor == REAL
    target = Counter(spec.factors)
    used = sorted({i for pr in spec.factors for i in pr})
    # Factors to check once both endpoints of a factor have been assigned.
    pos = {v: k for k, v in enumerate(used)}
    ready: list[list[Pair]] = [[] for _ in used]
    for a, b in spec.factors:
        ready[max(pos[a], pos[b])].append((a, b))
    perms: list[dict[int, int]] = []
    image: dict[int, int] = {}
    taken: set[int] = set()
    partial: Counter = Counter()

    def rec(k):
        if k == len(used):
            perms.append(dict(image))
            if len(perms) > limit:
                raise LimitExceeded(f"symmetry group larger than {limit}")
            return
        v = used[k]
        for w in used:
            if w in taken:
                continue
            image[v] = w
            taken.add(w)
            added = []
            ok = True
            for a, b in ready[k]:
                x, y = image[a], image[b]
                if symmetric and x > y:
                    x, y = y, x
                partial[x, y] += 1
                added.append((x, y))
                if partial[x, y] > target[x, y]:
                    ok = False
                    break
            if ok:
                rec(k + 1)
            for pr in added:
                partial[pr] -= 1
            taken.discard(w)
            del image[v]

    rec(0)
    return perms


def group_by_shape(poly: MomentPolynomial) -> list[tuple[MomentMonomial, int]]:
    """Group monomials into orbits under the spec's index symmetries.

    Returns (representative, multiplicity) pairs ordered by number of delta
    factors, then by descending power of nu, then by multiplicity.  The
    multiplicities sum to the total coefficient mass.
    """
    symmetric = poly.spec.flavor == REAL
    perms = spec_automorphisms(poly.spec)
    orbit_of: dict[MomentMonomial, MomentMonomial] = {}
    counts: Counter = Counter()
    reps: dict[MomentMonomial, MomentMonomial] = {}
    for mono, c in poly.items():
        if mono not in orbit_of:
            orbit = {mono.relabel(g, symmetric) for g in perms}
            key = min(orbit)
            for m in orbit:
                orbit_of[m] = key
        key = orbit_of[mono]
        counts[key] += c
        reps[key] = min(reps.get(key, mono), mono)
    rows = [(reps[k], counts[k]) for k in counts]
    rows.sort(key=lambda rc: (len(rc[0].delta), -rc[0].nu_exp, rc[1], rc[0]))
    return rows
