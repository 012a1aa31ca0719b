"""Pairings, partial injections, and the cycle/chain counts they induce.

Real moments are indexed by partitions of the vertex set {1, ..., 2n} into
pairs and singletons.  The pairs are "dashed" edges added to the fixed
"solid" edges (1,2), (3,4), ..., (2n-1,2n); each connected component of the
union is either a cycle or a chain.  Complex moments are indexed by partial
injections of {1, ..., n}; the directed graph i -> pi(i) again splits into
cycles and chains.

The ``f``/``g`` tables count these graphs by (cycles, edges, n) and are
computed from their three-term recurrences; ``phi``/``psi`` are the closed
product forms of their generating polynomials in ``nu``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

from .errors import DomainError, LimitExceeded
from .polynomial import NuPolynomial

DEFAULT_MAX_N = 8


@dataclass(frozen=True)
class PairPartition:
    """Partition of {1..2n} into ``pairs`` and ``singletons`` (1-based)."""

    n: int
    pairs: tuple[tuple[int, int], ...]
    singletons: tuple[int, ...]

    def __post_init__(self):
        seen = [v for pr in self.pairs for v in pr] + list(self.singletons)
        if sorted(seen) != list(range(1, 2 * self.n + 1)):
            raise ValueError("pairs and singletons must cover 1..2n exactly once")
        if any(i >= j for i, j in self.pairs):
            raise ValueError("pairs must be stored with the smaller vertex first")
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))
        object.__setattr__(self, "singletons", tuple(sorted(self.singletons)))

    @property
    def m(self) -> int:
        return len(self.pairs)

    def partner_array(self) -> list[int]:
        """0-based partner of every vertex, -1 for singletons."""
        partner = [-1] * (2 * self.n)
        for i, j in self.pairs:
            partner[i - 1] = j - 1
            partner[j - 1] = i - 1
        return partner


@dataclass(frozen=True)
class PartialInjection:
    """Injection from a subset of {1..n} into {1..n}, as sorted (i, pi(i))."""

    n: int
    mapping: tuple[tuple[int, int], ...]

    def __post_init__(self):
        srcs = [i for i, _ in self.mapping]
        dsts = [j for _, j in self.mapping]
        if len(set(srcs)) != len(srcs) or len(set(dsts)) != len(dsts):
            raise ValueError("sources and targets must be distinct")
        if any(not 1 <= v <= self.n for v in srcs + dsts):
            raise ValueError("vertices must lie in 1..n")
        object.__setattr__(self, "mapping", tuple(sorted(self.mapping)))

    @property
    def m(self) -> int:
        return len(self.mapping)

    def map_array(self) -> list[int]:
        """0-based image of every vertex, -1 where undefined."""
        pi = [-1] * self.n
        for i, j in self.mapping:
            pi[i - 1] = j - 1
        return pi


@dataclass(frozen=True)
class ComponentSummary:
    """Cycle count and chain terminals of an induced graph (1-based).

    For the undirected case each terminal pair is (lower, upper); for the
    directed case it is (end, start).
    """

    m: int
    cycles: int
    chain_terminals: tuple[tuple[int, int], ...]


def _check_cap(n: int, max_n: int | None):
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    cap = DEFAULT_MAX_N if max_n is None else max_n
    if n > cap:
        raise LimitExceeded(f"n={n} exceeds the enumeration cap {cap}")


# -- raw enumeration on mutable arrays ------------------------------------
#
# The generators below yield the *same* list object on every step; callers
# that keep results must copy.


def _partner_arrays(size: int, first: int | None = None) -> Iterator[list[int]]:
    partner = [-1] * size
    used = [False] * size

    def rec(v):
        while v < size and used[v]:
            v += 1
        if v == size:
            yield partner
            return
        used[v] = True
        for w in range(v + 1, size):
            if not used[w]:
                used[w] = True
                partner[v] = w
                partner[w] = v
                yield from rec(v + 1)
                used[w] = False
                partner[w] = -1
        partner[v] = -1
        yield from rec(v + 1)
        used[v] = False

    if size == 0:
        yield partner
        return
    if first is None:
        yield from rec(0)
        return
    # Restrict vertex 0 to one choice (-1: singleton); used to split work.
    used[0] = True
    if first >= 0:
        used[first] = True
        partner[0] = first
        partner[first] = 0
    yield from rec(1)


def _injection_arrays(n: int, first: int | None = None) -> Iterator[list[int]]:
    pi = [-1] * n
    taken = [False] * n

    def rec(i):
        if i == n:
            yield pi
            return
        pi[i] = -1
        yield from rec(i + 1)
        for j in range(n):
            if not taken[j]:
                taken[j] = True
                pi[i] = j
                yield from rec(i + 1)
                taken[j] = False
        pi[i] = -1

    if first is None:
        yield from rec(0)
        return
    if first >= 0:
        taken[first] = True
        pi[0] = first
    yield from rec(1)


def real_prefixes(n: int) -> list[int]:
    """Choices for vertex 0 that split the real enumeration into disjoint parts."""
    return list(range(1, 2 * n)) + [-1]


def complex_prefixes(n: int) -> list[int]:
    return [-1] + list(range(n))


def real_components(partner: list[int]) -> tuple[int, list[tuple[int, int]]]:
    """Cycle count and 0-based chain terminals for a partner array."""
    size = len(partner)
    seen = [False] * size
    terminals = []
    for v in range(size):
        if partner[v] == -1 and not seen[v]:
            seen[v] = True
            u = v ^ 1
            seen[u] = True
            while partner[u] != -1:
                u = partner[u]
                seen[u] = True
                u ^= 1
                seen[u] = True
            terminals.append((v, u))
    cycles = 0
    for v in range(size):
        if not seen[v]:
            cycles += 1
            u = v
            while True:
                seen[u] = True
                u ^= 1
                seen[u] = True
                u = partner[u]
                if u == v:
                    break
    return cycles, terminals


def directed_components(pi: list[int]) -> tuple[int, list[tuple[int, int]]]:
    """Cycle count and 0-based (end, start) chain terminals for a map array."""
    n = len(pi)
    has_pred = [False] * n
    for j in pi:
        if j >= 0:
            has_pred[j] = True
    seen = [False] * n
    terminals = []
    for v in range(n):
        if not has_pred[v]:
            u = v
            seen[u] = True
            while pi[u] != -1:
                u = pi[u]
                seen[u] = True
            terminals.append((u, v))
    cycles = 0
    for v in range(n):
        if not seen[v]:
            cycles += 1
            u = v
            while not seen[u]:
                seen[u] = True
                u = pi[u]
    return cycles, terminals


# -- public enumeration API -------------------------------------------------


def enumerate_pair_partitions(n: int, max_n: int | None = None) -> Iterator[PairPartition]:
    """Yield every partition of {1..2n} into pairs and singletons once.

    Raises ``LimitExceeded`` when ``n`` is above ``max_n`` (default 8).
    """
    _check_cap(n, max_n)
    for partner in _partner_arrays(2 * n):
        pairs = tuple((v + 1, w + 1) for v, w in enumerate(partner) if w > v)
        singles = tuple(v + 1 for v, w in enumerate(partner) if w == -1)
        yield PairPartition(n, pairs, singles)


def enumerate_partial_injections(n: int, max_n: int | None = None) -> Iterator[PartialInjection]:
    _check_cap(n, max_n)
    for pi in _injection_arrays(n):
        yield PartialInjection(n, tuple((i + 1, j + 1) for i, j in enumerate(pi) if j >= 0))


def count_pair_partitions(n: int) -> int:
    return sum(comb(2 * n, 2 * m) * double_factorial(2 * m - 1) for m in range(n + 1))


def count_partial_injections(n: int) -> int:
    return sum(comb(n, m) ** 2 * factorial_int(m) for m in range(n + 1))


def analyze_real_graph(p: PairPartition) -> ComponentSummary:
    cycles, terms = real_components(p.partner_array())
    return ComponentSummary(p.m, cycles, tuple((i + 1, j + 1) for i, j in terms))


def analyze_directed_graph(q: PartialInjection) -> ComponentSummary:
    cycles, terms = directed_components(q.map_array())
    return ComponentSummary(q.m, cycles, tuple((e + 1, s + 1) for e, s in terms))


def real_histogram(n: int, max_n: int | None = None) -> Counter:
    """Count undirected graphs on 2n vertices by (cycles, dashed edges)."""
    _check_cap(n, max_n)
    hist: Counter = Counter()
    for partner in _partner_arrays(2 * n):
        cycles, terms = real_components(partner)
        hist[cycles, n - len(terms)] += 1
    return hist


def directed_histogram(n: int, max_n: int | None = None) -> Counter:
    """Count directed graphs on n vertices by (cycles, mapped vertices)."""
    _check_cap(n, max_n)
    hist: Counter = Counter()
    for pi in _injection_arrays(n):
        cycles, terms = directed_components(pi)
        hist[cycles, n - len(terms)] += 1
    return hist


# -- coefficient tables ------------------------------------------------------


def double_factorial(k: int) -> int:
    """k!! with the convention (-1)!! = 0!! = 1."""
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def factorial_int(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


@lru_cache(maxsize=None)
def coeff_f(l: int, m: int, n: int) -> int:
    """Number of undirected graphs with ``l`` cycles and ``m`` dashed edges on n solid edges."""
    if l < 0 or m < 0 or n < 1 or m > n or l > m:
        return 0
    if m == 0:
        return 1 if l == 0 else 0
    if n == 1:
        return 1 if l == 1 else 0
    return (
        2 * (2 * n - m - 1) * coeff_f(l, m - 1, n - 1)
        + coeff_f(l - 1, m - 1, n - 1)
        + coeff_f(l, m, n - 1)
    )


@lru_cache(maxsize=None)
def coeff_g(l: int, m: int, n: int) -> int:
    """Number of partial injections on n vertices with ``m`` arrows and ``l`` cycles."""
    if l < 0 or m < 0 or n < 1 or m > n or l > m:
        return 0
    if m == 0:
        return 1 if l == 0 else 0
    if n == 1:
        return 1 if l == 1 else 0
    return (
        coeff_g(l - 1, m - 1, n - 1)
        + coeff_g(l, m, n - 1)
        + (2 * n - m - 1) * coeff_g(l, m - 1, n - 1)
    )


def _check_mn(m, n):
    if n < 1 or m < 0 or m > n:
        raise DomainError(f"need 0 <= m <= n and n >= 1, got m={m}, n={n}")


def phi(m: int, n: int) -> NuPolynomial:
    """C(n,m) * prod_{i=1..m} (nu + 2(n-i))."""
    _check_mn(m, n)
    return NuPolynomial.product_of_shifts(2 * (n - i) for i in range(1, m + 1)) * comb(n, m)


def psi(m: int, n: int) -> NuPolynomial:
    """C(n,m) * prod_{i=1..m} (nu + n - i)."""
    _check_mn(m, n)
    return NuPolynomial.product_of_shifts(n - i for i in range(1, m + 1)) * comb(n, m)


@lru_cache(maxsize=None)
def _stirling(n: int, m: int, l: int) -> int:
    if m == 0:
        return 1 if l == 0 else 0
    if l < 0 or l > m:
        return 0
    return _stirling(n, m - 1, l - 1) + (n - m) * _stirling(n, m - 1, l)


def noncentral_stirling(n: int, m: int, l: int) -> int:
    """Coefficient of nu**l in prod_{i=1..m} (nu + n - i)."""
    if not 0 <= l <= m <= n:
        raise DomainError(f"need 0 <= l <= m <= n, got n={n}, m={m}, l={l}")
    return _stirling(n, m, l)
