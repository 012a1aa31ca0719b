"""Brute-force oracles that share no code with the package."""

import itertools
from collections import Counter

import networkx as nx


def brute_pair_partitions(n):
    """Involutions of range(2n) found by filtering all permutations."""
    size = 2 * n
    seen = set()
    for perm in itertools.permutations(range(size)):
        if all(perm[perm[i]] == i for i in range(size)):
            seen.add(perm)
    return sorted(seen)


def brute_partial_injections(n):
    out = []
    for sources in itertools.chain.from_iterable(itertools.combinations(range(n), k) for k in range(n + 1)):
        for targets in itertools.permutations(range(n), len(sources)):
            out.append(dict(zip(sources, targets)))
    return out


def nx_real_summary(involution):
    """(cycles, sorted chain terminal pairs) via networkx, 0-based."""
    size = len(involution)
    g = nx.MultiGraph()
    g.add_nodes_from(range(size))
    g.add_edges_from((2 * k, 2 * k + 1) for k in range(size // 2))
    g.add_edges_from((i, j) for i, j in enumerate(involution) if i < j)
    cycles, terms = 0, []
    for comp in nx.connected_components(g):
        ends = sorted(v for v in comp if g.degree(v) == 1)
        if ends:
            terms.append(tuple(ends))
        else:
            cycles += 1
    return cycles, sorted(terms)


def nx_directed_summary(n, mapping):
    g = nx.MultiDiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from(mapping.items())
    cycles, terms = 0, []
    for comp in nx.weakly_connected_components(g):
        starts = [v for v in comp if g.in_degree(v) == 0]
        ends = [v for v in comp if g.out_degree(v) == 0]
        if starts:
            terms.append((ends[0], starts[0]))
        else:
            cycles += 1
    return cycles, sorted(terms)


def brute_real_hist(n):
    h = Counter()
    for inv in brute_pair_partitions(n):
        cycles, terms = nx_real_summary(inv)
        h[cycles, n - len(terms)] += 1
    return h


def brute_directed_hist(n):
    h = Counter()
    for mapping in brute_partial_injections(n):
        cycles, _ = nx_directed_summary(n, mapping)
        h[cycles, len(mapping)] += 1
    return h


def sympy_mgf_moment(flavor, p, factors):
    """Exact moment polynomial by differentiating the MGF with sympy.

    Returns (expr, nu, s, d) where s[i][j], d[i][j] are 1-based symbol lookups.
    Real: Theta symmetric with off-diagonal t/2.  Complex: independent Theta
    entries, w_ab paired with Theta_ba.
    """
    import sympy as sp

    nu = sp.Symbol("nu")
    if flavor == "real":
        s = [[sp.Symbol(f"s{min(i, j)}_{max(i, j)}") for j in range(1, p + 1)] for i in range(1, p + 1)]
        d = [[sp.Symbol(f"d{min(i, j)}_{max(i, j)}") for j in range(1, p + 1)] for i in range(1, p + 1)]
    else:
        s = [[sp.Symbol(f"s{i}_{j}") for j in range(1, p + 1)] for i in range(1, p + 1)]
        d = [[sp.Symbol(f"d{i}_{j}") for j in range(1, p + 1)] for i in range(1, p + 1)]
    S, D = sp.Matrix(s), sp.Matrix(d)
    ts = sp.symbols(f"t0:{len(factors)}")
    theta = sp.zeros(p, p)
    for t, (a, b) in zip(ts, factors):
        if flavor == "real":
            if a == b:
                theta[a - 1, a - 1] += t
            else:
                theta[a - 1, b - 1] += t / 2
                theta[b - 1, a - 1] += t / 2
        else:
            theta[b - 1, a - 1] += t
    if flavor == "real":
        A = sp.eye(p) - 2 * theta * S
        lead = A.det() ** (-nu / 2)
    else:
        A = sp.eye(p) - theta * S
        lead = A.det() ** (-nu)
    expo = (A.adjugate() * theta * D).trace() / A.det()
    f = lead * sp.exp(expo)
    for t in ts:
        f = sp.diff(f, t)
    val = f.subs({t: 0 for t in ts})
    return sp.expand(sp.simplify(val)), nu, s, d


def poly_to_sympy(poly, nu, s, d):
    import sympy as sp

    total = sp.Integer(0)
    for mono, c in poly.items():
        term = sp.Integer(c) * nu**mono.nu_exp
        for a, b in mono.sigma:
            term *= s[a - 1][b - 1]
        for a, b in mono.delta:
            term *= d[a - 1][b - 1]
        total += term
    return sp.expand(total)
