"""Shared test helpers: exact reference constructions and the graph corpus."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from cheegerlb import (
    Graph,
    complete_bipartite_graph,
    complete_graph,
    connected_gnp_graph,
    cycle_graph,
    path_graph,
)


def expansion_by_full_enumeration(g: Graph) -> Fraction:
    """Independent h(G) oracle: every nonempty proper subset, denominator
    min(|S|, n - |S|), exact fractions. Deliberately naive."""
    best: Fraction | None = None
    verts = range(g.n)
    for size in range(1, g.n):
        for S in combinations(verts, size):
            inside = set(S)
            cut = sum(1 for i, j in g.edges if (i in inside) != (j in inside))
            ratio = Fraction(cut, min(size, g.n - size))
            if best is None or ratio < best:
                best = ratio
    assert best is not None
    return best


def binary_lift(g: Graph, subset) -> np.ndarray:
    """Exactly feasible lifted matrix rho * u u^T for a vertex subset S
    with 1 <= |S| <= floor(n/2): u stacks the indicator, its
    complement, the slacks floor(n/2) - |S| and |S| - 1, and 1."""
    n = g.n
    S = set(subset)
    assert 1 <= len(S) <= n // 2
    u = np.zeros(2 * n + 3)
    for i in range(n):
        u[i] = 1.0 if i in S else 0.0
        u[n + i] = 1.0 - u[i]
    u[2 * n] = n // 2 - len(S)
    u[2 * n + 1] = len(S) - 1
    u[2 * n + 2] = 1.0
    return np.outer(u, u) / len(S)


def binary_lift_basic(g: Graph, subset) -> np.ndarray:
    """Exactly feasible (n+1)-dimensional matrix for the basic relaxation."""
    n = g.n
    S = set(subset)
    assert 1 <= len(S) <= n // 2
    u = np.zeros(n + 1)
    for i in S:
        u[i] = 1.0
    u[n] = 1.0
    return np.outer(u, u) / len(S)


@dataclass(frozen=True)
class GraphCase:
    name: str
    graph: Graph


def build_corpus() -> list[GraphCase]:
    """Connected test graphs with n <= 12, at least 30 of them."""
    cases: list[GraphCase] = []
    for n in range(4, 13):
        cases.append(GraphCase(f"cycle{n}", cycle_graph(n)))
    for n in range(3, 11):
        cases.append(GraphCase(f"path{n}", path_graph(n)))
    for n in range(4, 9):
        cases.append(GraphCase(f"complete{n}", complete_graph(n)))
    for a, b in [(2, 3), (3, 3), (2, 4), (3, 4), (4, 4), (2, 5), (3, 5)]:
        cases.append(GraphCase(f"bipartite{a}_{b}", complete_bipartite_graph(a, b)))
    for n, p, seed in [(8, 0.5, 1), (10, 0.4, 2), (10, 0.5, 3), (12, 0.3, 4), (12, 0.4, 5), (9, 0.5, 6), (11, 0.35, 7)]:
        cases.append(GraphCase(f"gnp{n}_{int(p * 100)}_{seed}", connected_gnp_graph(n, p, seed)))
    assert len(cases) >= 30
    assert all(c.graph.is_connected() for c in cases)
    return cases
