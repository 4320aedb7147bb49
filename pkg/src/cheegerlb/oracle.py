"""Exact edge expansion by subset enumeration, for small graphs.

h(G) = min over nonempty S with |S| <= floor(n/2) of |boundary(S)| / |S|;
restricting to the small side is equivalent to dividing by
min{|S|, n - |S|} over all proper subsets. The enumeration walks all
subsets in Gray-code order so each step flips a single vertex and the
cut size updates in O(1) popcounts. Ratios are compared by integer
cross-multiplication, so the result is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import Graph

DEFAULT_ENUMERATION_CAP = 22


@dataclass(frozen=True)
class ExpansionResult:
    """Exact h(G) as a reduced fraction plus one optimal subset.

    subset is the lexicographically smallest optimal S (0-based,
    sorted ascending).
    """

    numerator: int
    denominator: int
    subset: tuple[int, ...]

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def exact_edge_expansion(g: Graph, cap: int = DEFAULT_ENUMERATION_CAP) -> ExpansionResult:
    """Exact h(G) for g.n <= cap (the walk visits 2^n subsets).

    Disconnected graphs give 0. Among optimal subsets the
    lexicographically smallest one is reported, which makes the result
    deterministic and independent of enumeration order.
    """
    n = g.n
    if n > cap:
        raise ValueError(f"n={n} exceeds enumeration cap {cap}")
    adj = [0] * n
    deg = [0] * n
    for i, j in g.edges:
        adj[i] |= 1 << j
        adj[j] |= 1 << i
        deg[i] += 1
        deg[j] += 1

    half = n // 2
    best_num = -1  # cut size; -1 = unset
    best_den = 1
    best_subset: tuple[int, ...] = ()
    mask = 0
    cut = 0
    size = 0
    for k in range(1, 1 << n):
        v = (k & -k).bit_length() - 1
        bit = 1 << v
        if mask & bit:
            mask ^= bit
            size -= 1
            cut += 2 * (adj[v] & mask).bit_count() - deg[v]
        else:
            cut += deg[v] - 2 * (adj[v] & mask).bit_count()
            mask ^= bit
            size += 1
        if not (1 <= size <= half):
            continue
        if best_num < 0 or cut * best_den < best_num * size:
            best_num, best_den = cut, size
            best_subset = _bits(mask)
        elif cut * best_den == best_num * size:
            cand = _bits(mask)
            if cand < best_subset:
                best_subset = cand
    frac = Fraction(best_num, best_den)
    return ExpansionResult(frac.numerator, frac.denominator, best_subset)
