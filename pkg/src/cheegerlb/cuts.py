"""Separation, storage, and purging of scaled triangle inequalities.

The cuts are the rho-scaled boolean-quadric-polytope triangle facets
Y_ij + Y_ik - Y_jk <= y_i, applied to the upper-left n x n block Y11
only; the pairwise facet families are already implied by the model
constraints and are never added.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConstraintOp


@dataclass(frozen=True, order=True)
class Cut:
    """Triangle inequality Y_ij + Y_ik - Y_jk <= y_i on the Y11 block.

    Indices are 0-based vertex indices, canonicalized to j < k.
    """

    i: int
    j: int
    k: int

    def __post_init__(self) -> None:
        if len({self.i, self.j, self.k}) != 3:
            raise ValueError(f"cut indices must be distinct, got {(self.i, self.j, self.k)}")
        if self.j >= self.k:
            raise ValueError(f"cut indices must satisfy j < k, got {(self.i, self.j, self.k)}")


class CutPool:
    """Ordered cut collection with the current dual multipliers."""

    def __init__(self, cuts: list[Cut] | None = None, multipliers: np.ndarray | None = None):
        self.cuts: list[Cut] = list(cuts) if cuts else []
        if multipliers is None:
            self.multipliers = np.zeros(len(self.cuts))
        else:
            self.multipliers = np.asarray(multipliers, dtype=float).copy()
        if len(self.multipliers) != len(self.cuts):
            raise ValueError("multiplier vector length does not match cut count")
        self._members = set(self.cuts)
        if len(self._members) != len(self.cuts):
            raise ValueError("duplicate cuts in pool")

    def __len__(self) -> int:
        return len(self.cuts)

    def __contains__(self, cut: Cut) -> bool:
        return cut in self._members

    def add(self, cuts: list[Cut]) -> None:
        """Append new cuts with zero multipliers."""
        for c in cuts:
            if c in self._members:
                raise ValueError(f"cut {c} already in pool")
            self._members.add(c)
        self.cuts.extend(cuts)
        self.multipliers = np.concatenate([self.multipliers, np.zeros(len(cuts))])


def violation(cut: Cut, Ytilde: np.ndarray) -> float:
    """Y11_ij + Y11_ik - Y11_jk - y1_i; positive means violated."""
    n = (Ytilde.shape[0] - 3) // 2
    for v in (cut.i, cut.j, cut.k):
        if not 0 <= v < n:
            raise IndexError(f"cut index {v} out of range [0, {n - 1}]")
    return float(
        Ytilde[cut.i, cut.j] + Ytilde[cut.i, cut.k] - Ytilde[cut.j, cut.k] - Ytilde[cut.i, -1]
    )


def separate(Ytilde: np.ndarray, pool: CutPool, batch: int, tol: float) -> list[Cut]:
    """Up to batch new cuts with violation >= tol, most violated first.

    The full i, {j, k} triple space over the Y11 block is enumerated;
    ties are broken lexicographically on (i, j, k) so separation is
    deterministic.
    """
    if batch < 0:
        raise ValueError("batch must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if batch == 0:
        return []
    n = (Ytilde.shape[0] - 3) // 2
    Y = Ytilde[:n, :n]
    y1 = Ytilde[:n, -1]
    candidates: list[tuple[float, int, int, int]] = []
    for i in range(n):
        V = Y[i][:, None] + Y[i][None, :] - Y - y1[i]
        V[i, :] = -np.inf
        V[:, i] = -np.inf
        jj, kk = np.nonzero(np.triu(V >= tol, k=1))
        for j, k in zip(jj.tolist(), kk.tolist()):
            candidates.append((-V[j, k], i, j, k))
    candidates.sort()
    out: list[Cut] = []
    for negv, i, j, k in candidates:
        cut = Cut(i, j, k)
        if cut in pool:
            continue
        out.append(cut)
        if len(out) == batch:
            break
    return out


def purge(pool: CutPool, dual_tol: float) -> CutPool:
    """Pool without the cuts whose dual value is below dual_tol;
    surviving multipliers are preserved in order."""
    if dual_tol < 0:
        raise ValueError("dual_tol must be >= 0")
    keep = [t for t, m in enumerate(pool.multipliers) if m >= dual_tol]
    if len(keep) == len(pool):
        return pool
    return CutPool([pool.cuts[t] for t in keep], pool.multipliers[keep])


def cut_operator(cuts: list[Cut], n: int) -> ConstraintOp:
    """Inequality operator B with <B_t, Ytilde> = violation(cut_t) and
    zero right-hand sides (the scaled cuts are homogeneous)."""
    dim = 2 * n + 3
    entries = [
        [(c.i, c.j, 1.0), (c.i, c.k, 1.0), (c.j, c.k, -1.0), (c.i, dim - 1, -1.0)] for c in cuts
    ]
    return ConstraintOp(dim, entries)
