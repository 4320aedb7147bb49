"""Lifted-model construction and facial reduction for the expansion relaxations.

The binary fractional program for edge expansion is lifted to a
(2n+3)-dimensional matrix space: the variable vector stacks the 0/1
indicator, its complement slacks, two scalar slacks s and t for the
cardinality window 1 <= e^T x <= floor(n/2), and the scaling rho.
Collecting the affine constraints as C x = d and M = (C | -d), every
feasible lifted matrix satisfies M Ytilde = 0, so the DNN relaxation is
restricted to the face Ytilde = W R W^T with W an orthonormal basis of
ker(M). This module builds all of those constants plus the sparse
equality/inequality constraint operators used by the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .certify import trace_bound
from .graphs import Graph, laplacian


class DiagMode(Enum):
    """Which binary diagonal constraints to append to the equality operator.

    NONE keeps the plain facially reduced model (n+1 equality rows),
    Y1_ONLY adds diag(Y11) = y1 (2n+1 rows), BOTH also adds
    diag(Y22) = y2 (3n+1 rows).
    """

    NONE = "none"
    Y1_ONLY = "y1"
    BOTH = "both"


@dataclass(frozen=True)
class BlockIndex:
    """Flat indices of the symbolic blocks of the (2n+3)-dimensional space."""

    n: int

    @property
    def dim(self) -> int:
        return 2 * self.n + 3

    @property
    def xbar(self) -> slice:
        return slice(0, self.n)

    @property
    def zbar(self) -> slice:
        return slice(self.n, 2 * self.n)

    @property
    def s(self) -> int:
        return 2 * self.n

    @property
    def t(self) -> int:
        return 2 * self.n + 1

    @property
    def rho(self) -> int:
        return 2 * self.n + 2


# One scalar constraint on a symmetric matrix X is a list of entries
# (i, j, coeff) with i <= j, meaning sum coeff * X[i, j] (each unordered
# pair counted once).
Entries = Sequence[tuple[int, int, float]]


class ConstraintOp:
    """A stack of sparse symmetric constraint matrices A_1..A_k.

    Off-diagonal weights are split half/half onto (i, j) and (j, i), so
    <A_t, X> reproduces the scalar constraint exactly for symmetric X
    and adjoint() returns a symmetric matrix.
    """

    def __init__(self, dim: int, entries: Sequence[Entries], rhs_const: np.ndarray | None = None):
        self.dim = dim
        self.entries = [tuple(e) for e in entries]
        rows, cols, weights, cid = [], [], [], []
        for t, entry_list in enumerate(self.entries):
            for i, j, w in entry_list:
                if i > j:
                    i, j = j, i
                if i == j:
                    rows.append(i)
                    cols.append(j)
                    weights.append(float(w))
                    cid.append(t)
                else:
                    rows.extend((i, j))
                    cols.extend((j, i))
                    weights.extend((w / 2.0, w / 2.0))
                    cid.extend((t, t))
        self._rows = np.asarray(rows, dtype=np.intp)
        self._cols = np.asarray(cols, dtype=np.intp)
        self._weights = np.asarray(weights, dtype=float)
        self._cid = np.asarray(cid, dtype=np.intp)
        if rhs_const is None:
            self.rhs_const = np.zeros(len(self.entries))
        else:
            self.rhs_const = np.asarray(rhs_const, dtype=float)
            if self.rhs_const.shape != (len(self.entries),):
                raise ValueError("rhs_const length does not match constraint count")

    @property
    def count(self) -> int:
        return len(self.entries)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Vector of <A_t, X> for symmetric X."""
        if self.count == 0:
            return np.zeros(0)
        vals = self._weights * X[self._rows, self._cols]
        return np.bincount(self._cid, weights=vals, minlength=self.count)

    def adjoint(self, v: np.ndarray) -> np.ndarray:
        """Dense symmetric matrix sum_t v_t A_t."""
        out = np.zeros((self.dim, self.dim))
        if self.count:
            np.add.at(out, (self._rows, self._cols), np.asarray(v, dtype=float)[self._cid] * self._weights)
        return out

    def matrices(self) -> list[np.ndarray]:
        """Dense A_t, mainly for tests."""
        eye = np.eye(self.count)
        return [self.adjoint(eye[t]) for t in range(self.count)]

    @staticmethod
    def concat(a: "ConstraintOp", b: "ConstraintOp") -> "ConstraintOp":
        if a.dim != b.dim:
            raise ValueError("dimension mismatch")
        return ConstraintOp(
            a.dim,
            list(a.entries) + list(b.entries),
            np.concatenate([a.rhs_const, b.rhs_const]),
        )


def constraint_matrices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The affine-set constants (C, d, M) for problem size n.

    C stacks the rows (e^T 0^T 1 0), (e^T 0^T 0 -1), (I I 0 0);
    d = (floor(n/2), 1, e_n); M = (C | -d).
    """
    if n < 3:
        raise ValueError("need n >= 3")
    half = n // 2
    C = np.zeros((n + 2, 2 * n + 2))
    C[0, :n] = 1.0
    C[0, 2 * n] = 1.0
    C[1, :n] = 1.0
    C[1, 2 * n + 1] = -1.0
    C[2:, :n] = np.eye(n)
    C[2:, n : 2 * n] = np.eye(n)
    d = np.concatenate([[half, 1.0], np.ones(n)])
    M = np.hstack([C, -d[:, None]])
    return C, d, M


def orthonormal_kernel_basis(n: int) -> np.ndarray:
    """W: Householder-QR orthonormalization of the integer kernel basis,
    columns in their stated order, so runs are byte-reproducible."""
    W, _ = np.linalg.qr(kernel_basis_raw(n).astype(float))
    return W


def kernel_basis_raw(n: int) -> np.ndarray:
    """Integer basis of ker(M) as columns w_1..w_{n+1} of a (2n+3, n+1) matrix.

    w_i = (u_i; -u_i; -1; 1; 0) for i in 1..n and
    w_{n+1} = (0_n; e_n; floor(n/2); -1; 1); each satisfies M w = 0
    exactly in integer arithmetic.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    dim = 2 * n + 3
    B = np.zeros((dim, n + 1), dtype=np.int64)
    for i in range(n):
        B[i, i] = 1
        B[n + i, i] = -1
        B[2 * n, i] = -1
        B[2 * n + 1, i] = 1
    B[n : 2 * n, n] = 1
    B[2 * n, n] = n // 2
    B[2 * n + 1, n] = -1
    B[2 * n + 2, n] = 1
    return B


class LiftedView:
    """Block accessors on a lifted (2n+3) x (2n+3) matrix."""

    def __init__(self, Ytilde: np.ndarray, n: int):
        dim = 2 * n + 3
        if Ytilde.shape != (dim, dim):
            raise ValueError(f"expected shape ({dim}, {dim}), got {Ytilde.shape}")
        self.matrix = Ytilde
        self.n = n

    @property
    def Y(self) -> np.ndarray:
        return self.matrix[: 2 * self.n + 2, : 2 * self.n + 2]

    @property
    def y(self) -> np.ndarray:
        return self.matrix[: 2 * self.n + 2, -1]

    @property
    def rho(self) -> float:
        return float(self.matrix[-1, -1])

    @property
    def Y11(self) -> np.ndarray:
        return self.matrix[: self.n, : self.n]

    @property
    def Y12(self) -> np.ndarray:
        return self.matrix[: self.n, self.n : 2 * self.n]

    @property
    def Y22(self) -> np.ndarray:
        return self.matrix[self.n : 2 * self.n, self.n : 2 * self.n]

    @property
    def Y13(self) -> np.ndarray:
        return self.matrix[: self.n, 2 * self.n]

    @property
    def Y14(self) -> np.ndarray:
        return self.matrix[: self.n, 2 * self.n + 1]

    @property
    def Y23(self) -> np.ndarray:
        return self.matrix[self.n : 2 * self.n, 2 * self.n]

    @property
    def Y24(self) -> np.ndarray:
        return self.matrix[self.n : 2 * self.n, 2 * self.n + 1]

    @property
    def Y33(self) -> float:
        return float(self.matrix[2 * self.n, 2 * self.n])

    @property
    def Y34(self) -> float:
        return float(self.matrix[2 * self.n, 2 * self.n + 1])

    @property
    def Y44(self) -> float:
        return float(self.matrix[2 * self.n + 1, 2 * self.n + 1])

    @property
    def y1(self) -> np.ndarray:
        return self.matrix[: self.n, -1]

    @property
    def y2(self) -> np.ndarray:
        return self.matrix[self.n : 2 * self.n, -1]

    @property
    def y3(self) -> float:
        return float(self.matrix[2 * self.n, -1])

    @property
    def y4(self) -> float:
        return float(self.matrix[2 * self.n + 1, -1])


def lift(R: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Ytilde = W R W^T, symmetrized against roundoff."""
    R = np.asarray(R, dtype=float)
    if R.shape != (W.shape[1], W.shape[1]):
        raise ValueError(f"R must be {W.shape[1]} x {W.shape[1]}, got {R.shape}")
    Yt = W @ R @ W.T
    return (Yt + Yt.T) / 2.0


@dataclass(frozen=True)
class ModelMatrices:
    """All constants of the facially reduced lifted relaxation."""

    n: int
    mode: DiagMode
    L: np.ndarray
    C: np.ndarray
    d: np.ndarray
    M: np.ndarray
    W: np.ndarray
    Ltilde: np.ndarray
    eq: ConstraintOp
    b: np.ndarray
    block: BlockIndex
    r_bar: float
    ineq_static: ConstraintOp | None = None

    @property
    def dim_big(self) -> int:
        return 2 * self.n + 3

    @property
    def dim_reduced(self) -> int:
        return self.n + 1

    @property
    def supports_cuts(self) -> bool:
        return True

    def lift(self, R: np.ndarray) -> LiftedView:
        return LiftedView(lift(R, self.W), self.n)


def build_model(g: Graph, mode: DiagMode = DiagMode.NONE) -> ModelMatrices:
    """Constants of the lifted relaxation for graph g.

    The lifted cost is Diag(L, 0_{n+3}), the sparser of the two
    equivalent choices. The equality operator encodes e^T y1 = 1,
    diag(Y12) = 0 and the optional diagonal constraints selected by
    mode, so it has n+1, 2n+1 or 3n+1 rows.
    """
    n = g.n
    L = laplacian(g).astype(float)
    C, d, M = constraint_matrices(n)
    W = orthonormal_kernel_basis(n)

    dim = 2 * n + 3
    Ltilde = np.zeros((dim, dim))
    Ltilde[:n, :n] = L

    entries: list[list[tuple[int, int, float]]] = []
    entries.append([(i, dim - 1, 1.0) for i in range(n)])  # e^T y1 = 1
    for i in range(n):  # diag(Y12) = 0
        entries.append([(i, n + i, 1.0)])
    if mode in (DiagMode.Y1_ONLY, DiagMode.BOTH):
        for i in range(n):  # diag(Y11) = y1
            entries.append([(i, i, 1.0), (i, dim - 1, -1.0)])
    if mode is DiagMode.BOTH:
        for i in range(n):  # diag(Y22) = y2
            entries.append([(n + i, n + i, 1.0), (n + i, dim - 1, -1.0)])
    eq = ConstraintOp(dim, entries)
    b = np.zeros(eq.count)
    b[0] = 1.0

    return ModelMatrices(
        n=n,
        mode=mode,
        L=L,
        C=C,
        d=d,
        M=M,
        W=W,
        Ltilde=Ltilde,
        eq=eq,
        b=b,
        block=BlockIndex(n),
        r_bar=trace_bound(n),
    )


@dataclass(frozen=True)
class BasicModel:
    """The basic (n+1)-dimensional DNN relaxation in solver form.

    Same attribute contract as ModelMatrices but with W = I, so the
    augmented Lagrangian machinery runs unchanged. The four inequality
    rows carry right-hand-side constants; BQP separation does not apply.
    """

    n: int
    L: np.ndarray
    W: np.ndarray
    Ltilde: np.ndarray
    eq: ConstraintOp
    b: np.ndarray
    r_bar: float
    ineq_static: ConstraintOp

    block = None

    @property
    def dim_big(self) -> int:
        return self.n + 1

    @property
    def dim_reduced(self) -> int:
        return self.n + 1

    @property
    def supports_cuts(self) -> bool:
        return False


def build_basic_model(g: Graph) -> BasicModel:
    """DNN_{n+1}: min <L, Ybar> over the doubly non-negative matrices
    [[Ybar, ybar], [ybar^T, rho]] with e^T ybar = 1, diag(Ybar) = ybar,
    rho in [1/floor(n/2), 1] and <E, Ybar> in [1, floor(n/2)].

    The two-sided scalar bounds become four rows of the inequality
    operator in the B(.) <= c convention. r_bar = n + 1 bounds the trace
    of any feasible matrix (all n+1 diagonal entries are at most 1).
    """
    n = g.n
    L = laplacian(g).astype(float)
    half = n // 2
    dim = n + 1
    Ltilde = np.zeros((dim, dim))
    Ltilde[:n, :n] = L

    entries: list[list[tuple[int, int, float]]] = []
    entries.append([(i, n, 1.0) for i in range(n)])  # e^T ybar = 1
    for i in range(n):  # diag(Ybar) = ybar
        entries.append([(i, i, 1.0), (i, n, -1.0)])
    eq = ConstraintOp(dim, entries)
    b = np.zeros(eq.count)
    b[0] = 1.0

    sum_entries = [(i, i, 1.0) for i in range(n)]
    sum_entries += [(i, j, 2.0) for i in range(n) for j in range(i + 1, n)]
    ineq = ConstraintOp(
        dim,
        [
            [(n, n, -1.0)],  # rho >= 1/floor(n/2)
            [(n, n, 1.0)],  # rho <= 1
            [(i, j, -w) for i, j, w in sum_entries],  # <E, Ybar> >= 1
            sum_entries,  # <E, Ybar> <= floor(n/2)
        ],
        rhs_const=np.array([-1.0 / half, 1.0, -1.0, float(half)]),
    )
    return BasicModel(n=n, L=L, W=np.eye(dim), Ltilde=Ltilde, eq=eq, b=b, r_bar=float(dim), ineq_static=ineq)


def prop2_residuals(model: ModelMatrices, Ytilde: np.ndarray) -> dict[str, float]:
    """Max residuals of the three equivalent kernel characterizations of
    a PSD lifted matrix: C y = rho d with diag(C Y C^T) = rho d^2,
    M Ytilde M^T = 0, and M Ytilde = 0."""
    view = LiftedView(Ytilde, model.n)
    Cy = model.C @ view.y
    CYC = model.C @ view.Y @ model.C.T
    return {
        "Cy_rho_d": float(np.max(np.abs(Cy - view.rho * model.d))),
        "diag_CYCt": float(np.max(np.abs(np.diag(CYC) - view.rho * model.d**2))),
        "MYMt": float(np.max(np.abs(model.M @ Ytilde @ model.M.T))),
        "MY": float(np.max(np.abs(model.M @ Ytilde))),
    }


def feasibility_report(L: np.ndarray, Ytilde: np.ndarray) -> dict[str, float]:
    """Max violations of the structural identities and bounds that every
    feasible lifted matrix satisfies.

    Zero (up to solver tolerance) on converged primals; the keys cover
    the rho window and last-column identities, the block-sum identities,
    the <E, Y11> window, the entry upper bounds, the implied inequality
    families Y_ij <= y_i and y_i + y_j - Y_ij <= rho over the 2n range,
    entrywise non-negativity, and the equivalence of the two lifted cost
    choices.
    """
    n = L.shape[0]
    v = LiftedView(Ytilde, n)
    half = n // 2
    e = np.ones(n)
    y12 = np.concatenate([v.y1, v.y2])
    Y2n = v.matrix[: 2 * n, : 2 * n]
    bqp_a = np.max(Y2n - y12[:, None])
    bqp_c = np.max(y12[:, None] + y12[None, :] - Y2n - v.rho)
    sumY11 = float(np.sum(v.Y11))
    entry_bounds = max(
        v.y3 - (half - 1),
        v.y4 - (1 - 1 / half),
        v.Y33 - (half**2 - half),
        v.Y44 - (half - 1),
        v.Y34 - (half - 1),
        float(np.max(v.Y13)) - (half - 1),
        float(np.max(v.Y23)) - (half - 1),
        float(np.max(v.Y14)) - (1 - 1 / half),
        float(np.max(v.Y24)) - (1 - 1 / half),
    )
    cost_a = float(np.sum(L * v.Y11))
    cost_b = 0.5 * (float(np.sum(L * v.Y11)) + float(np.sum(L * v.Y22)))
    return {
        "rho_lower": max(0.0, 1.0 / half - v.rho),
        "rho_upper": max(0.0, v.rho - 1.0),
        "y1_le_rho": max(0.0, float(np.max(v.y1 - v.rho))),
        "y2_le_rho": max(0.0, float(np.max(v.y2 - v.rho))),
        "y2_identity": float(np.max(np.abs(v.y2 - (v.rho * e - v.y1)))),
        "y3_identity": abs(v.y3 - (v.rho * half - 1.0)),
        "y4_identity": abs(v.y4 - (1.0 - v.rho)),
        "eq_y1_sum": abs(float(np.sum(v.y1)) - 1.0),
        "diag_Y12": float(np.max(np.abs(np.diag(v.Y12)))),
        "row_identity_Y11": float(np.max(np.abs(v.Y11 + v.Y12.T - np.outer(e, v.y1)))),
        "row_identity_Y22": float(np.max(np.abs(v.Y22 + v.Y12 - np.outer(e, v.y2)))),
        "sum_Y11_lower": max(0.0, 1.0 - sumY11),
        "sum_Y11_upper": max(0.0, sumY11 - half),
        "y22_identity": float(
            np.max(np.abs(v.Y22 - (v.Y11 + v.rho * np.ones((n, n)) - np.outer(e, v.y1) - np.outer(v.y1, e))))
        ),
        "entry_bounds": max(0.0, float(entry_bounds)),
        "bqp_a": max(0.0, float(bqp_a)),
        "bqp_c": max(0.0, float(bqp_c)),
        "nonneg": max(0.0, -float(np.min(Ytilde))),
        "objective_equiv": abs(cost_a - cost_b),
    }
