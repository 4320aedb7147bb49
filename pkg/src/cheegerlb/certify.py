"""Post-processing of approximate dual solutions into valid lower bounds.

An inexact dual point (nu, mu, S) with mu >= 0 and S >= 0 entrywise
does not satisfy the dual equality constraint, so its objective is not
a bound by itself. The residual matrix

    Ztilde = W^T (Ltilde - A^T nu + B^T mu - S) W

would be the PSD dual slack at exact feasibility; its negative
eigenvalue mass, scaled by an upper bound r_bar on the largest
eigenvalue of any optimal primal matrix, corrects the dual objective
into a rigorous lower bound on the relaxation value (and hence on the
edge expansion). Floating-point eigenvalues are the residual trust
base; no directed rounding is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import negative_eigenvalue_sum

NEGATIVITY_CLIP = 1e-12


class CertificationError(ValueError):
    """The dual point violates the hypotheses of the safe bound."""


@dataclass(frozen=True)
class Certificate:
    """A certified lower bound and its ingredients.

    dual_objective is b^T nu - c^T mu (just b^T nu when the inequality
    rows are homogeneous); correction = r_bar * (sum of negative
    eigenvalues of W Ztilde W^T) <= 0.
    """

    dual_objective: float
    correction: float
    certified_lb: float
    r_bar: float
    lambda_min: float


def trace_bound(n: int) -> float:
    """Upper bound floor(n/2)^2 + n on the trace (hence the largest
    eigenvalue) of any feasible lifted matrix."""
    if n < 3:
        raise ValueError("need n >= 3")
    return float((n // 2) ** 2 + n)


def _clipped_nonneg(arr: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.size == 0:
        return arr
    low = float(arr.min())
    if low < -NEGATIVITY_CLIP:
        raise CertificationError(f"{name} has negative entries down to {low:.3e}; refusing to certify")
    return np.maximum(arr, 0.0)


def certify(
    model,
    nu: np.ndarray,
    mu: np.ndarray,
    S: np.ndarray,
    ineq,
    r_bar: float | None = None,
) -> Certificate:
    """Safe lower bound from an approximate dual point of the reduced problem.

    model carries W, Ltilde, the equality operator eq and rhs b; ineq is
    the inequality ConstraintOp aligned with mu (may have zero rows).
    Tiny negative entries of mu and S (>= -1e-12) are clipped to zero to
    preserve the hypotheses; anything worse is an error.
    """
    if r_bar is None:
        r_bar = model.r_bar
    nu = np.asarray(nu, dtype=float)
    mu = _clipped_nonneg(mu, "mu")
    S = _clipped_nonneg(S, "S")

    X = model.Ltilde - model.eq.adjoint(nu) - S
    if ineq.count:
        X = X + ineq.adjoint(mu)
    Ztilde = model.W.T @ X @ model.W
    # W has orthonormal columns, so W Ztilde W^T has the eigenvalues of
    # Ztilde plus zeros; the negative mass is unchanged.
    neg_sum, lam_min = negative_eigenvalue_sum(Ztilde)
    if model.W.shape[0] > model.W.shape[1]:
        lam_min = min(lam_min, 0.0)
    dual_objective = float(model.b @ nu)
    if ineq.count:
        dual_objective -= float(ineq.rhs_const @ mu)
    correction = r_bar * neg_sum
    return Certificate(
        dual_objective=dual_objective,
        correction=correction,
        certified_lb=dual_objective + correction,
        r_bar=float(r_bar),
        lambda_min=lam_min,
    )
