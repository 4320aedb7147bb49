"""Dense symmetric eigendecomposition helpers: PSD projection and
negative-eigenvalue sums.

Eigenvalues with |lambda| <= 1e-12 * max(1, ||X||_F) are treated as
zero everywhere in this module, so sign noise around zero does not leak
into projections, gradients, or certified corrections.
"""

from __future__ import annotations

import numpy as np

ZERO_EIGENVALUE_REL_TOL = 1e-12
MAX_ASYMMETRY = 1e-9


def _symmetrize(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix has non-finite entries")
    asym = np.max(np.abs(X - X.T)) if X.size else 0.0
    if asym > MAX_ASYMMETRY:
        raise ValueError(f"matrix asymmetry {asym:.3e} exceeds {MAX_ASYMMETRY:.0e}")
    return (X + X.T) / 2.0


def zero_tol(X: np.ndarray) -> float:
    return ZERO_EIGENVALUE_REL_TOL * max(1.0, float(np.linalg.norm(X)))


def sym_eigh(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of (X + X^T)/2."""
    return np.linalg.eigh(_symmetrize(X))


def project_psd(X: np.ndarray) -> np.ndarray:
    """Projection onto the PSD cone: sum of lambda_i v_i v_i^T over lambda_i > 0."""
    S = _symmetrize(X)
    lam, V = np.linalg.eigh(S)
    pos = lam > zero_tol(S)
    if not np.any(pos):
        return np.zeros_like(S)
    Vp = V[:, pos]
    P = (Vp * lam[pos]) @ Vp.T
    return (P + P.T) / 2.0


def negative_eigenvalue_sum(X: np.ndarray) -> tuple[float, float]:
    """Sum of negative eigenvalues and the minimum eigenvalue.

    Returns (0.0, min eigenvalue) for numerically PSD input; eigenvalues
    inside the zero band count as 0 in both outputs.
    """
    S = _symmetrize(X)
    lam, _ = np.linalg.eigh(S)
    tol = zero_tol(S)
    lam = np.where(np.abs(lam) <= tol, 0.0, lam)
    neg = lam[lam < 0.0]
    return (float(neg.sum()) if neg.size else 0.0, float(lam.min()) if lam.size else 0.0)
