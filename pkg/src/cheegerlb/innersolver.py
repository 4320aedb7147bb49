"""Box-constrained limited-memory quasi-Newton minimization.

Thin contract layer over scipy's L-BFGS-B (the classical Fortran
solver): limited-memory BFGS with gradient projection, the factr
relative-reduction stop (f_k - f_{k+1} <= factr * eps * max(|f_k|,
|f_{k+1}|, 1)), and the projected-gradient max-norm stop pgtol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _scipy_minimize


class InnerStatus(Enum):
    CONVERGED_FACTR = "converged-factr"
    CONVERGED_PGTOL = "converged-pgtol"
    MAXITER = "maxiter"
    LINESEARCH_FAILURE = "linesearch-failure"


@dataclass(frozen=True)
class InnerOptions:
    m: int = 10
    maxiter: int = 2000
    factr: float = 1e8
    pgtol: float = 1e-5


@dataclass
class BoxProblem:
    """Smooth objective with per-coordinate bounds.

    fun(x) must return (value, gradient). Lower bounds may be -inf,
    upper bounds +inf.
    """

    fun: Callable[[np.ndarray], tuple[float, np.ndarray]]
    lower: np.ndarray
    upper: np.ndarray | None = None
    options: InnerOptions = field(default_factory=InnerOptions)

    def __post_init__(self) -> None:
        self.lower = np.asarray(self.lower, dtype=float)
        if self.upper is None:
            self.upper = np.full_like(self.lower, np.inf)
        else:
            self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != self.upper.shape:
            raise ValueError("bound shapes differ")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def dimension(self) -> int:
        return self.lower.size


@dataclass(frozen=True)
class InnerResult:
    x: np.ndarray
    f: float
    status: InnerStatus
    iterations: int
    n_evals: int
    message: str


def _classify(status: int, message: str) -> InnerStatus:
    text = message.upper()
    if status == 0:
        if "PROJECTED GRADIENT" in text or "PGTOL" in text:
            return InnerStatus.CONVERGED_PGTOL
        return InnerStatus.CONVERGED_FACTR
    if status == 1:
        return InnerStatus.MAXITER
    return InnerStatus.LINESEARCH_FAILURE


def minimize_box(problem: BoxProblem, x0: np.ndarray) -> InnerResult:
    """Minimize problem.fun over the box, starting from x0 (clipped
    into the box if needed). Raises on a non-finite objective or
    gradient at a feasible point."""
    x0 = np.clip(np.asarray(x0, dtype=float), problem.lower, problem.upper)

    def wrapped(x: np.ndarray) -> tuple[float, np.ndarray]:
        f, g = problem.fun(x)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite objective or gradient at a feasible point")
        return f, g

    opts = problem.options
    res = _scipy_minimize(
        wrapped,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=list(zip(problem.lower, problem.upper)),
        options={
            "maxcor": opts.m,
            "maxiter": opts.maxiter,
            "ftol": opts.factr * np.finfo(float).eps,
            "gtol": opts.pgtol,
            # the Fortran code also stops on maxfun; keep it out of the way
            "maxfun": max(10 * opts.maxiter, 15000),
        },
    )
    message = res.message if isinstance(res.message, str) else res.message.decode()
    return InnerResult(
        x=np.asarray(res.x),
        f=float(res.fun),
        status=_classify(int(res.status), message),
        iterations=int(res.nit),
        n_evals=int(res.nfev),
        message=message,
    )
