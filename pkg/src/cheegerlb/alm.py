"""Augmented Lagrangian outer loop for the reduced DNN relaxations.

The dual of the reduced problem

    min <W^T Ltilde W, R>  s.t.  A(W R W^T) = b,  B(W R W^T) <= c,
                                 W R W^T >= 0,  R psd

is maximized approximately: for fixed penalty alpha and primal estimate
R, the PSD dual block Z is eliminated in closed form (a projection),
leaving the concave differentiable function

    F_alpha(nu, mu, S) = b^T nu - c^T mu
        - 1/(2 alpha) || P_psd(W^T (A^T nu - B^T mu + S - Ltilde) W
                               + alpha R) ||^2
        + alpha/2 ||R||^2

which L-BFGS-B maximizes over nu free, mu >= 0, S >= 0 (S parameterized
by its upper triangle). After each inner solve the multiplier R is
updated with the standard first-order rule, which lands on
R+ = P_psd(inner matrix) / alpha, the outer loop purges inactive cuts,
separates new violated triangle inequalities, and shrinks alpha
whenever separation dries up. A final phase iterates at constant alpha
until the certified correction term is negligible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .certify import Certificate, certify
from .cuts import CutPool, cut_operator, purge, separate
from .innersolver import BoxProblem, InnerOptions, minimize_box
from .model import ConstraintOp, build_basic_model, feasibility_report
from .spectral import zero_tol


class SolverError(RuntimeError):
    """The augmented Lagrangian loop failed; message carries context."""


@dataclass(frozen=True)
class SolverConfig:
    """All algorithm parameters, defaults as used for the benchmarks."""

    alpha_init: float = 1.0
    alpha_min: float = 1e-5
    alpha_factor: float = 3.0 / 5.0
    cut_batch: int = 500
    cut_tol: float = 1e-3
    min_new_cuts: int = 50
    purge_tol: float = 1e-5
    warmup_iters: int = 5
    post_iters_max: int = 500
    post_correction_tol: float = 0.01
    inner: InnerOptions = field(default_factory=InnerOptions)
    feas_tol: float = 1e-3
    divergence_norm: float = 1e8

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha_factor < 1.0):
            raise ValueError("alpha_factor must be in (0, 1)")
        for name in ("alpha_init", "alpha_min", "cut_tol", "purge_tol", "post_correction_tol"):
            if getattr(self, name) <= 0 and name != "purge_tol":
                raise ValueError(f"{name} must be positive")
        if self.purge_tol < 0 or self.cut_batch < 0 or self.min_new_cuts < 0:
            raise ValueError("cut parameters must be non-negative")


@dataclass
class DualState:
    nu: np.ndarray
    mu: np.ndarray
    S: np.ndarray
    Z: np.ndarray
    alpha: float


@dataclass
class PrimalState:
    R: np.ndarray
    Ytilde: np.ndarray


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    alpha: float
    f_value: float
    inner_iters: int
    inner_status: str
    cuts_added: int
    cuts_removed: int
    pool_size: int
    correction: float
    certified_lb: float
    phase: str

    def to_dict(self) -> dict:
        """JSON-lines schema of the iteration log."""
        return {
            "iter": self.iteration,
            "alpha": self.alpha,
            "F": self.f_value,
            "inner_iters": self.inner_iters,
            "cuts_added": self.cuts_added,
            "cuts_removed": self.cuts_removed,
            "correction": self.correction,
        }


@dataclass
class AlmResult:
    dual: DualState
    primal: PrimalState
    log: list[IterationRecord]
    pool: CutPool
    certificate: Certificate
    wall_time: float

    @property
    def iterations(self) -> int:
        return len(self.log)


def combined_ineq(model, pool: CutPool) -> ConstraintOp:
    """Static inequality rows (if any) followed by the pool's cuts."""
    static = model.ineq_static
    if model.block is not None and len(pool):
        cuts_op = cut_operator(pool.cuts, model.n)
        return cuts_op if static is None else ConstraintOp.concat(static, cuts_op)
    if static is not None:
        return static
    return ConstraintOp(model.dim_big, [])


class _Packing:
    """Flat vector layout [nu | mu | upper triangle of S] with bounds."""

    def __init__(self, p: int, q: int, dim: int):
        self.p = p
        self.q = q
        self.dim = dim
        self.iu, self.ju = np.triu_indices(dim)
        self.n_svec = self.iu.size
        # chain rule of the symmetric parameterization: off-diagonal
        # entries of S appear twice in the matrix
        self.grad_factor = np.where(self.iu == self.ju, 1.0, 2.0)
        self.size = p + q + self.n_svec
        self.lower = np.concatenate(
            [np.full(p, -np.inf), np.zeros(q), np.zeros(self.n_svec)]
        )

    def pack(self, nu: np.ndarray, mu: np.ndarray, svec: np.ndarray) -> np.ndarray:
        return np.concatenate([nu, mu, svec])

    def unpack(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return x[: self.p], x[self.p : self.p + self.q], x[self.p + self.q :]

    def s_matrix(self, svec: np.ndarray) -> np.ndarray:
        S = np.zeros((self.dim, self.dim))
        S[self.iu, self.ju] = svec
        S[self.ju, self.iu] = svec
        return S

    def s_vector(self, S: np.ndarray) -> np.ndarray:
        return S[self.iu, self.ju]


def _inner_matrix(model, ineq: ConstraintOp, nu, mu, S, R, alpha) -> np.ndarray:
    X = model.eq.adjoint(nu) + S - model.Ltilde
    if ineq.count:
        X = X - ineq.adjoint(mu)
    Minner = model.W.T @ X @ model.W + alpha * R
    return (Minner + Minner.T) / 2.0


class _InnerObjective:
    """Callable minimizing -F_alpha over the packed dual vector."""

    def __init__(self, model, ineq: ConstraintOp, packing: _Packing, R: np.ndarray, alpha: float):
        self.model = model
        self.ineq = ineq
        self.packing = packing
        self.R = R
        self.alpha = alpha
        self.r_norm_sq = float(np.sum(R * R))

    def f_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        """(F_alpha, gradient of F_alpha) at the packed point x."""
        model, pk, alpha = self.model, self.packing, self.alpha
        nu, mu, svec = pk.unpack(x)
        S = pk.s_matrix(svec)
        Minner = _inner_matrix(model, self.ineq, nu, mu, S, self.R, alpha)
        lam, V = np.linalg.eigh(Minner)
        pos = lam > zero_tol(Minner)
        value = float(model.b @ nu) + alpha / 2.0 * self.r_norm_sq
        if self.ineq.count:
            value -= float(self.ineq.rhs_const @ mu)
        if np.any(pos):
            value -= float(np.sum(lam[pos] ** 2)) / (2.0 * alpha)
            Vp = V[:, pos]
            P = (Vp * lam[pos]) @ Vp.T
            T = model.W @ P @ model.W.T
            T = (T + T.T) / 2.0
        else:
            T = np.zeros((model.dim_big, model.dim_big))
        g_nu = model.b - model.eq.apply(T) / alpha
        if self.ineq.count:
            g_mu = -self.ineq.rhs_const + self.ineq.apply(T) / alpha
        else:
            g_mu = np.zeros(0)
        g_svec = -(T[pk.iu, pk.ju] * pk.grad_factor) / alpha
        return value, np.concatenate([g_nu, g_mu, g_svec])

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        f, g = self.f_and_grad(x)
        return -f, -g


def eval_F_alpha(model, nu, mu, S, R, alpha, ineq: ConstraintOp | None = None):
    """F_alpha and its gradient packed as (nu, mu, upper triangle of S).

    ineq defaults to the model's static inequality rows (empty when the
    model has none); pass the combined operator to include cuts.
    """
    if ineq is None:
        ineq = combined_ineq(model, CutPool())
    packing = _Packing(model.eq.count, ineq.count, model.dim_big)
    obj = _InnerObjective(model, ineq, packing, np.asarray(R, dtype=float), alpha)
    x = packing.pack(np.asarray(nu, float), np.asarray(mu, float), packing.s_vector(np.asarray(S, float)))
    return obj.f_and_grad(x)


def recover_Z(model, nu, mu, S, R, alpha, ineq: ConstraintOp | None = None) -> np.ndarray:
    """Optimal eliminated dual block: projection of -(inner matrix) onto
    the PSD cone."""
    if ineq is None:
        ineq = combined_ineq(model, CutPool())
    Minner = _inner_matrix(model, ineq, nu, mu, np.asarray(S, float), R, alpha)
    lam, V = np.linalg.eigh(Minner)
    neg = lam < -zero_tol(Minner)
    if not np.any(neg):
        return np.zeros_like(Minner)
    Vn = V[:, neg]
    Z = -(Vn * lam[neg]) @ Vn.T
    return (Z + Z.T) / 2.0


def update_R(model, nu, mu, S, Z, R, alpha, ineq: ConstraintOp | None = None) -> np.ndarray:
    """First-order multiplier update
    R+ = R + (W^T (A^T nu - B^T mu + S - Ltilde) W + Z) / alpha.

    With Z recovered from the same point this equals
    P_psd(inner matrix) / alpha, so the new R is positive semidefinite.
    """
    if ineq is None:
        ineq = combined_ineq(model, CutPool())
    X = model.eq.adjoint(nu) + np.asarray(S, float) - model.Ltilde
    if ineq.count:
        X = X - ineq.adjoint(mu)
    G = model.W.T @ X @ model.W + Z
    Rn = R + G / alpha
    return (Rn + Rn.T) / 2.0


def _lift_primal(model, R: np.ndarray) -> np.ndarray:
    Yt = model.W @ R @ model.W.T
    return (Yt + Yt.T) / 2.0


def primal_violation(model, Ytilde: np.ndarray) -> float:
    """Worst structural constraint violation of a primal candidate.

    For the lifted model this is the maximum over the feasibility
    report (the kernel identities hold exactly by construction, so the
    report reduces to the equality residuals, non-negativity, and the
    implied bounds); for the basic model it is the worst
    equality/inequality/non-negativity residual. Cut rows are excluded:
    they constrain the optimal value, not the lifted structure.
    """
    if model.block is not None:
        return max(feasibility_report(model.L, Ytilde).values())
    viol = max(
        float(np.max(np.abs(model.eq.apply(Ytilde) - model.b))),
        max(0.0, -float(np.min(Ytilde))),
    )
    static = model.ineq_static
    if static is not None and static.count:
        viol = max(viol, float(np.max(static.apply(Ytilde) - static.rhs_const)))
    return viol


def solve(model, config: SolverConfig = SolverConfig()) -> AlmResult:
    """Run the full bounding loop on a reduced model (lifted or basic).

    One inner L-BFGS-B solve per cut round, warm-started from the
    previous duals (new cut multipliers start at zero); alpha shrinks by
    alpha_factor whenever fewer than min_new_cuts violated inequalities
    were added, until it falls below alpha_min. The final phase repeats
    iterations at the last used alpha, pool frozen, until the
    post-processing correction is below post_correction_tol and some
    iterate met the feasibility tolerance. The returned certificate is
    computed from the final duals; the returned primal is the
    structurally most feasible iterate seen once cut separation was
    active.
    """
    t0 = time.perf_counter()
    p = model.eq.count
    dim = model.dim_big
    red = model.dim_reduced

    pool = CutPool()
    n_static = model.ineq_static.count if model.ineq_static is not None else 0
    nu = np.zeros(p)
    mu = np.zeros(n_static)
    R = np.zeros((red, red))
    svec = None  # allocated with the first packing
    log: list[IterationRecord] = []
    alpha = config.alpha_init
    alpha_used = alpha
    it = 0

    def run_iteration(ineq: ConstraintOp, alpha: float):
        nonlocal nu, mu, svec, R
        packing = _Packing(p, ineq.count, dim)
        if svec is None:
            svec = np.zeros(packing.n_svec)
        objective = _InnerObjective(model, ineq, packing, R, alpha)
        problem = BoxProblem(fun=objective, lower=packing.lower, options=config.inner)
        try:
            res = minimize_box(problem, packing.pack(nu, mu, svec))
        except FloatingPointError as exc:
            raise SolverError(f"inner solve diverged at iteration {it} (alpha={alpha:.3e}): {exc}") from exc
        nu, mu, svec = (a.copy() for a in packing.unpack(res.x))
        Minner = _inner_matrix(model, ineq, nu, mu, packing.s_matrix(svec), R, alpha)
        lam, V = np.linalg.eigh(Minner)
        tol = zero_tol(Minner)
        posm, negm = lam > tol, lam < -tol
        R = (V[:, posm] * lam[posm]) @ V[:, posm].T / alpha if np.any(posm) else np.zeros((red, red))
        R = (R + R.T) / 2.0
        Z = -(V[:, negm] * lam[negm]) @ V[:, negm].T if np.any(negm) else np.zeros((red, red))
        Z = (Z + Z.T) / 2.0
        r_norm = float(np.linalg.norm(R))
        if not np.isfinite(r_norm) or r_norm > config.divergence_norm:
            raise SolverError(
                f"primal iterate norm {r_norm:.3e} exceeds divergence guard at iteration {it}"
            )
        return res, Z, packing

    ineq = combined_ineq(model, pool)
    cert: Certificate | None = None
    Z = np.zeros((red, red))
    # the reported primal is the structurally most feasible iterate; at
    # the smallest alphas the recovered primal is 1/alpha-sensitive to
    # the inexact duals, so the final iterate is usually not the best
    cuts_active = model.block is not None and config.cut_batch > 0
    R_best = R
    viol_best = np.inf
    while alpha >= config.alpha_min:
        it += 1
        alpha_used = alpha
        res, Z, packing = run_iteration(ineq, alpha)
        Ytilde = _lift_primal(model, R)
        if not cuts_active or it > config.warmup_iters:
            viol = primal_violation(model, Ytilde)
            if viol < viol_best:
                viol_best, R_best = viol, R

        removed = 0
        if len(pool):
            pool.multipliers = mu[n_static:].copy()
            new_pool = purge(pool, config.purge_tol)
            removed = len(pool) - len(new_pool)
            pool = new_pool
            mu = np.concatenate([mu[:n_static], pool.multipliers])
        added = 0
        if model.block is not None and config.cut_batch > 0 and it > config.warmup_iters:
            new_cuts = separate(Ytilde, pool, config.cut_batch, config.cut_tol)
            if new_cuts:
                pool.add(new_cuts)
                mu = np.concatenate([mu, np.zeros(len(new_cuts))])
            added = len(new_cuts)
        if removed or added:
            ineq = combined_ineq(model, pool)
        if added < config.min_new_cuts:
            alpha = alpha * config.alpha_factor

        cert = certify(model, nu, mu, packing.s_matrix(svec), ineq)
        log.append(
            IterationRecord(
                iteration=it,
                alpha=alpha_used,
                f_value=-res.f,
                inner_iters=res.iterations,
                inner_status=res.status.value,
                cuts_added=added,
                cuts_removed=removed,
                pool_size=len(pool),
                correction=cert.correction,
                certified_lb=cert.certified_lb,
                phase="main",
            )
        )

    # final phase: constant alpha, frozen pool. Stop once the
    # certificate correction is negligible and some iterate met the
    # feasibility tolerance (the bound is valid regardless; this
    # polishes the result).
    alpha = alpha_used
    post = 0
    while (
        cert is not None
        and post < config.post_iters_max
        and (abs(cert.correction) >= config.post_correction_tol or viol_best >= config.feas_tol)
    ):
        it += 1
        post += 1
        res, Z, packing = run_iteration(ineq, alpha)
        cert = certify(model, nu, mu, packing.s_matrix(svec), ineq)
        viol = primal_violation(model, _lift_primal(model, R))
        if viol < viol_best:
            viol_best, R_best = viol, R
        log.append(
            IterationRecord(
                iteration=it,
                alpha=alpha,
                f_value=-res.f,
                inner_iters=res.iterations,
                inner_status=res.status.value,
                cuts_added=0,
                cuts_removed=0,
                pool_size=len(pool),
                correction=cert.correction,
                certified_lb=cert.certified_lb,
                phase="post",
            )
        )

    packing = _Packing(p, ineq.count, dim)
    S = packing.s_matrix(svec if svec is not None else np.zeros(packing.n_svec))
    if len(pool):
        pool.multipliers = mu[n_static:].copy()
    if cert is None:
        cert = certify(model, nu, mu, S, ineq)
    dual = DualState(nu=nu, mu=mu, S=S, Z=Z, alpha=alpha_used)
    primal = PrimalState(R=R_best, Ytilde=_lift_primal(model, R_best))
    return AlmResult(
        dual=dual,
        primal=primal,
        log=log,
        pool=pool,
        certificate=cert,
        wall_time=time.perf_counter() - t0,
    )


def solve_basic(g, config: SolverConfig = SolverConfig()) -> tuple[float, list[IterationRecord]]:
    """Certified lower bound from the basic (n+1)-dimensional DNN
    relaxation, using the same machinery with W = I."""
    result = solve(build_basic_model(g), config)
    return result.certificate.certified_lb, result.log
