import numpy as np
import pytest

from cheegerlb import (
    Cut,
    CutPool,
    SolverConfig,
    build_basic_model,
    build_model,
    complete_graph,
    cut_operator,
    cycle_graph,
    eval_F_alpha,
    exact_edge_expansion,
    gnp_graph,
    recover_Z,
    solve,
    solve_basic,
    update_R,
)
from cheegerlb.alm import _InnerObjective, _Packing, combined_ineq, primal_violation
from cheegerlb.innersolver import BoxProblem, minimize_box
from cheegerlb.model import ConstraintOp


def _zero_duals(model, ineq=None):
    q = ineq.count if ineq is not None else 0
    return np.zeros(model.eq.count), np.zeros(q), np.zeros((model.dim_big, model.dim_big))


def _random_dual_point(model, ineq, rng, scale=1.0):
    nu = rng.standard_normal(model.eq.count) * scale
    mu = np.abs(rng.standard_normal(ineq.count)) * scale
    S = np.abs(rng.standard_normal((model.dim_big, model.dim_big))) * scale * 0.3
    S = (S + S.T) / 2
    G = rng.standard_normal((model.dim_reduced, model.dim_reduced))
    R = G @ G.T / model.dim_reduced
    return nu, mu, S, R


def test_F_zero_at_origin():
    m = build_model(cycle_graph(4))
    nu, mu, S = _zero_duals(m)
    f, grad = eval_F_alpha(m, nu, mu, S, np.zeros((5, 5)), 1.0)
    assert f == 0.0
    # the nu gradient at the origin is b itself (projection vanishes)
    assert np.allclose(grad[: m.eq.count], m.b)


def test_F_at_identity_matches_eigendecomposition():
    m = build_model(cycle_graph(4))
    WtLW = m.W.T @ m.Ltilde @ m.W
    lam = np.linalg.eigvalsh(-WtLW + np.eye(5))
    expected = -0.5 * np.sum(np.maximum(lam, 0.0) ** 2) + 5 / 2
    nu, mu, S = _zero_duals(m)
    f, _ = eval_F_alpha(m, nu, mu, S, np.eye(5), 1.0)
    assert np.isclose(f, expected, atol=1e-10)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(21)
    g = gnp_graph(5, 0.6, seed=1)
    m = build_model(g)
    cuts = [Cut(0, 1, 2), Cut(3, 0, 4)]
    ineq = cut_operator(cuts, m.n)
    pk = _Packing(m.eq.count, ineq.count, m.dim_big)
    for _ in range(3):
        nu, mu, S, R = _random_dual_point(m, ineq, rng)
        obj = _InnerObjective(m, ineq, pk, R, 0.7)
        x = pk.pack(nu, mu, pk.s_vector(S))
        _, grad = obj.f_and_grad(x)
        fd = np.zeros_like(x)
        for i in range(x.size):
            h = 1e-6 * max(1.0, abs(x[i]))
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd[i] = (obj.f_and_grad(xp)[0] - obj.f_and_grad(xm)[0]) / (2 * h)
        assert np.linalg.norm(grad - fd) <= 1e-5 * max(1.0, np.linalg.norm(fd))


def test_concavity_along_segments():
    rng = np.random.default_rng(22)
    m = build_model(cycle_graph(6))
    ineq = combined_ineq(m, CutPool())
    pk = _Packing(m.eq.count, 0, m.dim_big)
    G = rng.standard_normal((7, 7))
    obj = _InnerObjective(m, ineq, pk, G @ G.T / 7, 0.5)
    for _ in range(10):
        a = rng.standard_normal(pk.size)
        b = rng.standard_normal(pk.size)
        fa, fb = obj.f_and_grad(a)[0], obj.f_and_grad(b)[0]
        for lam in (0.25, 0.5, 0.75):
            fm = obj.f_and_grad(lam * a + (1 - lam) * b)[0]
            assert fm >= lam * fa + (1 - lam) * fb - 1e-9


def test_recover_Z_nsd_and_psd_cases():
    m = build_model(cycle_graph(5))
    nu, mu, S = _zero_duals(m)
    WtLW = m.W.T @ m.Ltilde @ m.W
    # inner matrix -W'LW is NSD: Z is its negation
    Z = recover_Z(m, nu, mu, S, np.zeros((6, 6)), 1.0)
    assert np.allclose(Z, WtLW, atol=1e-10)
    # shift the inner matrix PSD: Z vanishes
    c = np.linalg.eigvalsh(WtLW).max() + 1.0
    Z2 = recover_Z(m, nu, mu, S, c * np.eye(6), 1.0)
    assert np.max(np.abs(Z2)) <= 1e-12


def test_recover_Z_complements_inner_matrix():
    rng = np.random.default_rng(23)
    m = build_model(cycle_graph(5))
    ineq = combined_ineq(m, CutPool())
    nu, mu, S, R = _random_dual_point(m, ineq, rng)
    from cheegerlb.alm import _inner_matrix

    Minner = _inner_matrix(m, ineq, nu, mu, S, R, 0.9)
    Z = recover_Z(m, nu, mu, S, R, 0.9)
    assert np.linalg.eigvalsh(Z).min() >= -1e-10
    assert np.linalg.eigvalsh(Z + Minner).min() >= -1e-8


def test_update_R_formula_and_fixed_point():
    m = build_model(cycle_graph(4))
    rng = np.random.default_rng(24)
    G = rng.standard_normal((5, 5))
    R = G @ G.T
    WtLW = m.W.T @ m.Ltilde @ m.W
    nu, mu, S = _zero_duals(m)
    # all-zero duals: the update argument is -W'LW + Z
    R1 = update_R(m, nu, mu, S, np.zeros((5, 5)), R, 1.0)
    assert np.allclose(R1, R - WtLW, atol=1e-12)
    # choosing Z = W'LW makes the update argument vanish
    R2 = update_R(m, nu, mu, S, WtLW, R, 1.0)
    assert np.allclose(R2, R, atol=1e-12)


def test_update_R_after_one_inner_solve_on_c4():
    m = build_model(cycle_graph(4))
    ineq = combined_ineq(m, CutPool())
    pk = _Packing(m.eq.count, 0, m.dim_big)
    R0 = np.zeros((5, 5))
    obj = _InnerObjective(m, ineq, pk, R0, 1.0)
    res = minimize_box(BoxProblem(fun=obj, lower=pk.lower), np.zeros(pk.size))
    nu, mu, svec = pk.unpack(res.x)
    S = pk.s_matrix(svec)
    Z = recover_Z(m, nu, mu, S, R0, 1.0)
    R1 = update_R(m, nu, mu, S, Z, R0, 1.0)
    assert np.isfinite(R1).all()
    objective = float(np.sum((m.W.T @ m.Ltilde @ m.W) * R1))
    assert 0.5 <= objective <= 1.5  # h(C4) = 1


def test_update_R_lands_on_projection():
    rng = np.random.default_rng(25)
    m = build_model(cycle_graph(5))
    ineq = combined_ineq(m, CutPool())
    nu, mu, S, R = _random_dual_point(m, ineq, rng)
    from cheegerlb.alm import _inner_matrix
    from cheegerlb.spectral import project_psd

    alpha = 0.6
    Minner = _inner_matrix(m, ineq, nu, mu, S, R, alpha)
    Z = recover_Z(m, nu, mu, S, R, alpha)
    R1 = update_R(m, nu, mu, S, Z, R, alpha)
    assert np.allclose(R1, project_psd(Minner) / alpha, atol=1e-8)
    assert np.linalg.eigvalsh(R1).min() >= -1e-8


def test_solve_c4_bounds_and_pool():
    g = cycle_graph(4)
    res = solve(build_model(g), SolverConfig())
    h = exact_edge_expansion(g).value
    assert 0.0 <= res.certificate.certified_lb <= h + 1e-9
    assert res.certificate.correction <= 0.0
    assert np.all(res.dual.mu >= 0)
    assert np.min(res.dual.S) >= 0
    assert np.linalg.eigvalsh(res.dual.Z).min() >= -1e-8


def test_solve_without_cuts_keeps_pool_empty():
    res = solve(build_model(cycle_graph(6)), SolverConfig(cut_batch=0))
    assert len(res.pool) == 0
    assert all(rec.cuts_added == 0 for rec in res.log)


def test_solve_adds_cuts_when_they_bind():
    res = solve(build_model(cycle_graph(6)), SolverConfig())
    assert len(res.pool) > 0
    assert res.certificate.certified_lb >= 0.6  # cuts lift the bound toward 2/3


def test_no_cut_separation_during_warmup():
    res = solve(build_model(cycle_graph(6)), SolverConfig())
    for rec in res.log[:5]:
        assert rec.cuts_added == 0


def test_warm_start_determinism():
    g = gnp_graph(9, 0.4, seed=3)
    model = build_model(g)
    a = solve(model, SolverConfig())
    b = solve(model, SolverConfig())
    assert len(a.log) == len(b.log)
    for ra, rb in zip(a.log, b.log):
        assert ra.f_value == rb.f_value
        assert ra.alpha == rb.alpha
        assert ra.cuts_added == rb.cuts_added
        assert ra.correction == rb.correction
    assert a.certificate.certified_lb == b.certificate.certified_lb


def test_iteration_log_schema():
    res = solve(build_model(cycle_graph(4)), SolverConfig(cut_batch=0))
    row = res.log[0].to_dict()
    assert set(row) == {"iter", "alpha", "F", "inner_iters", "cuts_added", "cuts_removed", "correction"}


def test_primal_violation_small_on_returned_state():
    model = build_model(gnp_graph(8, 0.5, seed=1))
    res = solve(model, SolverConfig())
    assert primal_violation(model, res.primal.Ytilde) <= 1e-3
    # cached lift is consistent with R
    assert np.allclose(res.primal.Ytilde, model.W @ res.primal.R @ model.W.T, atol=1e-12)


def test_solve_basic_k4():
    g = complete_graph(4)
    bound, log = solve_basic(g, SolverConfig())
    assert bound <= 2.0 + 1e-6  # h(K4) = 2
    assert bound >= 0.0
    assert len(log) > 0


def test_alpha_schedule_monotone():
    res = solve(build_model(cycle_graph(5)), SolverConfig(cut_batch=0))
    alphas = [rec.alpha for rec in res.log if rec.phase == "main"]
    assert all(a >= b for a, b in zip(alphas, alphas[1:]))
    assert alphas[0] == 1.0
    assert alphas[-1] >= SolverConfig().alpha_min


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(alpha_factor=1.5)
    with pytest.raises(ValueError):
        SolverConfig(cut_batch=-1)


def test_divergence_guard_raises():
    from cheegerlb import SolverError

    with pytest.raises(SolverError, match="divergence guard"):
        solve(build_model(cycle_graph(4)), SolverConfig(divergence_norm=1e-30))


def test_inner_solve_never_increases_objective():
    m = build_model(cycle_graph(5))
    ineq = combined_ineq(m, CutPool())
    pk = _Packing(m.eq.count, 0, m.dim_big)
    rng = np.random.default_rng(26)
    G = rng.standard_normal((6, 6))
    obj = _InnerObjective(m, ineq, pk, G @ G.T / 6, 0.8)
    x0 = rng.standard_normal(pk.size)
    x0 = np.maximum(x0, pk.lower)
    res = minimize_box(BoxProblem(fun=obj, lower=pk.lower), x0)
    assert res.f <= obj(x0)[0] + 1e-12


def test_eval_F_alpha_with_explicit_ineq_operator():
    m = build_model(cycle_graph(5))
    cuts = [Cut(0, 1, 2)]
    ineq = cut_operator(cuts, m.n)
    nu = np.zeros(m.eq.count)
    mu = np.array([0.4])
    S = np.zeros((m.dim_big, m.dim_big))
    f, grad = eval_F_alpha(m, nu, mu, S, np.zeros((6, 6)), 1.0, ineq=ineq)
    assert np.isfinite(f)
    assert grad.size == m.eq.count + 1 + (m.dim_big * (m.dim_big + 1)) // 2
