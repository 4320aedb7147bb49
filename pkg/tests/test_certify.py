from dataclasses import dataclass

import numpy as np
import pytest

from cheegerlb import (
    CertificationError,
    ConstraintOp,
    CutPool,
    SolverConfig,
    build_model,
    certify,
    cycle_graph,
    solve,
    trace_bound,
)
from cheegerlb.alm import combined_ineq


@dataclass
class _StubModel:
    W: np.ndarray
    Ltilde: np.ndarray
    eq: ConstraintOp
    b: np.ndarray
    r_bar: float


def _stub(lam1, lam2, b0=0.5):
    # zero constraint matrix: dual objective is b0 * nu regardless of Ztilde
    eq = ConstraintOp(2, [[]])
    return _StubModel(
        W=np.eye(2),
        Ltilde=np.diag([lam1, lam2]),
        eq=eq,
        b=np.array([b0]),
        r_bar=10.0,
    )


def _no_ineq():
    return ConstraintOp(2, [])


def test_trace_bound_values():
    assert trace_bound(4) == 8.0
    assert trace_bound(5) == 9.0
    assert trace_bound(3) == 4.0
    with pytest.raises(ValueError):
        trace_bound(2)


def test_psd_residual_gives_exact_dual_objective():
    model = build_model(cycle_graph(5))
    ineq = combined_ineq(model, CutPool())
    nu = np.zeros(model.eq.count)
    mu = np.zeros(0)
    S = np.zeros((model.dim_big, model.dim_big))
    # Ztilde = W' Ltilde W is PSD, so no correction at all
    cert = certify(model, nu, mu, S, ineq)
    assert cert.correction == 0.0
    assert cert.certified_lb == cert.dual_objective == 0.0


def test_synthetic_correction_formula():
    model = _stub(1.0, -0.001)
    cert = certify(model, np.array([1.0]), np.zeros(0), np.zeros((2, 2)), _no_ineq())
    assert np.isclose(cert.dual_objective, 0.5)
    assert np.isclose(cert.correction, -0.01)
    assert np.isclose(cert.certified_lb, 0.49)
    assert np.isclose(cert.lambda_min, -0.001)


def test_monotone_in_r_bar():
    model = _stub(1.0, -0.3)
    nu = np.array([1.0])
    lbs = [
        certify(model, nu, np.zeros(0), np.zeros((2, 2)), _no_ineq(), r_bar=r).certified_lb
        for r in (1.0, 5.0, 50.0)
    ]
    assert lbs[0] >= lbs[1] >= lbs[2]


def test_negativity_clipping_and_rejection():
    model = _stub(1.0, 0.5)
    ineq = ConstraintOp(2, [[(0, 0, 1.0)]])
    ok = certify(model, np.array([1.0]), np.array([-1e-13]), np.zeros((2, 2)), ineq)
    assert ok.certified_lb <= ok.dual_objective
    with pytest.raises(CertificationError):
        certify(model, np.array([1.0]), np.array([-1e-9]), np.zeros((2, 2)), ineq)
    S_bad = np.full((2, 2), -1e-9)
    with pytest.raises(CertificationError):
        certify(model, np.array([1.0]), np.zeros(1), S_bad, ineq)


def test_inequality_constants_enter_dual_objective():
    model = _stub(1.0, 1.0)
    ineq = ConstraintOp(2, [[(0, 0, 1.0)]], rhs_const=np.array([0.25]))
    cert = certify(model, np.array([1.0]), np.array([2.0]), np.zeros((2, 2)), ineq)
    # b'nu - c'mu = 0.5 - 0.5; Ztilde = Ltilde + 2*A is PSD here
    assert np.isclose(cert.dual_objective, 0.0)
    assert cert.correction == 0.0


def test_certificate_bounds_dual_objective_on_solver_output():
    model = build_model(cycle_graph(6))
    res = solve(model, SolverConfig())
    cert = res.certificate
    assert cert.certified_lb <= cert.dual_objective + 1e-15
    assert cert.correction <= 0.0
    assert cert.r_bar == trace_bound(6)


def test_certify_is_pure():
    model = build_model(cycle_graph(5))
    ineq = combined_ineq(model, CutPool())
    rng = np.random.default_rng(31)
    nu = rng.standard_normal(model.eq.count)
    S = np.abs(rng.standard_normal((model.dim_big, model.dim_big)))
    S = (S + S.T) / 2
    a = certify(model, nu, np.zeros(0), S, ineq)
    b = certify(model, nu, np.zeros(0), S, ineq)
    assert a == b
