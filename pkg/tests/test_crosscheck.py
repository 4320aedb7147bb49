"""Independent conic-solver cross-checks of the certified bounds."""

import numpy as np
import pytest

cp = pytest.importorskip("cvxpy")

from cheegerlb import (  # noqa: E402
    SolverConfig,
    build_basic_model,
    build_model,
    complete_bipartite_graph,
    cycle_graph,
    solve,
    solve_basic,
)


def _reference_reduced_value(model) -> float:
    r = model.dim_reduced
    R = cp.Variable((r, r), symmetric=True)
    Yt = model.W @ R @ model.W.T
    constraints = [R >> 0, Yt >= 0]
    for A, bi in zip(model.eq.matrices(), model.b):
        constraints.append(cp.trace(A @ Yt) == bi)
    problem = cp.Problem(cp.Minimize(cp.trace(model.Ltilde @ Yt)), constraints)
    problem.solve(solver=cp.CLARABEL)
    assert problem.status == cp.OPTIMAL
    return float(problem.value)


def _reference_basic_value(model) -> float:
    d = model.dim_big
    Yt = cp.Variable((d, d), symmetric=True)
    constraints = [Yt >> 0, Yt >= 0]
    for A, bi in zip(model.eq.matrices(), model.b):
        constraints.append(cp.trace(A @ Yt) == bi)
    for B, ci in zip(model.ineq_static.matrices(), model.ineq_static.rhs_const):
        constraints.append(cp.trace(B @ Yt) <= ci)
    problem = cp.Problem(cp.Minimize(cp.trace(model.Ltilde @ Yt)), constraints)
    problem.solve(solver=cp.CLARABEL)
    assert problem.status == cp.OPTIMAL
    return float(problem.value)


@pytest.mark.parametrize("g", [cycle_graph(4), cycle_graph(5), complete_bipartite_graph(2, 3)])
def test_reduced_relaxation_matches_interior_point(g):
    model = build_model(g)
    reference = _reference_reduced_value(model)
    res = solve(model, SolverConfig(cut_batch=0))
    lb = res.certificate.certified_lb
    # certified from below, and tight up to solver accuracy
    assert lb <= reference + 1e-6
    assert lb >= reference - 5e-4


@pytest.mark.parametrize("g", [cycle_graph(4), complete_bipartite_graph(3, 3)])
def test_basic_relaxation_matches_interior_point(g):
    model = build_basic_model(g)
    reference = _reference_basic_value(model)
    bound, _ = solve_basic(g, SolverConfig())
    assert bound <= reference + 1e-6
    assert bound >= reference - 5e-4
