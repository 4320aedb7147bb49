"""Certified lower bounds on graph edge expansion via facially reduced
doubly non-negative relaxations with triangle cutting planes."""

from .alm import (
    AlmResult,
    DualState,
    IterationRecord,
    PrimalState,
    SolverConfig,
    SolverError,
    eval_F_alpha,
    recover_Z,
    solve,
    solve_basic,
    update_R,
)
from .certify import Certificate, CertificationError, certify, trace_bound
from .cuts import Cut, CutPool, cut_operator, purge, separate, violation
from .graphs import (
    DisconnectedSampleError,
    Graph,
    ParseError,
    complete_bipartite_graph,
    complete_graph,
    connected_gnp_graph,
    cycle_graph,
    generate_family,
    gnp_graph,
    laplacian,
    parse_graph,
    path_graph,
    serialize_edge_list,
    serialize_metis,
)
from .innersolver import BoxProblem, InnerOptions, InnerResult, InnerStatus, minimize_box
from .model import (
    BasicModel,
    BlockIndex,
    ConstraintOp,
    DiagMode,
    LiftedView,
    ModelMatrices,
    build_basic_model,
    build_model,
    constraint_matrices,
    feasibility_report,
    kernel_basis_raw,
    lift,
    orthonormal_kernel_basis,
    prop2_residuals,
)
from .oracle import ExpansionResult, exact_edge_expansion
from .spectral import negative_eigenvalue_sum, project_psd, sym_eigh

__version__ = "0.1.0"
