"""Session fixtures: the graph corpus and its cached solver runs."""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from support import GraphCase, build_corpus  # noqa: E402

from cheegerlb import (  # noqa: E402
    AlmResult,
    DiagMode,
    SolverConfig,
    build_basic_model,
    build_model,
    exact_edge_expansion,
    solve,
)


@dataclass(frozen=True)
class CorpusRun:
    bound: float
    result: AlmResult
    model: object


@pytest.fixture(scope="session")
def corpus() -> list[GraphCase]:
    return build_corpus()


@pytest.fixture(scope="session")
def corpus_exact(corpus):
    return {case.name: exact_edge_expansion(case.graph) for case in corpus}


def _run(case: GraphCase, kind: str) -> CorpusRun:
    config = SolverConfig()
    if kind == "basic":
        model = build_basic_model(case.graph)
    elif kind == "dnnp":
        model = build_model(case.graph, DiagMode.NONE)
        config = replace(config, cut_batch=0)
    elif kind == "dnnp_y1":
        model = build_model(case.graph, DiagMode.Y1_ONLY)
        config = replace(config, cut_batch=0)
    elif kind == "dnnpfrc":
        model = build_model(case.graph, DiagMode.NONE)
    else:
        raise ValueError(kind)
    result = solve(model, config)
    return CorpusRun(bound=result.certificate.certified_lb, result=result, model=model)


@pytest.fixture(scope="session")
def corpus_runs(corpus):
    """All solver runs used by the acceptance criteria, computed once.

    Returns (runs, seconds) where runs maps (case name, kind) to a
    CorpusRun for kinds basic/dnnp/dnnpfrc/dnnp_y1 and seconds holds
    the total wall time per kind.
    """
    runs: dict[tuple[str, str], CorpusRun] = {}
    seconds: dict[str, float] = {}
    for kind in ("basic", "dnnp", "dnnpfrc", "dnnp_y1"):
        total = 0.0
        for case in corpus:
            run = _run(case, kind)
            runs[(case.name, kind)] = run
            total += run.result.wall_time
        seconds[kind] = total
    return runs, seconds
