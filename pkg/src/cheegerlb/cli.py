"""Command-line front end: parse graphs, run the selected relaxations,
certify bounds, and emit CSV rows plus JSON reports.

CSV columns are fixed as instance,n,m,UB,bound,gap,time,cuts,iterations
with one row per instance and requested relaxation, bounds and gaps
rounded to two decimals for display. The JSON report keeps full
precision, the certificates, and the per-iteration solver logs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .alm import AlmResult, SolverConfig, solve
from .certify import Certificate
from .graphs import Graph, parse_graph
from .innersolver import InnerOptions
from .model import DiagMode, build_basic_model, build_model
from .oracle import DEFAULT_ENUMERATION_CAP, exact_edge_expansion

RELAXATIONS = ("basic", "dnnp", "dnnpfrc")
CSV_COLUMNS = ("instance", "n", "m", "UB", "bound", "gap", "time", "cuts", "iterations")


def gap(ub: float, lb: float) -> float:
    """Relative gap (UB - LB) / UB; UB must be positive."""
    if ub <= 0:
        raise ValueError(f"upper bound must be positive, got {ub}")
    return (ub - lb) / ub


@dataclass
class RelaxationOutcome:
    bound: float
    gap: float | None
    time_s: float
    cuts: int
    iterations: int
    certificate: Certificate
    log: list


@dataclass
class BoundReport:
    """Everything reported for one instance."""

    instance: str
    n: int
    m: int
    ub: float | None
    bound_basic: float | None = None
    bound_dnnp: float | None = None
    bound_dnnpfrc: float | None = None
    outcomes: dict[str, RelaxationOutcome] = field(default_factory=dict)
    error: str | None = None

    def record(self, relaxation: str, outcome: RelaxationOutcome) -> None:
        self.outcomes[relaxation] = outcome
        setattr(self, f"bound_{relaxation}", outcome.bound)

    def to_json_dict(self) -> dict:
        payload = {
            "instance": self.instance,
            "n": self.n,
            "m": self.m,
            "ub": self.ub,
            "bound_basic": self.bound_basic,
            "bound_dnnp": self.bound_dnnp,
            "bound_dnnpfrc": self.bound_dnnpfrc,
            "error": self.error,
            "relaxations": {},
        }
        for name, oc in self.outcomes.items():
            cert = oc.certificate
            payload["relaxations"][name] = {
                "bound": oc.bound,
                "gap": oc.gap,
                "time_s": oc.time_s,
                "cuts": oc.cuts,
                "iterations": oc.iterations,
                "certificate": {
                    "dual_objective": cert.dual_objective,
                    "correction": cert.correction,
                    "certified_lb": cert.certified_lb,
                    "r_bar": cert.r_bar,
                    "lambda_min": cert.lambda_min,
                },
                "log": [rec.to_dict() for rec in oc.log],
            }
        return payload


def run_relaxation(g: Graph, relaxation: str, config: SolverConfig, diag: DiagMode) -> tuple[AlmResult, int]:
    """Solve one relaxation; returns the result and the final pool size."""
    if relaxation == "basic":
        result = solve(build_basic_model(g), config)
        return result, 0
    if relaxation == "dnnp":
        from dataclasses import replace

        result = solve(build_model(g, diag), replace(config, cut_batch=0))
        return result, 0
    if relaxation == "dnnpfrc":
        result = solve(build_model(g, diag), config)
        return result, len(result.pool)
    raise ValueError(f"unknown relaxation {relaxation!r}")


def _config_from_args(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        alpha_init=args.alpha_init,
        alpha_min=args.alpha_min,
        alpha_factor=args.alpha_factor,
        cut_batch=args.cut_batch,
        cut_tol=args.cut_tol,
        min_new_cuts=args.min_new_cuts,
        purge_tol=args.purge_tol,
        warmup_iters=args.warmup_iters,
        post_iters_max=args.post_iters,
        post_correction_tol=args.post_correction_tol,
        inner=InnerOptions(
            m=args.lbfgs_m,
            maxiter=args.lbfgs_maxiter,
            factr=args.lbfgs_factr,
            pgtol=args.lbfgs_pgtol,
        ),
    )


def _instance_ub(g: Graph, args: argparse.Namespace) -> float | None:
    if args.ub is not None:
        return args.ub
    if args.ub_from_oracle:
        if g.n <= DEFAULT_ENUMERATION_CAP:
            return exact_edge_expansion(g).value
        print(f"warning: n={g.n} exceeds oracle cap; no upper bound", file=sys.stderr)
    return None


def process_instance(path: Path, args: argparse.Namespace, config: SolverConfig) -> BoundReport:
    name = path.stem
    try:
        g = parse_graph(path.read_bytes(), args.format)
    except (OSError, ValueError) as exc:
        report = BoundReport(instance=name, n=0, m=0, ub=None)
        report.error = f"{type(exc).__name__}: {exc}"
        return report
    ub = _instance_ub(g, args)
    report = BoundReport(instance=name, n=g.n, m=g.m, ub=ub)
    diag = DiagMode(args.diag)
    for relaxation in args.relaxation:
        try:
            result, cuts = run_relaxation(g, relaxation, config, diag)
        except Exception as exc:  # solver divergence etc.; keep going
            report.error = f"{relaxation}: {type(exc).__name__}: {exc}"
            continue
        lb = result.certificate.certified_lb
        g_rel = None
        if ub is not None and ub > 0:
            g_rel = gap(ub, lb)
            if g_rel < 0:
                print(
                    f"warning: {name}/{relaxation}: lower bound {lb:.6f} exceeds UB {ub:.6f}",
                    file=sys.stderr,
                )
        report.record(
            relaxation,
            RelaxationOutcome(
                bound=lb,
                gap=g_rel,
                time_s=result.wall_time,
                cuts=cuts,
                iterations=result.iterations,
                certificate=result.certificate,
                log=result.log,
            ),
        )
    return report


def _csv_rows(report: BoundReport, relaxations: list[str]) -> list[list]:
    rows = []
    for relaxation in relaxations:
        oc = report.outcomes.get(relaxation)
        if oc is None:
            continue
        rows.append(
            [
                report.instance,
                report.n,
                report.m,
                "" if report.ub is None else round(report.ub, 2),
                round(oc.bound, 2),
                "" if oc.gap is None else round(oc.gap, 2),
                f"{oc.time_s:.2f}",
                oc.cuts,
                oc.iterations,
            ]
        )
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cheegerlb",
        description="Certified lower bounds on graph edge expansion via DNN relaxations.",
    )
    parser.add_argument("files", nargs="+", type=Path, help="graph files to process")
    parser.add_argument(
        "--relaxation",
        action="append",
        choices=RELAXATIONS,
        help="relaxation(s) to run; repeatable (default: dnnpfrc). "
        "dnnp is dnnpfrc with the cut batch forced to 0",
    )
    parser.add_argument("--diag", choices=[m.value for m in DiagMode], default="none")
    parser.add_argument("--alpha-init", type=float, default=1.0)
    parser.add_argument("--alpha-min", type=float, default=1e-5)
    parser.add_argument("--alpha-factor", type=float, default=3.0 / 5.0)
    parser.add_argument("--cut-batch", type=int, default=500)
    parser.add_argument("--cut-tol", type=float, default=1e-3)
    parser.add_argument("--min-new-cuts", type=int, default=50)
    parser.add_argument("--purge-tol", type=float, default=1e-5)
    parser.add_argument("--warmup-iters", type=int, default=5)
    parser.add_argument("--post-iters", type=int, default=500)
    parser.add_argument("--post-correction-tol", type=float, default=0.01)
    parser.add_argument("--lbfgs-m", type=int, default=10)
    parser.add_argument("--lbfgs-maxiter", type=int, default=2000)
    parser.add_argument("--lbfgs-factr", type=float, default=1e8)
    parser.add_argument("--lbfgs-pgtol", type=float, default=1e-5)
    parser.add_argument("--ub", type=float, default=None, help="known upper bound on h(G)")
    parser.add_argument(
        "--ub-from-oracle",
        action="store_true",
        help=f"compute the exact h(G) as UB when n <= {DEFAULT_ENUMERATION_CAP}",
    )
    parser.add_argument("--format", choices=["edgelist", "metis"], default="edgelist")
    parser.add_argument("--out-csv", type=Path, default=None)
    parser.add_argument("--out-json", type=Path, default=None)
    parser.add_argument("--seed", type=int, default=None, help="recorded in the JSON report")
    parser.add_argument("--threads", type=int, default=1, help="instances processed in parallel")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if not args.relaxation:
        args.relaxation = ["dnnpfrc"]
    config = _config_from_args(args)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(lambda p: process_instance(p, args, config), args.files))
    else:
        reports = [process_instance(p, args, config) for p in args.files]

    failed = False
    for report in reports:
        if report.error is not None:
            failed = True
            print(f"error: {report.instance}: {report.error}", file=sys.stderr)
        for relaxation in args.relaxation:
            oc = report.outcomes.get(relaxation)
            if oc is not None:
                shown_gap = "-" if oc.gap is None else f"{oc.gap:.2f}"
                print(
                    f"{report.instance} {relaxation}: bound={oc.bound:.6f} gap={shown_gap} "
                    f"time={oc.time_s:.2f}s cuts={oc.cuts} iterations={oc.iterations}"
                )

    if args.out_csv is not None:
        with open(args.out_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for report in reports:
                writer.writerows(_csv_rows(report, args.relaxation))
    if args.out_json is not None:
        payload = {
            "seed": args.seed,
            "config": {
                "relaxations": args.relaxation,
                "diag": args.diag,
                "alpha_init": args.alpha_init,
                "alpha_min": args.alpha_min,
                "alpha_factor": args.alpha_factor,
                "cut_batch": args.cut_batch,
                "cut_tol": args.cut_tol,
                "min_new_cuts": args.min_new_cuts,
                "purge_tol": args.purge_tol,
                "warmup_iters": args.warmup_iters,
                "post_iters": args.post_iters,
                "post_correction_tol": args.post_correction_tol,
            },
            "instances": [r.to_json_dict() for r in reports],
        }
        args.out_json.write_text(json.dumps(payload, indent=2) + "\n")

    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
