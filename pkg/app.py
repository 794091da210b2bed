"""
Command-line entry point.

    yamabe solve <instance.json> [--seed N --max-iters N --tol X --restarts N --trace]
    yamabe gen <family> <n> [--seed N --weights unit|uniform:a,b] -o file
    yamabe verify <instance.json> <solution.json> [--tol X]
    yamabe sweep (--gen FAMILY:N | --instance FILE) --p LIST --alpha LIST -o out.csv
    yamabe gradcheck (<instance.json> | --gen FAMILY:N) [--trials N --seed N]

Results go to stdout as one JSON object (sweep writes CSV to -o). Diagnostics go
to stderr. Exit codes: 0 success, 1 invalid input, 2 non-convergence or a
failed check.
"""

import argparse
import asyncio
import json
import sys
import time
from typing import List, Optional
from uuid import uuid4

from agents.orchestrator import SweepOrchestrator, validate_pairs
from agents.solver_agent import solve
from config import __version__, config
from schemas.run_record import RunRecord
from schemas.solver import InitPolicy, SolverConfig
from services.variational import verify_solution
from tools.graph_generators import (
    GraphFamily,
    WeightPolicy,
    generate_instance,
    parse_generator_spec,
)
from tools.instance_io import read_instance, read_solution, write_instance, write_solution
from utils.errors import SweepSpecError, YamabeError
from utils.flow_logger import end_session, function_logger, set_session_id
from utils.logging import configure_logging
from ux.error_handling import EXIT_OK, FailureHandler, FailureScenario
from ux.export_service import ExportService


# ============================================================================
# HELPERS
# ============================================================================

def _parse_list(text: str, flag: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise SweepSpecError(f"{flag} expects comma-separated numbers, got '{text}'")


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def _report_failure(scenario: FailureScenario, details: str, context: Optional[dict] = None) -> int:
    diagnostic = FailureHandler.handle_failure(scenario, details, context)
    sys.stderr.write(json.dumps(diagnostic) + "\n")
    return diagnostic["exit_code"]


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    overrides = dict(
        seed=args.seed,
        max_iters=args.max_iters,
        grad_tol=args.tol,
        restarts=args.restarts,
        trace=args.trace,
        trace_every=args.trace_every,
    )
    if getattr(args, "init_from", None):
        phi, _ = read_solution(args.init_from)
        overrides.update(init_policy=InitPolicy.USER_SUPPLIED, initial_phi=tuple(phi.tolist()))
    elif getattr(args, "random_start", False):
        overrides.update(init_policy=InitPolicy.RANDOM_POSITIVE)
    return SolverConfig.from_config(config, **overrides)


def _generated_instance(args: argparse.Namespace, p: float, alpha: float):
    family, n = parse_generator_spec(args.gen)
    inst = generate_instance(
        family,
        n,
        p=p,
        alpha=alpha,
        seed=args.seed,
        weight_policy=WeightPolicy.parse(args.weights),
        h_spec=args.h,
        f_spec=args.f,
    )
    return f"{args.gen}@seed={args.seed}", inst


# ============================================================================
# COMMANDS
# ============================================================================

@function_logger("CLI solve")
def cmd_solve(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    cfg = _solver_config(args)

    start = time.perf_counter()
    result = solve(inst, cfg)
    wall_ms = (time.perf_counter() - start) * 1000.0

    record = RunRecord.from_result(args.instance, cfg, result, wall_ms, config.ARTIFACT_VERSION)
    _emit(ExportService.export_json(record, pretty=args.pretty))
    if args.solution_out:
        write_solution(result, args.solution_out)

    if not result.converged:
        return _report_failure(
            FailureScenario.NOT_CONVERGED,
            f"relative residual {result.relative_residual:.3e} > tol {cfg.grad_tol:.1e}",
            {"iterations": result.iterations, "restart_betas": result.restart_betas},
        )
    return EXIT_OK


@function_logger("CLI gen")
def cmd_gen(args: argparse.Namespace) -> int:
    inst = generate_instance(
        GraphFamily(args.family),
        args.n,
        p=args.p,
        alpha=args.alpha,
        seed=args.seed,
        weight_policy=WeightPolicy.parse(args.weights),
        h_spec=args.h,
        f_spec=args.f,
    )
    write_instance(inst, args.output)
    _emit(json.dumps({"output": str(args.output), "n": inst.n, "edges": inst.graph.edge_count}))
    return EXIT_OK


@function_logger("CLI verify")
def cmd_verify(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    phi, lam = read_solution(args.solution, n=inst.n)
    report = verify_solution(inst, phi, lam, args.tol)
    _emit(ExportService.export_json(report, pretty=args.pretty))
    if report.passed:
        return EXIT_OK
    reasons = []
    if not report.positive:
        reasons.append(f"positivity violated at vertices {report.nonpositive_indices}")
    if report.relative_residual > report.tol:
        reasons.append(f"relative residual {report.relative_residual:.3e} > tol {report.tol:.1e}")
    return _report_failure(FailureScenario.VERIFICATION_FAILED, "; ".join(reasons))


@function_logger("CLI sweep")
def cmd_sweep(args: argparse.Namespace) -> int:
    p_list = _parse_list(args.p, "--p")
    alpha_list = _parse_list(args.alpha, "--alpha")
    pairs = validate_pairs(p_list, alpha_list)
    if bool(args.gen) == bool(args.instance):
        raise SweepSpecError("give exactly one of --gen or --instance")

    if args.instance:
        instances = [(args.instance, read_instance(args.instance))]
    elif pairs:
        # exponents are replaced per row
        instances = [_generated_instance(args, *pairs[0])]
    else:
        instances = []

    cfg = _solver_config(args)
    orchestrator = SweepOrchestrator(workers=args.workers)
    rows = asyncio.run(orchestrator.run_sweep(instances, p_list, alpha_list, cfg))
    ExportService.write_csv(rows, args.output)

    converged = sum(r.converged for r in rows)
    _emit(json.dumps({"output": str(args.output), "rows": len(rows), "converged": converged}))
    if converged < len(rows):
        return _report_failure(
            FailureScenario.NOT_CONVERGED,
            f"{len(rows) - converged} of {len(rows)} sweep rows did not converge",
        )
    return EXIT_OK


@function_logger("CLI gradcheck")
def cmd_gradcheck(args: argparse.Namespace) -> int:
    if bool(args.gen) == bool(args.instance):
        raise SweepSpecError("give exactly one of an instance path or --gen")
    if args.instance:
        name, inst = args.instance, read_instance(args.instance)
    else:
        name, inst = _generated_instance(args, args.p, args.alpha)

    orchestrator = SweepOrchestrator(workers=args.workers)
    report = asyncio.run(orchestrator.run_gradcheck(name, inst, trials=args.trials, seed=args.seed))
    _emit(ExportService.export_json(report, pretty=args.pretty))
    if report.passed:
        return EXIT_OK
    return _report_failure(
        FailureScenario.GRADCHECK_FAILED,
        f"max relative error {report.max_relative_error:.3e} > {report.threshold:.0e}",
    )


# ============================================================================
# PARSER
# ============================================================================

def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="Seed for restarts and generators")
    parser.add_argument("--max-iters", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None, help="Relative residual tolerance")
    parser.add_argument("--restarts", type=int, default=None, help="Total descent runs")
    parser.add_argument("--trace", action="store_true", help="Record the iterate trace")
    parser.add_argument("--trace-every", type=int, default=None)
    parser.add_argument("--random-start", action="store_true", help="Random start for restart 0 too")


def _add_generator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--weights", default="unit", help="unit | uniform:a,b")
    parser.add_argument("--h", default="const:0", help="const:c | uniform:a,b | values:v0,...")
    parser.add_argument("--f", default="const:1", help="const:c | uniform:a,b | values:v0,...")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="yamabe",
        description="Positive solutions of Δ_pφ + hφ^{p-1} = λfφ^{α-1} on weighted graphs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--pretty", action="store_true", help="Indent JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="Solve an instance file")
    p_solve.add_argument("instance")
    _add_solver_flags(p_solve)
    p_solve.add_argument("--init-from", default=None, help="Solution file whose φ starts restart 0")
    p_solve.add_argument("--solution-out", default=None, help="Also write {phi, lambda} here")
    p_solve.set_defaults(handler=cmd_solve)

    p_gen = sub.add_parser("gen", help="Generate an instance file")
    p_gen.add_argument("family", choices=[f.value for f in GraphFamily])
    p_gen.add_argument("n", type=int)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--p", type=float, default=2.0)
    p_gen.add_argument("--alpha", type=float, default=2.0)
    _add_generator_flags(p_gen)
    p_gen.add_argument("-o", "--output", required=True)
    p_gen.set_defaults(handler=cmd_gen)

    p_verify = sub.add_parser("verify", help="Check a claimed solution")
    p_verify.add_argument("instance")
    p_verify.add_argument("solution")
    p_verify.add_argument("--tol", type=float, default=1e-9)
    p_verify.set_defaults(handler=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="Solve over a grid of (p, alpha)")
    p_sweep.add_argument("--gen", default=None, help="FAMILY:N")
    p_sweep.add_argument("--instance", default=None)
    p_sweep.add_argument("--p", required=True, help="Comma-separated p values")
    p_sweep.add_argument("--alpha", required=True, help="Comma-separated alpha values")
    _add_solver_flags(p_sweep)
    _add_generator_flags(p_sweep)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("-o", "--output", required=True)
    p_sweep.set_defaults(handler=cmd_sweep)

    p_grad = sub.add_parser("gradcheck", help="Gradient against finite differences")
    p_grad.add_argument("instance", nargs="?", default=None)
    p_grad.add_argument("--gen", default=None, help="FAMILY:N")
    p_grad.add_argument("--p", type=float, default=2.0)
    p_grad.add_argument("--alpha", type=float, default=2.0)
    _add_generator_flags(p_grad)
    p_grad.add_argument("--trials", type=int, default=20)
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--workers", type=int, default=None)
    p_grad.set_defaults(handler=cmd_gradcheck)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 is reserved for non-convergence here
        return EXIT_OK if e.code in (0, None) else FailureHandler.exit_code(FailureScenario.PARSE_ERROR)

    configure_logging(config.LOG_LEVEL)
    set_session_id(uuid4().hex[:8])
    try:
        return args.handler(args)
    except YamabeError as e:
        return _report_failure(FailureHandler.scenario_for(e), str(e), {"command": args.command})
    finally:
        end_session()


if __name__ == "__main__":
    sys.exit(main())
