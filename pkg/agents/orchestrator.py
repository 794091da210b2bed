"""
Sweep Orchestrator

Fans independent work out to agents and joins it in a fixed order.

Responsibility:
- Validate every (p, α) pair before any solve runs
- Run one solve per (instance, p, α), at most `workers` at a time
- Emit rows in (instance, p, α) order regardless of completion order
- Batch gradient checks against finite differences

Not responsible for:
- Numerical work (delegated to SolverAgent and the oracles)
- Output formatting (ux/export_service.py)
"""

import asyncio
import logging
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from agents.oracle_agent import energy_gradient_check
from agents.solver_agent import SolverAgent, get_solver_agent
from config import config
from schemas.graph import ProblemInstance
from schemas.run_record import GradcheckReport, SweepRow
from schemas.solver import SolverConfig
from utils.errors import SweepSpecError
from utils.flow_logger import function_logger

logger = logging.getLogger(__name__)

GRADCHECK_THRESHOLD = 1e-4


def validate_pairs(p_list: Sequence[float], alpha_list: Sequence[float]) -> List[Tuple[float, float]]:
    """All (p, α) pairs in order; any pair outside α ≥ p > 1 rejects the whole sweep."""
    pairs = list(product(p_list, alpha_list))
    for p, alpha in pairs:
        if not np.isfinite(p) or p <= 1:
            raise SweepSpecError(f"p must be > 1, got p={p}")
        if not np.isfinite(alpha) or alpha < p:
            raise SweepSpecError(f"alpha < p in pair (p={p}, alpha={alpha})")
    return pairs


class SweepOrchestrator:
    """
    Parameter sweeps and gradient-check batches.

    Solves run in worker threads through SolverAgent; `workers` bounds how many
    are in flight.
    """

    def __init__(self, workers: Optional[int] = None, solver_agent: Optional[SolverAgent] = None):
        self.workers = max(1, workers or config.SWEEP_WORKERS)
        self.solver_agent = solver_agent or get_solver_agent()
        self.logger = logger

    @function_logger("Run parameter sweep")
    async def run_sweep(
        self,
        instances: Sequence[Tuple[str, ProblemInstance]],
        p_list: Sequence[float],
        alpha_list: Sequence[float],
        cfg: Optional[SolverConfig] = None,
    ) -> List[SweepRow]:
        """
        One row per (instance, p, α).

        Raises:
            SweepSpecError: a pair violates α ≥ p > 1 (nothing is solved)
        """
        pairs = validate_pairs(p_list, alpha_list)
        jobs = [(name, inst.with_exponents(p, alpha)) for name, inst in instances for p, alpha in pairs]
        self.logger.info("Starting sweep", extra={"jobs": len(jobs), "workers": self.workers})

        semaphore = asyncio.Semaphore(self.workers)

        async def solve_one(name: str, inst: ProblemInstance) -> SweepRow:
            async with semaphore:
                result = await self.solver_agent.run(inst, cfg)
            if not result.converged:
                self.logger.warning(
                    "Sweep solve did not converge",
                    extra={"instance": name, "p": inst.p, "alpha": inst.alpha},
                )
            return SweepRow(
                instance=name,
                n=inst.n,
                p=inst.p,
                alpha=inst.alpha,
                beta=result.beta,
                lambda_=result.lambda_,
                residual_inf=result.residual_inf,
                iterations=result.iterations,
                converged=result.converged,
            )

        # gather keeps submission order
        rows = await asyncio.gather(*(solve_one(name, inst) for name, inst in jobs))
        self.logger.info(
            "Sweep complete",
            extra={"rows": len(rows), "converged": sum(r.converged for r in rows)},
        )
        return list(rows)

    @function_logger("Run gradient check batch")
    async def run_gradcheck(
        self,
        name: str,
        inst: ProblemInstance,
        trials: int = 20,
        seed: int = 0,
        threshold: float = GRADCHECK_THRESHOLD,
    ) -> GradcheckReport:
        """
        energy_gradient against finite differences at `trials` points φ ~ uniform(0.5, 1.5)^n.
        """
        if trials <= 0:
            return GradcheckReport(
                instance=name, trials=0, seed=seed, threshold=threshold, passed=True, note="no trials"
            )

        rng = np.random.default_rng(seed)
        points = [rng.uniform(0.5, 1.5, size=inst.n) for _ in range(trials)]
        semaphore = asyncio.Semaphore(self.workers)

        async def check_one(phi: np.ndarray) -> float:
            async with semaphore:
                return await asyncio.to_thread(energy_gradient_check, inst, phi)

        errors = list(await asyncio.gather(*(check_one(phi) for phi in points)))
        worst = max(errors)
        return GradcheckReport(
            instance=name,
            trials=trials,
            seed=seed,
            errors=errors,
            max_relative_error=worst,
            threshold=threshold,
            passed=worst <= threshold,
        )
