"""Agents package."""

from agents.base import BaseAgent
from agents.solver_agent import SolverAgent, get_solver_agent, solve
from agents.oracle_agent import OracleAgent, get_oracle_agent
from agents.orchestrator import SweepOrchestrator

__all__ = [
    "BaseAgent",
    "SolverAgent",
    "get_solver_agent",
    "solve",
    "OracleAgent",
    "get_oracle_agent",
    "SweepOrchestrator",
]
