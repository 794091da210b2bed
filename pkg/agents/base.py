"""Agent contract shared by the solver and the oracles."""

from abc import ABC, abstractmethod
from typing import Any


class BaseAgent(ABC):
    """All agents inherit from this base contract."""

    name: str = "agent"

    @abstractmethod
    async def run(self, *args, **kwargs) -> Any:
        """
        Execute agent logic.

        Must be stateless between calls: the same inputs give the same output.
        Numerical work runs in a worker thread so several agents can be awaited
        together by the orchestrator.
        """
