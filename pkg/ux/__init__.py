"""
UX Module - command-line output and failure states.

- Export system: JSON records, sweep CSV
- Error handling: failure scenario → diagnostic + exit code
"""

from ux.export_service import ExportService
from ux.error_handling import (
    EXIT_INVALID_INPUT,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    FailureHandler,
    FailureScenario,
    RecoverySuggestion,
)

__all__ = [
    "ExportService",
    "FailureHandler",
    "FailureScenario",
    "RecoverySuggestion",
    "EXIT_OK",
    "EXIT_INVALID_INPUT",
    "EXIT_NOT_CONVERGED",
]
