"""
Failure states for the command line.

Every expected failure maps to a scenario with a severity, an exit code and a
short user-facing message. The CLI prints the diagnostic returned by
`FailureHandler.handle_failure` to stderr as one JSON object.

Exit codes: 0 success, 1 invalid input, 2 non-convergence (or a solution that
fails verification).
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from utils.errors import (
    DomainError,
    InstanceParseError,
    InstanceValidationError,
    NotConvergedError,
    OracleError,
    SweepSpecError,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_NOT_CONVERGED = 2


class FailureScenario(Enum):
    """Types of expected failures."""
    PARSE_ERROR = "parse_error"
    INVALID_INSTANCE = "invalid_instance"
    DISCONNECTED_GRAPH = "disconnected_graph"
    INVALID_SWEEP = "invalid_sweep"
    DOMAIN_ERROR = "domain_error"
    NOT_CONVERGED = "not_converged"
    VERIFICATION_FAILED = "verification_failed"
    GRADCHECK_FAILED = "gradcheck_failed"
    ORACLE_FAILURE = "oracle_failure"
    UNEXPECTED = "unexpected"


class RecoverySuggestion(Enum):
    """Recovery actions for the user."""
    FIX_INPUT = "fix_input"
    CONNECT_GRAPH = "connect_graph"
    RAISE_MAX_ITERS = "raise_max_iters"
    ADD_RESTARTS = "add_restarts"
    LOOSEN_TOL = "loosen_tol"
    REPORT_BUG = "report_bug"


class FailureHandler:
    """Map failures to diagnostics and exit codes."""

    RECOVERY_MAP = {
        FailureScenario.PARSE_ERROR: {
            'message': 'Input file could not be parsed',
            'severity': 'high',
            'exit_code': EXIT_INVALID_INPUT,
            'suggestions': [RecoverySuggestion.FIX_INPUT],
            'user_facing': 'The file is not valid JSON in the expected layout.',
        },
        FailureScenario.INVALID_INSTANCE: {
            'message': 'Instance violates a problem invariant',
            'severity': 'high',
            'exit_code': EXIT_INVALID_INPUT,
            'suggestions': [RecoverySuggestion.FIX_INPUT],
            'user_facing': 'Check f > 0, alpha >= p > 1 and positive weights and measures.',
        },
        FailureScenario.DISCONNECTED_GRAPH: {
            'message': 'Graph is not connected',
            'severity': 'high',
            'exit_code': EXIT_INVALID_INPUT,
            'suggestions': [RecoverySuggestion.CONNECT_GRAPH],
            'user_facing': 'Positive solutions are only guaranteed on connected graphs.',
        },
        FailureScenario.INVALID_SWEEP: {
            'message': 'Sweep parameters rejected',
            'severity': 'high',
            'exit_code': EXIT_INVALID_INPUT,
            'suggestions': [RecoverySuggestion.FIX_INPUT],
            'user_facing': 'Every (p, alpha) pair must satisfy alpha >= p > 1.',
        },
        FailureScenario.DOMAIN_ERROR: {
            'message': 'Operation called outside its domain',
            'severity': 'high',
            'exit_code': EXIT_INVALID_INPUT,
            'suggestions': [RecoverySuggestion.FIX_INPUT],
            'user_facing': 'A vertex function has the wrong length or sign.',
        },
        FailureScenario.NOT_CONVERGED: {
            'message': 'Solver did not converge',
            'severity': 'medium',
            'exit_code': EXIT_NOT_CONVERGED,
            'suggestions': [
                RecoverySuggestion.RAISE_MAX_ITERS,
                RecoverySuggestion.ADD_RESTARTS,
                RecoverySuggestion.LOOSEN_TOL,
            ],
            'user_facing': 'The best restart is reported; it did not meet the residual tolerance.',
        },
        FailureScenario.VERIFICATION_FAILED: {
            'message': 'Claimed solution failed verification',
            'severity': 'medium',
            'exit_code': EXIT_NOT_CONVERGED,
            'suggestions': [RecoverySuggestion.LOOSEN_TOL],
            'user_facing': 'The residual exceeds the tolerance or φ is not strictly positive.',
        },
        FailureScenario.GRADCHECK_FAILED: {
            'message': 'Gradient disagrees with finite differences',
            'severity': 'high',
            'exit_code': EXIT_NOT_CONVERGED,
            'suggestions': [RecoverySuggestion.REPORT_BUG],
            'user_facing': 'The analytic gradient exceeded the relative error threshold.',
        },
        FailureScenario.ORACLE_FAILURE: {
            'message': 'Oracle check failed',
            'severity': 'medium',
            'exit_code': EXIT_INVALID_INPUT,
            'suggestions': [RecoverySuggestion.FIX_INPUT],
            'user_facing': 'The oracle does not apply to this instance or its self-check failed.',
        },
    }

    _UNEXPECTED = {
        'message': 'Unexpected error',
        'severity': 'high',
        'exit_code': EXIT_INVALID_INPUT,
        'suggestions': [RecoverySuggestion.REPORT_BUG],
        'user_facing': 'An unexpected error occurred.',
    }

    @staticmethod
    def scenario_for(exc: BaseException) -> FailureScenario:
        """Classify an exception raised by a command."""
        if isinstance(exc, InstanceParseError):
            return FailureScenario.PARSE_ERROR
        if isinstance(exc, InstanceValidationError):
            if "connected" in exc.reason:
                return FailureScenario.DISCONNECTED_GRAPH
            return FailureScenario.INVALID_INSTANCE
        if isinstance(exc, SweepSpecError):
            return FailureScenario.INVALID_SWEEP
        if isinstance(exc, DomainError):
            return FailureScenario.DOMAIN_ERROR
        if isinstance(exc, NotConvergedError):
            return FailureScenario.NOT_CONVERGED
        if isinstance(exc, OracleError):
            return FailureScenario.ORACLE_FAILURE
        return FailureScenario.UNEXPECTED

    @staticmethod
    def exit_code(scenario: FailureScenario) -> int:
        return FailureHandler.RECOVERY_MAP.get(scenario, FailureHandler._UNEXPECTED)['exit_code']

    @staticmethod
    def handle_failure(
        scenario: FailureScenario,
        error_details: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None
    ) -> Dict[str, Any]:
        """
        Diagnostic for one failure.

        `error_details` is the exception text, which names the violated field.
        """
        recovery = FailureHandler.RECOVERY_MAP.get(scenario, FailureHandler._UNEXPECTED)
        return {
            'scenario': scenario.value,
            'message': recovery['message'],
            'severity': recovery['severity'],
            'exit_code': recovery['exit_code'],
            'user_message': recovery['user_facing'],
            'recovery_steps': FailureHandler.get_recovery_steps(scenario),
            'error_details': error_details,
            'context': context or {},
        }

    @staticmethod
    def get_recovery_steps(scenario: FailureScenario) -> List[Dict[str, str]]:
        """Actionable recovery steps for a scenario."""
        actions = {
            RecoverySuggestion.FIX_INPUT: ('fix_input', 'Correct the field named in error_details'),
            RecoverySuggestion.CONNECT_GRAPH: ('connect_graph', 'Add edges so every vertex reaches vertex 0'),
            RecoverySuggestion.RAISE_MAX_ITERS: ('raise_max_iters', 'Re-run with a larger --max-iters'),
            RecoverySuggestion.ADD_RESTARTS: ('add_restarts', 'Re-run with more --restarts'),
            RecoverySuggestion.LOOSEN_TOL: ('loosen_tol', 'Re-run with a larger --tol'),
            RecoverySuggestion.REPORT_BUG: ('report_bug', 'Report the command and input file'),
        }
        recovery = FailureHandler.RECOVERY_MAP.get(scenario, FailureHandler._UNEXPECTED)
        return [
            {'action': actions[s][0], 'description': actions[s][1]}
            for s in recovery['suggestions']
        ]
