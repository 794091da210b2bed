"""
Flow Logging System - request tracing for solver runs.

Logs every decorated call with:
- Function name and purpose
- Summarized input values (arrays as shape/min/max)
- Summarized output values
- Execution time
- Error details if applicable

Writes to LOG_DIR/flow.log. Nothing is ever written to stdout: stdout carries
the CLI's machine-readable output.
"""

import functools
import inspect
import json
import logging
import time
import traceback
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np
from pydantic import BaseModel

from config import config

# Current session ID (set when a CLI invocation starts)
_current_session_id: Optional[str] = None
_session_start_time: Optional[datetime] = None


class LogLevel(str, Enum):
    """Log levels for different severity."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    SUCCESS = "SUCCESS"
    WARNING = "WARNING"
    ERROR = "ERROR"


class FlowLogger:
    """Flow logging for run tracing."""

    def __init__(self, log_file: Optional[Path] = None, enabled: bool = True):
        """Initialize flow logger."""
        self.log_file = log_file or Path(config.LOG_DIR) / "flow.log"
        self.enabled = enabled
        self.logger = logging.getLogger("yamabe.flow")
        self._setup_logger()

    def _setup_logger(self):
        """Setup logger with file handler."""
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        # Remove existing handlers
        self.logger.handlers.clear()

        if not self.enabled:
            self.logger.addHandler(logging.NullHandler())
            return

        self.log_file.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(self.log_file, mode="a", encoding="utf-8")
        handler.setLevel(logging.DEBUG)

        # Format: timestamp | level | message
        formatter = logging.Formatter(
            "%(asctime)s | %(levelname)-8s | %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
        handler.setFormatter(formatter)
        self.logger.addHandler(handler)

    def log(
        self,
        level: LogLevel,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        session_id: Optional[str] = None,
    ):
        """Log a message with optional details."""
        log_msg = message

        sid = session_id or _current_session_id
        if sid:
            log_msg = f"[{sid[:8]}] {message}"

        if details:
            try:
                details_str = json.dumps(details, indent=2, default=str)
                log_msg += f"\n{details_str}"
            except (TypeError, ValueError) as e:
                log_msg += f"\n[Details serialization failed: {e}]"

        log_level_map = {
            LogLevel.DEBUG: logging.DEBUG,
            LogLevel.INFO: logging.INFO,
            LogLevel.SUCCESS: logging.INFO,
            LogLevel.WARNING: logging.WARNING,
            LogLevel.ERROR: logging.ERROR,
        }

        self.logger.log(log_level_map[level], log_msg)

    def log_function_start(
        self,
        function_name: str,
        purpose: str,
        inputs: Dict[str, Any],
        session_id: Optional[str] = None,
    ):
        """Log function entry."""
        message = f"→ ENTER: {function_name} | {purpose}"
        details = {"inputs": self._sanitize(inputs)} if config.FLOW_LOG_INPUTS else None
        self.log(LogLevel.INFO, message, details, session_id)

    def log_function_end(
        self,
        function_name: str,
        output: Any,
        execution_time: float,
        session_id: Optional[str] = None,
    ):
        """Log function exit with output."""
        message = f"← EXIT: {function_name} | {execution_time:.3f}s"
        details = {"output": self._sanitize(output)} if config.FLOW_LOG_INPUTS else None
        self.log(LogLevel.SUCCESS, message, details, session_id)

    def log_function_error(
        self,
        function_name: str,
        error: Exception,
        execution_time: float,
        session_id: Optional[str] = None,
    ):
        """Log function error."""
        message = f"✗ ERROR in {function_name} | {execution_time:.3f}s"
        details = {
            "error_type": type(error).__name__,
            "error_message": str(error),
            "traceback": traceback.format_exc(),
        }
        self.log(LogLevel.ERROR, message, details, session_id)

    def log_step(
        self,
        step_name: str,
        description: str,
        details: Optional[Dict[str, Any]] = None,
        session_id: Optional[str] = None,
    ):
        """Log a processing step."""
        message = f"◆ STEP: {step_name} | {description}"
        self.log(LogLevel.INFO, message, details, session_id)

    @staticmethod
    def _sanitize(obj: Any, max_depth: int = 2, current_depth: int = 0) -> Any:
        """Summarize an object for JSON serialization."""
        if isinstance(obj, np.ndarray):
            if obj.size == 0:
                return f"<ndarray shape={obj.shape}>"
            return f"<ndarray shape={obj.shape} min={obj.min():.6g} max={obj.max():.6g}>"

        if isinstance(obj, np.generic):
            return obj.item()

        if current_depth >= max_depth:
            return f"<{type(obj).__name__}>"

        if obj is None or isinstance(obj, (str, int, float, bool)):
            return obj

        if isinstance(obj, (list, tuple)):
            head = [FlowLogger._sanitize(item, max_depth, current_depth + 1) for item in obj[:3]]
            if len(obj) > 3:
                head.append(f"... ({len(obj)} items)")
            return head

        if isinstance(obj, dict):
            return {
                str(k): FlowLogger._sanitize(v, max_depth, current_depth + 1)
                for k, v in list(obj.items())[:6]
            }

        if isinstance(obj, BaseModel):
            return {
                name: FlowLogger._sanitize(getattr(obj, name), max_depth, current_depth + 1)
                for name in list(type(obj).model_fields)[:6]
            }

        return f"<{type(obj).__name__}>"


# Global logger instance
_flow_logger: Optional[FlowLogger] = None


def get_flow_logger() -> FlowLogger:
    """Get or create global flow logger."""
    global _flow_logger
    if _flow_logger is None:
        _flow_logger = FlowLogger(enabled=config.FLOW_LOGGING_ENABLED)
    return _flow_logger


def reset_flow_logger():
    """Drop the global flow logger (tests re-point LOG_DIR)."""
    global _flow_logger
    _flow_logger = None


def set_session_id(session_id: str):
    """Set current session ID for logging."""
    global _current_session_id, _session_start_time
    _current_session_id = session_id
    _session_start_time = datetime.now()
    get_flow_logger().log(LogLevel.INFO, "═════════ RUN START ═════════", session_id=session_id)


def end_session():
    """End current session and log its duration."""
    global _current_session_id, _session_start_time
    if _current_session_id and _session_start_time:
        duration = (datetime.now() - _session_start_time).total_seconds()
        get_flow_logger().log(
            LogLevel.INFO,
            "═════════ RUN END ═════════",
            {"total_duration_seconds": duration},
            session_id=_current_session_id,
        )
    _current_session_id = None
    _session_start_time = None


def function_logger(purpose: str = ""):
    """
    Decorator for logging function calls with inputs and outputs.

    Works on plain and async functions; for coroutines the end entry is written
    when the awaited call finishes.

    Args:
        purpose: Human-readable description of function purpose

    Usage:
        @function_logger("Solve instance")
        def solve(inst, cfg):
            ...
    """
    def decorator(func: Callable) -> Callable:
        function_name = func.__qualname__
        func_purpose = purpose or (func.__doc__ or "").strip().split("\n")[0]

        def start(args, kwargs):
            # Skip 'self' for methods
            call_args = args
            if args and "." in function_name and hasattr(type(args[0]), func.__name__):
                call_args = args[1:]

            inputs: Dict[str, Any] = {f"arg{i}": arg for i, arg in enumerate(call_args)}
            inputs.update(kwargs)
            get_flow_logger().log_function_start(function_name, func_purpose, inputs, _current_session_id)
            return time.perf_counter()

        def failed(e: Exception, start_time: float):
            get_flow_logger().log_function_error(
                function_name, e, time.perf_counter() - start_time, _current_session_id
            )

        def finished(result: Any, start_time: float):
            get_flow_logger().log_function_end(
                function_name, result, time.perf_counter() - start_time, _current_session_id
            )

        if inspect.iscoroutinefunction(func):
            @functools.wraps(func)
            async def async_wrapper(*args, **kwargs):
                start_time = start(args, kwargs)
                try:
                    result = await func(*args, **kwargs)
                except Exception as e:
                    failed(e, start_time)
                    raise
                finished(result, start_time)
                return result

            return async_wrapper

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = start(args, kwargs)
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                failed(e, start_time)
                raise
            finished(result, start_time)
            return result

        return wrapper

    return decorator


# Convenience wrapper
def log_step(step_name: str, description: str, details: Optional[Dict[str, Any]] = None):
    """Log a processing step."""
    get_flow_logger().log_step(step_name, description, details, _current_session_id)

