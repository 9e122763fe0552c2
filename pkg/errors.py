"""
Spread Option Error Handling - exception hierarchy, severity ledger and CLI exit codes
Every failure a pricer can raise maps to a severity, a log level and a process exit code
"""

import functools
import logging
import random
import sys
import threading
import time
import traceback
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)


class ErrorSeverity(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class SpreadOptionError(Exception):
    """Base class for every error raised by the pricing library"""

    severity = ErrorSeverity.MEDIUM
    exit_code = 1


class DomainError(SpreadOptionError, ValueError):
    """Input outside a method's domain (precondition or invariant violated)"""


class ContractError(DomainError):
    """A contract or quote failed its invariants at construction"""


class DegenerateTransformError(DomainError):
    """A transform divides by a vanishing volatility"""


class ConfigError(SpreadOptionError, ValueError):
    """Invalid configuration value or config-file key; a usage error on the command line"""

    exit_code = 2


class ConvergenceError(SpreadOptionError):
    """Optimizer failed to meet its first-order tolerance"""

    severity = ErrorSeverity.HIGH

    def __init__(self, message: str, best_point: Optional[Tuple[float, float]] = None,
                 best_value: Optional[float] = None, residual: Optional[float] = None):
        super().__init__(message)
        self.best_point = best_point
        self.best_value = best_value
        self.residual = residual


class AccuracyError(SpreadOptionError):
    """Quadrature did not reach the requested absolute tolerance"""

    severity = ErrorSeverity.HIGH

    def __init__(self, message: str, estimate: Optional[float] = None,
                 error_estimate: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


@dataclass
class ErrorInfo:
    """Detailed error information"""
    error_id: str
    error_type: str
    message: str
    severity: ErrorSeverity
    timestamp: datetime
    component: str
    context: Dict[str, Any] = field(default_factory=dict)
    stack_trace: Optional[str] = None


class ErrorLedger:
    """Records handled errors and logs them by severity"""

    def __init__(self):
        self.error_log: List[ErrorInfo] = []
        self.error_stats: Dict[str, int] = {}
        # table cells report failures from worker threads
        self._lock = threading.Lock()

    def handle_error(self, error: Exception, component: str,
                     context: Dict[str, Any] = None) -> ErrorInfo:
        """Record an error and log it at the level its severity calls for"""
        error_info = ErrorInfo(
            error_id=f"err_{int(time.time())}_{random.randint(1000, 9999)}",
            error_type=type(error).__name__,
            message=str(error),
            severity=determine_severity(error),
            timestamp=datetime.now(),
            component=component,
            context=context or {},
            stack_trace=traceback.format_exc(),
        )

        with self._lock:
            self.error_log.append(error_info)
            self.error_stats[error_info.error_type] = self.error_stats.get(error_info.error_type, 0) + 1

        if error_info.severity == ErrorSeverity.CRITICAL:
            logger.critical(f"💀 CRITICAL ERROR in {component}: {error_info.message}")
        elif error_info.severity == ErrorSeverity.HIGH:
            logger.error(f"🚨 HIGH SEVERITY ERROR in {component}: {error_info.message}")
        elif error_info.severity == ErrorSeverity.MEDIUM:
            logger.warning(f"⚠️ MEDIUM SEVERITY ERROR in {component}: {error_info.message}")
        else:
            logger.info(f"ℹ️ LOW SEVERITY ERROR in {component}: {error_info.message}")

        return error_info

    def get_error_statistics(self) -> Dict[str, Any]:
        """Counts by type and severity"""
        with self._lock:
            return {
                "total_errors": len(self.error_log),
                "error_types": dict(self.error_stats),
                "severity_breakdown": {
                    severity.value: len([e for e in self.error_log if e.severity == severity])
                    for severity in ErrorSeverity
                },
            }

    def clear(self):
        with self._lock:
            self.error_log.clear()
            self.error_stats.clear()


def determine_severity(error: Exception) -> ErrorSeverity:
    """Severity of an exception; library errors carry their own"""
    if isinstance(error, SpreadOptionError):
        return error.severity
    if isinstance(error, (SystemExit, KeyboardInterrupt, MemoryError)):
        return ErrorSeverity.CRITICAL
    if isinstance(error, (ArithmeticError, FloatingPointError)):
        return ErrorSeverity.HIGH
    if isinstance(error, (ValueError, TypeError)):
        return ErrorSeverity.MEDIUM
    return ErrorSeverity.LOW


def exit_code_for(error: Exception) -> int:
    """Process exit code for an error escaping a CLI command"""
    return getattr(error, "exit_code", 1)


def with_error_handling(component: str):
    """Decorator for CLI commands: log through the ledger, print, exit with the error's code"""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except SpreadOptionError as e:
                get_error_ledger().handle_error(e, component, context={"function": func.__name__})
                print(f"Error: {e}", file=sys.stderr)
                sys.exit(exit_code_for(e))

        return wrapper
    return decorator


# Global ledger instance
_error_ledger = None


def get_error_ledger() -> ErrorLedger:
    """Get the global error ledger instance"""
    global _error_ledger
    if _error_ledger is None:
        _error_ledger = ErrorLedger()
    return _error_ledger
