# src/utils/error_handler.py
"""
CSL Cosmology Error Handling
Exception hierarchy, severity classification and exit-code mapping
"""

import logging
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional


class CSLCosmoError(Exception):
    """Base class for every error raised by the library"""


class DomainError(CSLCosmoError, ValueError):
    """Argument outside the domain of a physical formula"""


class ConfigError(CSLCosmoError):
    """Configuration could not be parsed or validated"""

    def __init__(self, message: str, field_name: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.field_name = field_name
        self.line = line
        self.column = column


class NonConvergenceError(CSLCosmoError):
    """Quadrature refinement did not reach the requested tolerance"""

    def __init__(self, message: str, partial_result: Any = None,
                 refinement_ratio: Optional[float] = None):
        super().__init__(message)
        self.partial_result = partial_result
        self.refinement_ratio = refinement_ratio


class ScaledOverflowError(CSLCosmoError, OverflowError):
    """A scaled value does not fit in a double"""


class IntegrationError(CSLCosmoError):
    """Time integration lost a conserved quantity"""


class ReproductionError(CSLCosmoError):
    """A headline number fell outside its accepted band"""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class ErrorSeverity(Enum):
    """Error severity levels"""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


# process exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NON_CONVERGENCE = 3
EXIT_REPRODUCTION = 4


@dataclass
class CSLCosmoIssue:
    """Structured error information"""
    error_type: str
    message: str
    severity: ErrorSeverity
    component: str
    timestamp: str
    exit_code: int
    context: Dict[str, Any] = field(default_factory=dict)
    recovery_action: Optional[str] = None


class ErrorHandler:
    """
    Central error handling for the command-line front end.
    Classifies exceptions, logs them at the matching level and picks the exit code.
    """

    _EXIT_CODES = {
        "config_error": EXIT_CONFIG,
        "non_convergence": EXIT_NON_CONVERGENCE,
        "reproduction_failure": EXIT_REPRODUCTION,
    }

    _RECOVERY = {
        "config_error": "Check the named field against docs/SETUP.md",
        "domain_error": "Check the argument ranges of the requested operation",
        "non_convergence": "Raise points_per_decade or max_levels, or loosen rel_tol",
        "scaled_overflow": "Read the mantissa/exponent pair instead of the float value",
        "integration_error": "Reduce the time step of the master-equation integrator",
        "reproduction_failure": "Compare the report against the configured fiducials",
        "file_not_found": "Verify file path and permissions",
        "unknown_error": "Check logs for detailed error information",
    }

    def __init__(self):
        self.logger = logging.getLogger("CSLCosmo.ErrorHandler")
        self.error_history: List[CSLCosmoIssue] = []

    def handle_error(self, error: Exception, component: str,
                     context: Optional[Dict[str, Any]] = None) -> CSLCosmoIssue:
        """
        Classify, log and record an exception

        Args:
            error: The exception that occurred
            component: Component where the error occurred
            context: Additional context information

        Returns:
            Structured error information including the exit code
        """
        error_type = self._classify_error(error)
        severity = self._determine_severity(error_type)
        extra = dict(context or {})
        if isinstance(error, ConfigError):
            extra.update({k: v for k, v in (("field", error.field_name), ("line", error.line),
                                            ("column", error.column)) if v is not None})
        if isinstance(error, NonConvergenceError) and error.refinement_ratio is not None:
            extra["refinement_ratio"] = error.refinement_ratio

        issue = CSLCosmoIssue(
            error_type=error_type,
            message=str(error),
            severity=severity,
            component=component,
            timestamp=datetime.now().isoformat(),
            exit_code=self._EXIT_CODES.get(error_type, EXIT_FAILURE),
            context=extra,
            recovery_action=self._RECOVERY.get(error_type, self._RECOVERY["unknown_error"]),
        )
        self._log_error(issue)
        self.error_history.append(issue)
        return issue

    def _classify_error(self, error: Exception) -> str:
        if isinstance(error, ConfigError):
            return "config_error"
        if isinstance(error, NonConvergenceError):
            return "non_convergence"
        if isinstance(error, ReproductionError):
            return "reproduction_failure"
        if isinstance(error, ScaledOverflowError):
            return "scaled_overflow"
        if isinstance(error, IntegrationError):
            return "integration_error"
        if isinstance(error, DomainError):
            return "domain_error"
        if isinstance(error, (FileNotFoundError, PermissionError)):
            return "file_not_found"
        return "unknown_error"

    def _determine_severity(self, error_type: str) -> ErrorSeverity:
        if error_type == "unknown_error":
            return ErrorSeverity.CRITICAL
        if error_type in ("non_convergence", "reproduction_failure", "integration_error"):
            return ErrorSeverity.HIGH
        if error_type in ("config_error", "file_not_found", "scaled_overflow"):
            return ErrorSeverity.MEDIUM
        return ErrorSeverity.LOW

    def _log_error(self, issue: CSLCosmoIssue):
        log_message = f"{issue.component}: {issue.message}"
        if issue.severity == ErrorSeverity.CRITICAL:
            self.logger.critical(log_message)
        elif issue.severity == ErrorSeverity.HIGH:
            self.logger.error(log_message)
        elif issue.severity == ErrorSeverity.MEDIUM:
            self.logger.warning(log_message)
        else:
            self.logger.info(log_message)

    def get_error_summary(self) -> Dict[str, Any]:
        """Counts of recorded issues by type and severity"""
        by_type: Dict[str, int] = {}
        by_severity: Dict[str, int] = {}
        for issue in self.error_history:
            by_type[issue.error_type] = by_type.get(issue.error_type, 0) + 1
            by_severity[issue.severity.value] = by_severity.get(issue.severity.value, 0) + 1
        return {"total": len(self.error_history), "by_type": by_type, "by_severity": by_severity}
