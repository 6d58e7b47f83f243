import pytest

from src.utils.error_handler import (
    EXIT_CONFIG, EXIT_FAILURE, EXIT_NON_CONVERGENCE, EXIT_REPRODUCTION, ConfigError, DomainError,
    ErrorHandler, ErrorSeverity, NonConvergenceError, ReproductionError, ScaledOverflowError,
)


@pytest.mark.parametrize("error,error_type,exit_code", [
    (ConfigError("bad", field_name="quad.rel_tol"), "config_error", EXIT_CONFIG),
    (NonConvergenceError("stalled", refinement_ratio=0.9), "non_convergence", EXIT_NON_CONVERGENCE),
    (ReproductionError("out of band"), "reproduction_failure", EXIT_REPRODUCTION),
    (ScaledOverflowError("too big"), "scaled_overflow", EXIT_FAILURE),
    (DomainError("q < 0"), "domain_error", EXIT_FAILURE),
    (RuntimeError("boom"), "unknown_error", EXIT_FAILURE),
])
def test_classification_and_exit_codes(error, error_type, exit_code):
    issue = ErrorHandler().handle_error(error, component="test")
    assert issue.error_type == error_type
    assert issue.exit_code == exit_code
    assert issue.recovery_action


def test_context_carries_error_details():
    handler = ErrorHandler()
    config_issue = handler.handle_error(ConfigError("bad", field_name="cosmo.eps_inf", line=3), "config")
    assert config_issue.context == {"field": "cosmo.eps_inf", "line": 3}
    stalled = handler.handle_error(NonConvergenceError("stalled", refinement_ratio=0.9), "spectrum")
    assert stalled.context["refinement_ratio"] == 0.9
    assert stalled.severity is ErrorSeverity.HIGH


def test_summary_counts_history():
    handler = ErrorHandler()
    for error in (DomainError("a"), DomainError("b"), RuntimeError("c")):
        handler.handle_error(error, "kernels")
    summary = handler.get_error_summary()
    assert summary["total"] == 3
    assert summary["by_type"] == {"domain_error": 2, "unknown_error": 1}
    assert summary["by_severity"][ErrorSeverity.CRITICAL.value] == 1
