import pytest

from src.core.reproduce import ReproductionReport, run_reproduce
from src.core.spectrum import CslParams, QuadratureConfig
from src.utils.error_handler import NonConvergenceError, ReproductionError


def test_headline_numbers_fall_in_their_bands(fiducial, csl):
    report = run_reproduce(fiducial, csl, with_quadrature=False)
    assert report.passed
    assert len(report.rows) == 5
    assert report.extras["delta_p_inflation"] == pytest.approx(1.0453e-34, rel=1e-3)
    assert report.extras["delta_p_radiation"] == pytest.approx(4.4984e-82, rel=1e-3)
    assert report.extras["lambda_max_si"] == pytest.approx(9.5668e6, rel=1e-3)
    assert report.extras["linear_log10_delta_p"] == pytest.approx(320.284, abs=1e-2)
    assert report.extras["perturbativity_ratio"] < 1e-20


def test_quoted_at_the_reference_rate(fiducial, csl):
    boosted = run_reproduce(fiducial, csl.with_lambda(1e-8), with_quadrature=False)
    assert boosted.extras["delta_p_inflation"] == pytest.approx(1.0453e-34, rel=1e-3)


def test_strict_failure_carries_the_report(fiducial):
    csl = CslParams(lambda_si=1e-10, lambda_grw_si=1e-10)
    with pytest.raises(ReproductionError) as info:
        run_reproduce(fiducial, csl, with_quadrature=False)
    report = info.value.report
    assert isinstance(report, ReproductionReport)
    failed = [row.name for row in report.rows if not row.passed]
    assert "inflation |delta P| at lambda_GRW" in failed
    assert "lambda_max [s^-1]" not in failed


def test_lenient_mode_returns_the_report(fiducial):
    report = run_reproduce(fiducial, CslParams(lambda_grw_si=1e-10), with_quadrature=False, strict=False)
    assert not report.passed
    frame = report.as_frame()
    assert list(frame.columns) == ["name", "value", "lower", "upper", "passed", "note"]
    assert report.as_dict()["passed"] is False


@pytest.mark.slow
def test_quadrature_cross_checks(fiducial, csl):
    report = run_reproduce(fiducial, csl, threads=2)
    assert report.passed
    assert report.extras["inflation_four_term_shift"] < 0.05


def test_stalled_cross_check_is_not_a_reproduction_failure(fiducial, csl, monkeypatch):
    seen = []

    def stalled(era, variant, params, csl, quad, threads):
        seen.append(quad)
        raise NonConvergenceError("stalled", refinement_ratio=0.6)

    monkeypatch.setattr("src.core.reproduce.delta_r2_numeric", stalled)
    with pytest.raises(NonConvergenceError):
        run_reproduce(fiducial, csl, QuadratureConfig(q_points=2, max_levels=2))
    assert seen[0].q_points == 2 and seen[0].max_levels == 2
    assert seen[0].leading_terms == 2
