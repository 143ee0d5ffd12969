import pytest

from app.exceptions import ConfigurationError
from app.schemas.verification import CheckResult, SuiteResult, VerifyReport, VerifyScale
from app.services import verification_service
from app.services.verification_service import SLOPE_THRESHOLDS, VerificationService

SEED = 20240501


@pytest.fixture(scope="module")
def quick():
    return VerifyScale.quick().model_copy(update={"discretization_sequences": 5, "benchmark_sequences": 10,
                                                  "bruteforce_sequences": 10, "estimator_Ks": [4]})


def _assert_passed(result: SuiteResult):
    failed = [(c.name, c.lhs, c.rhs, c.detail) for c in result.failed]
    assert not failed, failed
    assert result.checks


def test_discretization_suite(quick):
    result = VerificationService.run_suite("discretization", SEED, quick)
    _assert_passed(result)
    names = {c.name for c in result.checks}
    assert {"additive-revenue-T64-K4", "multiplicative-loge-T64-K4", "multiplicative-log2-T64-K4"} <= names


def test_estimator_suite(quick):
    result = VerificationService.run_suite("estimator", SEED, quick)
    _assert_passed(result)
    literal = next(c for c in result.checks if c.name == "estimator-literal-bias-K4")
    assert literal.informational and not literal.passed


def test_benchmarks_suite(quick):
    _assert_passed(VerificationService.run_suite("benchmarks", SEED, quick))


@pytest.mark.slow
def test_lb_structure_suite(quick):
    result = VerificationService.run_suite("lb-structure", SEED, quick, N=33)
    _assert_passed(result)
    names = {c.name for c in result.checks}
    assert "N33-k1-a-argmax" in names and "N33-k31-d-feedback-invariance" in names


@pytest.mark.slow
def test_budget_suite(quick):
    scale = quick.model_copy(update={"budget_runs": 1, "budget_T": 256})
    _assert_passed(VerificationService.run_suite("budget", SEED, scale, workers=1))


def test_unknown_suite(quick):
    with pytest.raises(ConfigurationError):
        VerificationService.run_suite("other", SEED, quick)


def test_report_exit_code():
    ok = CheckResult(name="ok", passed=True)
    info = CheckResult(name="info", passed=False, informational=True)
    bad = CheckResult(name="bad", passed=False)
    report = VerifyReport(seed=1, suites=[SuiteResult(suite="a", checks=[ok, info])])
    assert report.passed and report.exit_code == 0
    report.suites.append(SuiteResult(suite="b", checks=[bad]))
    assert report.exit_code == 1
    assert report.summary() == {"seed": 1, "checks": 3, "failed": 1, "passed": False}


def test_reports_are_deterministic(quick):
    first = VerificationService.verify("benchmarks", SEED, quick)
    second = VerificationService.verify("benchmarks", SEED, quick)
    assert first.model_dump_json() == second.model_dump_json()


def test_slopes_suite_reports_both_presets(quick):
    scale = quick.model_copy(update={"slope_reps": 2})
    result = VerificationService.run_suite("slopes", SEED, scale, workers=1)
    _assert_passed(result)
    assert [c.name for c in result.checks] == [
        "slope-full", "regret-curve-full", "slope-one-bit", "regret-curve-one-bit",
    ]
    for preset, threshold in SLOPE_THRESHOLDS.items():
        slope = next(c for c in result.checks if c.name == f"slope-{preset}")
        assert slope.informational
        assert slope.lhs is not None and slope.rhs == threshold


def test_enforced_slope_threshold_fails_the_suite(quick, monkeypatch):
    monkeypatch.setitem(verification_service.SLOPE_THRESHOLDS, "full", -1.0)
    scale = quick.model_copy(update={"slope_reps": 2, "slope_enforced": True})
    result = VerificationService.run_suite("slopes", SEED, scale, workers=1)
    assert "slope-full" in {c.name for c in result.failed}


@pytest.mark.slow
def test_regret_slopes_at_full_scale():
    scale = VerifyScale()
    assert scale.slope_horizons == [256, 1024, 4096, 16384]
    assert scale.slope_reps == 50
    result = VerificationService.run_suite("slopes", SEED, scale)
    _assert_passed(result)
    for preset, threshold in SLOPE_THRESHOLDS.items():
        slope = next(c for c in result.checks if c.name == f"slope-{preset}")
        assert not slope.informational
        assert slope.lhs <= threshold
