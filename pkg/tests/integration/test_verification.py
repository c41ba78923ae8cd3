"""
Integration tests for the acceptance suite
"""
import json
import sys

import pytest
from loguru import logger

from qnd_lab.cli import EXIT_VERIFICATION, main
from qnd_lab.models.scenario_models import VerifyLevel
from qnd_lab.services import bath_kernels
from qnd_lab.services.verification import CHECKS, run_verify

pytestmark = pytest.mark.integration


class TestQuickSuite:
    """Test the quick verification level"""

    def test_quick_suite_passes(self, tmp_path):
        report_path = tmp_path / "report.json"
        report = run_verify(VerifyLevel.QUICK, report=str(report_path))
        assert report.passed, report.summary()
        assert [c.name for c in report.criteria] == [name for name, _ in CHECKS]
        assert all(c.elapsed_s >= 0 for c in report.criteria)
        assert json.loads(report_path.read_text())["passed"] is True

    def test_flipped_rate_sign_is_caught(self, mocker):
        """Test a sign error in the zero-temperature rate fails the long-time criterion"""
        original = bath_kernels._gamma_dot_zero
        mocker.patch.object(bath_kernels, "_gamma_dot_zero", side_effect=lambda ts, spec: -original(ts, spec))
        report = run_verify(VerifyLevel.QUICK, only=["long_time_asymptotes", "thermal_limit_regression"])
        assert report.failed == ["long_time_asymptotes"]

    def test_raising_check_is_reported(self, mocker):
        mocker.patch.object(bath_kernels, "longtime_limits", side_effect=ArithmeticError("overflow"))
        report = run_verify(VerifyLevel.QUICK, only=["long_time_asymptotes"])
        assert not report.passed
        assert "ArithmeticError" in report.criteria[0].detail

    def test_cli_exit_code_on_failure(self, mocker):
        original = bath_kernels._gamma_dot_zero
        mocker.patch.object(bath_kernels, "_gamma_dot_zero", side_effect=lambda ts, spec: -original(ts, spec))
        try:
            assert main(["verify", "--only", "long_time_asymptotes"]) == EXIT_VERIFICATION
        finally:
            logger.remove()
            logger.add(sys.stderr)


@pytest.mark.slow
class TestFullSuite:
    """Test the full verification level"""

    def test_full_suite_passes(self):
        report = run_verify(VerifyLevel.FULL)
        assert report.passed, report.summary()
