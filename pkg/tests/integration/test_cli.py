"""
Integration tests for the command-line front end
"""
import json
import sys

import pandas as pd
import pytest
from loguru import logger

from qnd_lab.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main, read_config_file
from qnd_lab.core.config import settings
from qnd_lab.services.composite_oracle import displacement_matrix, squeezed_thermal_mode
from qnd_lab.utils import TruncationError, ValidationFailure

pytestmark = pytest.mark.integration

KERNEL_FLAGS = ["--gamma0", "0.1", "--omega-c", "50", "--t-max", "1", "--points", "5"]


@pytest.fixture(autouse=True)
def restore_logging():
    """main() reconfigures loguru against the captured stderr; put the default sink back"""
    yield
    logger.remove()
    logger.add(sys.stderr)


def _write_ini(path, body: str):
    path.write_text(body)
    return str(path)


class TestSweepCommands:
    """Test kernels, entropy, bloch and qfunc subcommands"""

    def test_kernels(self, tmp_path, capsys):
        out = tmp_path / "k.csv"
        assert main(["kernels", *KERNEL_FLAGS, "--out", str(out)]) == EXIT_OK
        assert str(out) in capsys.readouterr().out
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["t", "eta", "eta_dot", "gamma", "gamma_dot"]
        assert len(frame) == 5

    def test_entropy_defaults_to_oscillator(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["entropy", *KERNEL_FLAGS, "--alpha-sq", "2", "--out", str(out)]) == EXIT_OK
        assert list(pd.read_csv(out).columns) == ["t", "S", "C"]

    def test_bloch_cloud(self, tmp_path):
        out = tmp_path / "cloud.csv"
        code = main(["bloch", *KERNEL_FLAGS, "--channel", "lindblad", "--temp-mode", "exact", "--T", "5",
                     "--r", "0.4", "--Phi", "1.5", "--cloud-t", "0.15", "--cloud-n-theta", "4",
                     "--cloud-n-phi", "4", "--out", str(out)])
        assert code == EXIT_OK
        assert len(pd.read_csv(out)) == 16

    def test_qfunc(self, tmp_path):
        out = tmp_path / "q.csv"
        code = main(["qfunc", "--gamma0", "0.1", "--omega-c", "50", "--alpha-sq", "1", "--t-max", "1",
                     "--points", "2", "--n-xi", "9", "--n-theta", "8", "--out", str(out)])
        assert code == EXIT_OK
        assert sorted(p.name for p in tmp_path.iterdir()) == ["q_t000.csv", "q_t001.csv"]

    def test_custom_energies(self, tmp_path):
        out = tmp_path / "c.csv"
        code = main(["entropy", *KERNEL_FLAGS, "--system", "custom", "--energies", "0,1,3", "--out", str(out)])
        assert code == EXIT_OK


class TestExitCodes:
    """Test error mapping to exit statuses"""

    def test_invalid_parameter(self, tmp_path):
        assert main(["kernels", "--gamma0", "-1", "--omega-c", "50", "--t-max", "1",
                     "--out", str(tmp_path / "x.csv")]) == EXIT_VALIDATION

    def test_missing_required_section(self, tmp_path):
        assert main(["kernels", "--gamma0", "0.1", "--omega-c", "50",
                     "--out", str(tmp_path / "x.csv")]) == EXIT_VALIDATION

    def test_closed_form_domain(self, tmp_path):
        """Test t <= 2a with a closed-form mode is a validation failure"""
        assert main(["kernels", *KERNEL_FLAGS, "--a", "0.5", "--out", str(tmp_path / "x.csv")]) == EXIT_VALIDATION

    def test_truncation_is_numerical(self, tmp_path):
        code = main(["entropy", *KERNEL_FLAGS, "--alpha-sq", "5", "--n-max", "5", "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_NUMERICAL

    def test_unknown_figure(self, tmp_path):
        assert main(["figure", "fig9", "--out", str(tmp_path)]) == EXIT_VALIDATION

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["plot"])
        assert exc_info.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])
        assert exc_info.value.code == 0
        assert f"{settings.APP_NAME} {settings.VERSION}" in capsys.readouterr().out

    def test_debug_setting_forces_debug_logging(self, tmp_path, monkeypatch, mocker):
        monkeypatch.setattr(settings, "DEBUG", True)
        setup = mocker.patch("qnd_lab.cli.setup_logging")
        main(["--log-level", "ERROR", "kernels", *KERNEL_FLAGS, "--out", str(tmp_path / "k.csv")])
        assert setup.call_args.args[0] == "DEBUG"

    def test_truncation_tolerance_setting(self, monkeypatch):
        monkeypatch.setattr(settings, "TRUNCATION_TOL", 1e-30)
        with pytest.raises(TruncationError):
            displacement_matrix(0.5, 20)
        with pytest.raises(TruncationError):
            squeezed_thermal_mode(1.0, 0.3, 0.0, 1.0, 25)


class TestConfigFiles:
    """Test INI configuration and flag precedence"""

    def test_flags_override_file(self, tmp_path):
        ini = _write_ini(tmp_path / "run.ini", "[bath]\ngamma0 = 0.1\nomega_c = 50\n\n[time]\nt_max = 1\npoints = 3\n")
        out = tmp_path / "k.csv"
        assert main(["kernels", "--config", ini, "--points", "7", "--out", str(out)]) == EXIT_OK
        assert len(pd.read_csv(out)) == 7

    def test_file_alone(self, tmp_path):
        ini = _write_ini(tmp_path / "run.ini",
                         "[bath]\ngamma0 = 0.1\nomega_c = 50\nr = 0.4\ntemp_mode = high\nT = 300\n\n"
                         "[time]\nt_max = 0.5\npoints = 4\n\n[output]\nscenario = hot\n")
        out = tmp_path / "hot.csv"
        assert main(["kernels", "--config", ini, "--out", str(out)]) == EXIT_OK
        assert len(pd.read_csv(out)) == 4

    def test_case_kept(self, tmp_path):
        ini = _write_ini(tmp_path / "run.ini", "[channel]\nPhi = 1.5\n")
        assert read_config_file(ini) == {"Phi": "1.5"}

    def test_unknown_key(self, tmp_path):
        ini = _write_ini(tmp_path / "run.ini", "[bath]\ngamma = 0.1\n")
        with pytest.raises(ValidationFailure):
            read_config_file(ini)
        assert main(["kernels", "--config", ini]) == EXIT_VALIDATION

    def test_missing_file(self, tmp_path):
        assert main(["kernels", "--config", str(tmp_path / "absent.ini")]) == EXIT_VALIDATION


class TestVerifyCommand:
    """Test the verify subcommand"""

    def test_single_criterion(self, tmp_path, capsys):
        report = tmp_path / "report.json"
        code = main(["verify", "--only", "thermal_limit_regression", "--report", str(report)])
        assert code == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert printed["passed"] is True
        assert json.loads(report.read_text())["criteria"][0]["name"] == "thermal_limit_regression"

    def test_unknown_criterion(self):
        assert main(["verify", "--only", "no_such_check"]) == EXIT_VALIDATION
