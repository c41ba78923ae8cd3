"""
Unit tests for parameter models and validation
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from qnd_lab.models.bath_models import BathSpec, DiscreteBathSpec, BathMode, TemperatureMode
from qnd_lab.models.oracle_models import CompositeScenario
from qnd_lab.models.scenario_models import (
    CriterionResult,
    Quantity,
    ScenarioConfig,
    SystemConfig,
    SystemKind,
    TimeGrid,
    VerificationReport,
    VerifyLevel,
)
from qnd_lab.models.system_models import (
    BlochVector,
    EnergyBasisDensityMatrix,
    LindbladParams,
    PureState,
    SystemSpectrum,
    TwoLevelInitial,
)

pytestmark = pytest.mark.unit


class TestBathSpec:
    """Test BathSpec validation"""

    def test_valid_bath(self):
        """Test creating a valid bath"""
        spec = BathSpec(gamma0=0.1, omega_c=50.0, r=-0.3)
        assert spec.temperature_mode == TemperatureMode.ZERO
        assert spec.temperature == 0.0

    def test_non_positive_coupling_rejected(self):
        """Test zero coupling is rejected"""
        with pytest.raises(ValidationError) as exc_info:
            BathSpec(gamma0=0.0, omega_c=50.0)
        assert "gamma0" in str(exc_info.value)

    def test_negative_phase_slope_rejected(self):
        with pytest.raises(ValidationError) as exc_info:
            BathSpec(gamma0=0.1, omega_c=50.0, a=-0.1)
        assert "greater than or equal" in str(exc_info.value)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            BathSpec(gamma0=0.1, omega_c=50.0, r=float('inf'))

    def test_hot_modes_need_temperature(self):
        """Test high and exact modes require T > 0"""
        for mode in (TemperatureMode.HIGH, TemperatureMode.EXACT):
            with pytest.raises(ValidationError) as exc_info:
                BathSpec(gamma0=0.1, omega_c=50.0, temperature_mode=mode)
            assert "T must be positive" in str(exc_info.value)

    def test_zero_mode_ignores_T(self):
        """Test mode zero reports zero temperature whatever T says"""
        assert BathSpec(gamma0=0.1, omega_c=50.0, T=300.0).temperature == 0.0

    def test_frozen(self, fig1_bath):
        with pytest.raises(ValidationError):
            fig1_bath.r = 0.5

    def test_discrete_bath_dimension(self):
        spec = DiscreteBathSpec(modes=[BathMode(omega=1.0, g=0.1), BathMode(omega=2.0, g=0.1)], n_max=9)
        assert spec.bath_dimension == 100

    def test_discrete_bath_minimum_truncation(self):
        with pytest.raises(ValidationError):
            DiscreteBathSpec(modes=[BathMode(omega=1.0, g=0.1)], n_max=2)


class TestSystemModels:
    """Test states, spectra and Bloch vectors"""

    def test_spectrum_rejects_nan(self):
        with pytest.raises(ValidationError):
            SystemSpectrum(energies=[1.0, float('nan')])

    def test_pure_state_must_be_normalized(self):
        """Test an unnormalized state is rejected"""
        with pytest.raises(ValueError) as exc_info:
            PureState(np.array([1.0, 1.0]))
        assert "normalized" in str(exc_info.value)

    def test_density_matrix_validation(self):
        bad = EnergyBasisDensityMatrix(np.array([[0.7, 0.8], [0.8, 0.7]]))
        problems = bad.validation_errors()
        assert any("trace" in p for p in problems)
        assert any("semidefinite" in p for p in problems)
        assert not bad.is_valid()

    def test_density_matrix_read_only(self, plus_state):
        rho = EnergyBasisDensityMatrix.from_pure_state(plus_state)
        with pytest.raises(ValueError):
            rho.entries[0, 0] = 1.0

    def test_density_matrix_must_be_square(self):
        with pytest.raises(ValueError):
            EnergyBasisDensityMatrix(np.ones((2, 3)))

    def test_initial_state_ranges(self):
        with pytest.raises(ValidationError):
            TwoLevelInitial(theta0=4.0)
        with pytest.raises(ValidationError):
            TwoLevelInitial(theta0=1.0, phi0=2 * math.pi)

    def test_bloch_ball(self):
        assert BlochVector(0.6, 0.0, 0.8).in_ball()
        assert not BlochVector(0.8, 0.0, 0.8).in_ball()

    def test_lindblad_params_bound(self):
        """Test |M|^2 > N(N+1) is rejected"""
        with pytest.raises(ValueError):
            LindbladParams(gamma0=0.6, r=0.0, Phi=0.0, omega=1.0, T=0.0, N_th=0.0, N=0.0, M=0.5, a_sq=0.0)


class TestScenarioModels:
    """Test scenario configuration"""

    def test_time_grid(self):
        grid = TimeGrid(t_min=1.0, t_max=2.0, points=3)
        np.testing.assert_allclose(grid.times(), [1.0, 1.5, 2.0])

    def test_time_grid_order(self):
        with pytest.raises(ValidationError) as exc_info:
            TimeGrid(t_min=2.0, t_max=1.0)
        assert "t_max" in str(exc_info.value)

    def test_custom_system_needs_energies(self):
        with pytest.raises(ValidationError):
            SystemConfig(kind=SystemKind.CUSTOM)

    def test_scenario_name_file_safe(self, fig1_bath):
        with pytest.raises(ValidationError):
            ScenarioConfig(scenario="a/b", bath=fig1_bath, time=TimeGrid(t_max=1.0))

    def test_qfunc_needs_oscillator(self, fig1_bath):
        with pytest.raises(ValidationError) as exc_info:
            ScenarioConfig(quantity=Quantity.QFUNC, bath=fig1_bath, time=TimeGrid(t_max=1.0))
        assert "oscillator" in str(exc_info.value)

    def test_bloch_needs_two_level(self, fig1_bath):
        with pytest.raises(ValidationError):
            ScenarioConfig(quantity=Quantity.BLOCH, bath=fig1_bath, time=TimeGrid(t_max=1.0),
                           system=SystemConfig(kind=SystemKind.OSCILLATOR))

    def test_nested_validation_from_dict(self):
        config = ScenarioConfig.model_validate({
            "quantity": "entropy",
            "bath": {"gamma0": 0.1, "omega_c": 50.0, "temperature_mode": "high", "T": 300.0},
            "system": {"kind": "oscillator", "alpha_sq": 2.0},
            "time": {"t_max": 0.5, "points": 11},
        })
        assert config.bath.temperature_mode == TemperatureMode.HIGH
        assert config.system.alpha_sq == 2.0

    def test_composite_scenario_times(self):
        with pytest.raises(ValidationError):
            CompositeScenario(name="x", bath=DiscreteBathSpec(modes=[BathMode(omega=1.0, g=0.1)]), times=[-1.0])


class TestVerificationReport:
    """Test report aggregation"""

    def test_summary(self):
        report = VerificationReport(level=VerifyLevel.QUICK, criteria=[
            CriterionResult(name="a", passed=True, measured=0.1, tolerance=1.0),
            CriterionResult(name="b", passed=False, detail="off"),
        ])
        assert not report.passed
        assert report.failed == ["b"]
        summary = report.summary()
        assert summary["level"] == "quick"
        assert summary["criteria"][1]["detail"] == "off"
