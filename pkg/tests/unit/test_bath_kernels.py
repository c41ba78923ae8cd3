"""
Unit tests for the bath kernels
"""
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from qnd_lab.models.bath_models import BathSpec, TemperatureMode
from qnd_lab.services import bath_kernels
from qnd_lab.services.bath_kernels import ThermalFactor
from qnd_lab.utils import KernelDomainError, ValidationFailure, parallel_map

pytestmark = pytest.mark.unit


class TestEta:
    """Test the phase kernel"""

    def test_eta_vanishes_at_zero(self, squeezed_bath):
        assert bath_kernels.eta(0.0, squeezed_bath) == 0.0

    def test_eta_saturates(self, fig1_bath):
        assert bath_kernels.eta(1e6, fig1_bath) == pytest.approx(-fig1_bath.gamma0 / 2, rel=1e-7)

    def test_eta_independent_of_squeezing_and_temperature(self, fig1_bath, hot_bath):
        ts = np.linspace(0.0, 3.0, 7)
        np.testing.assert_array_equal(bath_kernels.eta(ts, fig1_bath), bath_kernels.eta(ts, hot_bath))

    def test_eta_quadrature_matches_closed_form(self, fig1_bath):
        for t in (0.01, 0.5, 2.0):
            assert bath_kernels.eta_quadrature(t, fig1_bath) == pytest.approx(bath_kernels.eta(t, fig1_bath), rel=1e-8)

    def test_eta_dot_is_derivative(self, fig1_bath):
        t, h = 0.05, 1e-6
        numeric = (bath_kernels.eta(t + h, fig1_bath) - bath_kernels.eta(t - h, fig1_bath)) / (2 * h)
        assert bath_kernels.eta_dot(t, fig1_bath) == pytest.approx(numeric, rel=1e-6)


class TestClosedForms:
    """Test the zero- and high-temperature closed forms"""

    def test_gamma_vanishes_at_zero(self, fig1_bath, hot_bath):
        assert bath_kernels.gamma(0.0, fig1_bath) == 0.0
        assert bath_kernels.gamma(0.0, hot_bath) == 0.0

    def test_unsqueezed_zero_temperature(self, fig1_bath):
        """r = a = 0 gives (gamma0 / 2 pi) ln(1 + omega_c^2 t^2)"""
        t = 1.0
        expected = 0.1 / (2 * math.pi) * math.log(1 + 2500.0)
        assert bath_kernels.gamma(t, fig1_bath) == pytest.approx(expected, rel=1e-12)

    def test_unsqueezed_high_temperature_rate(self):
        spec = BathSpec(gamma0=0.1, omega_c=50.0, temperature_mode=TemperatureMode.HIGH, T=1000.0)
        t = 0.3
        expected = 2 * 0.1 * 1000.0 / math.pi * math.atan(50.0 * t)
        assert bath_kernels.gamma_dot(t, spec) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("mode,T", [(TemperatureMode.ZERO, 0.0), (TemperatureMode.HIGH, 300.0)])
    def test_gamma_dot_is_derivative(self, mode, T):
        spec = BathSpec(gamma0=0.1, omega_c=50.0, r=0.4, a=0.01, temperature_mode=mode, T=T)
        t, h = 1.0, 1e-5
        numeric = (bath_kernels.gamma(t + h, spec) - bath_kernels.gamma(t - h, spec)) / (2 * h)
        assert bath_kernels.gamma_dot(t, spec) == pytest.approx(numeric, rel=1e-6)

    @pytest.mark.parametrize("mode,T", [(TemperatureMode.ZERO, 0.0), (TemperatureMode.HIGH, 300.0)])
    @pytest.mark.parametrize("t", [0.025, 0.3, 4.0])
    def test_closed_form_matches_quadrature(self, mode, T, t):
        spec = BathSpec(gamma0=0.1, omega_c=50.0, r=0.4, a=0.01, temperature_mode=mode, T=T)
        assert bath_kernels.gamma(t, spec) == pytest.approx(bath_kernels.gamma_quadrature(t, spec), rel=1e-6)

    def test_rate_quadrature_matches_closed_form(self, squeezed_bath):
        t = 0.5
        assert bath_kernels.gamma_dot_quadrature(t, squeezed_bath) == pytest.approx(
            bath_kernels.gamma_dot(t, squeezed_bath), rel=1e-6
        )

    def test_array_input_keeps_shape(self, squeezed_bath):
        ts = np.linspace(0.1, 1.0, 6).reshape(2, 3)
        assert bath_kernels.gamma(ts, squeezed_bath).shape == (2, 3)

    def test_scalar_input_returns_float(self, fig1_bath):
        assert isinstance(bath_kernels.gamma(0.5, fig1_bath), float)

    def test_squeezing_raises_zero_temperature_decay(self, fig1_bath):
        squeezed = fig1_bath.model_copy(update={'r': 0.4})
        assert bath_kernels.gamma(5.0, squeezed) > bath_kernels.gamma(5.0, fig1_bath)

    @hyp_settings(max_examples=60, deadline=None)
    @given(
        r=st.floats(-1.0, 1.0),
        a=st.floats(0.0, 0.1),
        dt=st.floats(1e-3, 10.0),
    )
    def test_gamma_non_negative(self, r, a, dt):
        spec = BathSpec(gamma0=0.1, omega_c=50.0, r=r, a=a)
        assert bath_kernels.gamma(2 * a + dt, spec) >= -1e-12


class TestTemperatureModes:
    """Test the exact-coth quadrature against both limits"""

    def test_exact_mode_approaches_high_temperature(self):
        hot = BathSpec(gamma0=0.1, omega_c=10.0, temperature_mode=TemperatureMode.HIGH, T=1e4)
        exact = hot.model_copy(update={'temperature_mode': TemperatureMode.EXACT})
        assert bath_kernels.gamma(1.0, exact) == pytest.approx(bath_kernels.gamma(1.0, hot), rel=1e-5)

    def test_exact_mode_approaches_zero_temperature(self):
        cold = BathSpec(gamma0=0.1, omega_c=10.0, r=0.3)
        exact = cold.model_copy(update={'temperature_mode': TemperatureMode.EXACT, 'T': 1e-3})
        assert bath_kernels.gamma(1.0, exact) == pytest.approx(bath_kernels.gamma(1.0, cold), rel=1e-5)

    def test_thermal_factor_override(self, hot_bath):
        zero = bath_kernels.gamma_quadrature(1.0, hot_bath, ThermalFactor.ZERO)
        cold = BathSpec(gamma0=0.1, omega_c=50.0, r=0.4)
        assert zero == pytest.approx(bath_kernels.gamma(1.0, cold), rel=1e-6)

    def test_quadrature_result_reports_error(self, squeezed_bath):
        res = bath_kernels.gamma_quadrature_result(1.0, squeezed_bath)
        assert res.abs_error >= res.tail_bound >= 0.0
        assert res.n_panels >= 1
        assert res.abs_error < 1e-7

    def test_long_times_use_weighted_rule(self, fig1_bath, squeezed_bath):
        """Test quadrature stays accurate once the panel rule would need more than MAX_PANELS panels"""
        t = 5000.0
        assert bath_kernels.eta_quadrature(t, fig1_bath) == pytest.approx(bath_kernels.eta(t, fig1_bath), rel=1e-8)
        res = bath_kernels.gamma_quadrature_result(3000.0, squeezed_bath)
        assert res.n_panels <= 6
        assert res.value == pytest.approx(bath_kernels.gamma(3000.0, squeezed_bath), rel=1e-6)
        assert bath_kernels.gamma_dot_quadrature(3000.0, squeezed_bath) == pytest.approx(
            bath_kernels.gamma_dot(3000.0, squeezed_bath), rel=1e-4
        )

    def test_threads_leave_warning_filters_alone(self, squeezed_bath):
        before = list(warnings.filters)
        parallel_map(lambda t: bath_kernels.gamma_quadrature(t, squeezed_bath), [0.5, 1.0, 2.0, 4.0], max_workers=4)
        assert warnings.filters == before

    def test_exact_mode_defined_before_two_a(self):
        spec = BathSpec(gamma0=0.1, omega_c=50.0, r=0.5, a=0.5, temperature_mode=TemperatureMode.EXACT, T=2.0)
        assert bath_kernels.gamma(0.5, spec) > 0.0


class TestDomainAndDiagnostics:
    """Test preconditions and warnings"""

    def test_closed_form_rejects_early_times(self):
        spec = BathSpec(gamma0=0.2, omega_c=40.0, r=0.5, a=0.5)
        with pytest.raises(KernelDomainError):
            bath_kernels.gamma(0.9, spec)
        with pytest.raises(KernelDomainError):
            bath_kernels.gamma_dot(np.array([0.5, 2.0]), spec)

    def test_domain_boundary(self):
        spec = BathSpec(gamma0=0.2, omega_c=40.0, a=0.5)
        with pytest.raises(KernelDomainError):
            bath_kernels.check_closed_form_domain(np.array([1.0]), spec)
        bath_kernels.check_closed_form_domain(np.array([1.0 + 1e-9, 3.0]), spec)
        bath_kernels.check_closed_form_domain(np.array([0.0]), BathSpec(gamma0=0.2, omega_c=40.0))

    def test_negative_time_rejected(self, fig1_bath):
        with pytest.raises(ValidationFailure):
            bath_kernels.gamma(-1.0, fig1_bath)

    def test_non_finite_time_rejected(self, fig1_bath):
        with pytest.raises(ValidationFailure):
            bath_kernels.eta(float('nan'), fig1_bath)

    def test_high_temperature_warning(self, caplog):
        spec = BathSpec(gamma0=0.1, omega_c=50.0, temperature_mode=TemperatureMode.HIGH, T=300.0)
        bath_kernels.high_temperature_diagnostic.cache_clear()
        assert bath_kernels.high_temperature_diagnostic(spec) is True
        assert "temperature_mode=high" in caplog.text

    def test_no_warning_when_hot_enough(self):
        spec = BathSpec(gamma0=0.1, omega_c=5.0, temperature_mode=TemperatureMode.HIGH, T=300.0)
        assert bath_kernels.high_temperature_diagnostic(spec) is False

    def test_no_warning_for_other_modes(self, fig1_bath):
        assert bath_kernels.high_temperature_diagnostic(fig1_bath) is False


class TestLongTime:
    """Test the asymptotic limits"""

    def test_zero_temperature_tail(self):
        spec = BathSpec(gamma0=0.1, omega_c=50.0, r=0.4)
        limits = bath_kernels.longtime_limits(spec)
        expected = 0.1 * (math.cosh(0.8) + 0.5 * math.sinh(0.8)) / math.pi
        assert limits.zero_t_rate_coefficient == pytest.approx(expected)
        t = 1e3 / spec.omega_c
        assert bath_kernels.gamma_dot(t, spec) * t == pytest.approx(expected, rel=1e-2)

    def test_high_temperature_plateau(self, hot_bath):
        limits = bath_kernels.longtime_limits(hot_bath)
        assert limits.gamma_dot_inf == pytest.approx(0.1 * 300.0 * math.cosh(0.8))
        assert limits.high_t_slope == limits.gamma_dot_inf
        assert limits.high_t_offset == 0.0
        assert bath_kernels.gamma_dot(20.0, hot_bath) == pytest.approx(limits.gamma_dot_inf, rel=1e-3)

    def test_eta_limit(self, fig1_bath):
        assert bath_kernels.longtime_limits(fig1_bath).eta_inf == pytest.approx(-0.05)

    def test_high_limits_absent_in_zero_mode(self, fig1_bath):
        assert bath_kernels.longtime_limits(fig1_bath).gamma_dot_inf is None

    def test_offset_from_squeezing_phase(self):
        spec = BathSpec(gamma0=0.1, omega_c=50.0, r=0.4, a=0.2, temperature_mode=TemperatureMode.HIGH, T=1e3)
        limits = bath_kernels.longtime_limits(spec)
        assert limits.high_t_offset == pytest.approx(-2 * 0.1 * 1e3 * math.sinh(0.8) * 0.2)


class TestSamples:
    """Test sample and sample_grid"""

    def test_sample_fields(self, fig1_bath):
        s = bath_kernels.sample(0.5, fig1_bath)
        assert s.t == 0.5
        assert s.gamma == bath_kernels.gamma(0.5, fig1_bath)
        assert s.eta_dot == bath_kernels.eta_dot(0.5, fig1_bath)

    def test_sample_grid_columns(self, fig1_bath):
        frame = bath_kernels.sample_grid([0.0, 0.5, 1.0], fig1_bath)
        assert list(frame.columns) == ['t', 'eta', 'eta_dot', 'gamma', 'gamma_dot']
        assert len(frame) == 3

    def test_spectral_density(self, fig1_bath):
        w = 50.0
        assert bath_kernels.ohmic_spectral_density(w, fig1_bath) == pytest.approx(0.1 / math.pi * w * math.exp(-1))
