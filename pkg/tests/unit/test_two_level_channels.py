"""
Unit tests for the two-level channels
"""
import math

import numpy as np
import pytest

from qnd_lab.models.bath_models import BathSpec
from qnd_lab.models.system_models import BlochVector, Channel, TwoLevelInitial
from qnd_lab.services import two_level_channels as tlc
from qnd_lab.utils import ValidationFailure

pytestmark = pytest.mark.unit


@pytest.fixture
def equator():
    return TwoLevelInitial(theta0=math.pi / 2, phi0=0.3)


@pytest.fixture
def squeezed_params():
    return tlc.lindblad_params(0.6, 0.4, 1.0, 1.0, 5.0)


class TestStates:
    """Test state and Bloch-vector conversions"""

    def test_north_pole_is_upper_level(self):
        state = tlc.initial_state(TwoLevelInitial(theta0=0.0))
        np.testing.assert_allclose(state.amplitudes, [1.0, 0.0])

    def test_density_round_trip(self, equator):
        bloch = BlochVector.from_initial(equator)
        back = tlc.bloch_from_density(tlc.density_from_bloch(bloch))
        np.testing.assert_allclose(back.as_array(), bloch.as_array(), atol=1e-15)

    def test_initial_bloch_vector_unit(self, equator):
        assert BlochVector.from_initial(equator).norm() == pytest.approx(1.0)


class TestQNDChannel:
    """Test QND phase damping on the Bloch sphere"""

    def test_sz_frozen(self, fig1_bath):
        init = TwoLevelInitial(theta0=1.1, phi0=2.0)
        for t in (0.0, 1.0, 20.0):
            assert tlc.qnd_bloch(t, init, fig1_bath, 1.0).sz == math.cos(1.1)

    def test_matches_density_matrix(self, squeezed_bath, equator):
        t = 2.5
        direct = tlc.qnd_bloch(t, equator, squeezed_bath, 1.0)
        via_rho = tlc.bloch_from_density(tlc.qnd_density(t, equator, squeezed_bath, 1.0).entries)
        np.testing.assert_allclose(direct.as_array(), via_rho.as_array(), atol=1e-12)

    def test_transverse_radius_decays(self, fig1_bath, equator):
        radii = [math.hypot(v.sx, v.sy) for v in (tlc.qnd_bloch(t, equator, fig1_bath, 1.0) for t in (1, 5, 25))]
        assert radii[0] > radii[1] > radii[2] > 0

    def test_rejects_bad_frequency(self, fig1_bath, equator):
        with pytest.raises(ValidationFailure):
            tlc.qnd_bloch(1.0, equator, fig1_bath, 0.0)


class TestLindbladChannel:
    """Test the squeezed thermal Lindblad channel"""

    def test_vacuum_amplitude_damping(self):
        params = tlc.lindblad_params(0.6, 0.0, 0.0, 1.0, 0.0)
        init = TwoLevelInitial(theta0=0.0)
        t = 1.5
        assert tlc.lindblad_bloch(t, init, params).sz == pytest.approx(2 * math.exp(-0.6 * t) - 1)

    def test_thermal_photon_number(self):
        assert tlc.thermal_photon_number(1.0, 0.0) == 0.0
        assert tlc.thermal_photon_number(2.0, 1.0) == pytest.approx(1.0 / (math.exp(2.0) - 1.0))

    def test_generator_preserves_trace_and_hermiticity(self, squeezed_params):
        rho = tlc.density_from_bloch(BlochVector(0.3, -0.2, 0.5))
        drho = tlc.lindblad_rhs(rho, squeezed_params)
        assert abs(np.trace(drho)) < 1e-14
        np.testing.assert_allclose(drho, drho.conj().T, atol=1e-14)

    def test_photon_numbers(self):
        params = tlc.lindblad_params(0.6, 0.0, 0.0, 1.0, 5.0)
        assert params.N_th == pytest.approx(1.0 / math.expm1(0.2))
        assert params.N == pytest.approx(params.N_th)
        assert params.M == 0

    def test_squeezing_bound(self, squeezed_params):
        p = squeezed_params
        assert abs(p.M) ** 2 <= p.N * (p.N + 1) + 1e-12

    def test_pure_squeezed_vacuum_saturates_bound(self):
        p = tlc.lindblad_params(0.6, 0.7, 0.4, 1.0, 0.0)
        assert abs(p.M) ** 2 == pytest.approx(p.N * (p.N + 1), rel=1e-12)

    def test_invalid_parameters(self):
        with pytest.raises(ValidationFailure):
            tlc.lindblad_params(0.0, 0.1, 0.0, 1.0, 1.0)
        with pytest.raises(ValidationFailure):
            tlc.lindblad_params(0.6, 0.1, 0.0, 1.0, -1.0)

    @pytest.mark.parametrize("theta0,phi0", [(0.0, 0.0), (math.pi / 2, 0.0), (1.0, 2.0)])
    def test_closed_form_matches_rk4(self, squeezed_params, theta0, phi0):
        init = TwoLevelInitial(theta0=theta0, phi0=phi0)
        closed = tlc.lindblad_bloch(0.4, init, squeezed_params)
        numeric = tlc.lindblad_bloch_rk4(0.4, init, squeezed_params)
        np.testing.assert_allclose(closed.as_array(), numeric.as_array(), atol=1e-6)

    def test_squeezed_axes(self):
        """With Phi = 0 sx decays at the slow rate and sy at the fast rate"""
        params = tlc.lindblad_params(0.6, 0.4, 0.0, 1.0, 5.0)
        slow, fast = tlc.transverse_decay_rates(params)
        t = 0.3
        along_x = tlc.lindblad_bloch(t, TwoLevelInitial(theta0=math.pi / 2, phi0=0.0), params)
        along_y = tlc.lindblad_bloch(t, TwoLevelInitial(theta0=math.pi / 2, phi0=math.pi / 2), params)
        assert along_x.sx == pytest.approx(math.exp(-slow * t), rel=1e-12)
        assert along_y.sy == pytest.approx(math.exp(-fast * t), rel=1e-12)
        assert slow < fast

    def test_equal_rates_without_squeezing(self):
        slow, fast = tlc.transverse_decay_rates(tlc.lindblad_params(0.6, 0.0, 0.0, 1.0, 5.0))
        assert slow == pytest.approx(fast)

    def test_fixed_point(self, squeezed_params):
        fixed, p_ground = tlc.asymptotic_state(squeezed_params)
        late = tlc.lindblad_bloch(30.0, TwoLevelInitial(theta0=0.4, phi0=1.0), squeezed_params)
        np.testing.assert_allclose(late.as_array(), fixed.as_array(), atol=1e-10)
        assert p_ground == pytest.approx(0.5 * (1 - fixed.sz))

    def test_negative_time(self, squeezed_params, equator):
        with pytest.raises(ValidationFailure):
            tlc.lindblad_bloch(-0.1, equator, squeezed_params)

    def test_schrodinger_rotation(self):
        rotated = tlc.schrodinger_rotation(BlochVector(1.0, 0.0, 0.2), 2.0, math.pi / 4)
        np.testing.assert_allclose(rotated.as_array(), [0.0, 1.0, 0.2], atol=1e-15)


class TestClouds:
    """Test Bloch point clouds"""

    def test_sphere_grid(self):
        grid = tlc.sphere_grid(4, 6)
        assert len(grid) == 24
        assert grid[0].theta0 == 0.0
        assert grid[-1].theta0 == pytest.approx(math.pi)

    def test_sphere_grid_too_coarse(self):
        with pytest.raises(ValidationFailure):
            tlc.sphere_grid(1, 8)

    def test_qnd_cloud_keeps_latitudes(self, single_thread):
        spec = BathSpec(gamma0=0.2, omega_c=40.0, r=0.5, a=0.5)
        cloud = tlc.bloch_cloud(Channel.QND, 20.0, (5, 4), spec=spec, omega=1.0)
        assert len(cloud) == 20
        for point in cloud:
            assert point.final.sz == point.initial.sz
            assert point.final.in_ball()

    def test_lindblad_cloud_inside_ball(self, squeezed_params):
        cloud = tlc.bloch_cloud("lindblad", 0.15, (6, 6), params=squeezed_params, schrodinger=True)
        assert all(point.final.in_ball() for point in cloud)

    def test_missing_channel_inputs(self, squeezed_params):
        with pytest.raises(ValidationFailure):
            tlc.bloch_cloud(Channel.QND, 1.0, (3, 3), omega=1.0)
        with pytest.raises(ValidationFailure):
            tlc.bloch_cloud(Channel.LINDBLAD, 1.0, (3, 3))
