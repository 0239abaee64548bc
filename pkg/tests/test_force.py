"""Tests for the power-balance grasp force."""
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from fingerkit.core.errors import ConfigurationError, NearSingularity, TransmissionSingularity
from fingerkit.schemas import FingerConfig, SpringParams
from fingerkit.services import force, optimize
from fingerkit.services.force import ForceQuery, KinematicDerivatives

P_RANGE = (0.5, 2.0)
R_RANGE = (10.0, 55.0)


@pytest.fixture(scope="module")
def surfaces():
    return {t: force.force_surface(FingerConfig(), SpringParams(), t, P_RANGE, R_RANGE, (16, 10))
            for t in (80.0, 120.0)}


class TestDerivatives:
    """Finite-difference kinematic derivatives."""

    def test_values_at_reference_angles(self, finger):
        """Test f', g' and h' at 80 and 120 deg."""
        d80 = force.derivatives(finger, 80.0)
        assert d80.f_prime == pytest.approx(44.3741, rel=1e-4)
        assert d80.g_prime == pytest.approx(0.96443, rel=1e-4)
        assert d80.h_prime == 0.0
        d120 = force.derivatives(finger, 120.0)
        assert d120.f_prime == pytest.approx(45.857, rel=1e-4)
        assert d120.g_prime == pytest.approx(0.57221, rel=1e-4)

    @pytest.mark.parametrize("theta", [80.0, 120.0])
    def test_fourth_order_stencil_agrees(self, finger, theta):
        """Test the two stencils agree."""
        second = force.derivatives(finger, theta, order=2)
        fourth = force.derivatives(finger, theta, order=4)
        assert fourth.f_prime == pytest.approx(second.f_prime, rel=1e-6)
        assert fourth.g_prime == pytest.approx(second.g_prime, rel=1e-6)
        assert fourth.h_prime == pytest.approx(second.h_prime, rel=1e-5, abs=1e-9)

    def test_unknown_stencil(self, finger):
        """Test an unsupported stencil order."""
        with pytest.raises(ConfigurationError):
            force.derivatives(finger, 80.0, order=3)

    def test_rotation_rate_integrates_to_sweep(self, finger):
        """Integrating g' over the stroke recovers the push-link sweep."""
        theta = np.linspace(68.51, 156.56, 401)
        g = [force.derivatives(finger, float(t)).g_prime for t in theta]
        integral = math.degrees(trapezoid(g, np.radians(theta)))
        trace = optimize.stroke_trace(finger.hoeckens, (68.51, 156.56), 0.01)
        expected = optimize.delta_theta_max(finger.l_ag, finger.l_gd, trace).degrees
        assert integral == pytest.approx(expected, abs=0.1)

    def test_closure_failure_near_query(self):
        """Test a linkage that fails to close next to the query."""
        short = FingerConfig(l_ag=60.0, l_gd=40.0)
        with pytest.raises(NearSingularity):
            force.derivatives(short, 80.0)


class TestSprings:
    """Spring loads along the stroke."""

    def test_k1_deflection(self, finger, springs):
        """Test the torsion spring twist and torque."""
        state = force.spring_state(finger, springs, 80.0)
        assert state.deflection_rad == pytest.approx(math.radians(40.0 + 80.0 - 68.51))
        assert springs.k1 * state.deflection_rad == pytest.approx(44.9, abs=0.1)

    def test_k2_slack_before_trigger(self, finger, springs):
        """Test the linear spring only stretches after triggering."""
        assert force.spring_state(finger, springs, 80.0).delta_x1 == 0.0
        assert force.spring_state(finger, springs, 120.0).delta_x1 > 0.0


class TestGraspForce:
    """Pointwise grasp force."""

    def test_reference_values(self, finger, springs):
        """Test F_N at P = 0.5 W and r = 10 mm."""
        f80 = force.grasp_force(finger, springs, ForceQuery(80.0, 10.0, 0.5))
        f120 = force.grasp_force(finger, springs, ForceQuery(120.0, 10.0, 0.5))
        assert f80 == pytest.approx(52.2, abs=0.2)
        assert f120 == pytest.approx(53.6, abs=0.2)

    def test_springless_limit(self, finger):
        """Test the closed form with both springs removed."""
        free = SpringParams(k1=0.0, k2=0.0)
        q = ForceQuery(100.0, 20.0, 1.0)
        d = force.derivatives(finger, 100.0, free)
        expected = 1000.0 / (q.omega1_rad_s * (d.f_prime + 20.0 * d.g_prime))
        assert force.grasp_force(finger, free, q) == pytest.approx(expected, rel=1e-12)

    def test_power_balance(self, finger, springs):
        """Test the power terms add back up to P_press."""
        rng = np.random.default_rng(5)
        for _ in range(1000):
            q = ForceQuery(float(rng.uniform(70.0, 155.0)), float(rng.uniform(0.0, 55.0)),
                           float(rng.uniform(0.1, 3.0)), float(rng.uniform(1.0, 30.0)))
            f_n = force.grasp_force(finger, springs, q)
            terms = force.power_terms(finger, springs, q, f_n)
            assert terms.total_w == pytest.approx(q.p_press_w, rel=1e-9, abs=1e-12)

    def test_monotone_in_power_and_distance(self, finger, springs):
        """Test F_N at one node against its neighbours."""
        base = force.grasp_force(finger, springs, ForceQuery(120.0, 30.0, 1.0))
        assert force.grasp_force(finger, springs, ForceQuery(120.0, 30.0, 1.5)) > base
        assert force.grasp_force(finger, springs, ForceQuery(120.0, 40.0, 1.0)) < base

    def test_contact_beyond_phalange(self, finger, springs):
        """Test a contact point past the phalange tip."""
        with pytest.raises(ConfigurationError):
            force.grasp_force(finger, springs, ForceQuery(120.0, 60.0, 1.0))

    @pytest.mark.parametrize("kwargs", [{"r": -1.0}, {"omega1_deg_s": 0.0}])
    def test_invalid_query(self, kwargs):
        """Test a negative contact distance and a zero crank rate."""
        params = {"theta1_deg": 100.0, "r": 10.0, "p_press_w": 1.0, **kwargs}
        with pytest.raises(ConfigurationError):
            ForceQuery(**params)

    def test_transmission_singularity(self, finger, springs, monkeypatch):
        """Test a vanishing f' + r g'."""
        monkeypatch.setattr(force, "derivatives", lambda *a, **k: KinematicDerivatives(2.0, -0.1, 0.0))
        with pytest.raises(TransmissionSingularity):
            force.grasp_force(finger, springs, ForceQuery(100.0, 20.0, 1.0))


class TestForceSurface:
    """Force surfaces over (P_press, r)."""

    def test_grid_nodes_nest(self):
        """Test a refined grid contains the coarse nodes exactly."""
        coarse = force.grid_nodes(0.5, 2.0, 16)
        fine = force.grid_nodes(0.5, 2.0, 31)
        np.testing.assert_array_equal(fine[::2], coarse)
        assert force.grid_nodes(0.5, 2.0, 1).tolist() == [0.5]

    def test_surface_matches_pointwise_force(self, surfaces, finger, springs):
        """Test the vectorised surface against grasp_force."""
        surface = surfaces[120.0]
        p, r = surface.p_values_w[3], surface.r_values_mm[4]
        expected = force.grasp_force(finger, springs, ForceQuery(120.0, float(r), float(p)))
        assert surface.value(p, r) == pytest.approx(expected, rel=1e-12)

    def test_larger_crank_angle_dominates(self, surfaces):
        """Test 120 deg exceeds 80 deg at every node."""
        assert force.dominates(surfaces[120.0], surfaces[80.0])
        assert not force.dominates(surfaces[80.0], surfaces[120.0])

    def test_shapes_correlate(self, surfaces):
        """Test the two surfaces share their shape."""
        assert force.shape_correlation(surfaces[120.0], surfaces[80.0]) > 0.95

    def test_no_singular_cells_on_default_grid(self, surfaces):
        """Test the default grid has no singular cells."""
        assert not surfaces[80.0].singular.any()

    @pytest.mark.parametrize("theta", [80.0, 120.0])
    def test_monotone_over_whole_grid(self, surfaces, theta):
        """Test F_N rises with P_press and falls with r at every grid node."""
        values = surfaces[theta].values.data
        assert (np.diff(values, axis=0) > 0).all()
        assert (np.diff(values, axis=1) < 0).all()

    def test_refined_grid_nests(self, finger, springs, surfaces):
        """Test refining keeps values at shared nodes."""
        fine = force.force_surface(finger, springs, 80.0, P_RANGE, R_RANGE, (31, 19))
        np.testing.assert_array_equal(fine.values.data[::2, ::2], surfaces[80.0].values.data)

    def test_single_node_grid(self, finger, springs):
        """Test a 1 x 1 grid."""
        surface = force.force_surface(finger, springs, 80.0, P_RANGE, R_RANGE, (1, 1))
        assert surface.values.shape == (1, 1)
        assert surface.value(0.5, 10.0) == pytest.approx(52.2, abs=0.2)

    def test_mismatched_grids(self, finger, springs, surfaces):
        """Test comparing surfaces on different grids."""
        other = force.force_surface(finger, springs, 120.0, P_RANGE, R_RANGE, (4, 4))
        with pytest.raises(ConfigurationError):
            force.dominates(other, surfaces[80.0])

    def test_empty_angle_list(self, finger, springs):
        """Test an empty crank angle list."""
        with pytest.raises(ConfigurationError):
            force.surfaces(finger, springs, [], P_RANGE, R_RANGE, (2, 2))
