"""Tests for the composite finger: stroke events, posture, trajectory and workspace."""
import dataclasses

import numpy as np
import pytest
from pydantic import ValidationError

from fingerkit.core.errors import DegeneratePath, InvalidStep, OutOfStroke
from fingerkit.schemas import FingerConfig
from fingerkit.services import mechanism
from fingerkit.services.mechanism import GraspMode, MotionStage


@pytest.fixture(scope="module")
def events():
    return mechanism.stroke(FingerConfig())


@pytest.fixture(scope="module")
def pushed():
    return mechanism.simulate(FingerConfig(), 10.0, 0.01, pushed=True)


@pytest.fixture(scope="module")
def original():
    return mechanism.simulate(FingerConfig(), 10.0, 0.01, pushed=False)


class TestFingerConfig:
    """Composite finger configuration."""

    def test_derived_heights(self, finger):
        """Test trigger and minimum heights."""
        assert finger.h_trigger == 161.0
        assert finger.h_min == 93.0
        assert finger.tip_offset.as_tuple() == (0.0, -55.0)

    def test_rod_length_must_match_hoeckens(self):
        """Test l_CD must equal l_BD."""
        with pytest.raises(ValidationError):
            FingerConfig(l_cd=170.0)

    def test_height_increments_ordered(self):
        """Test delta_h1 must be below delta_h2."""
        with pytest.raises(ValidationError):
            FingerConfig(delta_h1=70.0, delta_h2=19.0)


class TestStroke:
    """Stroke events."""

    def test_events(self, events):
        """Test engagement and full deployment angles."""
        assert events.theta_start == 68.51
        assert events.theta_engage == pytest.approx(93.37, abs=0.05)
        assert events.theta_full == pytest.approx(156.6, abs=0.05)
        assert events.theta_end == max(events.theta_full, 156.56)
        assert events.rise_engage == pytest.approx(19.1, abs=0.3)
        assert events.rise_full > events.rise_engage

    def test_stage_for_theta(self, events):
        """Test the stage at each side of the events."""
        assert mechanism.stage_for_theta(events, 80.0) is MotionStage.IDLE_VERTICAL
        assert mechanism.stage_for_theta(events, 120.0) is MotionStage.TRIGGERED
        assert mechanism.stage_for_theta(events, events.theta_full) is MotionStage.FULLY_DEPLOYED

    def test_grasp_modes(self):
        """Test pinch and scoop modes."""
        assert mechanism.grasp_mode(MotionStage.IDLE_VERTICAL) is GraspMode.PARALLEL_PINCH
        assert mechanism.grasp_mode(MotionStage.FULLY_DEPLOYED) is GraspMode.SCOOP


class TestPressingHeight:
    """Pressing height and its inverse."""

    def test_height_at_events(self, finger, events):
        """Test h at start, engagement and full deployment."""
        assert mechanism.pressing_height(finger, events.theta_start, events) == pytest.approx(180.0)
        assert mechanism.pressing_height(finger, events.theta_engage, events) == pytest.approx(161.0, abs=1e-6)
        assert mechanism.pressing_height(finger, events.theta_full, events) == pytest.approx(93.0, abs=1e-6)

    @pytest.mark.parametrize("h", [175.0, 161.0, 120.0, 100.0])
    def test_height_round_trip(self, finger, events, h):
        """Test theta_for_height inverts pressing_height."""
        theta = mechanism.theta_for_height(finger, h, events)
        assert mechanism.pressing_height(finger, theta, events) == pytest.approx(h, abs=1e-6)

    def test_height_decreases_with_crank(self, finger, events):
        """Test h falls as the crank turns."""
        heights = [mechanism.pressing_height(finger, t, events) for t in np.linspace(70.0, 156.0, 30)]
        assert all(b < a for a, b in zip(heights, heights[1:]))

    @pytest.mark.parametrize("h", [92.0, 181.0])
    def test_height_outside_stroke(self, finger, h):
        """Test heights outside the stroke."""
        with pytest.raises(OutOfStroke):
            mechanism.theta_for_height(finger, h)

    def test_crank_outside_stroke(self, finger, events):
        """Test crank angles outside the stroke."""
        with pytest.raises(OutOfStroke):
            mechanism.pressing_height(finger, 60.0, events)


class TestPhalangePosture:
    """Phalange posture by height."""

    def test_vertical_at_rest(self, finger):
        """Test the phalange is vertical at rest."""
        posture, stage = mechanism.phalange_posture(finger, 180.0)
        assert posture.degrees == 0.0
        assert stage is MotionStage.IDLE_VERTICAL

    def test_trigger_height(self, finger):
        """Test the posture at the trigger height."""
        posture, stage = mechanism.phalange_posture(finger, 161.0)
        assert posture.degrees == pytest.approx(0.0, abs=1e-6)
        assert stage is MotionStage.TRIGGERED

    def test_fully_deployed(self, finger):
        """Test the posture at the bottom of the press."""
        posture, stage = mechanism.phalange_posture(finger, 93.0)
        assert posture.degrees == pytest.approx(35.0, abs=0.5)
        assert stage is MotionStage.FULLY_DEPLOYED

    def test_posture_grows_while_pressing(self, finger):
        """Test posture grows between trigger and full deployment."""
        values = [mechanism.phalange_posture(finger, h)[0].degrees for h in (160.0, 140.0, 120.0, 100.0)]
        assert values == sorted(values)
        assert 0.0 < values[0] < values[-1] < 35.0

    def test_stage_never_goes_back_while_pressing(self, finger):
        """Test stages only advance and posture never shrinks as h falls."""
        order = list(MotionStage)
        heights = np.linspace(finger.h_max, finger.h_min, 175)
        results = [mechanism.phalange_posture(finger, float(h)) for h in heights]
        ranks = [order.index(stage) for _, stage in results]
        postures = [posture.degrees for posture, _ in results]
        assert ranks == sorted(ranks)
        assert ranks[0] == 0 and ranks[-1] == 2
        assert all(b >= a - 1e-9 for a, b in zip(postures, postures[1:]))


class TestFingerState:
    """Full finger pose."""

    def test_idle_pose(self, finger, events):
        """Test the pose before engagement."""
        state = mechanism.finger_state(finger, 80.0, events)
        assert state.stage is MotionStage.IDLE_VERTICAL
        assert state.I_pushed == state.I_original
        assert state.I_original.as_tuple() == pytest.approx((state.D.x, state.D.y - 55.0))
        assert (state.G - finger.hoeckens.pivot_a).norm() == pytest.approx(125.0)
        assert (state.D - state.G).norm() == pytest.approx(50.0)

    def test_auxiliary_point_keeps_orientation(self, finger, events):
        """Test the parallel link keeps its orientation."""
        offsets = []
        for theta in (70.0, 100.0, 130.0, 150.0):
            state = mechanism.finger_state(finger, theta, events)
            offsets.append((state.D_prime - state.D).as_tuple())
        for offset in offsets[1:]:
            assert offset == pytest.approx(offsets[0], abs=1e-9)

    def test_triggered_pose_tilts_tip(self, finger, events):
        """Test the pushed fingertip leaves the original one."""
        state = mechanism.finger_state(finger, 130.0, events)
        assert state.stage is MotionStage.TRIGGERED
        assert state.posture.degrees > 0.0
        assert state.I_pushed.x > state.I_original.x
        assert state.I_pushed.y > state.I_original.y


class TestAmplification:
    """Rocker amplification."""

    def test_output_over_input(self, finger):
        """Test the output sweep against the rod sweep."""
        amp = mechanism.rocker_amplification(finger)
        assert amp.output_sweep.degrees == pytest.approx(59.88, abs=0.5)
        assert amp.input_sweep.degrees == pytest.approx(30.04, abs=0.5)
        assert 1.9 <= amp.ratio <= 2.1


class TestTrajectory:
    """Sampled fingertip trajectory."""

    def test_ends_at_stroke_end(self, pushed, events):
        """Test the last sample sits at the stroke end."""
        assert pushed.samples[0].t == 0.0
        assert pushed.samples[-1].theta1.degrees == pytest.approx(events.theta_end)
        assert pushed.samples[1].t == pytest.approx(0.01)

    def test_stage_sequence(self, pushed):
        """Test stages appear in order."""
        stages = [s.stage for s in pushed.samples]
        assert stages[0] is MotionStage.IDLE_VERTICAL
        assert stages[-1] is MotionStage.FULLY_DEPLOYED
        assert MotionStage.TRIGGERED in stages

    def test_end_position(self, pushed, original):
        """Test where the fingertip ends up."""
        end = pushed.samples[-1].I
        assert end.x == pytest.approx(182.0, abs=2.0)
        assert end.y - original.samples[-1].I.y == pytest.approx(10.0, abs=1.0)

    def test_velocity_jump_at_engagement(self, pushed):
        """Test the x velocity jump at engagement."""
        jump = mechanism.velocity_jump(pushed)
        assert jump.t_s == pytest.approx(2.49, abs=0.05)
        assert jump.vx_after == pytest.approx(7.44, rel=0.05)
        assert abs(jump.vx_before) < 1.0

    def test_paths_coincide_before_trigger(self, finger):
        """Test pushed and original paths share the early rise."""
        assert mechanism.path_coincidence(finger) >= 16.0

    def test_halved_step_keeps_shared_samples(self, pushed):
        """Test halving dt keeps shared samples."""
        fine = mechanism.simulate(FingerConfig(), 10.0, 0.005, pushed=True)
        coarse_x = pushed.column("x_mm")
        coarse_y = pushed.column("y_mm")
        fine_x = fine.column("x_mm")
        fine_y = fine.column("y_mm")
        n = len(pushed) - 1
        np.testing.assert_allclose(fine_x[: 2 * n : 2], coarse_x[:n], atol=1e-9)
        np.testing.assert_allclose(fine_y[: 2 * n : 2], coarse_y[:n], atol=1e-9)
        assert fine_x[-1] == pytest.approx(coarse_x[-1], abs=1e-9)

    def test_rows_follow_columns(self, pushed):
        """Test CSV rows line up with the column names."""
        row = next(pushed.rows())
        assert len(row) == len(mechanism.TRAJECTORY_COLUMNS)
        assert row[-1] == "IdleVertical"

    @pytest.mark.parametrize("omega1,dt", [(0.0, 0.01), (10.0, 0.0), (10.0, -0.01)])
    def test_invalid_rates(self, finger, omega1, dt):
        """Test zero and negative rates."""
        with pytest.raises(InvalidStep):
            mechanism.simulate(finger, omega1, dt)

    def test_times_must_increase(self, pushed):
        """Test a trajectory with decreasing times."""
        reversed_samples = tuple(reversed(pushed.samples[:3]))
        with pytest.raises(ValueError):
            dataclasses.replace(pushed, samples=reversed_samples)


class TestWorkspace:
    """Enclosed fingertip workspace."""

    def test_pushed_area(self, finger):
        """Test the pushed workspace area."""
        assert mechanism.workspace_area(finger) == pytest.approx(153.95, rel=0.05)

    def test_original_path_is_nearly_a_line(self, finger):
        """Test the untriggered fingertip path encloses only a thin sliver.

        The path is closed by its end chord; it bows slightly, so the area is about
        5.8 mm2 rather than the under-1 mm2 a perfectly straight stroke would give.
        """
        area = mechanism.workspace_area(finger, pushed=False)
        assert area == pytest.approx(5.80, abs=0.3)
        assert area < 0.05 * mechanism.workspace_area(finger)

    def test_area_converges_with_density(self, finger):
        """Test the area converges as the grid refines."""
        coarse = mechanism.workspace_area(finger, step_deg=0.1)
        fine = mechanism.workspace_area(finger, step_deg=0.05)
        assert fine == pytest.approx(coarse, rel=1e-3)

    def test_degenerate_path(self, finger, monkeypatch):
        """Test a path with no extent."""
        flat = (np.full(5, 150.0), np.full(5, -80.0))
        monkeypatch.setattr(mechanism, "fingertip_path", lambda *args, **kwargs: flat)
        with pytest.raises(DegeneratePath):
            mechanism.workspace_area(finger)
