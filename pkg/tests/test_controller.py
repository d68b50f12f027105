import math

import numpy as np
import pytest

from pushcorrect.camera import CameraModel
from pushcorrect.controller import (
    ArrangementPlan,
    CorrectionConfig,
    choose_push,
    correction_loop,
    run_arrangement,
)
from pushcorrect.exceptions import ConfigError
from pushcorrect.geometry import OffsetVec, PlanarPose
from pushcorrect.injection import ErrorSpec
from pushcorrect.world import CubeObject, NoiseProfile, WorldState

CAM = CameraModel()


def single_cube_world(pose=PlanarPose(0, 0, 0), noise=None, seed=0):
    return WorldState([CubeObject("c", "red", pose)],
                      noise or NoiseProfile.quiet(), seed)


def plan_to(pose):
    return ArrangementPlan((("c", pose),))


class TestConfig:
    def test_threshold_floor(self):
        with pytest.raises(ConfigError):
            CorrectionConfig(threshold=0.0004)
        CorrectionConfig(threshold=0.0005)

    def test_max_pushes(self):
        with pytest.raises(ConfigError):
            CorrectionConfig(max_pushes=0)

    def test_plan_validation(self):
        with pytest.raises(ConfigError):
            ArrangementPlan((("a", PlanarPose(0, 0, 0)),
                             ("a", PlanarPose(0.1, 0, 0))))
        world = single_cube_world()
        with pytest.raises(ConfigError):
            plan_to(PlanarPose(0.45, 0, 0)).validate_against(world)
        with pytest.raises(ConfigError):
            ArrangementPlan((("ghost", PlanarPose(0, 0, 0)),)).validate_against(world)

    def test_overlapping_desired_footprints(self):
        world = WorldState([CubeObject("a", "red", PlanarPose(-0.1, 0, 0)),
                            CubeObject("b", "green", PlanarPose(0.1, 0, 0))],
                           NoiseProfile.quiet(), 0)
        plan = ArrangementPlan((("a", PlanarPose(0, 0, 0)),
                                ("b", PlanarPose(0.03, 0, 0))))
        with pytest.raises(ConfigError):
            plan.validate_against(world)


class TestChoosePush:
    def test_dominant_axis_first(self):
        axis, dist = choose_push(OffsetVec(0.010, 0.002, 0.0))
        assert axis == "x"
        assert dist == pytest.approx(-0.010)

    def test_alternates(self):
        axis, dist = choose_push(OffsetVec(0.010, 0.004, 0.0), last_axis="x")
        assert axis == "y"
        assert dist == pytest.approx(-0.004)

    def test_skip_rule(self):
        # alternate (x) component 0 < threshold/2: stay on dominant axis
        axis, dist = choose_push(OffsetVec(0.0, -0.004, 0.0), last_axis="y",
                                 threshold=0.001)
        assert axis == "y"
        assert dist == pytest.approx(0.004)

    def test_cap(self):
        _, dist = choose_push(OffsetVec(0.2, 0.0, 0.0))
        assert dist == -0.05

    def test_zero_offset_rejected(self):
        with pytest.raises(ValueError):
            choose_push(OffsetVec(0.0, 0.0, 0.0))


class TestCorrectionLoop:
    def test_below_threshold_returns_immediately(self):
        world = single_cube_world(PlanarPose(0.0004, 0, 0))
        offset, pushes = correction_loop(
            "c", PlanarPose(0, 0, 0), world, CAM, CorrectionConfig(),
            initial_offset=OffsetVec(0.0004, 0.0, 0.0))
        assert pushes == 0
        assert offset.d_xy == pytest.approx(0.0004)

    def test_pure_offset_single_push(self):
        desired = PlanarPose(0, 0, 0)
        world = single_cube_world(PlanarPose(0.010, 0, 0))
        offset, pushes = correction_loop("c", desired, world, CAM,
                                         CorrectionConfig())
        assert pushes == 1
        assert offset.d_xy < 0.001
        truth = world.cubes["c"].pose
        assert math.hypot(truth.x, truth.y) < 0.0005

    def test_noisy_loop_converges(self):
        desired = PlanarPose(0, 0, 0)
        counts = []
        for seed in range(30):
            world = single_cube_world(PlanarPose(0.012, -0.008, 0),
                                      noise=NoiseProfile.real(), seed=seed)
            offset, pushes = correction_loop("c", desired, world, CAM,
                                             CorrectionConfig())
            assert offset.d_xy < 0.001 or pushes == 20
            counts.append(pushes)
        assert 1 <= np.mean(counts) <= 4


class TestRunArrangement:
    def test_zero_noise_no_error_no_pushes(self):
        world = single_cube_world(PlanarPose(0, 0, 0))
        traces = run_arrangement(plan_to(PlanarPose(0.10, 0.06, 0)), world,
                                 CAM, CorrectionConfig())
        trace = traces[0]
        assert trace.terminal_status == "converged"
        assert trace.push_count == 0
        assert trace.final_offset.d_xy < 0.0001

    def test_injected_translation_corrected(self):
        world = single_cube_world(PlanarPose(0, 0, 0), seed=7)
        traces = run_arrangement(plan_to(PlanarPose(0.10, 0.06, 0)), world,
                                 CAM, CorrectionConfig(),
                                 error_spec=ErrorSpec(kind="translation"))
        trace = traces[0]
        assert trace.terminal_status == "converged"
        assert trace.injected_error.d_xy > 0
        assert trace.offset_after_place.d_xy > 0.001
        assert trace.push_count >= 1
        assert trace.final_offset.d_xy < 0.0012

    def test_ground_truth_vs_vision_logged(self):
        world = single_cube_world(PlanarPose(0, 0, 0), seed=3,
                                  noise=NoiseProfile.sim())
        traces = run_arrangement(plan_to(PlanarPose(0.10, 0.06, 0)), world,
                                 CAM, CorrectionConfig(),
                                 error_spec=ErrorSpec(kind="orientation"))
        trace = traces[0]
        assert trace.vision_offset_after_place is not None
        assert trace.offset_after_place is not None
        # vision and truth agree to sub-millimeter at this noise level
        assert abs(trace.vision_offset_after_place.d_xy
                   - trace.offset_after_place.d_xy) < 0.001

    def test_defer_correction_places_all_first(self):
        cubes = [CubeObject("a", "red", PlanarPose(-0.30, -0.12, 0)),
                 CubeObject("b", "green", PlanarPose(0.30, 0.12, 0))]
        world = WorldState(cubes, NoiseProfile.sim(), seed=5)
        plan = ArrangementPlan((("a", PlanarPose(-0.08, 0.0, 0.0)),
                                ("b", PlanarPose(0.08, 0.0, 0.0))))
        traces = run_arrangement(plan, world, CAM,
                                 CorrectionConfig(defer_correction=True),
                                 error_spec=ErrorSpec(kind="estimator_proxy"))
        assert all(t.terminal_status == "converged" for t in traces)
        assert all(t.final_offset.d_xy < 0.0012 for t in traces)

    def test_failure_recorded_not_raised(self):
        # desired pose overlaps the second cube: placement collides, trace
        # reports failed, the other object still completes
        cubes = [CubeObject("a", "red", PlanarPose(-0.2, 0, 0)),
                 CubeObject("b", "green", PlanarPose(0.2, 0, 0))]
        world = WorldState(cubes, NoiseProfile.quiet(), seed=0)
        plan = ArrangementPlan((("a", PlanarPose(0.2, 0.04, 0.0)),
                                ("b", PlanarPose(0.1, 0.0, 0.0))))
        traces = run_arrangement(plan, world, CAM, CorrectionConfig())
        assert traces[0].terminal_status == "failed"
        assert "PlacementCollision" in traces[0].failure
        assert traces[1].terminal_status == "converged"

    def test_alternating_axes_property(self):
        # seeded noisy trials: consecutive push axes differ except where the
        # skip rule fires (alternate component below threshold/2)
        class SpyWorld(WorldState):
            def __init__(self, *a, **kw):
                super().__init__(*a, **kw)
                self.pushed_axes = []

            def push(self, object_id, axis, dist):
                self.pushed_axes.append(axis)
                return super().push(object_id, axis, dist)

        for seed in range(10):
            world = SpyWorld([CubeObject("c", "red", PlanarPose(0, 0, 0))],
                             NoiseProfile.real(), seed)
            run_arrangement(plan_to(PlanarPose(0.10, 0.06, 0)), world, CAM,
                            CorrectionConfig(),
                            error_spec=ErrorSpec(kind="translation"))
            axes = world.pushed_axes
            repeats = sum(1 for a, b in zip(axes, axes[1:]) if a == b)
            # repeats allowed only via the skip rule, which needs a tiny
            # alternate component; with 25 mm injections that is rare
            assert repeats <= max(1, len(axes) // 2)
