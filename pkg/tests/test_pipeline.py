import math

import numpy as np
import pytest

from pushcorrect.camera import CameraModel, RgbImage, render
from pushcorrect.exceptions import AmbiguousDetection, ObjectNotDetected
from pushcorrect.geometry import PlanarPose, wrap_quarter
from pushcorrect.vision import COLOR_RANGES, estimate_object_world_pose
from pushcorrect.world import CubeObject, NoiseProfile, WorldState

CAM = CameraModel()
EDGE = 0.05


def estimate_for(pose, expected=None, color="red", seed=0, noise=None):
    world = WorldState([CubeObject("c", color, pose)],
                       noise or NoiseProfile.quiet(), seed)
    img = render(world, CAM)
    return estimate_object_world_pose(img, COLOR_RANGES[color], CAM, EDGE,
                                      expected=expected)


class TestHappyPath:
    def test_centered_cube(self):
        est = estimate_for(PlanarPose(0, 0, 0))
        assert abs(est.x) < 1e-4
        assert abs(est.y) < 1e-4
        assert abs(est.yaw) < math.radians(0.1)

    def test_offset_rotated_cube(self):
        truth = PlanarPose(0.012, 0.007, math.radians(25))
        est = estimate_for(truth)
        assert math.hypot(est.x - truth.x, est.y - truth.y) < 3e-4
        assert abs(wrap_quarter(est.yaw - truth.yaw)) < math.radians(0.5)

    def test_yaw_resolved_near_expected(self):
        truth = PlanarPose(0.05, -0.03, math.radians(80))
        est = estimate_for(truth, expected=truth)
        assert abs(est.yaw - truth.yaw) < math.radians(1.0)

    def test_yaw_resolved_near_zero_without_expectation(self):
        truth = PlanarPose(0.05, -0.03, math.radians(80))
        est = estimate_for(truth)
        # 80 deg is represented as -10 deg under quarter-turn symmetry
        assert est.yaw == pytest.approx(math.radians(-10), abs=math.radians(1.0))

    def test_quarter_turn_inputs_agree(self):
        a = estimate_for(PlanarPose(0.02, 0.01, math.radians(12)))
        b = estimate_for(PlanarPose(0.02, 0.01, math.radians(12 + 90)))
        assert a.x == pytest.approx(b.x, abs=1e-4)
        assert a.y == pytest.approx(b.y, abs=1e-4)
        assert wrap_quarter(a.yaw - b.yaw) == pytest.approx(0.0, abs=math.radians(0.3))


class TestFailures:
    def test_no_target_color(self):
        world = WorldState([CubeObject("c", "green", PlanarPose(0, 0, 0))],
                           NoiseProfile.quiet(), 0)
        img = render(world, CAM)
        with pytest.raises(ObjectNotDetected):
            estimate_object_world_pose(img, COLOR_RANGES["red"], CAM, EDGE)

    def test_empty_image(self):
        img = RgbImage(np.full((720, 1280, 3), 110, np.uint8))
        with pytest.raises(ObjectNotDetected):
            estimate_object_world_pose(img, COLOR_RANGES["red"], CAM, EDGE)

    def test_two_same_color_regions_ambiguous(self):
        world = WorldState([CubeObject("a", "red", PlanarPose(-0.1, 0, 0)),
                            CubeObject("b", "red", PlanarPose(0.1, 0, 0))],
                           NoiseProfile.quiet(), 0)
        img = render(world, CAM)
        with pytest.raises(AmbiguousDetection):
            estimate_object_world_pose(img, COLOR_RANGES["red"], CAM, EDGE)


class TestRoundTripAccuracy:
    def test_seeded_poses_round_trip(self):
        rng = np.random.default_rng(100)
        pos_errs, yaw_errs = [], []
        for _ in range(120):
            truth = PlanarPose(rng.uniform(-0.025, 0.025),
                               rng.uniform(-0.025, 0.025),
                               rng.uniform(-math.radians(40), math.radians(40)))
            est = estimate_for(truth, expected=truth)
            pos_errs.append(math.hypot(est.x - truth.x, est.y - truth.y))
            yaw_errs.append(abs(wrap_quarter(est.yaw - truth.yaw)))
        pos_errs = np.asarray(pos_errs)
        assert pos_errs.mean() < 0.0005
        assert pos_errs.max() < 0.0015
        assert np.mean(yaw_errs) < math.radians(0.5)

    def test_with_pixel_noise_still_accurate(self):
        noise = NoiseProfile("real", 0, 0, 0, 0, 0, pixel_noise_sigma=0.5)
        truth = PlanarPose(0.015, -0.01, math.radians(15))
        est = estimate_for(truth, expected=truth, noise=noise, seed=11)
        assert math.hypot(est.x - truth.x, est.y - truth.y) < 0.0008

    def test_debug_dumps(self, tmp_path):
        truth = PlanarPose(0.0, 0.0, 0.0)
        world = WorldState([CubeObject("c", "red", truth)], NoiseProfile.quiet(), 0)
        img = render(world, CAM)
        estimate_object_world_pose(img, COLOR_RANGES["red"], CAM, EDGE,
                                   debug_dir=tmp_path, debug_tag="red")
        assert (tmp_path / "red_mask_raw.pbm").exists()
        assert (tmp_path / "red_mask_clean.pbm").exists()
        corners = (tmp_path / "red_corners.txt").read_text().strip().splitlines()
        assert len(corners) == 4
        assert all(len(line.split()) == 2 for line in corners)
