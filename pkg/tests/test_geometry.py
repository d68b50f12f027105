import math

import numpy as np
import pytest

from pushcorrect.geometry import (
    OffsetVec,
    PlanarPose,
    RigidTransform3,
    planar_offset,
    wrap_angle,
    wrap_quarter,
)


def random_transform(rng):
    # rotation via QR of a random matrix, determinant fixed to +1
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return RigidTransform3(q, rng.normal(size=3))


def as_matrix(t):
    m = np.eye(4)
    m[:3, :3] = t.rotation
    m[:3, 3] = t.translation
    return m


class TestWrap:
    def test_wrap_angle_half_open(self):
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(0.0) == 0.0
        assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)

    def test_wrap_angle_range_property(self):
        rng = np.random.default_rng(1)
        for a in rng.uniform(-50, 50, size=2000):
            w = wrap_angle(a)
            assert -math.pi < w <= math.pi
            # same angle modulo 2*pi
            assert abs(math.remainder(w - a, 2 * math.pi)) < 1e-9

    def test_wrap_quarter(self):
        assert wrap_quarter(0.0) == 0.0
        assert wrap_quarter(math.radians(50)) == pytest.approx(math.radians(-40))
        assert wrap_quarter(math.radians(45)) == pytest.approx(math.radians(45))
        assert wrap_quarter(math.radians(-45)) == pytest.approx(math.radians(45))
        assert wrap_quarter(math.radians(91)) == pytest.approx(math.radians(1))


class TestPlanarPose:
    def test_yaw_normalized(self):
        p = PlanarPose(0.0, 0.0, 3 * math.pi)
        assert p.yaw == pytest.approx(math.pi)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PlanarPose(math.nan, 0.0, 0.0)

    def test_compose_identity(self):
        p = PlanarPose(0.3, -0.2, 1.1)
        q = p.compose(PlanarPose(0.0, 0.0, 0.0))
        assert (q.x, q.y, q.yaw) == pytest.approx((p.x, p.y, p.yaw))


class TestPlanarOffset:
    def test_three_four_five(self):
        off = planar_offset(PlanarPose(0, 0, 0), PlanarPose(0.003, 0.004, 0))
        assert off.d_xy == pytest.approx(0.005)

    def test_identity(self):
        p = PlanarPose(0.1, 0.2, 0.3)
        off = planar_offset(p, p)
        assert off.d_xy == 0.0
        assert off.dyaw == 0.0

    def test_yaw_wraps_through_pi(self):
        # brute-force minimization of |yaw_a - yaw_d + 2*pi*k| over k
        desired, actual = 3.0, -3.0
        expect = min((actual - desired + 2 * math.pi * k for k in (-1, 0, 1)), key=abs)
        off = planar_offset(PlanarPose(0, 0, desired), PlanarPose(0, 0, actual))
        assert off.dyaw == pytest.approx(expect)
        assert off.dyaw == pytest.approx(0.28318530717, abs=1e-9)

    def test_swap_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a = PlanarPose(*rng.uniform(-1, 1, 2), rng.uniform(-3, 3))
            b = PlanarPose(*rng.uniform(-1, 1, 2), rng.uniform(-3, 3))
            fwd = planar_offset(a, b)
            rev = planar_offset(b, a)
            assert fwd.d_xy == pytest.approx(rev.d_xy)
            assert fwd.dx == pytest.approx(-rev.dx)
            assert fwd.dy == pytest.approx(-rev.dy)
            if abs(abs(fwd.dyaw) - math.pi) > 1e-9:
                assert fwd.dyaw == pytest.approx(-rev.dyaw)

    def test_d_xy_matches_components(self):
        off = OffsetVec(-0.01, 0.02, 0.1)
        assert off.d_xy == pytest.approx(math.hypot(-0.01, 0.02))
        assert off.d_xy >= 0


class TestRigidTransform3:
    def test_rejects_bad_rotation(self):
        with pytest.raises(ValueError):
            RigidTransform3(np.eye(3) * 1.01, np.zeros(3))
        reflection = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValueError):
            RigidTransform3(reflection, np.zeros(3))

    def test_identity_compose(self):
        rng = np.random.default_rng(3)
        t = random_transform(rng)
        out = RigidTransform3.identity().compose(t)
        np.testing.assert_allclose(out.rotation, t.rotation, atol=1e-12)
        np.testing.assert_allclose(out.translation, t.translation, atol=1e-12)

    def test_translation_compose(self):
        a = RigidTransform3.from_translation(1, 0, 0)
        b = RigidTransform3.from_translation(0, 2, 0)
        out = a.compose(b)
        np.testing.assert_allclose(out.translation, [1, 2, 0], atol=1e-12)

    def test_camera_to_world_against_matrix_product(self):
        # top-down camera 0.70 m above the origin composed with an
        # object-in-camera detection; oracle is the 4x4 homogeneous product.
        cam_rot = np.array([[1.0, 0, 0], [0, -1.0, 0], [0, 0, -1.0]])
        world_from_cam = RigidTransform3(cam_rot, np.array([0.0, 0.0, 0.70]))
        cam_from_obj = RigidTransform3.about_z(0.35, (0.012, -0.007, 0.65))
        out = world_from_cam.compose(cam_from_obj)
        expect = as_matrix(world_from_cam) @ as_matrix(cam_from_obj)
        np.testing.assert_allclose(as_matrix(out), expect, atol=1e-12)

    def test_invert_trivial(self):
        ident = RigidTransform3.identity()
        np.testing.assert_allclose(ident.invert().rotation, np.eye(3), atol=1e-15)
        t = RigidTransform3.from_translation(1, 2, 3)
        np.testing.assert_allclose(t.invert().translation, [-1, -2, -3], atol=1e-15)

    def test_invert_round_trip_property(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(1000):
            t = random_transform(rng)
            rt = t.compose(t.invert())
            worst = max(worst, abs(rt.rotation - np.eye(3)).max(),
                        abs(rt.translation).max())
        assert worst < 1e-9

    def test_compose_associative_property(self):
        rng = np.random.default_rng(13)
        for _ in range(300):
            a, b, c = (random_transform(rng) for _ in range(3))
            left = a.compose(b).compose(c)
            right = a.compose(b.compose(c))
            assert abs(left.rotation - right.rotation).max() < 1e-9
            assert abs(left.translation - right.translation).max() < 1e-9

    def test_frozen_arrays(self):
        t = RigidTransform3.identity()
        with pytest.raises(ValueError):
            t.rotation[0, 0] = 2.0

    def test_apply_points(self):
        t = RigidTransform3.about_z(math.pi / 2, (1.0, 0.0, 0.0))
        out = t.apply(np.array([1.0, 0.0, 0.0]))
        np.testing.assert_allclose(out, [1.0, 1.0, 0.0], atol=1e-12)
