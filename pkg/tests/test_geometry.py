"""Track compilation, geometric queries, and their exact oracles."""
import math

import numpy as np
import pytest

from confidrive.errors import (
    DegenerateSegment,
    NonClosedLoop,
    OriginOutsideTrack,
    SelfIntersectingBoundary,
)
from confidrive.geometry import (
    Arc,
    Straight,
    Track,
    TrackSpec,
    builtin_track,
    builtin_tracks,
    compile_track,
    normalize_angle,
    rounded_polygon_spec,
)


def ring_spec(radius=100.0, width=15.0):
    # Closed circle as two half arcs (a track needs at least two segments).
    return TrackSpec(
        name="ring",
        segments=(Arc(radius, math.pi), Arc(radius, math.pi)),
        width=width,
        start_pose=(radius, 0.0, math.pi / 2),
    )


def stadium_spec(width=15.0):
    return TrackSpec(
        name="stadium",
        segments=(Straight(200.0), Arc(50.0, math.pi), Straight(200.0), Arc(50.0, math.pi)),
        width=width,
    )


@pytest.fixture(scope="module")
def ring():
    return compile_track(ring_spec())


@pytest.fixture(scope="module")
def stadium():
    return compile_track(stadium_spec())


class TestCompile:
    def test_ring_circumference(self, ring):
        assert ring.total_length == pytest.approx(2 * math.pi * 100.0, rel=1e-12)

    def test_two_straights_do_not_close(self):
        spec = TrackSpec("open", (Straight(100.0), Straight(100.0)), 15.0)
        with pytest.raises(NonClosedLoop):
            compile_track(spec)

    def test_stadium_perimeter(self, stadium):
        assert stadium.total_length == pytest.approx(400.0 + 100.0 * math.pi, rel=1e-12)

    def test_single_segment_rejected(self):
        spec = TrackSpec("one", (Arc(100.0, 2 * math.pi),), 15.0)
        with pytest.raises(DegenerateSegment):
            compile_track(spec)

    @pytest.mark.parametrize(
        "segments",
        [
            (Straight(0.0), Arc(10.0, math.pi)),
            (Straight(-5.0), Arc(10.0, math.pi)),
            (Arc(0.0, math.pi), Arc(10.0, math.pi)),
            (Arc(10.0, 0.0), Arc(10.0, math.pi)),
        ],
    )
    def test_degenerate_segments_rejected(self, segments):
        with pytest.raises(DegenerateSegment):
            compile_track(TrackSpec("bad", segments, 15.0))

    def test_cusp_corner_boundary_self_intersects(self):
        # A 3 m corner radius under a 15 m corridor folds the inner offset
        # into a loop that crosses the adjacent straights.
        spec = rounded_polygon_spec(
            "cusp", [(0, 0), (200, 0), (200, 150), (0, 150)], [60, 3, 60, 60], 15.0
        )
        with pytest.raises(SelfIntersectingBoundary):
            compile_track(spec)

    def test_sampling_density(self, ring):
        gaps = np.diff(ring.s)
        assert gaps.max() <= 0.5 + 1e-12

    def test_total_length_matches_segment_sum(self):
        for spec in builtin_tracks():
            track = compile_track(spec)
            seg_sum = sum(seg.length for seg in spec.segments)
            assert abs(track.total_length - seg_sum) <= 1e-6 * seg_sum

    def test_arc_sample_curvature(self, ring):
        np.testing.assert_allclose(ring.curvature, 1.0 / 100.0, rtol=1e-12)

    def test_boundaries_are_offset_by_half_width(self, stadium):
        d = np.linalg.norm(stadium.left_boundary - stadium.right_boundary, axis=1)
        np.testing.assert_allclose(d, stadium.width, rtol=1e-12)


class TestLateralOffset:
    def test_ring_radial_query(self, ring):
        offset, s = ring.lateral_offset((103.0, 0.0))
        # Tangent at (100, 0) points +y, so a radially outward point sits to
        # the right of the tangent: negative offset of magnitude 3.
        assert offset == pytest.approx(-3.0, abs=1e-3)
        assert s == pytest.approx(0.0, abs=1e-6)

    def test_on_sample_is_zero(self, ring):
        x, y = ring.xy[17]
        offset, _ = ring.lateral_offset((x, y))
        assert offset == 0.0

    def test_stadium_straight_midpoint(self, stadium):
        offset, s = stadium.lateral_offset((100.0, 2.0))
        assert offset == pytest.approx(2.0, abs=1e-12)
        assert s == pytest.approx(100.0, abs=1e-9)

    def test_round_trip_on_centerline(self):
        # Analytic centerline points must project back with ~zero offset,
        # including on the tightest builtin arcs.
        for name in ("train-loop", "hairpin"):
            track = builtin_track(name)
            for s in np.linspace(0.0, track.total_length, 200, endpoint=False):
                x, y, _, _ = track.pose_at(s)
                offset, _ = track.lateral_offset((x, y))
                assert abs(offset) <= 1e-3

    def test_total_function_far_outside(self, ring):
        offset, s = ring.lateral_offset((1e6, 2e6))
        assert math.isfinite(offset) and 0.0 <= s < ring.total_length


class TestContains:
    @pytest.mark.parametrize("offset,expected", [(7.4, True), (7.6, False), (7.5, True)])
    def test_boundary_convention(self, stadium, offset, expected):
        assert stadium.contains((100.0, offset)) is expected
        assert stadium.contains((100.0, -offset)) is expected


def brute_force_ray(track: Track, origin, direction, max_range):
    """Independent scalar ray-segment oracle over every boundary segment."""
    ox, oy = origin
    dx, dy = direction
    best = math.inf
    for poly in (track.left_boundary, track.right_boundary):
        n = len(poly)
        for i in range(n):
            px, py = poly[i]
            qx, qy = poly[(i + 1) % n]
            rx, ry = qx - px, qy - py
            denom = dx * ry - dy * rx
            wx, wy = px - ox, py - oy
            if denom == 0.0:
                if wx * dy - wy * dx == 0.0:
                    a1 = wx * dx + wy * dy
                    a2 = (wx + rx) * dx + (wy + ry) * dy
                    if max(a1, a2) >= 0.0:
                        best = min(best, max(0.0, min(a1, a2)))
                continue
            t = (wx * ry - wy * rx) / denom
            u = (wx * dy - wy * dx) / denom
            if t >= 0.0 and 0.0 <= u <= 1.0:
                best = min(best, t)
    return min(best, max_range)


class TestRayCast:
    def test_perpendicular_half_width(self, stadium):
        assert stadium.ray_cast((100.0, 0.0), (0.0, 1.0), 100.0) == pytest.approx(7.5, abs=1e-9)
        assert stadium.ray_cast((100.0, 0.0), (0.0, -1.0), 100.0) == pytest.approx(7.5, abs=1e-9)

    def test_ring_radially_outward(self, ring):
        assert ring.ray_cast((100.0, 0.0), (1.0, 0.0), 100.0) == pytest.approx(7.5, abs=1e-2)

    def test_parallel_ray_clips_at_max_range(self, stadium):
        # Forward along the first straight: the cap wall sits past 200 m.
        oracle = brute_force_ray(stadium, (0.0, 0.0), (1.0, 0.0), 250.0)
        assert oracle == pytest.approx(200.0 + math.sqrt(57.5**2 - 50.0**2), abs=0.05)
        assert stadium.ray_cast((0.0, 0.0), (1.0, 0.0), 200.0) == 200.0
        assert stadium.ray_cast((0.0, 0.0), (1.0, 0.0), 250.0) == pytest.approx(oracle, abs=1e-9)

    def test_matches_brute_force_oracle(self, stadium):
        rng = np.random.default_rng(42)
        for _ in range(25):
            s = rng.uniform(0.0, stadium.total_length)
            x, y, h, _ = stadium.pose_at(s)
            off = rng.uniform(-6.0, 6.0)
            origin = (x - off * math.sin(h), y + off * math.cos(h))
            ang = rng.uniform(-math.pi, math.pi)
            direction = (math.cos(ang), math.sin(ang))
            got = stadium.ray_cast(origin, direction, 100.0)
            want = brute_force_ray(stadium, origin, direction, 100.0)
            assert got == pytest.approx(want, abs=1e-9)

    def test_outside_origin_rejected(self, stadium):
        with pytest.raises(OriginOutsideTrack):
            stadium.ray_cast((100.0, 30.0), (0.0, 1.0), 100.0)

    def test_left_right_symmetry_on_centerline(self, stadium):
        left = stadium.ray_cast((100.0, 0.0), (0.0, 1.0), 100.0)
        right = stadium.ray_cast((100.0, 0.0), (0.0, -1.0), 100.0)
        assert abs(left - right) <= 1e-9

    def test_monotone_clipping(self, stadium):
        origin = (50.0, 1.0)
        for ang in np.linspace(-math.pi, math.pi, 17):
            d = (math.cos(ang), math.sin(ang))
            d1 = stadium.ray_cast(origin, d, 50.0)
            d2 = stadium.ray_cast(origin, d, 150.0)
            assert d1 <= d2 + 1e-12


class TestBuiltinTracks:
    def test_at_least_five_named_specs(self):
        specs = builtin_tracks()
        names = {s.name for s in specs}
        assert {"train-loop", "eval-a", "eval-b", "eval-c", "hairpin"} <= names
        assert len(specs) >= 5

    def test_all_compile(self):
        for spec in builtin_tracks():
            compile_track(spec)

    def test_closure_of_every_builtin(self):
        from confidrive.geometry import advance_pose

        for spec in builtin_tracks():
            pose = spec.start_pose
            for seg in spec.segments:
                pose = advance_pose(pose, seg)
            assert math.hypot(pose[0] - spec.start_pose[0], pose[1] - spec.start_pose[1]) <= 0.01
            assert abs(normalize_angle(pose[2] - spec.start_pose[2])) <= 1e-4

    def test_radius_contrast(self):
        spec = {s.name: s for s in builtin_tracks()}
        radii = lambda sp: [seg.radius for seg in sp.segments if isinstance(seg, Arc)]
        assert min(radii(spec["hairpin"])) <= 20.0
        assert min(radii(spec["train-loop"])) >= 60.0

    def test_train_loop_dimensions(self):
        spec = {s.name: s for s in builtin_tracks()}["train-loop"]
        assert spec.width == 15.0
        track = builtin_track("train-loop")
        assert track.total_length >= 3000.0

    def test_hairpin_has_multiple_tight_arcs(self):
        spec = {s.name: s for s in builtin_tracks()}["hairpin"]
        tight = [seg for seg in spec.segments if isinstance(seg, Arc) and seg.radius <= 20.0]
        assert len(tight) >= 2


class TestPoseAt:
    def test_wraps_arclength(self, ring):
        a = ring.pose_at(10.0)
        b = ring.pose_at(10.0 + ring.total_length)
        np.testing.assert_allclose(a, b, atol=1e-9)

    def test_heading_matches_sample_headings(self, stadium):
        for i in range(0, len(stadium.s), 97):
            x, y, h, _ = stadium.pose_at(stadium.s[i])
            assert abs(normalize_angle(h - stadium.heading[i])) <= 1e-9
            assert math.hypot(x - stadium.xy[i, 0], y - stadium.xy[i, 1]) <= 1e-9
