"""Closed 2D track corridors built from segment chains.

A track is specified as an ordered chain of straight and circular-arc
segments plus a corridor width. Compilation walks the chain analytically,
samples the centerline densely (spacing at most 0.5 m, tighter on small
radii so chord sagitta stays below half a millimetre), offsets the samples
laterally into left/right boundary polylines, and precomputes a uniform
spatial grid over the boundary segments so ray casting only inspects walls
near the query point.

Conventions: headings are radians in (-pi, pi], positive sweep angles turn
left, and lateral offsets are positive to the left of the centerline
tangent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import (
    DegenerateSegment,
    NonClosedLoop,
    OriginOutsideTrack,
    SelfIntersectingBoundary,
)

# Centerline sampling: base spacing, and the chord-sagitta budget that
# tightens spacing on small-radius arcs.
_BASE_SPACING = 0.5
_SAGITTA_TOL = 4.0e-4

# Loop-closure tolerances on the compiled end pose.
_CLOSE_POS_TOL = 0.01
_CLOSE_HEAD_TOL = 1.0e-4

# Spatial prefilter: cell size and the largest ray range the grid answers
# exactly; longer rays fall back to testing every wall segment.
_GRID_CELL = 40.0
_GRID_RADIUS = 100.0


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    r = math.fmod(theta, 2.0 * math.pi)
    if r <= -math.pi:
        r += 2.0 * math.pi
    elif r > math.pi:
        r -= 2.0 * math.pi
    return r


@dataclass(frozen=True)
class Straight:
    """Straight segment of a given length in meters."""

    length: float


@dataclass(frozen=True)
class Arc:
    """Circular arc with radius in meters and signed sweep in radians.

    Positive sweep turns left, negative turns right.
    """

    radius: float
    sweep: float

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)


SegmentSpec = Union[Straight, Arc]


@dataclass(frozen=True)
class TrackSpec:
    """Named segment chain with corridor width and a world start pose."""

    name: str
    segments: tuple[SegmentSpec, ...]
    width: float
    start_pose: tuple[float, float, float] = (0.0, 0.0, 0.0)


def _validate_spec(spec: TrackSpec) -> None:
    if len(spec.segments) < 2:
        raise DegenerateSegment(f"track '{spec.name}' needs >= 2 segments")
    if not spec.width > 0.0:
        raise DegenerateSegment(f"track '{spec.name}' width must be > 0")
    for i, seg in enumerate(spec.segments):
        if isinstance(seg, Straight):
            if not seg.length > 0.0:
                raise DegenerateSegment(f"segment {i}: straight length must be > 0")
        elif isinstance(seg, Arc):
            if not seg.radius > 0.0:
                raise DegenerateSegment(f"segment {i}: arc radius must be > 0")
            if seg.sweep == 0.0:
                raise DegenerateSegment(f"segment {i}: arc sweep must be nonzero")
        else:
            raise DegenerateSegment(f"segment {i}: unknown segment type {type(seg)!r}")


def advance_pose(
    pose: tuple[float, float, float], seg: SegmentSpec
) -> tuple[float, float, float]:
    """End pose after traversing `seg` from `pose`; exact, no sampling."""
    x, y, h = pose
    if isinstance(seg, Straight):
        return (x + seg.length * math.cos(h), y + seg.length * math.sin(h), h)
    r, phi = seg.radius, seg.sweep
    if phi > 0.0:
        cx, cy = x - r * math.sin(h), y + r * math.cos(h)
        return (
            cx + r * math.sin(h + phi),
            cy - r * math.cos(h + phi),
            normalize_angle(h + phi),
        )
    cx, cy = x + r * math.sin(h), y - r * math.cos(h)
    return (
        cx - r * math.sin(h + phi),
        cy + r * math.cos(h + phi),
        normalize_angle(h + phi),
    )


def _segment_samples(pose, seg, spacing_hint):
    """Sample positions/headings/curvature along `seg`, excluding its end."""
    x, y, h = pose
    length = seg.length
    if isinstance(seg, Straight):
        spacing = spacing_hint
        n = max(1, math.ceil(length / spacing))
        t = np.arange(n) * (length / n)
        xs = x + t * math.cos(h)
        ys = y + t * math.sin(h)
        return t, xs, ys, np.full(n, h), np.zeros(n)
    r, phi = seg.radius, seg.sweep
    spacing = min(spacing_hint, math.sqrt(8.0 * r * _SAGITTA_TOL))
    n = max(2, math.ceil(length / spacing))
    t = np.arange(n) * (length / n)
    dh = np.sign(phi) * t / r
    heads = h + dh
    if phi > 0.0:
        cx, cy = x - r * math.sin(h), y + r * math.cos(h)
        xs = cx + r * np.sin(heads)
        ys = cy - r * np.cos(heads)
        curv = np.full(n, 1.0 / r)
    else:
        cx, cy = x + r * math.sin(h), y - r * math.cos(h)
        xs = cx - r * np.sin(heads)
        ys = cy + r * np.cos(heads)
        curv = np.full(n, -1.0 / r)
    return t, xs, ys, heads, curv


def _pairs_intersect(p, r, ia, ib, n, eps=1.0e-9) -> bool:
    """Dense segment-pair intersection test over index grids ia x ib.

    Adjacent segments (sharing an endpoint, including the wraparound pair)
    are skipped. Near-zero cross products are treated as collinear and only
    flagged when the 1D projections genuinely overlap, so consecutive
    collinear pieces of a straight do not false-positive.
    """
    pi = p[ia][:, None, :]
    ri = r[ia][:, None, :]
    pj = p[ib][None, :, :]
    rj = r[ib][None, :, :]
    d = pj - pi
    d1 = ri[..., 0] * d[..., 1] - ri[..., 1] * d[..., 0]
    d2 = ri[..., 0] * (d[..., 1] + rj[..., 1]) - ri[..., 1] * (d[..., 0] + rj[..., 0])
    d3 = rj[..., 0] * (-d[..., 1]) - rj[..., 1] * (-d[..., 0])
    d4 = rj[..., 0] * (ri[..., 1] - d[..., 1]) - rj[..., 1] * (ri[..., 0] - d[..., 0])
    proper = (
        ((d1 > eps) & (d2 < -eps) | (d1 < -eps) & (d2 > eps))
        & ((d3 > eps) & (d4 < -eps) | (d3 < -eps) & (d4 > eps))
    )
    col = (
        (np.abs(d1) <= eps)
        & (np.abs(d2) <= eps)
        & (np.abs(d3) <= eps)
        & (np.abs(d4) <= eps)
    )
    if col.any():
        t0 = (d * ri).sum(-1)
        t1 = t0 + (rj * ri).sum(-1)
        lo_t = np.minimum(t0, t1)
        hi_t = np.maximum(t0, t1)
        ri2 = (ri * ri).sum(-1)
        overlap = (hi_t > eps) & (lo_t < ri2 - eps)
        proper |= col & overlap
    # Endpoint-on-segment touches: non-adjacent pieces of a valid offset
    # boundary never meet, so any contact marks a genuine defect.
    ri2 = (ri * ri).sum(-1)
    rj2 = (rj * rj).sum(-1)
    u1 = (d * ri).sum(-1)
    u2 = u1 + (rj * ri).sum(-1)
    v1 = (-d * rj).sum(-1)
    v2 = v1 + (ri * rj).sum(-1)
    touch = (
        ((np.abs(d1) <= eps) & (u1 >= -eps) & (u1 <= ri2 + eps))
        | ((np.abs(d2) <= eps) & (u2 >= -eps) & (u2 <= ri2 + eps))
        | ((np.abs(d3) <= eps) & (v1 >= -eps) & (v1 <= rj2 + eps))
        | ((np.abs(d4) <= eps) & (v2 >= -eps) & (v2 <= rj2 + eps))
    )
    proper |= touch & ~col
    ii = ia[:, None]
    jj = ib[None, :]
    adj = (jj == ii) | (jj == (ii + 1) % n) | (jj == (ii - 1) % n)
    return bool((proper & ~adj).any())


def _segments_self_intersect(pts: np.ndarray) -> bool:
    """Pairwise intersection test over a closed polyline.

    Consecutive segments are grouped into chunks with cached bounding boxes;
    the exact pair test only runs where two chunk boxes overlap, which keeps
    the check near-linear for well-behaved boundaries.
    """
    n = len(pts)
    p = pts
    q = np.roll(pts, -1, axis=0)
    r = q - p
    chunk = 64
    nch = math.ceil(n / chunk)
    bounds = np.empty((nch, 4))
    for c in range(nch):
        sl = slice(c * chunk, min((c + 1) * chunk, n))
        lo = np.minimum(p[sl], q[sl]).min(axis=0)
        hi = np.maximum(p[sl], q[sl]).max(axis=0)
        bounds[c] = (lo[0], lo[1], hi[0], hi[1])
    for a in range(nch):
        axlo, aylo, axhi, ayhi = bounds[a]
        overlap = ~(
            (bounds[a:, 0] > axhi)
            | (bounds[a:, 2] < axlo)
            | (bounds[a:, 1] > ayhi)
            | (bounds[a:, 3] < aylo)
        )
        ia = np.arange(a * chunk, min((a + 1) * chunk, n))
        for b in np.nonzero(overlap)[0] + a:
            ib = np.arange(b * chunk, min((b + 1) * chunk, n))
            if _pairs_intersect(p, r, ia, ib, n):
                return True
    return False


def _fan_cull(o, dirs, p, r):
    """Indices of segments not provably outside the ray fan's wedge.

    Only applies when the given directions form a convex fan no wider than
    half a turn (first to last, counterclockwise); returns None otherwise.
    A segment strictly right of the first ray's line or strictly left of the
    last ray's line with both endpoints cannot intersect any ray in between.
    """
    d0 = dirs[0]
    d1 = dirs[-1]
    if d0[0] * d1[1] - d0[1] * d1[0] < 0.0:
        return None
    c0 = d0[0] * dirs[:, 1] - d0[1] * dirs[:, 0]
    c1 = dirs[:, 0] * d1[1] - dirs[:, 1] * d1[0]
    if np.any(c0 < -1.0e-12) or np.any(c1 < -1.0e-12):
        return None
    ax = p[:, 0] - o[0]
    ay = p[:, 1] - o[1]
    bx = ax + r[:, 0]
    by = ay + r[:, 1]
    right_of_first = (d0[0] * ay - d0[1] * ax < 0.0) & (d0[0] * by - d0[1] * bx < 0.0)
    left_of_last = (ax * d1[1] - ay * d1[0] < 0.0) & (bx * d1[1] - by * d1[0] < 0.0)
    return np.nonzero(~(right_of_first | left_of_last))[0]


class Track:
    """Compiled track: centerline samples, boundaries, and query methods.

    All arrays are read-only after compilation, so a Track may be shared
    freely across threads and processes.
    """

    def __init__(self, spec, seg_start_poses, seg_lengths, s, xy, heading, curvature):
        self.spec = spec
        self.total_length = float(sum(seg_lengths))
        self._seg_start_poses = seg_start_poses
        self._seg_cum = np.concatenate([[0.0], np.cumsum(seg_lengths)])
        self.s = s
        self.xy = xy
        self.heading = heading
        self.curvature = curvature
        half = spec.width / 2.0
        normal = np.stack([-np.sin(heading), np.cos(heading)], axis=1)
        self.left_boundary = xy + half * normal
        self.right_boundary = xy - half * normal
        # Arclength of the gap following each sample (wraps at the end).
        self._gap = np.empty(len(s))
        self._gap[:-1] = np.diff(s)
        self._gap[-1] = self.total_length - s[-1]
        self._build_wall_index()
        for arr in (
            self.s,
            self.xy,
            self.heading,
            self.curvature,
            self.left_boundary,
            self.right_boundary,
        ):
            arr.setflags(write=False)

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def width(self) -> float:
        return self.spec.width

    # -- wall spatial index -------------------------------------------------

    def _build_wall_index(self):
        segs = []
        for poly in (self.left_boundary, self.right_boundary):
            start = poly
            vec = np.roll(poly, -1, axis=0) - poly
            segs.append((start, vec))
        self._wall_p = np.concatenate([s for s, _ in segs])
        self._wall_r = np.concatenate([v for _, v in segs])
        mid = self._wall_p + 0.5 * self._wall_r
        half_len = 0.5 * np.linalg.norm(self._wall_r, axis=1)
        lo = np.min(np.concatenate([self.left_boundary, self.right_boundary]), axis=0)
        self._grid_origin = lo - _GRID_CELL
        span = (
            np.max(np.concatenate([self.left_boundary, self.right_boundary]), axis=0)
            - self._grid_origin
            + _GRID_CELL
        )
        nx = max(1, int(math.ceil(span[0] / _GRID_CELL)))
        ny = max(1, int(math.ceil(span[1] / _GRID_CELL)))
        self._grid_shape = (nx, ny)
        self._trim_cache: dict[tuple[int, int, float], tuple] = {}
        diag = _GRID_CELL * math.sqrt(2.0) / 2.0
        reach = _GRID_RADIUS + diag + half_len
        self._grid: dict[tuple[int, int], np.ndarray] = {}
        centers_x = self._grid_origin[0] + (np.arange(nx) + 0.5) * _GRID_CELL
        centers_y = self._grid_origin[1] + (np.arange(ny) + 0.5) * _GRID_CELL
        for ix in range(nx):
            dx = mid[:, 0] - centers_x[ix]
            for iy in range(ny):
                dy = mid[:, 1] - centers_y[iy]
                near = dx * dx + dy * dy <= reach * reach
                idx = np.nonzero(near)[0]
                if idx.size:
                    self._grid[(ix, iy)] = idx

    def _walls_near(self, origin: np.ndarray, max_range: float):
        """Wall segment arrays covering every ray of length max_range.

        Cached per (grid cell, range): a superset of all segments within
        max_range of any point of the cell, so results are exact. Ranges
        beyond the grid's design radius fall back to the full wall set.
        """
        if max_range <= _GRID_RADIUS:
            ix = int((origin[0] - self._grid_origin[0]) // _GRID_CELL)
            iy = int((origin[1] - self._grid_origin[1]) // _GRID_CELL)
            key = (ix, iy, float(max_range))
            cached = self._trim_cache.get(key)
            if cached is not None:
                return cached
            idx = self._grid.get((ix, iy))
            if idx is not None:
                p = self._wall_p[idx]
                r = self._wall_r[idx]
                mid = p + 0.5 * r
                cx = self._grid_origin[0] + (ix + 0.5) * _GRID_CELL
                cy = self._grid_origin[1] + (iy + 0.5) * _GRID_CELL
                reach = (
                    max_range
                    + 0.5 * np.sqrt((r * r).sum(1))
                    + _GRID_CELL * math.sqrt(2.0) / 2.0
                )
                close = (mid[:, 0] - cx) ** 2 + (mid[:, 1] - cy) ** 2 <= reach * reach
                trimmed = (
                    np.ascontiguousarray(p[close]),
                    np.ascontiguousarray(r[close]),
                )
                self._trim_cache[key] = trimmed
                return trimmed
        return self._wall_p, self._wall_r

    # -- queries ------------------------------------------------------------

    def pose_at(self, s: float) -> tuple[float, float, float, float]:
        """Analytic centerline pose (x, y, heading, curvature) at arclength s."""
        s = float(s) % self.total_length
        i = int(np.searchsorted(self._seg_cum, s, side="right")) - 1
        i = min(i, len(self.spec.segments) - 1)
        ds = s - self._seg_cum[i]
        x, y, h = self._seg_start_poses[i]
        seg = self.spec.segments[i]
        if isinstance(seg, Straight):
            return (x + ds * math.cos(h), y + ds * math.sin(h), h, 0.0)
        r, phi = seg.radius, seg.sweep
        dh = math.copysign(ds / r, phi)
        if phi > 0.0:
            cx, cy = x - r * math.sin(h), y + r * math.cos(h)
            return (
                cx + r * math.sin(h + dh),
                cy - r * math.cos(h + dh),
                normalize_angle(h + dh),
                1.0 / r,
            )
        cx, cy = x + r * math.sin(h), y - r * math.cos(h)
        return (
            cx - r * math.sin(h + dh),
            cy + r * math.cos(h + dh),
            normalize_angle(h + dh),
            -1.0 / r,
        )

    def lateral_offset(self, position) -> tuple[float, float]:
        """Signed lateral offset and arclength of the nearest centerline point.

        Two-phase: argmin over the dense samples, then projection onto the
        two polyline segments adjacent to the winning sample. Offset is
        positive left of the local tangent; s lies in [0, total_length).
        """
        q = np.asarray(position, dtype=float)
        d = self.xy - q
        i = int(np.argmin(np.einsum("ij,ij->i", d, d)))
        n = len(self.xy)
        best = None
        for a_idx in ((i - 1) % n, i):
            b_idx = (a_idx + 1) % n
            a = self.xy[a_idx]
            chord = self.xy[b_idx] - a
            cc = float(chord @ chord)
            if cc == 0.0:
                continue
            u = float((q - a) @ chord)
            u = min(max(u / cc, 0.0), 1.0)
            c = a + u * chord
            dist2 = float((q - c) @ (q - c))
            if best is None or dist2 < best[0]:
                best = (dist2, a_idx, u, c, chord)
        dist2, a_idx, u, c, chord = best
        cross = chord[0] * (q[1] - c[1]) - chord[1] * (q[0] - c[0])
        offset = math.copysign(math.sqrt(dist2), cross) if cross != 0.0 else math.sqrt(dist2)
        if dist2 == 0.0:
            offset = 0.0
        s = (self.s[a_idx] + u * self._gap[a_idx]) % self.total_length
        return offset, s

    def contains(self, position) -> bool:
        """Whether the point lies inside the corridor (boundary inclusive)."""
        offset, _ = self.lateral_offset(position)
        return abs(offset) <= self.width / 2.0

    def cast_rays(
        self, origin, directions: np.ndarray, max_range: float, verify_origin: bool = True
    ) -> np.ndarray:
        """Distances along unit `directions` to the nearest wall, clipped.

        Raises OriginOutsideTrack when the origin is not inside the corridor;
        callers that already know the origin is inside (the episode loop
        checks the lateral offset every step) may pass verify_origin=False.
        """
        o = np.asarray(origin, dtype=float)
        if verify_origin and not self.contains(o):
            raise OriginOutsideTrack(f"origin {tuple(o)} is outside '{self.name}'")
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        p, r = self._walls_near(o, max_range)
        keep = _fan_cull(o, dirs, p, r)
        if keep is not None:
            p = p[keep]
            r = r[keep]
        qp = p - o
        t_num = qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]
        denom = dirs[:, 0, None] * r[None, :, 1] - dirs[:, 1, None] * r[None, :, 0]
        u_num = qp[None, :, 0] * dirs[:, 1, None] - qp[None, :, 1] * dirs[:, 0, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = t_num[None, :] / denom
            u = u_num / denom
        hit = (denom != 0.0) & (t >= 0.0) & (u >= 0.0) & (u <= 1.0)
        t = np.where(hit, t, np.inf)
        # Rays collinear with a wall segment hit its nearest forward point.
        col = (denom == 0.0) & (u_num == 0.0)
        if col.any():
            a1 = qp @ dirs.T
            a2 = (qp + r) @ dirs.T
            near = np.minimum(a1, a2).T
            far = np.maximum(a1, a2).T
            t_col = np.where(far >= 0.0, np.maximum(near, 0.0), np.inf)
            t = np.where(col, np.minimum(t, t_col), t)
        dist = t.min(axis=1)
        return np.minimum(dist, max_range)

    def ray_cast(self, origin, direction, max_range: float) -> float:
        """Single-ray convenience wrapper around `cast_rays`."""
        return float(self.cast_rays(origin, np.asarray(direction, float)[None, :], max_range)[0])


def compile_track(spec: TrackSpec) -> Track:
    """Compile a TrackSpec into a queryable Track.

    Raises DegenerateSegment on invalid segments, NonClosedLoop when the
    chain does not return to the start pose, and SelfIntersectingBoundary
    when either offset boundary crosses itself.
    """
    _validate_spec(spec)
    poses = [tuple(map(float, spec.start_pose))]
    for seg in spec.segments:
        poses.append(advance_pose(poses[-1], seg))
    end = poses[-1]
    start = poses[0]
    pos_err = math.hypot(end[0] - start[0], end[1] - start[1])
    head_err = abs(normalize_angle(end[2] - start[2]))
    if pos_err > _CLOSE_POS_TOL or head_err > _CLOSE_HEAD_TOL:
        raise NonClosedLoop(
            f"track '{spec.name}' end pose misses start by {pos_err:.4f} m, "
            f"{head_err:.2e} rad"
        )
    seg_lengths = [seg.length for seg in spec.segments]
    s_parts, x_parts, y_parts, h_parts, c_parts = [], [], [], [], []
    s0 = 0.0
    for pose, seg, length in zip(poses[:-1], spec.segments, seg_lengths):
        t, xs, ys, hs, cs = _segment_samples(pose, seg, _BASE_SPACING)
        s_parts.append(s0 + t)
        x_parts.append(xs)
        y_parts.append(ys)
        h_parts.append(hs)
        c_parts.append(cs)
        s0 += length
    s = np.concatenate(s_parts)
    xy = np.stack([np.concatenate(x_parts), np.concatenate(y_parts)], axis=1)
    heading = np.concatenate(h_parts)
    curvature = np.concatenate(c_parts)
    track = Track(spec, poses[:-1], seg_lengths, s, xy, heading, curvature)
    for side, poly in (("left", track.left_boundary), ("right", track.right_boundary)):
        if _segments_self_intersect(poly):
            raise SelfIntersectingBoundary(
                f"track '{spec.name}': {side} boundary self-intersects"
            )
    return track


# -- built-in track family ----------------------------------------------------


def rounded_polygon_spec(
    name: str,
    vertices: list[tuple[float, float]],
    radii: list[float],
    width: float,
) -> TrackSpec:
    """Closed track spec from a polygon with rounded corners.

    Corner i replaces the vertex with an arc of radius `radii[i]`; each side
    keeps a straight piece trimmed by the arc tangent offsets. Closure is
    exact by construction for any simple polygon whose turns are under pi.
    """
    n = len(vertices)
    v = [np.asarray(p, dtype=float) for p in vertices]
    dirs, lengths, headings = [], [], []
    for i in range(n):
        d = v[(i + 1) % n] - v[i]
        length = float(np.hypot(*d))
        if length <= 0.0:
            raise DegenerateSegment(f"{name}: repeated vertex {i}")
        dirs.append(d / length)
        lengths.append(length)
        headings.append(math.atan2(d[1], d[0]))
    turns = [normalize_angle(headings[i] - headings[i - 1]) for i in range(n)]
    offs = []
    for i in range(n):
        if abs(turns[i]) >= math.pi or turns[i] == 0.0:
            raise DegenerateSegment(f"{name}: corner {i} turn out of range")
        offs.append(radii[i] * math.tan(abs(turns[i]) / 2.0))
    segments: list[SegmentSpec] = []
    for i in range(n):
        straight = lengths[i] - offs[i] - offs[(i + 1) % n]
        if straight <= 0.0:
            raise DegenerateSegment(f"{name}: side {i} fully consumed by corner arcs")
        segments.append(Straight(straight))
        segments.append(Arc(radii[(i + 1) % n], turns[(i + 1) % n]))
    start = v[0] + offs[0] * dirs[0]
    return TrackSpec(
        name=name,
        segments=tuple(segments),
        width=width,
        start_pose=(float(start[0]), float(start[1]), headings[0]),
    )


def _hairpin_spec() -> TrackSpec:
    """Rectangle circuit whose lower side folds into a triple switchback.

    The three 16 m U-turns are far tighter than anything in the training
    loop, so a controller trained there meets unfamiliar geometry here.
    """
    h = 80.0
    segments: tuple[SegmentSpec, ...] = (
        Straight(100.0),
        Arc(18.0, math.pi / 2),
        Straight(h),
        Arc(16.0, -math.pi),
        Straight(h - 4.0),
        Arc(16.0, math.pi),
        Straight(h - 4.0),
        Arc(16.0, -math.pi),
        Straight(h),
        Arc(18.0, math.pi / 2),
        Straight(148.0),
        Arc(60.0, math.pi / 2),
        Straight(140.0),
        Arc(60.0, math.pi / 2),
        Straight(380.0),
        Arc(60.0, math.pi / 2),
        Straight(140.0),
        Arc(60.0, math.pi / 2),
    )
    return TrackSpec(name="hairpin", segments=segments, width=15.0)


def builtin_tracks() -> list[TrackSpec]:
    """The five named tracks used throughout the workbench.

    `train-loop` is the long mixed circuit the expert generates data on;
    `eval-a/b/c` are unseen layouts with similar corner radii; `hairpin`
    adds switchbacks far below the training loop's minimum radius.
    """
    train = rounded_polygon_spec(
        "train-loop",
        vertices=[
            (0.0, 0.0),
            (1000.0, 0.0),
            (1000.0, 420.0),
            (620.0, 420.0),
            (620.0, 260.0),
            (260.0, 260.0),
            (260.0, 650.0),
            (0.0, 650.0),
        ],
        radii=[110.0, 95.0, 85.0, 62.0, 70.0, 80.0, 90.0, 120.0],
        width=15.0,
    )
    eval_a = rounded_polygon_spec(
        "eval-a",
        vertices=[(0.0, 0.0), (500.0, 0.0), (500.0, 250.0), (250.0, 380.0), (0.0, 250.0)],
        radii=[100.0, 90.0, 120.0, 110.0, 130.0],
        width=15.0,
    )
    eval_b = rounded_polygon_spec(
        "eval-b",
        vertices=[(0.0, 0.0), (620.0, 0.0), (300.0, 460.0)],
        radii=[70.0, 65.0, 75.0],
        width=15.0,
    )
    eval_c = rounded_polygon_spec(
        "eval-c",
        vertices=[
            (0.0, 0.0),
            (380.0, 0.0),
            (380.0, 170.0),
            (580.0, 170.0),
            (580.0, 400.0),
            (0.0, 400.0),
        ],
        radii=[90.0, 65.0, 62.0, 70.0, 100.0, 85.0],
        width=15.0,
    )
    return [train, eval_a, eval_b, eval_c, _hairpin_spec()]


@lru_cache(maxsize=None)
def builtin_track(name: str) -> Track:
    """Compiled builtin track by name, cached across callers."""
    for spec in builtin_tracks():
        if spec.name == name:
            return compile_track(spec)
    names = ", ".join(s.name for s in builtin_tracks())
    raise KeyError(f"unknown track '{name}' (builtin tracks: {names})")
