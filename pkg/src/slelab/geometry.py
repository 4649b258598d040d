"""Planar curves, circles and segment queries."""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import njit

TOL_ANGLE = 1e-9
TOL_SELF_REL = 1e-7


class PointAtInfinity:
    """Label for the point at infinity; never used as a coordinate."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (PointAtInfinity, ())


INFINITY = PointAtInfinity()


def is_infinity(z):
    return z is INFINITY


@dataclass(frozen=True)
class CircleSpec:
    """Circle of radius ``exp(-log_radius_neg)`` about ``center``.

    Follows the convention C_r = {|z| = e^{-r}}; ``r`` may be negative.
    """

    log_radius_neg: float
    center: complex = 0j

    def __post_init__(self):
        if not math.isfinite(self.log_radius_neg):
            raise ValueError("log_radius_neg must be finite")

    @classmethod
    def from_radius(cls, radius, center=0j):
        if radius <= 0:
            raise ValueError("radius must be positive")
        return cls(-math.log(radius), complex(center))

    @property
    def radius(self):
        return math.exp(-self.log_radius_neg)

    def point(self, angle):
        return self.center + self.radius * np.exp(1j * np.asarray(angle))


@dataclass(frozen=True, eq=False)
class PolylineCurve:
    """Open polyline with one capacity timestamp per vertex."""

    vertices: np.ndarray
    times: np.ndarray
    simple_expected: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.complex128).ravel())
        t = np.ascontiguousarray(np.asarray(self.times, dtype=np.float64).ravel())
        if v.size == 0:
            raise ValueError("curve needs at least one vertex")
        if v.shape != t.shape:
            raise ValueError("vertices and times must have the same length")
        if not (np.all(np.isfinite(v.real)) and np.all(np.isfinite(v.imag)) and np.all(np.isfinite(t))):
            raise ValueError("curve coordinates and times must be finite")
        if v.size > 1:
            if np.any(np.diff(t) <= 0):
                raise ValueError("times must be strictly increasing")
            if np.any(v[1:] == v[:-1]):
                raise ValueError("consecutive vertices must be distinct")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "times", t)

    @classmethod
    def from_points(cls, points, times=None, **kwargs):
        points = np.asarray(points, dtype=np.complex128)
        if times is None:
            times = np.arange(points.size, dtype=np.float64)
        return cls(points, times, **kwargs)

    def __len__(self):
        return self.vertices.size

    @property
    def n_segments(self):
        return max(self.vertices.size - 1, 0)

    def diameter(self):
        v = self.vertices
        if v.size < 2:
            return 0.0
        # the diameter is attained on hull vertices
        if v.size > 64:
            from scipy.spatial import ConvexHull

            pts = np.column_stack([v.real, v.imag])
            try:
                hull = pts[ConvexHull(pts).vertices]
                v = hull[:, 0] + 1j * hull[:, 1]
            except Exception:
                pass
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    def length(self):
        return float(np.sum(np.abs(np.diff(self.vertices))))

    def truncated(self, t_end):
        """Curve restricted to times <= t_end (with an interpolated endpoint)."""
        t = self.times
        k = int(np.searchsorted(t, t_end, side="right"))
        if k >= t.size:
            return self
        if k == 0:
            return PolylineCurve(self.vertices[:1], t[:1], self.simple_expected)
        if t[k - 1] == t_end:
            return PolylineCurve(self.vertices[:k], t[:k], self.simple_expected)
        u = (t_end - t[k - 1]) / (t[k] - t[k - 1])
        z = self.vertices[k - 1] + u * (self.vertices[k] - self.vertices[k - 1])
        return PolylineCurve(
            np.append(self.vertices[:k], z), np.append(t[:k], t_end), self.simple_expected
        )

    def self_intersection_pairs(self, tol=None):
        """Index pairs (i, j), j >= i + 2, of segments that cross or come closer than ``tol``.

        ``tol`` defaults to tol_self = 1e-7·diameter.
        """
        if tol is None:
            tol = TOL_SELF_REL * max(self.diameter(), 1e-300)
        v = self.vertices
        return _self_intersection_pairs(v.real.copy(), v.imag.copy(), float(tol), True)

    def self_intersections(self, tol=None):
        """Number of non-adjacent segment pairs that cross or are closer than ``tol``."""
        return int(self.self_intersection_pairs(tol).shape[0])

    def is_simple(self, tol=None):
        return self.self_intersections(tol) == 0

    def to_csv(self, path=None):
        buf = io.StringIO()
        buf.write("t,re,im\n")
        for t, z in zip(self.times, self.vertices):
            buf.write(f"{float(t)!r},{float(z.real)!r},{float(z.imag)!r}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path_or_text, **kwargs):
        if "\n" in str(path_or_text):
            fh = io.StringIO(path_or_text)
        else:
            fh = open(path_or_text, encoding="utf-8", newline="")
        with fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header] != ["t", "re", "im"]:
                raise ValueError(f"expected header t,re,im, got {header}")
            rows = [(float(a), float(b), float(c)) for a, b, c in reader]
        arr = np.array(rows, dtype=np.float64).reshape(-1, 3)
        return cls(arr[:, 1] + 1j * arr[:, 2], arr[:, 0], **kwargs)


# ---------------------------------------------------------------- kernels


@njit
def segment_distance(px, py, x0, y0, x1, y1):
    dx = x1 - x0
    dy = y1 - y0
    l2 = dx * dx + dy * dy
    u = 0.0
    if l2 > 0.0:
        u = ((px - x0) * dx + (py - y0) * dy) / l2
        if u < 0.0:
            u = 0.0
        elif u > 1.0:
            u = 1.0
    ex = x0 + u * dx - px
    ey = y0 + u * dy - py
    return math.sqrt(ex * ex + ey * ey)


@njit
def polyline_distance(px, py, vx, vy):
    n = vx.shape[0]
    if n == 1:
        return math.hypot(px - vx[0], py - vy[0])
    best = np.inf
    for k in range(n - 1):
        d = segment_distance(px, py, vx[k], vy[k], vx[k + 1], vy[k + 1])
        if d < best:
            best = d
    return best


@njit
def segment_circle_roots(x0, y0, x1, y1, cx, cy, r):
    """Parameters u in [0, 1] where the segment meets the circle (nan if absent)."""
    dx = x1 - x0
    dy = y1 - y0
    fx = x0 - cx
    fy = y0 - cy
    a = dx * dx + dy * dy
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - r * r
    u1 = np.nan
    u2 = np.nan
    if a == 0.0:
        return u1, u2
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return u1, u2
    sq = math.sqrt(disc)
    # numerically stable pair of roots
    if b >= 0.0:
        q = -0.5 * (b + sq)
    else:
        q = -0.5 * (b - sq)
    ra = q / a
    rb = c / q if q != 0.0 else ra
    lo = min(ra, rb)
    hi = max(ra, rb)
    if 0.0 <= lo <= 1.0:
        u1 = lo
    if 0.0 <= hi <= 1.0:
        u2 = hi
    return u1, u2


@njit
def first_circle_crossing(vx, vy, times, cx, cy, r, from_time):
    """Earliest time >= from_time at which the polyline meets the circle, or nan."""
    n = vx.shape[0]
    if n == 0 or from_time > times[n - 1]:
        return np.nan
    if n == 1:
        if abs(math.hypot(vx[0] - cx, vy[0] - cy) - r) <= 1e-15 * r and times[0] >= from_time:
            return times[0]
        return np.nan
    for k in range(n - 1):
        t0 = times[k]
        t1 = times[k + 1]
        if t1 < from_time:
            continue
        u_start = 0.0
        if t0 < from_time:
            u_start = (from_time - t0) / (t1 - t0)
        u1, u2 = segment_circle_roots(vx[k], vy[k], vx[k + 1], vy[k + 1], cx, cy, r)
        best = np.nan
        if u1 == u1 and u1 >= u_start:
            best = u1
        elif u2 == u2 and u2 >= u_start:
            best = u2
        if best == best:
            return t0 + best * (t1 - t0)
    return np.nan


@njit
def _segments_distance(ax, ay, bx, by, cx, cy, dx, dy):
    # zero when the segments properly intersect
    d1x = bx - ax
    d1y = by - ay
    d2x = dx - cx
    d2y = dy - cy
    den = d1x * d2y - d1y * d2x
    if den != 0.0:
        s = ((cx - ax) * d2y - (cy - ay) * d2x) / den
        t = ((cx - ax) * d1y - (cy - ay) * d1x) / den
        if 0.0 <= s <= 1.0 and 0.0 <= t <= 1.0:
            return 0.0
    m = segment_distance(ax, ay, cx, cy, dx, dy)
    m = min(m, segment_distance(bx, by, cx, cy, dx, dy))
    m = min(m, segment_distance(cx, cy, ax, ay, bx, by))
    m = min(m, segment_distance(dx, dy, ax, ay, bx, by))
    return m


@njit
def _self_intersection_pairs(vx, vy, tol, touch):
    """(i, j) pairs of non-adjacent segments closer than ``tol`` (or crossing, if ``touch``)."""
    n = vx.shape[0] - 1
    cap = 16
    out = np.empty((cap, 2), dtype=np.int64)
    count = 0
    for i in range(n):
        xmin_i = min(vx[i], vx[i + 1]) - tol
        xmax_i = max(vx[i], vx[i + 1]) + tol
        ymin_i = min(vy[i], vy[i + 1]) - tol
        ymax_i = max(vy[i], vy[i + 1]) + tol
        for j in range(i + 2, n):
            if max(vx[j], vx[j + 1]) < xmin_i or min(vx[j], vx[j + 1]) > xmax_i:
                continue
            if max(vy[j], vy[j + 1]) < ymin_i or min(vy[j], vy[j + 1]) > ymax_i:
                continue
            d = _segments_distance(
                vx[i], vy[i], vx[i + 1], vy[i + 1], vx[j], vy[j], vx[j + 1], vy[j + 1]
            )
            if d < tol or (touch and d == 0.0):
                if count == cap:
                    cap *= 2
                    grown = np.empty((cap, 2), dtype=np.int64)
                    grown[:count] = out[:count]
                    out = grown
                out[count, 0] = i
                out[count, 1] = j
                count += 1
    return out[:count]


# ---------------------------------------------------------------- public API


def distance_point_to_curve(z, curve):
    """Euclidean distance from ``z`` to the polyline (segment-wise minimum)."""
    z = complex(z)
    v = curve.vertices
    return float(polyline_distance(z.real, z.imag, v.real.copy(), v.imag.copy()))


def curve_hits_circle(curve, circle, from_time=None):
    """First capacity time >= ``from_time`` at which ``curve`` meets ``circle``.

    Returns ``None`` when there is no crossing.  Uses exact segment/circle
    intersection with linear time interpolation along each segment.
    """
    v = curve.vertices
    if from_time is None:
        from_time = float(curve.times[0])
    t = first_circle_crossing(
        v.real.copy(),
        v.imag.copy(),
        curve.times,
        circle.center.real,
        circle.center.imag,
        circle.radius,
        float(from_time),
    )
    return None if math.isnan(t) else float(t)
