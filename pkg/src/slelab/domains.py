"""Planar domains with labelled boundary pieces, and circle crosscuts.

A domain is described by its boundary, a list of :class:`BoundaryArc`
(label + primitive).  Primitives are segments, rays, full circles and
circular arcs; the walk kernels only ever see the flat array encoding
produced by :func:`compile_geometry`.
"""

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import njit
from .geometry import TOL_ANGLE, CircleSpec, PolylineCurve, segment_circle_roots, segment_distance

SEG, RAY, CIRCLE, ARC = 0, 1, 2, 3
ABSORB, TRACK = 0, 1
TWO_PI = 2.0 * math.pi
CHUNK = 16


# ------------------------------------------------------------------ primitives


@dataclass(frozen=True)
class Segment:
    p: complex
    q: complex

    def encode(self):
        return SEG, (self.p.real, self.p.imag, self.q.real, self.q.imag, 0.0, 0.0)

    def length(self):
        return abs(self.q - self.p)

    def point(self, s):
        return self.p + np.asarray(s) * (self.q - self.p)

    def left_normal(self, s):
        d = (self.q - self.p) / abs(self.q - self.p)
        return np.full(np.shape(s), 1j * d)

    def bounding_circle(self):
        c = 0.5 * (self.p + self.q)
        return c, 0.5 * abs(self.q - self.p)

    def to_json(self):
        return {"type": "segment", "p": [self.p.real, self.p.imag], "q": [self.q.real, self.q.imag]}


@dataclass(frozen=True)
class Ray:
    origin: complex
    direction: complex

    def __post_init__(self):
        d = complex(self.direction)
        if d == 0:
            raise ValueError("ray direction must be nonzero")
        object.__setattr__(self, "direction", d / abs(d))
        object.__setattr__(self, "origin", complex(self.origin))

    def encode(self):
        o, d = self.origin, self.direction
        return RAY, (o.real, o.imag, d.real, d.imag, 0.0, 0.0)

    def length(self):
        return math.inf

    def bounding_circle(self):
        return self.origin, math.inf

    def to_json(self):
        return {
            "type": "ray",
            "origin": [self.origin.real, self.origin.imag],
            "direction": [self.direction.real, self.direction.imag],
        }


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def encode(self):
        return CIRCLE, (self.center.real, self.center.imag, self.radius, 0.0, 0.0, 0.0)

    def length(self):
        return TWO_PI * self.radius

    def point(self, s):
        return self.center + self.radius * np.exp(1j * TWO_PI * np.asarray(s))

    def outward_normal(self, s):
        return np.exp(1j * TWO_PI * np.asarray(s))

    def bounding_circle(self):
        return self.center, self.radius

    def to_json(self):
        return {"type": "circle", "center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise arc from angle ``start`` spanning ``width`` radians."""

    center: complex
    radius: float
    start: float
    width: float

    def __post_init__(self):
        if not (0.0 < self.width <= TWO_PI + 1e-12):
            raise ValueError("arc width must be in (0, 2π]")
        object.__setattr__(self, "start", float(self.start) % TWO_PI)
        object.__setattr__(self, "width", min(float(self.width), TWO_PI))

    def encode(self):
        return ARC, (self.center.real, self.center.imag, self.radius, self.start, self.width, 0.0)

    def length(self):
        return self.radius * self.width

    def point(self, s):
        return self.center + self.radius * np.exp(1j * (self.start + self.width * np.asarray(s)))

    def outward_normal(self, s):
        return np.exp(1j * (self.start + self.width * np.asarray(s)))

    def endpoints(self):
        return self.point(0.0).item(), self.point(1.0).item()

    def bounding_circle(self):
        return self.center, self.radius

    def to_json(self):
        return {
            "type": "arc",
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "start": self.start,
            "width": self.width,
        }


def primitive_from_json(d):
    kind = d["type"]
    c = lambda pair: complex(pair[0], pair[1])  # noqa: E731
    if kind == "segment":
        return Segment(c(d["p"]), c(d["q"]))
    if kind == "ray":
        return Ray(c(d["origin"]), c(d["direction"]))
    if kind == "circle":
        return Circle(c(d["center"]), float(d["radius"]))
    if kind == "arc":
        return Arc(c(d["center"]), float(d["radius"]), float(d["start"]), float(d["width"]))
    raise ValueError(f"unknown primitive type {kind!r}")


def polyline_segments(points):
    pts = np.asarray(points, dtype=np.complex128)
    return [Segment(complex(a), complex(b)) for a, b in zip(pts[:-1], pts[1:])]


@dataclass(frozen=True)
class BoundaryArc:
    label: str
    pieces: tuple

    def length(self):
        return sum(p.length() for p in self.pieces)

    def to_json(self):
        return {"label": self.label, "pieces": [p.to_json() for p in self.pieces]}

    @classmethod
    def from_json(cls, d):
        return cls(d["label"], tuple(primitive_from_json(p) for p in d["pieces"]))


def _as_vertices(curve):
    if isinstance(curve, PolylineCurve):
        return curve.vertices
    return np.asarray(curve, dtype=np.complex128)


# ------------------------------------------------------------------ domains


class Domain:
    """Base class.  Subclasses define ``kind``, ``boundary()`` and ``contains``."""

    kind = "abstract"
    scale = 1.0

    def boundary(self):
        raise NotImplementedError

    def contains(self, z):
        raise NotImplementedError

    @property
    def boundary_labels(self):
        return {i: arc.label for i, arc in enumerate(self.boundary())}

    def labels(self):
        return [arc.label for arc in self.boundary()]

    def arc(self, label):
        for arc in self.boundary():
            if arc.label == label:
                return arc
        raise KeyError(label)

    def _params(self):
        return {}

    def to_json(self):
        return {
            "kind": self.kind,
            **self._params(),
            "arcs": [arc.to_json() for arc in self.boundary()],
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    def _slit_free(self, z, slits):
        z = np.asarray(z, dtype=np.complex128)
        ok = np.ones(z.shape, dtype=bool)
        for s in slits:
            v = _as_vertices(s)
            flat = z.ravel()
            mask = ok.ravel()
            for i in range(flat.size):
                if mask[i]:
                    mask[i] = _polyline_min_distance(flat[i].real, flat[i].imag, v.real.copy(), v.imag.copy()) > 1e-14
            ok = mask.reshape(z.shape)
        return ok


@njit
def _polyline_min_distance(px, py, vx, vy):
    best = np.inf
    for k in range(vx.shape[0] - 1):
        d = segment_distance(px, py, vx[k], vy[k], vx[k + 1], vy[k + 1])
        if d < best:
            best = d
    return best


class HalfPlane(Domain):
    kind = "HalfPlane"

    def boundary(self):
        return [BoundaryArc("R-", (Ray(0j, -1.0),)), BoundaryArc("R+", (Ray(0j, 1.0),))]

    def contains(self, z):
        return np.asarray(z).imag > 0


class UnitDisk(Domain):
    """Disk |z| < radius; ``arc_breaks`` splits the circle into labelled arcs."""

    kind = "UnitDisk"

    def __init__(self, radius=1.0, arc_breaks=()):
        self.radius = float(radius)
        self.arc_breaks = tuple(sorted(float(a) % TWO_PI for a in arc_breaks))
        self.scale = self.radius

    def boundary(self):
        if len(self.arc_breaks) < 2:
            return [BoundaryArc("circle", (Circle(0j, self.radius),))]
        arcs = []
        b = self.arc_breaks
        for i, a0 in enumerate(b):
            a1 = b[(i + 1) % len(b)]
            width = (a1 - a0) % TWO_PI
            arcs.append(BoundaryArc(f"arc{i}", (Arc(0j, self.radius, a0, width),)))
        return arcs

    def contains(self, z):
        return np.abs(np.asarray(z)) < self.radius

    def _params(self):
        return {"radius": self.radius, "arc_breaks": list(self.arc_breaks)}


class SlitHalfPlane(Domain):
    kind = "SlitHalfPlane"

    def __init__(self, slits):
        self.slits = tuple(_as_vertices(s) for s in slits)

    def boundary(self):
        arcs = HalfPlane().boundary()
        for i, v in enumerate(self.slits):
            arcs.append(BoundaryArc(f"slit{i}", tuple(polyline_segments(v))))
        return arcs

    def contains(self, z):
        return (np.asarray(z).imag > 0) & self._slit_free(z, self.slits)

    def _params(self):
        return {"slits": [[[p.real, p.imag] for p in v] for v in self.slits]}


class SlitDisk(Domain):
    kind = "SlitDisk"

    def __init__(self, slits, radius=1.0):
        self.slits = tuple(_as_vertices(s) for s in slits)
        self.radius = float(radius)
        self.scale = self.radius

    def boundary(self):
        arcs = [BoundaryArc("circle", (Circle(0j, self.radius),))]
        for i, v in enumerate(self.slits):
            arcs.append(BoundaryArc(f"slit{i}", tuple(polyline_segments(v))))
        return arcs

    def contains(self, z):
        return (np.abs(np.asarray(z)) < self.radius) & self._slit_free(z, self.slits)

    def _params(self):
        return {"radius": self.radius, "slits": [[[p.real, p.imag] for p in v] for v in self.slits]}


class Rectangle(Domain):
    """(0, L) x (0, π)."""

    kind = "Rectangle"

    def __init__(self, L):
        if L <= 0:
            raise ValueError("L must be positive")
        self.L = float(L)
        self.scale = max(self.L, math.pi)

    def boundary(self):
        L, h = self.L, math.pi
        return [
            BoundaryArc("left", (Segment(0j, complex(0, h)),)),
            BoundaryArc("right", (Segment(complex(L, 0), complex(L, h)),)),
            BoundaryArc("bottom", (Segment(0j, complex(L, 0)),)),
            BoundaryArc("top", (Segment(complex(0, h), complex(L, h)),)),
        ]

    def contains(self, z):
        z = np.asarray(z)
        return (z.real > 0) & (z.real < self.L) & (z.imag > 0) & (z.imag < math.pi)

    def _params(self):
        return {"L": self.L}


class Annulus(Domain):
    kind = "Annulus"

    def __init__(self, inner, outer):
        if not isinstance(inner, CircleSpec):
            inner = CircleSpec(float(inner))
        if not isinstance(outer, CircleSpec):
            outer = CircleSpec(float(outer))
        if inner.radius >= outer.radius:
            raise ValueError("inner circle must be smaller than outer circle")
        self.inner, self.outer = inner, outer
        self.scale = outer.radius

    def boundary(self):
        return [
            BoundaryArc("inner", (Circle(self.inner.center, self.inner.radius),)),
            BoundaryArc("outer", (Circle(self.outer.center, self.outer.radius),)),
        ]

    def contains(self, z):
        m = np.abs(np.asarray(z) - self.inner.center)
        return (m > self.inner.radius) & (m < self.outer.radius)

    def _params(self):
        return {"r_inner": self.inner.log_radius_neg, "r_outer": self.outer.log_radius_neg}


class RayComplement(Domain):
    """C minus the ray e^{iθ}[0, ∞)."""

    kind = "RayComplement"

    def __init__(self, theta):
        self.theta = float(theta)

    def boundary(self):
        return [BoundaryArc("ray", (Ray(0j, cmath.exp(1j * self.theta)),))]

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        w = z * cmath.exp(-1j * self.theta)
        return ~((np.abs(w.imag) <= 1e-15 * np.maximum(np.abs(w), 1.0)) & (w.real >= 0))

    def negative_axis_target(self):
        """The crosscut (-∞, 0) as an interior target set."""
        return BoundaryArc("(-inf,0)", (Ray(0j, -1.0),))

    def _params(self):
        return {"theta": self.theta}


class GenericPolygonal(Domain):
    """Plane (or the interior of ``outer``) minus the given labelled arcs.

    ``outer`` is an optional closed polygon (vertex list); its edges must
    appear among ``arcs`` for the boundary to be complete.
    """

    kind = "GenericPolygonal"

    def __init__(self, arcs, outer=None, scale=1.0):
        self.arcs = tuple(arcs)
        self.outer = None if outer is None else np.asarray(outer, dtype=np.complex128)
        self.scale = float(scale)

    def boundary(self):
        return list(self.arcs)

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        ok = np.ones(z.shape, dtype=bool)
        if self.outer is not None:
            ok &= _point_in_polygon(z, self.outer)
        if getattr(self, "_geom", None) is None:
            self._geom = compile_geometry(self.arcs)
        flat = z.ravel()
        mask = ok.ravel()
        for i in range(flat.size):
            if mask[i]:
                mask[i] = _boundary_distance(flat[i], self._geom) > 1e-14
        return mask.reshape(z.shape)

    def _params(self):
        out = {"scale": self.scale}
        if self.outer is not None:
            out["outer"] = [[p.real, p.imag] for p in self.outer]
        return out


def _point_in_polygon(z, poly):
    x, y = z.real, z.imag
    inside = np.zeros(z.shape, dtype=bool)
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        cond = (a.imag > y) != (b.imag > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
        inside ^= cond & (x < xc)
    return inside


def _boundary_distance(z, geom):
    d, _ = nearest_primitive(z.real, z.imag, geom.kind, geom.par, geom.role, geom.group,
                             np.zeros(1, np.int64), geom.chunk_start, geom.chunk_cx,
                             geom.chunk_cy, geom.chunk_r)
    return d


def domain_from_json(d):
    if isinstance(d, str):
        d = json.loads(d)
    kind = d["kind"]
    pts = lambda lst: np.array([complex(a, b) for a, b in lst], dtype=np.complex128)  # noqa: E731
    if kind == "HalfPlane":
        return HalfPlane()
    if kind == "UnitDisk":
        return UnitDisk(d.get("radius", 1.0), d.get("arc_breaks", ()))
    if kind == "SlitHalfPlane":
        return SlitHalfPlane([pts(s) for s in d["slits"]])
    if kind == "SlitDisk":
        return SlitDisk([pts(s) for s in d["slits"]], d.get("radius", 1.0))
    if kind == "Rectangle":
        return Rectangle(d["L"])
    if kind == "Annulus":
        return Annulus(CircleSpec(d["r_inner"]), CircleSpec(d["r_outer"]))
    if kind == "RayComplement":
        return RayComplement(d["theta"])
    if kind == "GenericPolygonal":
        arcs = [BoundaryArc.from_json(a) for a in d["arcs"]]
        outer = pts(d["outer"]) if "outer" in d else None
        return GenericPolygonal(arcs, outer, d.get("scale", 1.0))
    raise ValueError(f"unknown domain kind {kind!r}")


# ------------------------------------------------------------------ kernel geometry


@dataclass
class Geometry:
    """Flat encoding of boundary + tracked sets for the walk kernels."""

    kind: np.ndarray
    par: np.ndarray
    label: np.ndarray
    role: np.ndarray
    group: np.ndarray
    chunk_start: np.ndarray
    chunk_cx: np.ndarray
    chunk_cy: np.ndarray
    chunk_r: np.ndarray
    label_names: list = field(default_factory=list)
    n_groups: int = 0

    def label_index(self, name):
        return self.label_names.index(name)

    def arrays(self):
        return (self.kind, self.par, self.label, self.role, self.group,
                self.chunk_start, self.chunk_cx, self.chunk_cy, self.chunk_r)


def compile_geometry(absorbing, tracked=()):
    """Encode absorbing arcs and tracked (visit-recorded) sets.

    ``absorbing`` is a list of :class:`BoundaryArc`; ``tracked`` a list of
    BoundaryArc whose visits are recorded without stopping the walk.  Each
    tracked entry is one visit group.
    """
    kinds, pars, labels, roles, groups = [], [], [], [], []
    starts, ccx, ccy, cr = [0], [], [], []
    names = []

    def add(arc, role, group):
        if arc.label not in names:
            names.append(arc.label)
        lab = names.index(arc.label)
        pieces = list(arc.pieces)
        for i in range(0, len(pieces), CHUNK):
            block = pieces[i:i + CHUNK]
            for p in block:
                k, par = p.encode()
                kinds.append(k)
                pars.append(par)
                labels.append(lab)
                roles.append(role)
                groups.append(group)
            c, r = _bounding(block)
            starts.append(len(kinds))
            ccx.append(c.real)
            ccy.append(c.imag)
            cr.append(r)

    for arc in absorbing:
        add(arc, ABSORB, -1)
    for g, arc in enumerate(tracked):
        add(arc, TRACK, g)
    return Geometry(
        np.array(kinds, dtype=np.int64),
        np.array(pars, dtype=np.float64).reshape(-1, 6),
        np.array(labels, dtype=np.int64),
        np.array(roles, dtype=np.int64),
        np.array(groups, dtype=np.int64),
        np.array(starts, dtype=np.int64),
        np.array(ccx, dtype=np.float64),
        np.array(ccy, dtype=np.float64),
        np.array(cr, dtype=np.float64),
        names,
        len(tracked),
    )


def _bounding(block):
    pts = []
    for p in block:
        if isinstance(p, Ray):
            return p.origin, math.inf
        if isinstance(p, Segment):
            pts.extend([p.p, p.q])
        else:
            c, r = p.bounding_circle()
            pts.extend([c + r, c - r, c + 1j * r, c - 1j * r])
    pts = np.array(pts)
    c = 0.5 * (pts.real.min() + pts.real.max()) + 0.5j * (pts.imag.min() + pts.imag.max())
    return c, float(np.max(np.abs(pts - c))) * (1 + 1e-12)


@njit
def prim_distance(k, p, x, y):
    if k == SEG:
        return segment_distance(x, y, p[0], p[1], p[2], p[3])
    if k == RAY:
        t = (x - p[0]) * p[2] + (y - p[1]) * p[3]
        if t < 0.0:
            t = 0.0
        return math.hypot(x - p[0] - t * p[2], y - p[1] - t * p[3])
    rad = math.hypot(x - p[0], y - p[1])
    if k == CIRCLE:
        return abs(rad - p[2])
    rel = (math.atan2(y - p[1], x - p[0]) - p[3]) % TWO_PI
    if rel <= p[4]:
        return abs(rad - p[2])
    e0x = p[0] + p[2] * math.cos(p[3])
    e0y = p[1] + p[2] * math.sin(p[3])
    e1x = p[0] + p[2] * math.cos(p[3] + p[4])
    e1y = p[1] + p[2] * math.sin(p[3] + p[4])
    return min(math.hypot(x - e0x, y - e0y), math.hypot(x - e1x, y - e1y))


@njit
def prim_project(k, p, x, y):
    if k == SEG:
        dx = p[2] - p[0]
        dy = p[3] - p[1]
        l2 = dx * dx + dy * dy
        u = 0.0
        if l2 > 0.0:
            u = min(max(((x - p[0]) * dx + (y - p[1]) * dy) / l2, 0.0), 1.0)
        return p[0] + u * dx, p[1] + u * dy
    if k == RAY:
        t = max((x - p[0]) * p[2] + (y - p[1]) * p[3], 0.0)
        return p[0] + t * p[2], p[1] + t * p[3]
    ang = math.atan2(y - p[1], x - p[0])
    if k == ARC:
        rel = (ang - p[3]) % TWO_PI
        if rel > p[4]:
            # nearest endpoint
            if (rel - p[4]) < (TWO_PI - rel):
                ang = p[3] + p[4]
            else:
                ang = p[3]
    return p[0] + p[2] * math.cos(ang), p[1] + p[2] * math.sin(ang)


@njit
def prim_cross(k, p, x0, y0, x1, y1):
    """Smallest parameter u in [0, 1] where segment (x0,y0)-(x1,y1) meets the primitive; -1 if none."""
    dx = x1 - x0
    dy = y1 - y0
    if k == SEG or k == RAY:
        ex = p[2] - p[0] if k == SEG else p[2]
        ey = p[3] - p[1] if k == SEG else p[3]
        den = dx * ey - dy * ex
        if den == 0.0:
            return -1.0
        wx = p[0] - x0
        wy = p[1] - y0
        u = (wx * ey - wy * ex) / den
        s = (wx * dy - wy * dx) / den
        if u < 0.0 or u > 1.0 or s < 0.0:
            return -1.0
        if k == SEG and s > 1.0:
            return -1.0
        return u
    u1, u2 = segment_circle_roots(x0, y0, x1, y1, p[0], p[1], p[2])
    for u in (u1, u2):
        if u == u:
            if k == CIRCLE:
                return u
            ax = x0 + u * dx - p[0]
            ay = y0 + u * dy - p[1]
            rel = (math.atan2(ay, ax) - p[3]) % TWO_PI
            if rel <= p[4]:
                return u
    return -1.0


@njit
def nearest_primitive(x, y, kind, par, role, group, visited, chunk_start, ccx, ccy, cr):
    """Distance to the nearest live primitive and its index.

    Tracked primitives whose group is marked in ``visited`` are ignored.
    """
    best = np.inf
    idx = -1
    for c in range(ccx.shape[0]):
        if cr[c] < np.inf:
            lb = math.hypot(x - ccx[c], y - ccy[c]) - cr[c]
            if lb >= best:
                continue
        for j in range(chunk_start[c], chunk_start[c + 1]):
            if role[j] == TRACK and visited[group[j]] != 0:
                continue
            d = prim_distance(kind[j], par[j], x, y)
            if d < best:
                best = d
                idx = j
    return best, idx


# ------------------------------------------------------------------ crosscuts


@dataclass(frozen=True)
class Crosscut:
    circle: CircleSpec
    angle_start: float
    angle_end: float
    endpoint_labels: tuple = ()

    @property
    def width(self):
        return self.angle_end - self.angle_start

    def primitive(self):
        return Arc(self.circle.center, self.circle.radius, self.angle_start, self.width)

    def as_arc(self, label):
        return BoundaryArc(label, (self.primitive(),))


class CrosscutList(list):
    """List of crosscuts with diagnostic flags."""

    def __init__(self, items=(), closed_component=False, tangency_warning=False):
        super().__init__(items)
        self.closed_component = closed_component
        self.tangency_warning = tangency_warning

    def total_width(self):
        return sum(c.width for c in self)


def _circle_hits(prim, cx, cy, R):
    """(angles, tangency) where the circle meets a boundary primitive."""
    angles = []
    tangent = False
    k, p = prim.encode()
    if k == SEG or k == RAY:
        x0, y0 = p[0], p[1]
        if k == SEG:
            x1, y1 = p[2], p[3]
        else:
            far = math.hypot(x0 - cx, y0 - cy) + 2 * R + 1.0
            x1, y1 = x0 + far * p[2], y0 + far * p[3]
        dx, dy = x1 - x0, y1 - y0
        fx, fy = x0 - cx, y0 - cy
        a = dx * dx + dy * dy
        b = 2 * (fx * dx + fy * dy)
        c = fx * fx + fy * fy - R * R
        disc = b * b - 4 * a * c
        if disc >= 0 and a > 0:
            if disc <= 1e-24 * max(b * b, 1e-300):
                tangent = True
            u1, u2 = segment_circle_roots(x0, y0, x1, y1, cx, cy, R)
            for u in (u1, u2):
                if u == u:
                    angles.append(math.atan2(y0 + u * dy - cy, x0 + u * dx - cx))
    else:
        c0 = complex(p[0], p[1])
        r0 = p[2]
        dist = abs(c0 - complex(cx, cy))
        if dist == 0 and abs(r0 - R) < 1e-14 * R:
            raise ValueError("circle coincides with a boundary circle")
        if dist > 0 and abs(R - r0) <= dist <= R + r0:
            base = math.atan2(p[1] - cy, p[0] - cx)
            cosang = (R * R + dist * dist - r0 * r0) / (2 * R * dist)
            cosang = min(1.0, max(-1.0, cosang))
            half = math.acos(cosang)
            if half < 1e-12:
                tangent = True
            for ang in (base - half, base + half):
                z = complex(cx, cy) + R * cmath.exp(1j * ang)
                if k == CIRCLE:
                    angles.append(ang)
                else:
                    rel = (cmath.phase(z - c0) - p[3]) % TWO_PI
                    if rel <= p[4] + 1e-15:
                        angles.append(ang)
    return angles, tangent


def extract_crosscuts(domain, circle):
    """Connected components of ``domain ∩ circle`` as arcs.

    If the circle meets the boundary nowhere, the list is empty and
    ``closed_component`` tells whether the whole circle lies in the domain.
    """
    cx, cy, R = circle.center.real, circle.center.imag, circle.radius
    hits = []
    tangency = False
    for arc in domain.boundary():
        for prim in arc.pieces:
            angs, tan = _circle_hits(prim, cx, cy, R)
            tangency |= tan
            hits.extend((a % TWO_PI, arc.label) for a in angs)
    if not hits:
        inside = bool(domain.contains(np.array([circle.center + R]))[0])
        return CrosscutList([], closed_component=inside)
    hits.sort()
    merged = [list(hits[0])]
    for a, lab in hits[1:]:
        if a - merged[-1][0] <= TOL_ANGLE:
            continue
        merged.append([a, lab])
    if len(merged) > 1 and (merged[0][0] + TWO_PI) - merged[-1][0] <= TOL_ANGLE:
        merged.pop()
    out = []
    n = len(merged)
    for i in range(n):
        a0, lab0 = merged[i]
        a1, lab1 = merged[(i + 1) % n]
        if n == 1:
            a1 = a0 + TWO_PI
        elif a1 <= a0:
            a1 += TWO_PI
        mid = circle.center + R * cmath.exp(0.5j * (a0 + a1))
        if bool(domain.contains(np.array([mid]))[0]):
            out.append(Crosscut(circle, a0, a1, (lab0, lab1)))
    return CrosscutList(out, tangency_warning=tangency)
