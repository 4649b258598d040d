"""Domain models, JSON descriptors and circle crosscuts."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slelab.domains import (
    Annulus,
    Arc,
    BoundaryArc,
    GenericPolygonal,
    HalfPlane,
    RayComplement,
    Rectangle,
    Segment,
    SlitDisk,
    SlitHalfPlane,
    UnitDisk,
    compile_geometry,
    domain_from_json,
    extract_crosscuts,
    nearest_primitive,
)
from slelab.geometry import CircleSpec


def spiral(turns=3.0, r0=0.05, r1=0.95, n=600):
    s = np.linspace(0, 1, n)
    r = r0 + (r1 - r0) * s
    return r * np.exp(2j * np.pi * turns * s)


def scan_fraction(domain, circle, m=100_000):
    ang = (np.arange(m) + 0.5) * 2 * np.pi / m
    pts = circle.center + circle.radius * np.exp(1j * ang)
    return float(np.mean(domain.contains(pts)))


def test_unit_disk_circle_is_closed_component():
    cuts = extract_crosscuts(UnitDisk(), CircleSpec(1.0))
    assert len(cuts) == 0 and cuts.closed_component


def test_radial_slit_leaves_one_crosscut():
    dom = SlitDisk([np.array([math.exp(-2), 1.0])])
    cuts = extract_crosscuts(dom, CircleSpec(1.0))
    assert len(cuts) == 1
    assert cuts[0].width == pytest.approx(2 * math.pi, abs=1e-9)


def wiggly_spiral(n=600):
    # winds 1.5 times while its radius oscillates through 0.5 six times
    s = np.linspace(0, 1, n)
    r = 0.5 + 0.3 * np.sin(6 * np.pi * s + 0.2) * (0.3 + s)
    return r * np.exp(3j * np.pi * s)


def test_spiral_slit_partition_matches_angular_scan():
    v = wiggly_spiral()
    dom = SlitDisk([v])
    circle = CircleSpec.from_radius(0.5)
    cuts = extract_crosscuts(dom, circle)
    d = np.abs(v) - 0.5
    hits = int(np.sum(d[:-1] * d[1:] < 0))
    assert hits == 6
    assert len(cuts) == hits
    assert cuts.total_width() == pytest.approx(2 * math.pi * scan_fraction(dom, circle), abs=10 * 1e-9 + 1e-4)


def test_partially_outside_circle_against_scan():
    dom = UnitDisk()
    circle = CircleSpec.from_radius(0.5, 0.8)
    cuts = extract_crosscuts(dom, circle)
    assert len(cuts) == 1
    assert cuts.total_width() == pytest.approx(2 * math.pi * scan_fraction(dom, circle), abs=1e-4)
    for c in cuts:
        mid = c.circle.center + c.circle.radius * np.exp(0.5j * (c.angle_start + c.angle_end))
        assert dom.contains(np.array([mid]))[0]
        for end in (c.angle_start, c.angle_end):
            assert abs(abs(c.circle.center + c.circle.radius * np.exp(1j * end)) - 1) < 1e-9


def test_circle_missing_domain_gives_empty_list():
    cuts = extract_crosscuts(UnitDisk(), CircleSpec.from_radius(0.5, 5.0))
    assert len(cuts) == 0 and not cuts.closed_component


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=-0.9, max_value=0.9))
def test_crosscut_widths_partition_circle(radius, cx):
    dom = UnitDisk()
    circle = CircleSpec.from_radius(radius, cx)
    cuts = extract_crosscuts(dom, circle)
    total = 2 * math.pi if cuts.closed_component else cuts.total_width()
    assert total == pytest.approx(2 * math.pi * scan_fraction(dom, circle, 20000), abs=2e-3)


def test_contains_consistent_with_kind():
    x, y = np.meshgrid(np.linspace(-2, 2, 41), np.linspace(-2, 2, 41))
    z = (x + 1j * y).ravel() + 1e-3 * (1 + 1j)
    assert np.array_equal(HalfPlane().contains(z), z.imag > 0)
    assert np.array_equal(UnitDisk().contains(z), np.abs(z) < 1)
    ann = Annulus(CircleSpec(1.0), CircleSpec(0.0))
    assert np.array_equal(ann.contains(z), (np.abs(z) > math.exp(-1)) & (np.abs(z) < 1))
    rect = Rectangle(1.0)
    assert np.array_equal(rect.contains(z), (z.real > 0) & (z.real < 1) & (z.imag > 0) & (z.imag < math.pi))
    assert not RayComplement(math.pi / 2).contains(np.array([0.5j]))[0]
    assert RayComplement(math.pi / 2).contains(np.array([-0.5j]))[0]
    slit = SlitHalfPlane([np.array([0.0, 1j])])
    assert not slit.contains(np.array([0.5j]))[0] and slit.contains(np.array([0.5j + 0.1]))[0]


@pytest.mark.parametrize(
    "dom",
    [
        HalfPlane(),
        UnitDisk(arc_breaks=(0.0, 1.0, 3.0)),
        SlitHalfPlane([np.array([0, 1j, 1 + 2j])]),
        SlitDisk([spiral(n=20)]),
        Rectangle(2.0),
        Annulus(CircleSpec(1.0), CircleSpec(0.0)),
        RayComplement(0.3),
        GenericPolygonal([BoundaryArc("a", (Segment(0j, 1 + 0j), Arc(0j, 2.0, 0.0, 1.0)))], scale=2.0),
    ],
)
def test_json_round_trip(dom):
    back = domain_from_json(dom.dumps())
    assert back.dumps() == dom.dumps()
    assert back.labels() == dom.labels()


def test_boundary_labels_cover_unit_disk():
    dom = UnitDisk(arc_breaks=(0.0, 2.0, 4.0))
    assert sum(arc.length() for arc in dom.boundary()) == pytest.approx(2 * math.pi)
    assert len(set(dom.boundary_labels.values())) == 3


def test_nearest_primitive_distance():
    geom = compile_geometry(Rectangle(1.0).boundary())
    d, idx = nearest_primitive(0.25, 1.0, geom.kind, geom.par, geom.role, geom.group,
                               np.zeros(1, np.int64), geom.chunk_start, geom.chunk_cx, geom.chunk_cy, geom.chunk_r)
    assert d == pytest.approx(0.25)
    assert geom.label_names[geom.label[idx]] == "left"
