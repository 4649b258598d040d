"""Harmonic / excursion measure estimators and crosscut statistics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slelab.domains import Annulus, Arc, HalfPlane, RayComplement, Rectangle, SlitDisk, UnitDisk
from slelab.geometry import CircleSpec
from slelab.measures import (
    MeasureEstimate,
    annulus_excursion_exact,
    crosscut_visit_stats,
    excursion_measure,
    excursion_sum_over_crosscuts,
    extremal_length,
    harmonic_measure,
    joint_stderr,
    rectangle_excursion_exact,
    rectangle_excursion_series,
)
from slelab.rng import RngStream


def within(est, value, k=3.0):
    return abs(est.mean - value) <= k * est.stderr


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=2, max_size=200))
def test_estimate_invariants(samples):
    est = MeasureEstimate.from_samples(samples)
    x = np.asarray(samples)
    assert est.stderr == pytest.approx(x.std(ddof=1) / math.sqrt(x.size), rel=1e-9, abs=1e-12)
    assert est.ci95[0] == pytest.approx(est.mean - 1.96 * est.stderr)
    assert est.ci95[1] == pytest.approx(est.mean + 1.96 * est.stderr)


def test_estimate_json_round_trip():
    est = MeasureEstimate(0.25, 0.01, 100, scheme="WalkOnSpheres", epsilon=1e-3)
    back = MeasureEstimate.from_dict(est.to_dict())
    assert back == est
    assert set(est.to_dict()) == {"mean", "stderr", "n", "ci95", "scheme", "epsilon"}


def test_disk_quarter_arc_from_center():
    dom = UnitDisk(arc_breaks=(0.3, 0.3 + math.pi / 2))
    est = harmonic_measure(dom, 0j, "arc0", 100_000, RngStream(1))
    assert within(est, 0.25)


def test_half_plane_diagonal_point():
    est = harmonic_measure(HalfPlane(), np.exp(1j * math.pi / 4), "R-", 100_000, RngStream(2))
    assert within(est, 0.25)


def test_ray_complement_three_quarter_angle():
    est = harmonic_measure(RayComplement(3 * math.pi / 4), 1.0, "(-inf,0)", 100_000, RngStream(3))
    assert within(est, 3 / 7)


def test_unknown_label_is_rejected():
    with pytest.raises(ValueError):
        harmonic_measure(HalfPlane(), 1j, "nope", 10, RngStream(0))


def test_rectangle_closed_forms():
    assert rectangle_excursion_exact(1.0) == math.exp(-1)
    assert rectangle_excursion_exact(1e-12) == pytest.approx(1.0)
    assert extremal_length(math.pi) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        rectangle_excursion_exact(0.0)


def test_rectangle_series_large_length_asymptote():
    # one Fourier mode dominates: 8 / (π sinh L) ~ (16/π) e^{-L}
    L = 8.0
    assert rectangle_excursion_series(L) == pytest.approx(16 / math.pi * math.exp(-L), rel=1e-6)


def test_rectangle_excursion_matches_series():
    est = excursion_measure(Rectangle(1.0), "left", "right", 1e-2, 100_000, RngStream(4))
    assert abs(est.mean - rectangle_excursion_series(1.0)) <= max(3 * est.stderr, 0.02 * est.mean)
    assert set(est.raw) == {"eps", "eps/2"}


def test_annulus_excursion():
    ann = Annulus(CircleSpec(1.0), CircleSpec(0.0))
    exact = annulus_excursion_exact(ann.inner, ann.outer)
    assert exact == pytest.approx(2 * math.pi)
    est = excursion_measure(ann, "outer", "inner", 0.1, 100_000, RngStream(5))
    assert abs(est.mean - exact) <= max(3 * est.stderr, 0.05 * exact)
    assert est.stderr < 0.05 * exact


def test_half_plane_semicircles_are_a_rectangle():
    # log maps the half-annulus between radii e^{-r} and 1 onto an r×π rectangle
    vals = []
    for r in (1.0, 1.5, 2.0, 2.5):
        outer = Arc(0j, 1.0, 0.0, math.pi)
        inner = Arc(0j, math.exp(-r), 0.0, math.pi)
        est = excursion_measure(HalfPlane(), inner, outer, 0.1 * math.exp(-r), 40_000, RngStream(6))
        assert abs(est.mean - rectangle_excursion_series(r)) <= 3 * est.stderr
        vals.append(est.mean * math.exp(r))
    assert max(vals) / min(vals) < 1.5


def test_excursion_symmetry_on_slit_disk():
    dom = SlitDisk([np.array([1.0, 0.4 + 0.1j, 0.2 + 0.3j])])
    V = Arc(0j, 0.8, 2.0, 1.5)
    W = Arc(0j, 0.5, 4.0, 1.0)
    a = excursion_measure(dom, V, W, 5e-3, 60_000, RngStream(7))
    b = excursion_measure(dom, W, V, 5e-3, 60_000, RngStream(8))
    assert abs(a.mean - b.mean) <= 3 * joint_stderr(a, b)


def test_visits_with_single_closed_circle():
    dom = UnitDisk(radius=2.0)
    stats = crosscut_visit_stats(dom, 0j, CircleSpec(0.0), 500, RngStream(9))
    assert stats.closed_component
    assert stats.expected_visits.mean == 1.0
    assert stats.hit_circle_prob.mean == 1.0


@pytest.mark.parametrize("theta", [math.pi / 4, math.pi / 2, 0.9 * math.pi])
def test_ray_complement_negative_axis_at_most_half(theta):
    dom = RayComplement(theta)
    stats = crosscut_visit_stats(dom, 1.0, None, 20_000, RngStream(10), tracked=[dom.negative_axis_target()])
    p = stats.hit_circle_prob
    assert within(p, theta / (theta + math.pi), 4)
    assert p.mean <= 0.5 + 3 * p.stderr


def test_expected_visits_bound_on_wiggly_slit():
    s = np.linspace(0, 1, 300)
    wiggle = (0.5 + 0.25 * np.sin(6 * np.pi * s + 0.3)) * np.exp(1.5j * np.pi * s)
    slit = np.concatenate([[1.0], wiggle])
    dom = SlitDisk([slit])
    stats = crosscut_visit_stats(dom, -0.1 + 0.05j, CircleSpec.from_radius(0.5), 5000, RngStream(11))
    assert len(stats.per_crosscut_probs) >= 3
    assert stats.expected_visits.mean == pytest.approx(math.fsum(p.mean for p in stats.per_crosscut_probs), abs=0)
    ev, hp = stats.expected_visits, stats.hit_circle_prob
    assert ev.mean <= 2 * hp.mean + 3 * math.hypot(ev.stderr, 2 * hp.stderr)


def test_sum_over_single_crosscut_equals_whole():
    dom = SlitDisk([np.array([1.0, 0.2])])
    res = excursion_sum_over_crosscuts(dom, CircleSpec.from_radius(0.1), CircleSpec.from_radius(0.5), 5000,
                                       RngStream(12))
    assert len(res.per_crosscut) == 1
    assert res.sum_estimate.mean == res.whole_estimate.mean


def test_sum_over_crosscuts_factor_two():
    from slelab.experiments import random_slit_disk

    for seed in range(3):
        dom = random_slit_disk(seed, 5)
        res = excursion_sum_over_crosscuts(dom, CircleSpec(1.5), CircleSpec(0.5), 3000,
                                           RngStream(13 + seed))
        assert res.sum_estimate.mean >= res.whole_estimate.mean
        assert res.holds()


def test_slit_plane_annulus_decays_at_half_rate():
    # z -> sqrt(z) sends C minus a ray onto a half-plane, halving log-radii
    dom = RayComplement(math.pi)
    vals = []
    for r in (1.0, 2.0):
        inner = CircleSpec(r)
        est = excursion_measure(dom, inner, CircleSpec(0.0), 0.1 * inner.radius, 40_000, RngStream(14))
        assert abs(est.mean - rectangle_excursion_series(r / 2)) <= 3 * est.stderr
        vals.append(est.mean * math.exp(r / 2))
    assert max(vals) / min(vals) < 1.5


def test_small_semicircle_to_arc_ratio_band():
    ratios = []
    for r in (0.05, 0.1, 0.2):
        for diam in (0.3, 1.0, 3.0):
            gamma = Arc(0j, r, 0.0, math.pi)
            eta = Arc(complex(1 + diam / 2, 0), diam / 2, 0.0, math.pi)
            est = excursion_measure(HalfPlane(), gamma, eta, 0.1 * r, 20_000, RngStream(15))
            ratios.append(est.mean / (r * min(diam, 1.0)))
    assert 0.1 <= min(ratios) and max(ratios) <= 10
