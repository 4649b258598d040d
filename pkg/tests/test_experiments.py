"""Configuration, exponent fitting, records and small end-to-end experiment runs."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slelab.experiments import (
    EXPERIMENT_IDS,
    ConfigError,
    ExperimentConfig,
    FitError,
    fit_exponent,
    plan_units,
    random_slit_disk,
    random_slit_plane,
    run_at_most_half,
    run_experiment,
    run_thm1,
    sin_power_cdf,
    validate_record,
    verdict_line,
)


def test_fit_noiseless_exponential():
    xs = np.linspace(0.5, 2.5, 5)
    fit = fit_exponent([(x, math.exp(-2 * x), 1e-3) for x in xs])
    assert round(fit.slope, 3) == 2.0
    assert fit.r2 == pytest.approx(1.0)


def test_fit_noisy_exponential():
    gen = np.random.default_rng(0)
    xs = np.linspace(0.5, 2.5, 5)
    p = 0.5 * np.exp(-xs) * (1 + 0.01 * gen.normal(size=xs.size))
    fit = fit_exponent([(x, pi, 0.01 * pi) for x, pi in zip(xs, p)])
    assert abs(fit.slope - 1.0) <= 0.05
    assert fit.intercept == pytest.approx(math.log(2), abs=0.05)


def test_fit_constant_probability():
    fit = fit_exponent([(x, 0.3, 0.01) for x in (1.0, 2.0, 3.0)])
    assert fit.slope == pytest.approx(0.0, abs=1e-12)


def test_fit_errors():
    with pytest.raises(FitError):
        fit_exponent([(1.0, 0.5, 0.1)] * 3)
    with pytest.raises(FitError):
        fit_exponent([(1.0, 0.5, 0.1), (2.0, 0.3, 0.1)])
    with pytest.raises(FitError):
        fit_exponent([(1.0, 0.5, 0.1), (2.0, 0.0, 0.1), (3.0, 0.1, 0.1)])


@settings(max_examples=50, deadline=None)
@given(
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=0, max_value=2),
    st.lists(st.floats(min_value=0, max_value=3), min_size=3, max_size=8, unique=True),
)
def test_fit_recovers_exact_line(slope, c, xs):
    if np.ptp(xs) < 1e-3:
        return
    cells = [(x, math.exp(-(c + slope * x)), 0.01 * math.exp(-(c + slope * x))) for x in xs]
    fit = fit_exponent(cells)
    assert fit.slope == pytest.approx(slope, abs=1e-8)
    assert np.allclose(fit.predict(xs), [c + slope * x for x in xs], atol=1e-8)


def test_fit_weights_follow_delta_method():
    fit = fit_exponent([(0.0, 0.5, 0.05), (1.0, 0.2, 0.01), (2.0, 0.1, 0.02)])
    assert [cell[2] for cell in fit.cells] == pytest.approx([0.1, 0.05, 0.2])
    w = 1 / np.array([0.1, 0.05, 0.2]) ** 2
    x = np.array([0.0, 1.0, 2.0])
    xm = (w * x).sum() / w.sum()
    assert fit.slope_stderr == pytest.approx(math.sqrt(1 / (w * (x - xm) ** 2).sum()))


@pytest.mark.parametrize("eid", EXPERIMENT_IDS)
def test_config_round_trip(eid):
    cfg = ExperimentConfig(eid)
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg


@settings(max_examples=50, deadline=None)
@given(
    st.sampled_from(["thm1", "thm2", "thm3"]),
    st.floats(min_value=0.5, max_value=4.0),
    st.integers(min_value=100, max_value=10**6),
    st.integers(min_value=0, max_value=2**63),
)
def test_config_round_trip_property(eid, kappa, n, seed):
    cfg = ExperimentConfig(eid, kappa=kappa, replicates=n, master_seed=seed)
    assert ExperimentConfig.from_dict(json.loads(cfg.to_json())) == cfg


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(experiment_id="nope"),
        dict(experiment_id="thm1", grid=[]),
        dict(experiment_id="thm1", grid=[1.0, 0.5]),
        dict(experiment_id="thm1", replicates=10),
        dict(experiment_id="thm1", kappa=6.0),
        dict(experiment_id="thm1", grid=[0.5, 3.0]),
        dict(experiment_id="thm3", theta=4.0),
        dict(experiment_id="boundary_est", grid=[0.1, 2.0]),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kwargs)


def test_config_rejects_unknown_fields():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment_id": "thm1", "bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json("not json")


def test_verdict_line_format():
    assert verdict_line("thm1", "slope", 1.03, 1.0, 0.2, True) == "thm1 slope=1.03 target=1.00 tol=0.20 PASS"


def test_units_partition_replicates():
    cfg = ExperimentConfig("thm1", replicates=1000, chunk=300)
    units = plan_units(cfg)
    assert [(u["start"], u["stop"]) for u in units] == [(0, 300), (300, 600), (600, 900), (900, 1000)]


def test_thm1_smoke_and_resume_equality():
    cfg = ExperimentConfig("thm1", replicates=100, chunk=25, grid=[0.0, 0.5, 1.0, 1.5, 2.0, 2.5])
    stored = {}
    rec = run_experiment(cfg, on_unit=lambda i, r: stored.setdefault(i, r))
    d = rec.to_dict()
    validate_record(d)
    assert len(d["cells"]) == 6
    assert d["cells"][0]["p_hat"] == 1.0
    p = [c["p_hat"] for c in d["cells"]]
    assert all(b <= a for a, b in zip(p, p[1:]))
    assert any(line.startswith("thm1 slope=") for line in rec.verdict_lines())
    if d["fit"] is None:
        assert any("fit unavailable" in note for note in rec.notes)
        assert not rec.all_pass
    # resume from half of the stored units: identical aggregates
    kept = {i: r for i, r in stored.items() if i % 2 == 0}
    resumed = run_experiment(cfg, results=kept)
    assert resumed.aggregates() == rec.aggregates()


def test_thm2_zero_gap_cell_is_certain():
    cfg = ExperimentConfig("thm2", replicates=100, chunk=100, grid=[0.0, 0.5, 1.0, 1.5], dt_base=0.1)
    rec = run_experiment(cfg)
    assert rec.cells[0]["p_hat"] == 1.0
    validate_record(rec.to_dict())


def test_at_most_half_small_run():
    cfg = ExperimentConfig("at_most_half", replicates=2000, n_random=2)
    rec = run_at_most_half(cfg)
    assert len(rec.cells) == 6
    assert all(v.passed for v in rec.verdicts if "exact" not in v.name)


def test_random_instances_are_reproducible_and_valid():
    d1, x1, iv1, pick1 = random_slit_plane(3)
    d2, x2, iv2, pick2 = random_slit_plane(3)
    assert d1.dumps() == d2.dumps() and x1 == x2
    assert pick1[0] < x1.real and d1.contains(np.array([x1]))[0]
    disk = random_slit_disk(4, 6)
    assert len(disk.slits) == 6
    assert disk.dumps() == random_slit_disk(4, 6).dumps()
    assert disk.contains(np.array([0j]))[0]


def test_sin_power_cdf_matches_closed_form():
    x = np.linspace(0, math.pi, 11)
    # ∫ sin² = (x − sin x cos x)/2
    exact = (x - np.sin(x) * np.cos(x)) / math.pi
    assert np.allclose(sin_power_cdf(x, 2.0), exact, atol=1e-7)
