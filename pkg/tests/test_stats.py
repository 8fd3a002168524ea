import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citeproj.impact import HIGH, LOW, MID, ImpactRecord
from citeproj.metrics import METRIC_NAMES, MetricVector, metric_vector
from citeproj.stats import (
    format_p,
    group_means_table,
    metric_range,
    normalized_histogram,
    temporal_split,
    welch_t_test,
)
from citeproj.synth import PrototypeSpec, generate_prototype

# mpmath quadrature of the Student-t density at 30 digits, cross-checked
# against scipy.stats.ttest_ind(equal_var=False)
WELCH_123_456_T = -3.674234614174767
WELCH_123_456_DF = 4.0
WELCH_123_456_P = 0.021311641128756727


def _vec(x):
    return MetricVector(x, x, x, x, x, x)


def test_histogram_edge_rule():
    h = normalized_histogram([0, 0.5, 1], 2, (0, 1))
    assert h.masses == pytest.approx((1 / 3, 2 / 3))
    assert h.bin_edges == (0.0, 0.5, 1.0)


def test_histogram_point_mass():
    h = normalized_histogram([0.5] * 7, 4, (0, 1))
    assert h.masses == (0.0, 0.0, 1.0, 0.0)


def test_histogram_empty():
    h = normalized_histogram([], 5, (0, 1))
    assert h.masses == (0.0,) * 5 and h.sample_count == 0


def test_histogram_clamps():
    h = normalized_histogram([-1, 0.2, 3], 2, (0, 1))
    assert h.clamped == 2
    assert h.masses == pytest.approx((2 / 3, 1 / 3))


def test_histogram_validation():
    with pytest.raises(ValueError):
        normalized_histogram([1], 0, (0, 1))
    with pytest.raises(ValueError):
        normalized_histogram([1], 3, (1, 1))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), max_size=50), st.integers(1, 30))
def test_histogram_masses_sum_to_one(values, bins):
    h = normalized_histogram(values, bins, (0, 1))
    assert math.fsum(h.masses) == pytest.approx(1.0 if values else 0.0)


def test_metric_range():
    assert metric_range("clustering", [0.2, 3.0]) == (0.0, 1.0)
    assert metric_range("focal_constraint", [0.2, 1.125]) == (0.0, 1.125)
    assert metric_range("focal_constraint", [0.0]) == (0.0, 1.0)


def test_welch_frozen_oracle():
    r = welch_t_test([1, 2, 3], [4, 5, 6])
    assert r.t_statistic == pytest.approx(WELCH_123_456_T, rel=1e-12)
    assert r.degrees_of_freedom == pytest.approx(WELCH_123_456_DF, rel=1e-12)
    assert r.p_value == pytest.approx(WELCH_123_456_P, rel=1e-10)


def test_welch_identical():
    r = welch_t_test([1, 2, 3], [1, 2, 3])
    assert r.t_statistic == 0.0 and r.p_value == 1.0


def test_welch_tiny_p_formatting():
    a = [1000 + 1e-6 * i for i in range(30)]
    b = [1e-6 * i for i in range(30)]
    r = welch_t_test(a, b)
    assert r.p_value < 2.2e-16
    assert r.p_text == "< 2.2e-16"
    assert format_p(0.0213) == "0.0213"
    assert format_p(None) == "NA"


def test_welch_zero_variance_cases():
    assert welch_t_test([2, 2], [2, 2, 2]).p_value == 1.0
    r = welch_t_test([2, 2], [3, 3])
    assert r.t_statistic == -math.inf and r.p_value == 0.0


def test_welch_needs_two_values():
    with pytest.raises(ValueError):
        welch_t_test([1], [1, 2])


samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=20)


@settings(max_examples=150, deadline=None)
@given(samples, samples)
def test_welch_antisymmetric(a, b):
    ab, ba = welch_t_test(a, b), welch_t_test(b, a)
    assert ab.t_statistic == pytest.approx(-ba.t_statistic)
    assert ab.p_value == pytest.approx(ba.p_value)
    assert 0.0 <= ab.p_value <= 1.0


def test_p_decreases_with_separation():
    base = [0.1, 0.4, 0.2, 0.5, 0.3]
    ps = [welch_t_test(base, [x + d for x in base]).p_value for d in (0.05, 0.1, 0.2, 0.4, 0.8)]
    assert ps == sorted(ps, reverse=True)


def _stratified(areas, per_stratum=4):
    recs, vecs = [], {}
    for area in areas:
        for s, level in ((HIGH, 0.8), (MID, 0.5), (LOW, 0.2)):
            for i in range(per_stratum):
                pid = f"{area}-{s}-{i}"
                recs.append(ImpactRecord(pid, 1, 2000, area, 1.0, s))
                vecs[pid] = _vec(level + 0.01 * i)
    return recs, vecs


def test_table_structure():
    recs, vecs = _stratified(["SS", "CS", "NS"])
    table = group_means_table(vecs, recs)
    assert len(table.rows) == 18
    assert [(r.metric, r.area) for r in table.rows[:4]] == [
        ("density", "CS"),
        ("density", "NS"),
        ("density", "SS"),
        ("clustering", "CS"),
    ]
    row = table.row("max_betweenness", "NS")
    assert row.mean_high > row.mean_mid > row.mean_low
    assert (row.n_high, row.n_mid, row.n_low) == (4, 4, 4)


def test_table_identical_vectors():
    recs, _ = _stratified(["CS"])
    table = group_means_table({r.paper: _vec(0.3) for r in recs}, recs)
    for row in table.rows:
        assert (row.p_high_mid, row.p_mid_low, row.p_high_low) == (1.0, 1.0, 1.0)


def test_table_empty_and_singleton_strata():
    recs, vecs = _stratified(["CS"], per_stratum=1)
    row = group_means_table(vecs, recs).row("density", "CS")
    assert row.available and row.p_high_low is None
    recs = [r for r in recs if r.stratum != LOW]
    row = group_means_table(vecs, recs).row("density", "CS")
    assert not row.available and row.mean_high is None


def test_table_missing_vector():
    recs, vecs = _stratified(["CS"])
    del vecs[recs[0].paper]
    with pytest.raises(KeyError):
        group_means_table(vecs, recs)


def _prototype_records(kind_by_year, seeds=40):
    recs, vecs = [], {}
    for year, kind in kind_by_year.items():
        for s in range(seeds):
            pid = f"y{year}-{s}"
            spec = PrototypeSpec(kind, 20, seed=year * 1000 + s)
            vecs[pid] = metric_vector(generate_prototype(spec, focal=pid, prefix=pid + "c"))
            recs.append(ImpactRecord(pid, 1, year, "CS", 1.0, MID))
    return recs, vecs


def test_temporal_direction():
    recs, vecs = _prototype_records({1985: "WithinCommunity", 1995: "Idiosyncratic"})
    rep = temporal_split(recs, vecs, 1990)
    assert (rep.n_old, rep.n_recent) == (40, 40)
    conn = rep.split("connectivity").test
    fb = rep.split("focal_betweenness").test
    assert conn.mean_b < conn.mean_a and conn.p_value < 1e-6
    assert fb.mean_b > fb.mean_a and fb.p_value < 1e-6
    assert [m.metric for m in rep.metrics] == list(METRIC_NAMES)


def test_temporal_balanced_is_quiet():
    recs, vecs = _prototype_records({1985: "Brokerage", 1995: "Brokerage"}, seeds=60)
    rep = temporal_split(recs, vecs, 1990)
    assert all(m.test.p_value > 0.01 for m in rep.metrics)


def test_temporal_empty_side():
    recs, vecs = _stratified(["CS"])
    with pytest.raises(ValueError, match="1999"):
        temporal_split(recs, vecs, 1999)
    with pytest.raises(ValueError, match="1900"):
        temporal_split(recs, vecs, 1900)
