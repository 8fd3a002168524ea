"""Histograms, Welch t-tests, stratum mean tables and old/recent comparisons."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from scipy.special import betainc

from citeproj.impact import HIGH, LOW, MID, ImpactRecord
from citeproj.metrics import METRIC_NAMES, MetricVector

logger = logging.getLogger(__name__)

P_FLOOR = 2.2e-16
P_FLOOR_TEXT = "< 2.2e-16"


@dataclass(frozen=True)
class Histogram:
    bin_edges: tuple[float, ...]
    masses: tuple[float, ...]
    sample_count: int
    clamped: int = 0


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int

    @property
    def p_text(self) -> str:
        return format_p(self.p_value)


def format_p(p: Optional[float]) -> str:
    if p is None:
        return "NA"
    if p < P_FLOOR:
        return P_FLOOR_TEXT
    return f"{p:.3g}"


def normalized_histogram(values: Sequence[float], bin_count: int, value_range: tuple[float, float]) -> Histogram:
    """Equal-width histogram whose masses sum to one.

    A value on an interior edge goes to the higher bin and ``hi`` itself to
    the last bin. Out-of-range values are clamped into the end bins and
    counted in ``clamped``.
    """
    lo, hi = value_range
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if not lo < hi:
        raise ValueError("histogram range must satisfy lo < hi")
    width = (hi - lo) / bin_count
    edges = tuple(lo + width * i for i in range(bin_count)) + (hi,)
    counts = [0] * bin_count
    clamped = 0
    for x in values:
        if x < lo or x > hi:
            clamped += 1
        if x >= hi:
            b = bin_count - 1
        elif x <= lo:
            b = 0
        else:
            b = min(int((x - lo) / width), bin_count - 1)
            # guard float error around interior edges
            if x < edges[b]:
                b -= 1
            elif b + 1 < bin_count and x >= edges[b + 1]:
                b += 1
        counts[b] += 1
    if clamped:
        logger.warning("%d histogram values outside [%g, %g] clamped", clamped, lo, hi)
    n = len(values)
    masses = tuple(c / n for c in counts) if n else tuple(0.0 for _ in counts)
    return Histogram(edges, masses, n, clamped)


def _mean_var(xs: Sequence[float]) -> tuple[float, float]:
    n = len(xs)
    mean = math.fsum(xs) / n
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, var


def student_t_sf2(t: float, df: float) -> float:
    """Two-sided tail probability ``P(|T| >= |t|)`` of Student's t."""
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(min(1.0, max(0.0, betainc(df / 2.0, 0.5, x))))


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sided Welch unequal-variance t-test.

    Raises ``ValueError`` when either sample has fewer than two values. If
    both samples have zero variance the result is t = 0, p = 1 for equal
    means and t = +/-inf, p = 0 otherwise.
    """
    n_a, n_b = len(a), len(b)
    if n_a < 2 or n_b < 2:
        raise ValueError(f"welch_t_test needs at least 2 values per sample (got {n_a}, {n_b})")
    mean_a, var_a = _mean_var(a)
    mean_b, var_b = _mean_var(b)
    se2_a, se2_b = var_a / n_a, var_b / n_b
    se2 = se2_a + se2_b
    diff = mean_a - mean_b
    if se2 == 0.0:
        if diff == 0.0:
            return TTestResult(0.0, float(n_a + n_b - 2), 1.0, mean_a, mean_b, n_a, n_b)
        return TTestResult(math.copysign(math.inf, diff), float(n_a + n_b - 2), 0.0, mean_a, mean_b, n_a, n_b)
    t = diff / math.sqrt(se2)
    # Welch-Satterthwaite on variance shares, which cannot underflow
    share_a, share_b = se2_a / se2, se2_b / se2
    df = 1.0 / (share_a * share_a / (n_a - 1) + share_b * share_b / (n_b - 1))
    return TTestResult(t, df, student_t_sf2(t, df), mean_a, mean_b, n_a, n_b)


def metric_range(metric: str, values: Sequence[float]) -> tuple[float, float]:
    """Histogram range: the unit interval, except constraint which spans ``[0, max]``."""
    if metric == "focal_constraint":
        top = max(values, default=0.0)
        return (0.0, top if top > 0 else 1.0)
    return (0.0, 1.0)


# -- stratum tables -------------------------------------------------------------


@dataclass(frozen=True)
class GroupMeansRow:
    metric: str
    area: str
    available: bool
    mean_high: Optional[float]
    mean_mid: Optional[float]
    mean_low: Optional[float]
    p_high_mid: Optional[float]
    p_mid_low: Optional[float]
    p_high_low: Optional[float]
    n_high: int
    n_mid: int
    n_low: int


@dataclass(frozen=True)
class GroupMeansTable:
    rows: tuple[GroupMeansRow, ...]

    def row(self, metric: str, area: str) -> GroupMeansRow:
        for r in self.rows:
            if r.metric == metric and r.area == area:
                return r
        raise KeyError((metric, area))


def _p_or_none(a, b) -> Optional[float]:
    try:
        return welch_t_test(a, b).p_value
    except ValueError:
        return None


def group_means_table(vectors: Mapping[str, MetricVector], records: Sequence[ImpactRecord]) -> GroupMeansTable:
    """Per-area stratum means of every metric with the three pairwise Welch p-values.

    Rows are ordered metric-major (density first) then by area name. An area
    with an empty stratum yields rows with ``available=False``; a stratum of
    a single paper leaves the affected p-values as ``None``.
    """
    by_area: dict[str, dict[str, list[MetricVector]]] = {}
    for r in records:
        by_area.setdefault(r.area, {HIGH: [], MID: [], LOW: []})
        if r.stratum in (HIGH, MID, LOW):
            if r.paper not in vectors:
                raise KeyError(f"no metric vector for stratified paper {r.paper!r}")
            by_area[r.area][r.stratum].append(vectors[r.paper])
    rows = []
    for metric in METRIC_NAMES:
        for area in sorted(by_area):
            groups = by_area[area]
            sizes = tuple(len(groups[s]) for s in (HIGH, MID, LOW))
            if min(sizes) == 0:
                rows.append(GroupMeansRow(metric, area, False, None, None, None, None, None, None, *sizes))
                continue
            hi, mid, lo = ([getattr(v, metric) for v in groups[s]] for s in (HIGH, MID, LOW))
            rows.append(
                GroupMeansRow(
                    metric,
                    area,
                    True,
                    math.fsum(hi) / len(hi),
                    math.fsum(mid) / len(mid),
                    math.fsum(lo) / len(lo),
                    _p_or_none(hi, mid),
                    _p_or_none(mid, lo),
                    _p_or_none(hi, lo),
                    *sizes,
                )
            )
    return GroupMeansTable(tuple(rows))


# -- temporal split -----------------------------------------------------------


@dataclass(frozen=True)
class MetricSplit:
    metric: str
    old: Histogram
    recent: Histogram
    test: TTestResult


@dataclass(frozen=True)
class TemporalReport:
    cutoff_year: int
    n_old: int
    n_recent: int
    metrics: tuple[MetricSplit, ...]

    def split(self, metric: str) -> MetricSplit:
        for m in self.metrics:
            if m.metric == metric:
                return m
        raise KeyError(metric)


def temporal_split(
    records: Sequence[ImpactRecord],
    vectors: Mapping[str, MetricVector],
    cutoff_year: int,
    bin_count: int = 20,
) -> TemporalReport:
    """Compare papers published up to ``cutoff_year`` against later ones.

    Only records with a metric vector take part. The t-tests are
    old-minus-recent.
    """
    old, recent = [], []
    for r in records:
        v = vectors.get(r.paper)
        if v is None:
            continue
        (old if r.year <= cutoff_year else recent).append(v)
    if not old or not recent:
        side = "old" if not old else "recent"
        raise ValueError(f"cutoff year {cutoff_year} leaves the {side} group empty")
    splits = []
    for metric in METRIC_NAMES:
        a = [getattr(v, metric) for v in old]
        b = [getattr(v, metric) for v in recent]
        rng = metric_range(metric, a + b)
        splits.append(
            MetricSplit(
                metric,
                normalized_histogram(a, bin_count, rng),
                normalized_histogram(b, bin_count, rng),
                welch_t_test(a, b),
            )
        )
    return TemporalReport(cutoff_year, len(old), len(recent), tuple(splits))
