"""Cohort-normalized citation impact and high/mid/low stratification."""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from citeproj.graph import CitationGraph
from citeproj.metrics import METRIC_NAMES, MetricVector

logger = logging.getLogger(__name__)

HIGH = "High"
MID = "Mid"
LOW = "Low"
UNASSIGNED = "Unassigned"
STRATA = (HIGH, MID, LOW, UNASSIGNED)


@dataclass(frozen=True)
class ImpactRecord:
    paper: str
    raw_citations: int
    year: int
    area: str
    impact: float
    # None until stratify() runs; UNASSIGNED when the cohort mean is zero
    stratum: Optional[str] = None

    @property
    def cohort(self) -> tuple[int, str]:
        return (self.year, self.area)


@dataclass(frozen=True)
class StrataConfig:
    high_fraction: float = 0.10
    low_fraction: float = 0.25

    def __post_init__(self):
        for f in (self.high_fraction, self.low_fraction):
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"stratum fraction {f} outside [0, 1]")
        if self.high_fraction + self.low_fraction >= 1.0:
            raise ValueError("high_fraction + low_fraction must be < 1")


def citation_counts(g: CitationGraph) -> dict[str, int]:
    """In-dataset citations received by every paper."""
    return {p: g.in_degree(p) for p in g.nodes}


def normalized_impact(g: CitationGraph, inclusive: bool = True) -> list[ImpactRecord]:
    """Citations divided by the mean citation count of the paper's (year, area) cohort.

    With ``inclusive`` the paper counts towards its own cohort mean; otherwise
    the mean runs over the other cohort members only. Papers whose cohort mean
    is zero (or undefined) get impact 0 and stratum ``Unassigned``. Papers
    without metadata are skipped and counted in a log warning.
    """
    counts = citation_counts(g)
    cohorts: dict[tuple[int, str], list[str]] = {}
    missing = 0
    for p in g.nodes:
        m = g.meta(p)
        if m is None:
            missing += 1
            continue
        cohorts.setdefault(m.cohort, []).append(p)
    if missing:
        logger.warning("%d papers without metadata excluded from impact cohorts", missing)

    out = []
    for (year, area), members in cohorts.items():
        total = sum(counts[p] for p in members)
        for p in members:
            c = counts[p]
            if inclusive:
                mean = total / len(members)
            elif len(members) > 1:
                mean = (total - c) / (len(members) - 1)
            else:
                mean = 0.0
            if mean > 0:
                out.append(ImpactRecord(p, c, year, area, c / mean))
            else:
                out.append(ImpactRecord(p, c, year, area, 0.0, UNASSIGNED))
    out.sort(key=lambda r: r.paper)
    return out


def stratify(records: Sequence[ImpactRecord], cfg: StrataConfig = StrataConfig()) -> list[ImpactRecord]:
    """Assign High/Mid/Low within each area by nearest rank.

    The top ``ceil(high_fraction * n)`` impacts are High, the bottom
    ``ceil(low_fraction * n)`` Low, the rest Mid, where ``n`` counts the
    area's records that are not ``Unassigned``. Equal impacts are ordered by
    paper id. Output is sorted by paper id.
    """
    by_area: dict[str, list[ImpactRecord]] = {}
    out: list[ImpactRecord] = []
    for r in records:
        if r.stratum == UNASSIGNED:
            out.append(r)
        else:
            by_area.setdefault(r.area, []).append(r)
    for area_records in by_area.values():
        ranked = sorted(area_records, key=lambda r: (r.impact, r.paper))
        n = len(ranked)
        n_high = min(n, math.ceil(cfg.high_fraction * n - 1e-9))
        n_low = min(n - n_high, math.ceil(cfg.low_fraction * n - 1e-9))
        for i, r in enumerate(ranked):
            if i >= n - n_high:
                stratum = HIGH
            elif i < n_low:
                stratum = LOW
            else:
                stratum = MID
            out.append(replace(r, stratum=stratum))
    out.sort(key=lambda r: r.paper)
    return out


@dataclass(frozen=True)
class CurvePoint:
    area: str
    impact_bin: int
    n: int
    medians: dict


def impact_bin(impact: float, cap: int = 20) -> int:
    return min(int(math.floor(impact)), cap)


def median_metric_by_impact(
    records: Sequence[ImpactRecord],
    vectors: Mapping[str, MetricVector],
    cap: int = 20,
) -> list[CurvePoint]:
    """Median of every metric per (area, integer impact bin).

    Bin ``k`` holds impacts in ``[k, k+1)``; the last bin ``cap`` also takes
    everything above. ``Unassigned`` records are left out.
    """
    groups: dict[tuple[str, int], list[MetricVector]] = {}
    for r in records:
        if r.stratum == UNASSIGNED:
            continue
        groups.setdefault((r.area, impact_bin(r.impact, cap)), []).append(vectors[r.paper])
    points = []
    for (area, b), vs in sorted(groups.items()):
        medians = {m: statistics.median(getattr(v, m) for v in vs) for m in METRIC_NAMES}
        points.append(CurvePoint(area, b, len(vs), medians))
    return points
