"""Pipeline stages and their on-disk artifacts.

Each stage reads its inputs from files written by an earlier stage (or the
raw corpus) and writes CSV/JSON artifacts, so any stage can be rerun alone.
Column layouts are documented in FORMATS.md.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from citeproj.graph import CitationGraph, eligible_focal_papers, load_citation_graph, validate_acyclicity
from citeproj.impact import ImpactRecord, StrataConfig, median_metric_by_impact, normalized_impact, stratify
from citeproj.metrics import CONSTRAINT_VARIANTS, METRIC_NAMES, STANDARD_BURT, MetricVector, metric_vector
from citeproj.nullmodel import ComparisonReport, compare_real_vs_random
from citeproj.projection import project
from citeproj.stats import (
    Histogram,
    TemporalReport,
    TTestResult,
    format_p,
    group_means_table,
    metric_range,
    normalized_histogram,
    temporal_split,
)

logger = logging.getLogger(__name__)

METRICS_HEADER = ("paper_id", "n_cited") + METRIC_NAMES
IMPACT_HEADER = ("paper_id", "year", "area", "raw_citations", "impact", "stratum")


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class RunConfig:
    edges: str
    meta: str
    out: str
    min_refs: int = 10
    constraint: str = STANDARD_BURT
    high_frac: float = 0.10
    low_frac: float = 0.25
    seed: int = 0
    swap_factor: int = 100
    samples: int = 1
    bins: int = 20
    cutoff_year: Optional[int] = None
    jobs: int = 1
    nullmodel: bool = True
    exclusive_cohort: bool = False

    def validate(self) -> None:
        for label, path in (("edge file", self.edges), ("metadata file", self.meta)):
            if not os.path.isfile(path):
                raise StageError("config", f"{label} not found: {path}")
        if self.constraint not in CONSTRAINT_VARIANTS:
            raise StageError("config", f"unknown constraint variant {self.constraint!r}")
        try:
            StrataConfig(self.high_frac, self.low_frac)
        except ValueError as exc:
            raise StageError("config", str(exc)) from None
        if self.min_refs < 0 or self.bins < 1 or self.samples < 1 or self.swap_factor < 0 or self.jobs < 1:
            raise StageError("config", "min_refs, bins, samples, swap_factor and jobs must be positive")
        if not 0 <= self.seed < 2**64:
            raise StageError("config", "seed must be an unsigned 64-bit integer")


# -- formatting helpers ---------------------------------------------------------


def fmt(x: Optional[float]) -> str:
    """Six significant digits, the fixed float format of every CSV artifact."""
    if x is None:
        return "NA"
    return f"{x:.6g}"


def _json_num(x):
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _hist_json(h: Histogram) -> dict:
    return {"bin_edges": list(h.bin_edges), "masses": list(h.masses), "sample_count": h.sample_count}


def _ttest_json(t: TTestResult) -> dict:
    return {
        "t_statistic": _json_num(t.t_statistic),
        "degrees_of_freedom": _json_num(t.degrees_of_freedom),
        "p_value": t.p_value,
        "p_text": format_p(t.p_value),
        "mean_a": t.mean_a,
        "mean_b": t.mean_b,
        "n_a": t.n_a,
        "n_b": t.n_b,
    }


def _write_paired_hist_csv(path: str, a: Histogram, b: Histogram, names: tuple[str, str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(("bin_index", "bin_lo", "bin_hi") + names)
        for i, (ma, mb) in enumerate(zip(a.masses, b.masses)):
            w.writerow((i, fmt(a.bin_edges[i]), fmt(a.bin_edges[i + 1]), fmt(ma), fmt(mb)))


# -- stages -------------------------------------------------------------------


def load_graph(edges: str, meta: str) -> CitationGraph:
    for label, path in (("edge file", edges), ("metadata file", meta)):
        if not os.path.isfile(path):
            raise StageError("ingest", f"{label} not found: {path}")
    try:
        return load_citation_graph(edges, meta)
    except ValueError as exc:
        raise StageError("ingest", str(exc)) from None


def ingest_summary(g: CitationGraph, min_refs: int) -> dict:
    cycles = validate_acyclicity(g)
    return {
        "nodes": len(g),
        "edges": g.number_of_edges,
        "raw_edge_rows": g.stats.raw_edge_rows,
        "duplicate_edges": g.stats.duplicate_edges,
        "self_loops_dropped": g.stats.self_loops,
        "papers_without_metadata": g.stats.missing_meta,
        "cycle_edge_count": cycles.cycle_edge_count,
        "sample_cycles": [list(c) for c in cycles.sample_cycles],
        "min_refs": min_refs,
        "eligible_focal_papers": len(eligible_focal_papers(g, min_refs)),
    }


def _metrics_job(args):
    pair, variant = args
    return pair.focal, pair.n_cited, metric_vector(pair, variant)


def compute_metrics(
    g: CitationGraph, focal: Sequence[str], variant: str = STANDARD_BURT, jobs: int = 1
) -> dict[str, tuple[int, MetricVector]]:
    """Metric vectors keyed by focal paper, in the order of ``focal``."""
    work = [(project(g, p), variant) for p in focal]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_metrics_job, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [_metrics_job(w) for w in work]
    return {pid: (n, v) for pid, n, v in results}


def write_metrics_csv(path: str, rows: Mapping[str, tuple[int, MetricVector]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(METRICS_HEADER)
        for pid in sorted(rows):
            n, v = rows[pid]
            w.writerow((pid, n) + tuple(fmt(x) for x in v.as_tuple()))


def read_metrics_csv(path: str) -> dict[str, MetricVector]:
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != METRICS_HEADER:
            raise StageError("report", f"{path}: unexpected metrics header")
        for row in reader:
            try:
                out[row[0]] = MetricVector(*(float(x) for x in row[2:]))
            except (TypeError, ValueError) as exc:
                raise StageError("report", f"{path}:{reader.line_num}: {exc}") from None
    return out


def compute_impact(
    g: CitationGraph, focal: Sequence[str], cfg: StrataConfig, exclusive: bool = False
) -> list[ImpactRecord]:
    """Impact for every paper with metadata, stratified over the focal papers only."""
    focal_set = set(focal)
    records = [r for r in normalized_impact(g, inclusive=not exclusive) if r.paper in focal_set]
    return stratify(records, cfg)


def write_impact_csv(path: str, records: Sequence[ImpactRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(IMPACT_HEADER)
        for r in sorted(records, key=lambda r: r.paper):
            w.writerow((r.paper, r.year, r.area, r.raw_citations, fmt(r.impact), r.stratum or ""))


def read_impact_csv(path: str) -> list[ImpactRecord]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != IMPACT_HEADER:
            raise StageError("report", f"{path}: unexpected impact header")
        for row in reader:
            try:
                pid, year, area, raw, impact, stratum = row
                out.append(ImpactRecord(pid, int(raw), int(year), area, float(impact), stratum or None))
            except (TypeError, ValueError) as exc:
                raise StageError("report", f"{path}:{reader.line_num}: {exc}") from None
    return out


def write_report(
    out: str, vectors: Mapping[str, MetricVector], records: Sequence[ImpactRecord], bins: int = 20
) -> dict:
    """Stratum table, impact curves and per-area metric histograms."""
    missing = [r.paper for r in records if r.paper not in vectors]
    if missing:
        raise StageError("report", f"{len(missing)} impact records lack metric vectors (first: {missing[0]})")
    table = group_means_table(vectors, records)
    with open(os.path.join(out, "table1.csv"), "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(
            ("metric", "area", "available", "mean_high", "mean_mid", "mean_low")
            + ("p_high_mid", "p_mid_low", "p_high_low", "n_high", "n_mid", "n_low")
        )
        for r in table.rows:
            w.writerow(
                (r.metric, r.area, int(r.available), fmt(r.mean_high), fmt(r.mean_mid), fmt(r.mean_low))
                + (format_p(r.p_high_mid), format_p(r.p_mid_low), format_p(r.p_high_low))
                + (r.n_high, r.n_mid, r.n_low)
            )

    curves = median_metric_by_impact(records, vectors)
    with open(os.path.join(out, "fig4_curves.csv"), "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(("area", "impact_bin", "n") + METRIC_NAMES)
        for c in curves:
            w.writerow((c.area, c.impact_bin, c.n) + tuple(fmt(c.medians[m]) for m in METRIC_NAMES))

    by_area: dict[str, list[MetricVector]] = {}
    for r in records:
        by_area.setdefault(r.area, []).append(vectors[r.paper])
    areas = sorted(by_area)
    hists = {}
    for metric in METRIC_NAMES:
        everything = [getattr(v, metric) for a in areas for v in by_area[a]]
        rng = metric_range(metric, everything)
        hists[metric] = {a: normalized_histogram([getattr(v, metric) for v in by_area[a]], bins, rng) for a in areas}
        with open(os.path.join(out, f"fig2_{metric}.csv"), "w", encoding="utf-8", newline="") as fh:
            w = _csv_writer(fh)
            w.writerow(("bin_index", "bin_lo", "bin_hi") + tuple(areas))
            edges = hists[metric][areas[0]].bin_edges if areas else ()
            for i in range(len(edges) - 1):
                w.writerow((i, fmt(edges[i]), fmt(edges[i + 1])) + tuple(fmt(hists[metric][a].masses[i]) for a in areas))

    summary = {
        "n_papers": len(records),
        "areas": {a: len(by_area[a]) for a in areas},
        "table1": [
            {
                "metric": r.metric,
                "area": r.area,
                "available": r.available,
                "mean_high": r.mean_high,
                "mean_mid": r.mean_mid,
                "mean_low": r.mean_low,
                "p_high_mid": r.p_high_mid,
                "p_mid_low": r.p_mid_low,
                "p_high_low": r.p_high_low,
                "n": [r.n_high, r.n_mid, r.n_low],
            }
            for r in table.rows
        ],
        "fig4_curves": [
            {"area": c.area, "impact_bin": c.impact_bin, "n": c.n, "medians": c.medians} for c in curves
        ],
        "fig2_histograms": {m: {a: _hist_json(h) for a, h in hs.items()} for m, hs in hists.items()},
    }
    write_json(os.path.join(out, "report.json"), summary)
    return summary


def nullmodel_payload(rep: ComparisonReport) -> dict:
    return {
        "n_papers": rep.n_papers,
        "samples_per_paper": rep.samples_per_paper,
        "seed": rep.seed,
        "swap_factor": rep.swap_factor,
        "metrics": {
            c.metric: {"real": _hist_json(c.real), "random": _hist_json(c.random), "t_test": _ttest_json(c.test)}
            for c in rep.metrics
        },
    }


def write_nullmodel(out: str, rep: ComparisonReport) -> dict:
    payload = nullmodel_payload(rep)
    write_json(os.path.join(out, "nullmodel.json"), payload)
    for c in rep.metrics:
        _write_paired_hist_csv(os.path.join(out, f"fig3_{c.metric}.csv"), c.real, c.random, ("real", "random"))
    return payload


def write_temporal(out: str, rep: TemporalReport) -> dict:
    payload = {
        "cutoff_year": rep.cutoff_year,
        "n_old": rep.n_old,
        "n_recent": rep.n_recent,
        "metrics": {
            s.metric: {"old": _hist_json(s.old), "recent": _hist_json(s.recent), "t_test": _ttest_json(s.test)}
            for s in rep.metrics
        },
    }
    write_json(os.path.join(out, "temporal.json"), payload)
    for s in rep.metrics:
        _write_paired_hist_csv(os.path.join(out, f"fig5_{s.metric}.csv"), s.old, s.recent, ("old", "recent"))
    return payload


def run_pipeline(cfg: RunConfig) -> dict[str, str]:
    """Run every stage and return the artifact paths keyed by file name.

    Raises :class:`StageError` naming the failing stage.
    """
    cfg.validate()
    os.makedirs(cfg.out, exist_ok=True)
    g = load_graph(cfg.edges, cfg.meta)
    write_json(os.path.join(cfg.out, "ingest.json"), ingest_summary(g, cfg.min_refs))

    focal = eligible_focal_papers(g, cfg.min_refs)
    if not focal:
        raise StageError("eligibility", f"no paper has more than {cfg.min_refs} references")
    rows = compute_metrics(g, focal, cfg.constraint, cfg.jobs)
    write_metrics_csv(os.path.join(cfg.out, "metrics.csv"), rows)
    vectors = {p: v for p, (_, v) in rows.items()}

    records = compute_impact(g, focal, StrataConfig(cfg.high_frac, cfg.low_frac), cfg.exclusive_cohort)
    write_impact_csv(os.path.join(cfg.out, "impact.csv"), records)
    try:
        write_report(cfg.out, vectors, records, cfg.bins)
    except (ValueError, KeyError) as exc:
        raise StageError("report", str(exc)) from None

    if cfg.nullmodel:
        try:
            rep = compare_real_vs_random(
                g, focal, cfg.samples, cfg.seed, cfg.swap_factor, cfg.constraint, cfg.bins, cfg.jobs
            )
        except ValueError as exc:
            raise StageError("nullmodel", str(exc)) from None
        write_nullmodel(cfg.out, rep)

    if cfg.cutoff_year is not None:
        try:
            rep_t = temporal_split(records, vectors, cfg.cutoff_year, cfg.bins)
        except ValueError as exc:
            raise StageError("temporal", str(exc)) from None
        write_temporal(cfg.out, rep_t)

    return {name: os.path.join(cfg.out, name) for name in sorted(os.listdir(cfg.out))}
