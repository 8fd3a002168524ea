"""Command-line entry point: ``citeproj <subcommand> [flags]``.

Options can also come from a JSON file given with ``--config``; keys use the
flag names with dashes replaced by underscores. Flags given on the command
line win over the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, Optional, Sequence

from citeproj.graph import PaperNotFound, eligible_focal_papers
from citeproj.impact import StrataConfig
from citeproj.metrics import AS_PRINTED, STANDARD_BURT
from citeproj.nullmodel import compare_real_vs_random
from citeproj.pipeline import (
    RunConfig,
    StageError,
    compute_impact,
    compute_metrics,
    ingest_summary,
    load_graph,
    read_impact_csv,
    read_metrics_csv,
    run_pipeline,
    write_impact_csv,
    write_metrics_csv,
    write_nullmodel,
    write_report,
    write_temporal,
    write_json,
)
from citeproj.projection import project, write_projection
from citeproj.stats import temporal_split
from citeproj.synth import KINDS, generate_corpus

log = logging.getLogger("citeproj")

DEFAULTS: dict[str, Any] = {
    "min_refs": 10,
    "constraint": "burt",
    "high_frac": 0.10,
    "low_frac": 0.25,
    "seed": 0,
    "swap_factor": 100,
    "samples": 1,
    "bins": 20,
    "jobs": 1,
    "cutoff_year": None,
    "out": ".",
    "years": "1990-1999",
    "areas": "CS,NS,SS",
    "n_cited": "12-16",
    "mix": None,
    "total_papers": None,
}

CONSTRAINT_FLAGS = {"burt": STANDARD_BURT, STANDARD_BURT: STANDARD_BURT, AS_PRINTED: AS_PRINTED}


def _year_span(text: str) -> list[int]:
    lo, _, hi = text.partition("-")
    lo_i = int(lo)
    hi_i = int(hi) if hi else lo_i
    if hi_i < lo_i:
        raise ValueError(f"empty year range {text!r}")
    return list(range(lo_i, hi_i + 1))


def _int_span(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    return int(lo), int(hi or lo)


class Options:
    """Flag values layered over a config file over built-in defaults."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self._args = args
        self._config = config

    def __getattr__(self, name: str):
        value = getattr(self._args, name, None)
        if value is not None:
            return value
        if name in self._config:
            return self._config[name]
        return DEFAULTS.get(name)

    def require(self, name: str):
        value = getattr(self, name)
        if value is None:
            raise StageError("config", f"--{name.replace('_', '-')} is required")
        return value

    @property
    def variant(self) -> str:
        c = self.constraint
        if c not in CONSTRAINT_FLAGS:
            raise StageError("config", f"unknown constraint {c!r}")
        return CONSTRAINT_FLAGS[c]


def _add(p: argparse.ArgumentParser, *names: str) -> None:
    specs = {
        "edges": dict(help="citation edge list (TSV: citing<TAB>cited)"),
        "meta": dict(help="paper metadata (CSV: paper_id,year,area)"),
        "min_refs": dict(type=int, help="eligible papers cite more than this many papers (default 10)"),
        "constraint": dict(choices=sorted(CONSTRAINT_FLAGS), help="network constraint variant (default burt)"),
        "high_frac": dict(type=float, help="fraction of papers per area labelled High (default 0.10)"),
        "low_frac": dict(type=float, help="fraction of papers per area labelled Low (default 0.25)"),
        "seed": dict(type=int, help="master seed, unsigned 64-bit (default 0)"),
        "swap_factor": dict(type=int, help="attempted swaps per edge (default 100)"),
        "samples": dict(type=int, help="randomized graphs per focal paper (default 1)"),
        "bins": dict(type=int, help="histogram bins (default 20)"),
        "cutoff_year": dict(type=int, help="last year of the old group in the temporal split"),
        "jobs": dict(type=int, help="worker processes (default 1)"),
        "out": dict(help="output directory (default .)"),
    }
    for name in names:
        p.add_argument("--" + name.replace("_", "-"), dest=name, default=None, **specs[name])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="citeproj", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file with default option values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a corpus, write ingest.json")
    _add(p, "edges", "meta", "min_refs", "out")

    p = sub.add_parser("project", help="print the projection graphs of one paper")
    _add(p, "edges", "meta")
    p.add_argument("--paper", required=True)
    p.add_argument("--output", help="write to this file instead of stdout")

    p = sub.add_parser("metrics", help="metrics of every eligible paper, write metrics.csv")
    _add(p, "edges", "meta", "min_refs", "constraint", "jobs", "out")

    p = sub.add_parser("nullmodel", help="compare real projections with degree-preserving random ones")
    _add(p, "edges", "meta", "min_refs", "constraint", "seed", "samples", "swap_factor", "bins", "jobs", "out")

    p = sub.add_parser("impact", help="normalized impact and strata of eligible papers, write impact.csv")
    _add(p, "edges", "meta", "min_refs", "high_frac", "low_frac", "out")
    p.add_argument("--exclusive-cohort", action="store_true", default=None, help="leave each paper out of its cohort mean")

    p = sub.add_parser("report", help="stratum table, impact curves and histograms from metrics.csv + impact.csv")
    p.add_argument("--metrics", help="metrics CSV (default OUT/metrics.csv)")
    p.add_argument("--impact", help="impact CSV (default OUT/impact.csv)")
    _add(p, "bins", "out")

    p = sub.add_parser("temporal", help="old vs recent comparison from metrics.csv + impact.csv")
    p.add_argument("--metrics", help="metrics CSV (default OUT/metrics.csv)")
    p.add_argument("--impact", help="impact CSV (default OUT/impact.csv)")
    _add(p, "cutoff_year", "bins", "out")

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground-truth classes")
    p.add_argument("--mix", nargs=3, type=int, metavar=KINDS, help="focal papers per class")
    p.add_argument("--years", help="focal publication years, e.g. 1990-1999")
    p.add_argument("--areas", help="comma-separated area labels")
    p.add_argument("--n-cited", dest="n_cited", help="reference count range, e.g. 12-16")
    p.add_argument("--total-papers", dest="total_papers", type=int, help="pad citing papers to this corpus size")
    _add(p, "seed", "min_refs", "out")

    p = sub.add_parser("run", help="full pipeline: ingest, metrics, impact, report, nullmodel, temporal")
    _add(p, "edges", "meta", "min_refs", "constraint", "high_frac", "low_frac", "seed", "swap_factor")
    _add(p, "samples", "bins", "cutoff_year", "jobs", "out")
    p.add_argument("--no-nullmodel", dest="no_nullmodel", action="store_true", default=None)
    p.add_argument("--exclusive-cohort", action="store_true", default=None)
    return parser


def _out_dir(opts: Options) -> str:
    out = opts.out
    os.makedirs(out, exist_ok=True)
    return out


def _cmd_ingest(o: Options) -> None:
    g = load_graph(o.require("edges"), o.require("meta"))
    summary = ingest_summary(g, o.min_refs)
    write_json(os.path.join(_out_dir(o), "ingest.json"), summary)
    print(f"{summary['nodes']} papers, {summary['edges']} citations, "
          f"{summary['eligible_focal_papers']} eligible, {summary['cycle_edge_count']} edges on cycles")


def _cmd_project(o: Options) -> None:
    g = load_graph(o.require("edges"), o.require("meta"))
    try:
        pair = project(g, o.paper)
    except PaperNotFound:
        raise StageError("project", f"paper {o.paper!r} not in the corpus") from None
    if o.output:
        with open(o.output, "w", encoding="utf-8", newline="") as fh:
            write_projection(pair, fh)
    else:
        write_projection(pair, sys.stdout)


def _cmd_metrics(o: Options) -> None:
    g = load_graph(o.require("edges"), o.require("meta"))
    focal = eligible_focal_papers(g, o.min_refs)
    rows = compute_metrics(g, focal, o.variant, o.jobs)
    write_metrics_csv(os.path.join(_out_dir(o), "metrics.csv"), rows)


def _cmd_nullmodel(o: Options) -> None:
    g = load_graph(o.require("edges"), o.require("meta"))
    focal = eligible_focal_papers(g, o.min_refs)
    try:
        rep = compare_real_vs_random(g, focal, o.samples, o.seed, o.swap_factor, o.variant, o.bins, o.jobs)
    except ValueError as exc:
        raise StageError("nullmodel", str(exc)) from None
    write_nullmodel(_out_dir(o), rep)


def _cmd_impact(o: Options) -> None:
    g = load_graph(o.require("edges"), o.require("meta"))
    focal = eligible_focal_papers(g, o.min_refs)
    try:
        cfg = StrataConfig(o.high_frac, o.low_frac)
    except ValueError as exc:
        raise StageError("impact", str(exc)) from None
    records = compute_impact(g, focal, cfg, bool(o.exclusive_cohort))
    write_impact_csv(os.path.join(_out_dir(o), "impact.csv"), records)


def _stage_inputs(o: Options, stage: str):
    out = _out_dir(o)
    metrics = o.metrics or os.path.join(out, "metrics.csv")
    impact = o.impact or os.path.join(out, "impact.csv")
    for path in (metrics, impact):
        if not os.path.isfile(path):
            raise StageError(stage, f"input not found: {path}")
    return out, read_metrics_csv(metrics), read_impact_csv(impact)


def _cmd_report(o: Options) -> None:
    out, vectors, records = _stage_inputs(o, "report")
    write_report(out, vectors, records, o.bins)


def _cmd_temporal(o: Options) -> None:
    out, vectors, records = _stage_inputs(o, "temporal")
    try:
        rep = temporal_split(records, vectors, o.require("cutoff_year"), o.bins)
    except ValueError as exc:
        raise StageError("temporal", str(exc)) from None
    write_temporal(out, rep)


def _cmd_synth(o: Options) -> None:
    mix = o.require("mix")
    try:
        corpus = generate_corpus(
            dict(zip(KINDS, mix)),
            _year_span(str(o.years)),
            [a for a in str(o.areas).split(",") if a],
            o.seed,
            n_cited=_int_span(str(o.n_cited)),
            total_papers=o.total_papers,
            min_refs=o.min_refs,
        )
    except ValueError as exc:
        raise StageError("synth", str(exc)) from None
    corpus.write(_out_dir(o))


def _cmd_run(o: Options) -> None:
    cfg = RunConfig(
        edges=o.require("edges"),
        meta=o.require("meta"),
        out=o.out,
        min_refs=o.min_refs,
        constraint=o.variant,
        high_frac=o.high_frac,
        low_frac=o.low_frac,
        seed=o.seed,
        swap_factor=o.swap_factor,
        samples=o.samples,
        bins=o.bins,
        cutoff_year=o.cutoff_year,
        jobs=o.jobs,
        nullmodel=not o.no_nullmodel,
        exclusive_cohort=bool(o.exclusive_cohort),
    )
    run_pipeline(cfg)


COMMANDS = {
    "ingest": _cmd_ingest,
    "project": _cmd_project,
    "metrics": _cmd_metrics,
    "nullmodel": _cmd_nullmodel,
    "impact": _cmd_impact,
    "report": _cmd_report,
    "temporal": _cmd_temporal,
    "synth": _cmd_synth,
    "run": _cmd_run,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = {}
        if args.config:
            if not os.path.isfile(args.config):
                raise StageError("config", f"config file not found: {args.config}")
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        COMMANDS[args.command](Options(args, config))
    except StageError as exc:
        print(f"citeproj: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"citeproj: error: [{args.command}] {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
