"""Synthetic projection graphs and corpora for the three prototypical citer classes.

Idiosyncratic
    Sparse uniform random links among the cited papers.
WithinCommunity
    A dense random core holding ``core_fraction`` of the references.
    Every remaining (peripheral) reference is attached to one core anchor;
    every third one also cites a neighbour of its anchor, closing a
    triangle. Any other pair touching a peripheral reference is linked with
    probability ``edge_prob ** PERIPHERY_EXPONENT``, so ``edge_prob = 1``
    still yields a clique.
Brokerage
    ``cluster_count`` dense clusters that touch only through
    ``bridge_count`` designated bridge papers. A bridge links to each node
    of every cluster with probability ``bridge_prob`` and to at least one
    node per cluster.

All parameters are invented to give well separated classes at about 30
references. Generated edges point from lower to higher position in a
smallest-last (degeneracy) order, so every projection is acyclic and the
cited papers' own out-degrees stay small. Half of the peripheral
within-community references are moved to the end of that order, making them
cited (older) rather than citing (newer) papers.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from citeproj.graph import CitationGraph, PaperMeta, write_edges, write_meta
from citeproj.nullmodel import child_seed, make_rng
from citeproj.projection import ProjectionPair

IDIOSYNCRATIC = "Idiosyncratic"
WITHIN_COMMUNITY = "WithinCommunity"
BROKERAGE = "Brokerage"
KINDS = (IDIOSYNCRATIC, WITHIN_COMMUNITY, BROKERAGE)

DEFAULT_EDGE_PROB = {IDIOSYNCRATIC: 0.02, WITHIN_COMMUNITY: 0.4, BROKERAGE: 0.4}
PERIPHERY_EXPONENT = 4
# every CLOSURE_PERIOD-th peripheral reference closes a triangle with its anchor
CLOSURE_PERIOD = 3


@dataclass(frozen=True)
class PrototypeSpec:
    kind: str
    n_cited: int
    edge_prob: Optional[float] = None
    cluster_count: int = 3
    bridge_count: int = 2
    seed: int = 0
    core_fraction: float = 0.5
    bridge_prob: float = 0.1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown prototype kind {self.kind!r}")
        if self.edge_prob is None:
            object.__setattr__(self, "edge_prob", DEFAULT_EDGE_PROB[self.kind])
        if self.n_cited < 1:
            raise ValueError("n_cited must be >= 1")
        for name in ("edge_prob", "core_fraction", "bridge_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.kind == BROKERAGE:
            if self.cluster_count < 2 or self.bridge_count < 1:
                raise ValueError("Brokerage needs cluster_count >= 2 and bridge_count >= 1")
            if self.n_cited < self.bridge_count + self.cluster_count:
                raise ValueError("n_cited too small for the requested clusters and bridges")


def _idiosyncratic(spec: PrototypeSpec, rng) -> tuple[set[tuple[int, int]], list[int]]:
    n, p = spec.n_cited, spec.edge_prob
    draws = rng.random(n * (n - 1) // 2)
    pairs = ((i, j) for i in range(n) for j in range(i + 1, n))
    return {e for e, x in zip(pairs, draws) if x < p}, []


def _within_community(spec: PrototypeSpec, rng) -> tuple[set[tuple[int, int]], list[int]]:
    n, p = spec.n_cited, spec.edge_prob
    core = max(1, min(n, math.ceil(spec.core_fraction * n)))
    p_far = p**PERIPHERY_EXPONENT
    edges = set()
    draws = rng.random(n * (n - 1) // 2).tolist()
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if draws[k] < (p if j < core else p_far):
                edges.add((i, j))
            k += 1
    nbrs: dict[int, set[int]] = {i: set() for i in range(core)}
    for i, j in edges:
        if j < core:
            nbrs[i].add(j)
            nbrs[j].add(i)
    late = []
    flip = {True: False, False: False}
    for idx, v in enumerate(range(core, n)):
        anchor = int(rng.integers(core))
        edges.add((anchor, v))
        closing = idx % CLOSURE_PERIOD == CLOSURE_PERIOD - 1
        if closing and nbrs[anchor]:
            second = sorted(nbrs[anchor])[int(rng.integers(len(nbrs[anchor])))]
            edges.add((second, v))
        # alternate older (source) and newer (sink) peripheral papers within each kind
        if flip[closing]:
            late.append(v)
        flip[closing] = not flip[closing]
    return {(min(e), max(e)) for e in edges}, late


def _brokerage(spec: PrototypeSpec, rng) -> tuple[set[tuple[int, int]], list[int]]:
    n, p = spec.n_cited, spec.edge_prob
    bridges = list(range(spec.bridge_count))
    rest = list(range(spec.bridge_count, n))
    clusters = [rest[c :: spec.cluster_count] for c in range(spec.cluster_count)]
    edges = set()
    for members in clusters:
        draws = rng.random(len(members) * (len(members) - 1) // 2).tolist()
        k = 0
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                if draws[k] < p:
                    edges.add((members[a], members[b]))
                k += 1
    for b in bridges:
        for members in clusters:
            draws = rng.random(len(members))
            linked = [m for m, x in zip(members, draws) if x < spec.bridge_prob]
            if not linked:
                linked = [members[int(rng.integers(len(members)))]]
            edges.update((b, m) for m in linked)
    return edges, []


_BUILDERS = {IDIOSYNCRATIC: _idiosyncratic, WITHIN_COMMUNITY: _within_community, BROKERAGE: _brokerage}


def degeneracy_order(n: int, edges: set[tuple[int, int]]) -> list[int]:
    """Smallest-last vertex order (ties broken by lowest index)."""
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    removed = [False] * n
    deg = [len(a) for a in adj]
    order = []
    for _ in range(n):
        v = min((i for i in range(n) if not removed[i]), key=lambda i: (deg[i], i))
        removed[v] = True
        order.append(v)
        for w in adj[v]:
            if not removed[w]:
                deg[w] -= 1
    return order


def prototype_edges(spec: PrototypeSpec) -> list[tuple[int, int]]:
    """Directed edges among positions ``0..n_cited-1``, all pointing to a higher position."""
    rng = make_rng(spec.seed)
    undirected, late = _BUILDERS[spec.kind](spec, rng)
    tail = set(late)
    order = [v for v in degeneracy_order(spec.n_cited, undirected) if v not in tail] + sorted(tail)
    position = {v: i for i, v in enumerate(order)}
    return sorted((min(position[u], position[v]), max(position[u], position[v])) for u, v in undirected)


def generate_prototype(spec: PrototypeSpec, focal: str = "v0", prefix: str = "c") -> ProjectionPair:
    width = len(str(max(spec.n_cited - 1, 0)))
    cited = tuple(f"{prefix}{i:0{width}d}" for i in range(spec.n_cited))
    edges = tuple((cited[u], cited[v]) for u, v in prototype_edges(spec))
    return ProjectionPair(focal, cited, edges)


# -- corpora ------------------------------------------------------------------

# citations received by focal papers, per class; ranges are inclusive
DEFAULT_CITATIONS = {BROKERAGE: (40, 60), WITHIN_COMMUNITY: (1, 4), IDIOSYNCRATIC: (0, 0)}
CITER_CAPACITY = 10


@dataclass
class SyntheticCorpus:
    graph: CitationGraph
    labels: dict[str, str] = field(default_factory=dict)

    def write(self, outdir: str) -> dict[str, str]:
        """Write ``edges.tsv``, ``meta.csv`` and ``labels.csv`` under ``outdir``."""
        os.makedirs(outdir, exist_ok=True)
        paths = {name: os.path.join(outdir, name) for name in ("edges.tsv", "meta.csv", "labels.csv")}
        with open(paths["edges.tsv"], "w", encoding="utf-8", newline="") as fh:
            write_edges(self.graph, fh)
        with open(paths["meta.csv"], "w", encoding="utf-8", newline="") as fh:
            write_meta(self.graph, fh)
        with open(paths["labels.csv"], "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("paper_id", "class"))
            for pid in sorted(self.labels):
                w.writerow((pid, self.labels[pid]))
        return paths


def generate_corpus(
    class_mix: Mapping[str, int],
    years: Sequence[int],
    areas: Sequence[str],
    seed: int,
    n_cited: tuple[int, int] = (12, 16),
    citations: Optional[Mapping[str, tuple[int, int]]] = None,
    total_papers: Optional[int] = None,
    min_refs: int = 10,
    prototype_overrides: Optional[Mapping[str, Mapping]] = None,
) -> SyntheticCorpus:
    """Build a citation network whose focal papers realize assigned prototypes.

    Each focal paper ``F*`` cites a private pool of ``R*`` papers wired as its
    prototype, so its projection is exactly the generated graph. Pools are
    dated the year before ``years`` and focal papers are dealt round-robin
    over areas and years within each class, so every (year, area) cohort
    gets a near-identical class composition. Focal papers are cited by
    ``C*`` papers (dated the year after ``years``, at most ``CITER_CAPACITY``
    references each) with class-dependent counts from ``citations``. With
    ``total_papers`` the citer population is padded to reach that size.
    """
    citations = dict(DEFAULT_CITATIONS if citations is None else citations)
    overrides = prototype_overrides or {}
    years = list(years)
    areas = list(areas)
    if not years or not areas:
        raise ValueError("years and areas must be non-empty")
    if sum(class_mix.values()) < 1:
        raise ValueError("class_mix must contain at least one paper")
    unknown = set(class_mix) - set(KINDS)
    if unknown:
        raise ValueError(f"unknown classes {sorted(unknown)}")
    if n_cited[0] <= min_refs:
        raise ValueError("focal papers need more than min_refs references to be eligible")
    rng = make_rng(seed)

    slots = []
    for kind in KINDS:
        for i in range(class_mix.get(kind, 0)):
            area = areas[i % len(areas)]
            year = years[(i // len(areas)) % len(years)]
            slots.append((kind, year, area))
    slots = [slots[i] for i in rng.permutation(len(slots)).tolist()]

    width = max(6, len(str(len(slots))))
    meta: dict[str, PaperMeta] = {}
    edges: list[tuple[str, str]] = []
    labels: dict[str, str] = {}
    pool_year = min(years) - 1
    focal_ids = []
    for idx, (kind, year, area) in enumerate(slots):
        fid = f"F{idx:0{width}d}"
        focal_ids.append(fid)
        labels[fid] = kind
        meta[fid] = PaperMeta(fid, year, area)
        n = int(rng.integers(n_cited[0], n_cited[1] + 1))
        spec = PrototypeSpec(kind, n, seed=child_seed(seed, fid, 0), **overrides.get(kind, {}))
        pair = generate_prototype(spec, focal=fid, prefix=f"R{idx:0{width}d}-")
        out_deg: dict[str, int] = {}
        for u, v in pair.gp_edges:
            out_deg[u] = out_deg.get(u, 0) + 1
        if max(out_deg.values(), default=0) > min_refs:
            raise ValueError(f"reference pool of {fid} would contain an eligible paper")
        for c in pair.cited:
            meta[c] = PaperMeta(c, pool_year, area)
            edges.append((fid, c))
        edges.extend(pair.gp_edges)

    wanted = [int(rng.integers(citations[labels[f]][0], citations[labels[f]][1] + 1)) for f in focal_ids]
    # slack of max(wanted) citers keeps enough open citers for the last papers
    needed = math.ceil(sum(wanted) / CITER_CAPACITY) + max(wanted, default=0)
    n_citers = needed
    if total_papers is not None:
        n_citers = total_papers - len(meta)
        if n_citers < needed:
            raise ValueError(f"total_papers={total_papers} leaves room for {n_citers} citers, {needed} needed")
    cwidth = max(6, len(str(n_citers)))
    citer_ids = [f"C{i:0{cwidth}d}" for i in range(n_citers)]
    citer_year = max(years) + 1
    for i, cid in enumerate(citer_ids):
        meta[cid] = PaperMeta(cid, citer_year, areas[i % len(areas)])
    capacity = [CITER_CAPACITY] * n_citers
    for fid, c in zip(focal_ids, wanted):
        if c == 0:
            continue
        open_ = [i for i in range(n_citers) if capacity[i] > 0]
        # prefer citers with the most spare capacity so the pool never runs dry
        open_.sort(key=lambda i: (-capacity[i], i))
        pool = open_[: max(c, len(open_) // 2)]
        for j in rng.choice(len(pool), size=c, replace=False).tolist():
            i = pool[j]
            capacity[i] -= 1
            edges.append((citer_ids[i], fid))

    graph = CitationGraph(meta, sorted(edges))
    return SyntheticCorpus(graph, labels)
