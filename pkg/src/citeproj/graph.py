"""Loading, validation and indexing of a directed citation network.

Edge ``(u, v)`` means that paper ``u`` cites paper ``v``; the out-neighbours
of a paper are its references.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, TextIO, Union

logger = logging.getLogger(__name__)

YEAR_MIN = 1800
YEAR_MAX = 2100
META_HEADER = ("paper_id", "year", "area")

Source = Union[str, os.PathLike, TextIO, Iterable[str]]


class ParseError(ValueError):
    """A malformed row in an edge or metadata source."""

    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


class PaperNotFound(KeyError):
    pass


@dataclass(frozen=True)
class PaperMeta:
    paper: str
    year: int
    area: str

    def __post_init__(self):
        check_paper_id(self.paper)
        if not YEAR_MIN <= self.year <= YEAR_MAX:
            raise ValueError(f"year {self.year} of {self.paper!r} outside [{YEAR_MIN}, {YEAR_MAX}]")
        if not self.area or any(ch.isspace() for ch in self.area):
            raise ValueError(f"invalid area {self.area!r} for {self.paper!r}")

    @property
    def cohort(self) -> tuple[int, str]:
        return (self.year, self.area)


@dataclass(frozen=True)
class LoadStats:
    raw_edge_rows: int = 0
    duplicate_edges: int = 0
    self_loops: int = 0
    missing_meta: int = 0


@dataclass(frozen=True)
class CycleReport:
    cycle_edge_count: int
    sample_cycles: tuple[tuple[str, ...], ...]

    @property
    def is_dag(self) -> bool:
        return self.cycle_edge_count == 0


def check_paper_id(pid: str) -> str:
    if not isinstance(pid, str) or not pid or any(ch.isspace() for ch in pid):
        raise ValueError(f"invalid paper id {pid!r}")
    return pid


class CitationGraph:
    """Immutable directed citation network with optional per-paper metadata.

    Papers that occur only as edge endpoints are kept with ``meta(p) is None``.
    Self-citations are rejected; use :func:`load_citation_graph` to drop them
    from raw input.
    """

    def __init__(
        self,
        meta: Mapping[str, Optional[PaperMeta]],
        edges: Iterable[tuple[str, str]],
        stats: LoadStats = LoadStats(),
    ):
        self._meta: dict[str, Optional[PaperMeta]] = {}
        for pid, m in meta.items():
            check_paper_id(pid)
            if m is not None and m.paper != pid:
                raise ValueError(f"metadata for {m.paper!r} stored under {pid!r}")
            self._meta[pid] = m
        succ: dict[str, set[str]] = {p: set() for p in self._meta}
        pred: dict[str, set[str]] = {p: set() for p in self._meta}
        n_edges = 0
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-citation {u!r}")
            if u not in succ or v not in succ:
                raise ValueError(f"edge ({u!r}, {v!r}) references an unknown paper")
            if v not in succ[u]:
                succ[u].add(v)
                pred[v].add(u)
                n_edges += 1
        self._succ = {p: tuple(sorted(s)) for p, s in succ.items()}
        self._pred = {p: tuple(sorted(s)) for p, s in pred.items()}
        self._succ_sets = {p: frozenset(s) for p, s in succ.items()}
        self._nodes = tuple(sorted(self._meta))
        self._n_edges = n_edges
        self.stats = stats

    def __contains__(self, pid) -> bool:
        return pid in self._meta

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"CitationGraph(nodes={len(self)}, edges={self._n_edges})"

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def number_of_edges(self) -> int:
        return self._n_edges

    def edges(self) -> Iterator[tuple[str, str]]:
        for u in self._nodes:
            for v in self._succ[u]:
                yield (u, v)

    def meta(self, pid: str) -> Optional[PaperMeta]:
        return self._meta[self._require(pid)]

    def successors(self, pid: str) -> tuple[str, ...]:
        return self._succ[self._require(pid)]

    def predecessors(self, pid: str) -> tuple[str, ...]:
        return self._pred[self._require(pid)]

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._succ_sets.get(u, ())

    def out_degree(self, pid: str) -> int:
        return len(self.successors(pid))

    def in_degree(self, pid: str) -> int:
        return len(self.predecessors(pid))

    def _require(self, pid: str) -> str:
        if pid not in self._meta:
            raise PaperNotFound(pid)
        return pid


def _open_lines(source: Source) -> tuple[str, Iterable[str], Optional[TextIO]]:
    if isinstance(source, (str, os.PathLike)):
        fh = open(source, encoding="utf-8", newline="")
        return os.fspath(source), fh, fh
    name = getattr(source, "name", "<stream>")
    return str(name), source, None


def read_edges(source: Source) -> tuple[list[tuple[str, str]], int]:
    """Parse ``citing<TAB>cited`` rows; ``#`` lines and blank lines are skipped.

    Returns the raw rows in file order and the number of data rows.
    """
    name, lines, fh = _open_lines(source)
    rows = []
    try:
        for lineno, line in enumerate(lines, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(name, lineno, f"expected 2 tab-separated fields, got {len(parts)}")
            u, v = parts[0].strip(), parts[1].strip()
            for pid in (u, v):
                if not pid or any(ch.isspace() for ch in pid):
                    raise ParseError(name, lineno, f"invalid paper id {pid!r}")
            rows.append((u, v))
    finally:
        if fh is not None:
            fh.close()
    return rows, len(rows)


def read_meta(source: Source) -> dict[str, PaperMeta]:
    name, lines, fh = _open_lines(source)
    out: dict[str, PaperMeta] = {}
    try:
        reader = csv.reader(lines)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != META_HEADER:
            raise ParseError(name, 1, f"expected header {','.join(META_HEADER)}")
        for row in reader:
            lineno = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(name, lineno, f"expected 3 fields, got {len(row)}")
            pid, year_s, area = (x.strip() for x in row)
            try:
                year = int(year_s)
                m = PaperMeta(pid, year, area)
            except ValueError as exc:
                raise ParseError(name, lineno, str(exc)) from None
            if pid in out:
                raise ParseError(name, lineno, f"duplicate paper id {pid!r}")
            out[pid] = m
    finally:
        if fh is not None:
            fh.close()
    return out


def load_citation_graph(edge_source: Source, meta_source: Source) -> CitationGraph:
    """Build a :class:`CitationGraph` from an edge TSV and a metadata CSV.

    Duplicate edges are collapsed, self-citations dropped (counted in
    ``graph.stats.self_loops``), and papers seen only as edge endpoints are
    added without metadata.

    Raises
    ------
    ParseError
        On a malformed row (the message names the line) or an edge source
        without data rows.
    """
    rows, n_rows = read_edges(edge_source)
    if n_rows == 0:
        name = _open_name(edge_source)
        raise ParseError(name, 0, "edge source contains no edges")
    meta: dict[str, Optional[PaperMeta]] = dict(read_meta(meta_source))
    missing = 0
    edges: set[tuple[str, str]] = set()
    self_loops = 0
    for u, v in rows:
        for pid in (u, v):
            if pid not in meta:
                meta[pid] = None
                missing += 1
        if u == v:
            self_loops += 1
            continue
        edges.add((u, v))
    if self_loops:
        logger.warning("dropped %d self-citation rows", self_loops)
    if missing:
        logger.warning("%d papers referenced by edges have no metadata", missing)
    stats = LoadStats(
        raw_edge_rows=n_rows,
        duplicate_edges=n_rows - self_loops - len(edges),
        self_loops=self_loops,
        missing_meta=missing,
    )
    return CitationGraph(meta, sorted(edges), stats)


def _open_name(source: Source) -> str:
    if isinstance(source, (str, os.PathLike)):
        return os.fspath(source)
    return str(getattr(source, "name", "<stream>"))


def write_edges(g: CitationGraph, fh: TextIO) -> None:
    for u, v in g.edges():
        fh.write(f"{u}\t{v}\n")


def write_meta(g: CitationGraph, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(META_HEADER)
    for pid in g.nodes:
        m = g.meta(pid)
        if m is not None:
            w.writerow((m.paper, m.year, m.area))


def graph_from_text(edges_text: str, meta_text: str = "paper_id,year,area\n") -> CitationGraph:
    """Convenience loader for in-memory fixtures."""
    return load_citation_graph(io.StringIO(edges_text), io.StringIO(meta_text))


def strongly_connected_components(g: CitationGraph) -> list[list[str]]:
    """Tarjan's algorithm, iterative so deep citation chains do not hit the recursion limit."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    comps: list[list[str]] = []
    counter = 0
    for root in g.nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            succ = g.successors(v)
            recursed = False
            while i < len(succ):
                w = succ[i]
                i += 1
                if w not in index:
                    work.append((v, i))
                    work.append((w, 0))
                    recursed = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recursed:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def _shortest_cycle_through(g: CitationGraph, s: str, members: set[str]) -> tuple[str, ...]:
    parent: dict[str, Optional[str]] = {s: None}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in g.successors(u):
            if w == s:
                path = [u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return tuple(reversed(path))
            if w in members and w not in parent:
                parent[w] = u
                queue.append(w)
    raise AssertionError("strongly connected component without a cycle")


def validate_acyclicity(g: CitationGraph, max_samples: int = 10) -> CycleReport:
    """Count the edges that lie on at least one directed cycle.

    An edge lies on a cycle iff both endpoints share a strongly connected
    component. Up to ``max_samples`` shortest cycles are reported, one per
    component, in order of the component's smallest paper id.
    """
    comps = [c for c in strongly_connected_components(g) if len(c) > 1]
    comps.sort(key=lambda c: c[0])
    count = 0
    for comp in comps:
        members = set(comp)
        count += sum(1 for u in comp for v in g.successors(u) if v in members)
    samples = tuple(_shortest_cycle_through(g, c[0], set(c)) for c in comps[:max_samples])
    return CycleReport(count, samples)


def eligible_focal_papers(g: CitationGraph, min_refs: int = 10) -> list[str]:
    """Papers with strictly more than ``min_refs`` in-dataset references, sorted by id."""
    if min_refs < 0:
        raise ValueError("min_refs must be non-negative")
    return [p for p in g.nodes if g.out_degree(p) > min_refs]
