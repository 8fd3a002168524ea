"""Citation projection graphs of a focal paper.

``G_p`` is the subgraph induced by the papers a focal paper cites. ``G_p0``
adds the focal paper itself with one outgoing edge to each cited paper; edges
pointing back at the focal paper are never included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TextIO

from citeproj.graph import CitationGraph, PaperNotFound


@dataclass(frozen=True)
class ProjectionPair:
    focal: str
    cited: tuple[str, ...]
    gp_edges: tuple[tuple[str, str], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(set(self.cited)) != len(self.cited):
            raise ValueError("cited papers must be distinct")
        if self.focal in self.cited:
            raise ValueError("focal paper cannot cite itself")
        index = {c: i for i, c in enumerate(self.cited)}
        for u, v in self.gp_edges:
            if u not in index or v not in index or u == v:
                raise ValueError(f"edge ({u!r}, {v!r}) is not inside the cited set")
        if len(set(self.gp_edges)) != len(self.gp_edges):
            raise ValueError("duplicate edge in projection")
        object.__setattr__(self, "_index", index)

    @property
    def n_cited(self) -> int:
        return len(self.cited)

    @property
    def gp0_edges(self) -> tuple[tuple[str, str], ...]:
        return self.gp_edges + tuple((self.focal, c) for c in self.cited)

    @property
    def gp0_nodes(self) -> tuple[str, ...]:
        return self.cited + (self.focal,)

    def indexed_edges(self) -> list[tuple[int, int]]:
        """``G_p`` edges as positions into :attr:`cited`."""
        idx = self._index
        return [(idx[u], idx[v]) for u, v in self.gp_edges]

    def with_edges(self, edges) -> "ProjectionPair":
        return ProjectionPair(self.focal, self.cited, tuple(sorted(edges)))


def project(g: CitationGraph, v0: str) -> ProjectionPair:
    """Extract the projection pair of ``v0`` from ``g``.

    Raises :class:`~citeproj.graph.PaperNotFound` if ``v0`` is not in the graph.
    """
    if v0 not in g:
        raise PaperNotFound(v0)
    cited = g.successors(v0)
    members = set(cited)
    edges = tuple((u, v) for u in cited for v in g.successors(u) if v in members)
    return ProjectionPair(v0, cited, edges)


def write_projection(pair: ProjectionPair, fh: TextIO) -> None:
    fh.write("# gp\n")
    for u, v in pair.gp_edges:
        fh.write(f"{u}\t{v}\n")
    fh.write("# gp0\n")
    for u, v in pair.gp0_edges:
        fh.write(f"{u}\t{v}\n")
