"""Structural metrics of citation projection graphs.

Every metric is evaluated on the undirected simple view of its graph:
direction is dropped and reciprocal edges merge. The first four metrics use
``G_p``; focal betweenness and focal constraint use ``G_p0``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import astuple, dataclass, fields
from typing import Sequence

from citeproj.projection import ProjectionPair

STANDARD_BURT = "standard-burt"
AS_PRINTED = "as-printed"
CONSTRAINT_VARIANTS = (STANDARD_BURT, AS_PRINTED)

Adjacency = list[set[int]]


@dataclass(frozen=True)
class MetricVector:
    density: float
    clustering: float
    connectivity: float
    max_betweenness: float
    focal_betweenness: float
    focal_constraint: float

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


METRIC_NAMES: tuple[str, ...] = tuple(f.name for f in fields(MetricVector))


@dataclass(frozen=True)
class UndirectedView:
    n: int
    adj: tuple[frozenset[int], ...]

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2


def undirected(n: int, edges: Sequence[tuple[int, int]]) -> Adjacency:
    adj: Adjacency = [set() for _ in range(n)]
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def gp_adjacency(pair: ProjectionPair) -> Adjacency:
    return undirected(pair.n_cited, pair.indexed_edges())


def gp0_adjacency(pair: ProjectionPair) -> Adjacency:
    """``G_p`` plus the focal paper at index ``n_cited``, linked to every cited paper."""
    n = pair.n_cited
    adj = gp_adjacency(pair)
    for a in adj:
        a.add(n)
    adj.append(set(range(n)))
    return adj


def undirected_view(pair: ProjectionPair, with_focal: bool = False) -> UndirectedView:
    adj = gp0_adjacency(pair) if with_focal else gp_adjacency(pair)
    return UndirectedView(len(adj), tuple(frozenset(a) for a in adj))


# -- graph-level kernels on adjacency lists ---------------------------------


def density_of(adj: Adjacency) -> float:
    n = len(adj)
    if n < 2:
        return 0.0
    m = sum(len(a) for a in adj) // 2
    return 2.0 * m / (n * (n - 1))


def local_clustering(adj: Adjacency, v: int) -> float:
    nbrs = adj[v]
    k = len(nbrs)
    if k < 2:
        return 0.0
    links = sum(len(adj[u] & nbrs) for u in nbrs)  # each closed triad counted twice
    return links / (k * (k - 1))


def average_clustering(adj: Adjacency) -> float:
    n = len(adj)
    if n == 0:
        return 0.0
    return sum(local_clustering(adj, v) for v in range(n)) / n


def components(adj: Adjacency) -> list[int]:
    """Sizes of the connected components."""
    seen = [False] * len(adj)
    sizes = []
    for s in range(len(adj)):
        if seen[s]:
            continue
        seen[s] = True
        stack = [s]
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        sizes.append(size)
    return sizes


def largest_component_fraction(adj: Adjacency) -> float:
    if not adj:
        return 0.0
    return max(components(adj)) / len(adj)


def betweenness(adj: Adjacency) -> list[float]:
    """Unnormalized betweenness of every node (Brandes, unit-length edges).

    Each unordered source/target pair contributes once; pairs in different
    components contribute nothing.
    """
    n = len(adj)
    cb = [0.0] * n
    for s in range(n):
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return [x / 2.0 for x in cb]


def normalized_betweenness(adj: Adjacency) -> list[float]:
    """Betweenness divided by ``(n-1)(n-2)/2``; all zeros when ``n < 3``."""
    n = len(adj)
    if n < 3:
        return [0.0] * n
    scale = 2.0 / ((n - 1) * (n - 2))
    return [b * scale for b in betweenness(adj)]


def constraint(adj: Adjacency, i: int, variant: str = STANDARD_BURT) -> float:
    """Burt's network constraint of node ``i`` with unit edge weights.

    ``standard-burt`` evaluates ``sum_{j!=i} (p_ij + sum_{k!=i,j} p_ik p_kj)^2``.
    ``as-printed`` evaluates ``sum_{j!=i} sum_{k!=j} (p_ik p_kj)^2``, the
    typeset variant without the direct term. Proportional tie strength
    ``p_xy = e(x, y) / deg(x)``. An isolated node has constraint 0.
    """
    if variant not in CONSTRAINT_VARIANTS:
        raise ValueError(f"unknown constraint variant {variant!r}")
    nbrs_i = adj[i]
    if not nbrs_i:
        return 0.0
    p_i = 1.0 / len(nbrs_i)
    # indirect[j] = sum over k in N(i), k != j of p_ik * p_kj
    indirect: dict[int, float] = {}
    squares: dict[int, float] = {}
    for k in nbrs_i:
        p_k = 1.0 / len(adj[k])
        for j in adj[k]:
            if j == i:
                continue
            indirect[j] = indirect.get(j, 0.0) + p_i * p_k
            squares[j] = squares.get(j, 0.0) + (p_i * p_k) ** 2
    if variant == AS_PRINTED:
        return sum(squares.values())
    total = 0.0
    for j in nbrs_i | indirect.keys():
        direct = p_i if j in nbrs_i else 0.0
        total += (direct + indirect.get(j, 0.0)) ** 2
    return total


# -- the six projection metrics -----------------------------------------------


def density(gp: ProjectionPair) -> float:
    return density_of(gp_adjacency(gp))


def clustering(gp: ProjectionPair) -> float:
    return average_clustering(gp_adjacency(gp))


def connectivity(gp: ProjectionPair) -> float:
    return largest_component_fraction(gp_adjacency(gp))


def max_betweenness(gp: ProjectionPair) -> float:
    return max(normalized_betweenness(gp_adjacency(gp)), default=0.0)


def focal_betweenness(gp: ProjectionPair) -> float:
    return normalized_betweenness(gp0_adjacency(gp))[-1]


def focal_constraint(gp: ProjectionPair, variant: str = STANDARD_BURT) -> float:
    adj = gp0_adjacency(gp)
    return constraint(adj, len(adj) - 1, variant)


def metric_vector(gp: ProjectionPair, variant: str = STANDARD_BURT) -> MetricVector:
    adj = gp_adjacency(gp)
    adj0 = gp0_adjacency(gp)
    return MetricVector(
        density=density_of(adj),
        clustering=average_clustering(adj),
        connectivity=largest_component_fraction(adj),
        max_betweenness=max(normalized_betweenness(adj), default=0.0),
        focal_betweenness=normalized_betweenness(adj0)[-1],
        focal_constraint=constraint(adj0, len(adj0) - 1, variant),
    )
