"""Undirected simple-graph container and basic graph primitives.

Node ids are strings. A :class:`SocialGraph` is treated as immutable once
constructed -- nothing in this package mutates a built graph, so instances
can be shared freely, including across threads.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from typing import AbstractSet

__all__ = [
    "SocialGraph",
    "Triad",
    "connected_components",
    "giant_component",
    "enumerate_triangles",
    "local_clustering",
    "average_clustering",
    "read_edge_list",
    "write_edge_list",
]

# A triangle, reported as its members sorted ascending.
Triad = tuple[str, str, str]


class SocialGraph:
    """Undirected simple graph: no self-loops, no parallel edges."""

    __slots__ = ("_adj", "_m")

    def __init__(
        self,
        nodes: Iterable[str] = (),
        edges: Iterable[tuple[str, str]] = (),
    ) -> None:
        adj: dict[str, set[str]] = {}
        for n in nodes:
            adj.setdefault(n, set())
        m = 0
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on node {u!r}")
            nu = adj.setdefault(u, set())
            nv = adj.setdefault(v, set())
            if v not in nu:
                nu.add(v)
                nv.add(u)
                m += 1
        self._adj = adj
        self._m = m

    @classmethod
    def _from_adjacency(cls, adj: dict[str, set[str]]) -> "SocialGraph":
        """Fast path for trusted, already-symmetric adjacency (takes ownership)."""
        g = cls.__new__(cls)
        g._adj = adj
        g._m = sum(len(s) for s in adj.values()) // 2
        return g

    @property
    def node_count(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return self._m

    def nodes(self) -> Iterable[str]:
        return self._adj.keys()

    def has_node(self, u: str) -> bool:
        return u in self._adj

    __contains__ = has_node

    def has_edge(self, u: str, v: str) -> bool:
        nbrs = self._adj.get(u)
        return nbrs is not None and v in nbrs

    def degree(self, u: str) -> int:
        try:
            return len(self._adj[u])
        except KeyError:
            raise ValueError(f"unknown node {u!r}") from None

    def neighbors(self, u: str) -> AbstractSet[str]:
        """Neighbor set of ``u``. Returns the internal set; do not mutate."""
        try:
            return self._adj[u]
        except KeyError:
            raise ValueError(f"unknown node {u!r}") from None

    def edges(self) -> Iterator[tuple[str, str]]:
        """All edges as ``(u, v)`` with ``u < v``, in sorted order."""
        for u in sorted(self._adj):
            for v in sorted(self._adj[u]):
                if u < v:
                    yield (u, v)

    def subgraph(self, keep: Iterable[str]) -> "SocialGraph":
        """Induced subgraph on ``keep`` (unknown ids are ignored)."""
        keep_set = {u for u in keep if u in self._adj}
        adj = {u: self._adj[u] & keep_set for u in keep_set}
        return SocialGraph._from_adjacency(adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SocialGraph):
            return NotImplemented
        return self._adj == other._adj

    def __repr__(self) -> str:
        return f"SocialGraph(nodes={self.node_count}, edges={self.edge_count})"


def connected_components(g: SocialGraph) -> list[set[str]]:
    """Connected components, largest first; ties broken by smallest member id."""
    seen: set[str] = set()
    comps: list[set[str]] = []
    for start in sorted(g.nodes()):
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        while frontier:
            nxt: list[str] = []
            for u in frontier:
                for v in g.neighbors(u):
                    if v not in comp:
                        comp.add(v)
                        nxt.append(v)
            frontier = nxt
        seen |= comp
        comps.append(comp)
    comps.sort(key=lambda c: (-len(c), min(c)))
    return comps


def giant_component(g: SocialGraph) -> SocialGraph:
    """Induced subgraph on the largest component (ties: smallest min node id)."""
    if g.node_count == 0:
        return SocialGraph()
    return g.subgraph(connected_components(g)[0])


def enumerate_triangles(g: SocialGraph) -> list[Triad]:
    """Every triangle exactly once, as sorted triples in ascending order."""
    out: list[Triad] = []
    for u in sorted(g.nodes()):
        nu = g.neighbors(u)
        for v in sorted(nu):
            if v <= u:
                continue
            for w in sorted(nu & g.neighbors(v)):
                if w > v:
                    out.append((u, v, w))
    return out


def local_clustering(g: SocialGraph, u: str) -> float:
    """Links among u's neighbors over the k(k-1)/2 possible; 0 when degree < 2."""
    nbrs = g.neighbors(u)  # raises on unknown node
    k = len(nbrs)
    if k < 2:
        return 0.0
    links = sum(len(g.neighbors(v) & nbrs) for v in nbrs) // 2
    return links / (k * (k - 1) / 2)


def average_clustering(g: SocialGraph) -> float:
    """Mean local clustering over all nodes."""
    if g.node_count == 0:
        raise ValueError("average clustering undefined on an empty graph")
    return sum(local_clustering(g, u) for u in sorted(g.nodes())) / g.node_count


def read_edge_list(path) -> SocialGraph:
    """Read ``u v`` pairs, whitespace-separated; ``#`` starts a comment line."""
    edges: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: line {ln}: expected 'u v', got {s!r}")
            edges.append((parts[0], parts[1]))
    return SocialGraph(edges=edges)


def write_edge_list(g: SocialGraph, path) -> None:
    """Write edges as sorted ``u v`` lines (isolated nodes are not representable)."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges():
            if any(ch.isspace() for ch in u + v):
                raise ValueError(f"node id with whitespace cannot be serialized: {(u, v)!r}")
            fh.write(f"{u} {v}\n")
