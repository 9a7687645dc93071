"""Community detection: Newman modularity and a seeded two-phase Louvain."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graph import SocialGraph

__all__ = ["Partition", "modularity", "louvain"]


@dataclass(frozen=True)
class Partition:
    """Node -> community-id mapping; community ids are contiguous from 0."""

    assignment: dict[str, int]

    def __post_init__(self) -> None:
        ids = set(self.assignment.values())
        if ids and ids != set(range(len(ids))):
            raise ValueError("community ids must be contiguous integers from 0")

    @classmethod
    def from_labels(cls, labels: Mapping[str, object]) -> "Partition":
        """Relabel arbitrary community labels to 0..C-1 (first seen wins, by node id)."""
        remap: dict[object, int] = {}
        out: dict[str, int] = {}
        for node in sorted(labels):
            lab = labels[node]
            if lab not in remap:
                remap[lab] = len(remap)
            out[node] = remap[lab]
        return cls(out)

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> list[set[str]]:
        out: list[set[str]] = [set() for _ in range(self.n_communities)]
        for node, c in self.assignment.items():
            out[c].add(node)
        return out


def modularity(g: SocialGraph, partition: Partition) -> float:
    """Q = sum_c [ e_c / m - (d_c / 2m)^2 ] over communities."""
    m = g.edge_count
    if m == 0:
        raise ValueError("modularity undefined on a graph with no edges")
    comm = partition.assignment
    deg: defaultdict[int, int] = defaultdict(int)
    intra: defaultdict[int, int] = defaultdict(int)
    for u in g.nodes():
        if u not in comm:
            raise ValueError(f"partition does not cover node {u!r}")
        deg[comm[u]] += g.degree(u)
    for u, v in g.edges():
        if comm[u] == comm[v]:
            intra[comm[u]] += 1
    q = 0.0
    for c in sorted(deg):
        q += intra[c] / m - (deg[c] / (2.0 * m)) ** 2
    return q


def louvain(g: SocialGraph, seed: int = 0) -> Partition:
    """Two-phase Louvain with a seed-shuffled sweep order; deterministic per seed."""
    if g.node_count == 0:
        raise ValueError("louvain requires a non-empty graph")
    if g.edge_count == 0:
        return Partition({u: i for i, u in enumerate(sorted(g.nodes()))})

    rng = np.random.default_rng(seed)
    order0 = sorted(g.nodes())
    idx = {u: i for i, u in enumerate(order0)}
    # weighted adjacency over integer labels; a self entry holds TWICE the
    # internal weight so that degree sums stay equal to 2m across levels
    adj: dict[int, dict[int, float]] = {
        idx[u]: {idx[v]: 1.0 for v in g.neighbors(u)} for u in order0
    }
    m2 = 2.0 * g.edge_count
    membership = {u: idx[u] for u in order0}
    prev_q = modularity(g, Partition.from_labels(membership))
    while True:
        comm = _one_level(adj, m2, rng)
        cand = {u: comm[s] for u, s in membership.items()}
        q = modularity(g, Partition.from_labels(cand))
        if q - prev_q <= 1e-9:
            break
        membership = cand
        prev_q = q
        adj = _aggregate(adj, comm)
    return Partition.from_labels(membership)


def _one_level(adj: dict[int, dict[int, float]], m2: float, rng: np.random.Generator) -> dict[int, int]:
    """Local-moving phase; returns node -> community with labels 0..C-1."""
    nodes = sorted(adj)
    comm = {u: u for u in nodes}
    deg = {u: sum(w.values()) for u, w in adj.items()}
    tot: defaultdict[int, float] = defaultdict(float)
    for u in nodes:
        tot[comm[u]] += deg[u]
    improved = True
    while improved:
        improved = False
        order = [nodes[i] for i in rng.permutation(len(nodes))]
        for u in order:
            cu = comm[u]
            links: defaultdict[int, float] = defaultdict(float)
            for v, w in adj[u].items():
                if v != u:
                    links[comm[v]] += w
            tot[cu] -= deg[u]
            best_c = cu
            best_gain = links.get(cu, 0.0) - tot[cu] * deg[u] / m2
            for c in sorted(links):
                if c == cu:
                    continue
                gain = links[c] - tot[c] * deg[u] / m2
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            tot[best_c] += deg[u]
            if best_c != cu:
                comm[u] = best_c
                improved = True
    remap: dict[int, int] = {}
    out: dict[int, int] = {}
    for u in nodes:
        c = comm[u]
        if c not in remap:
            remap[c] = len(remap)
        out[u] = remap[c]
    return out


def _aggregate(adj: dict[int, dict[int, float]], comm: dict[int, int]) -> dict[int, dict[int, float]]:
    """Collapse communities to super-nodes, keeping total weight (and 2m) intact."""
    # setdefault (not a defaultdict touched only on edges) so communities of
    # isolated nodes survive aggregation as empty super-nodes
    new: dict[int, defaultdict[int, float]] = {}
    for u, nbrs in adj.items():
        acc = new.setdefault(comm[u], defaultdict(float))
        for v, w in nbrs.items():
            acc[comm[v]] += w
    return {c: dict(nbrs) for c, nbrs in sorted(new.items())}
