import random

import pytest

from citynet import SocialGraph


@pytest.fixture
def triangle_graph():
    return SocialGraph(edges=[("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def k4():
    nodes = ["a", "b", "c", "d"]
    return SocialGraph(edges=[(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1 :]])


def random_edge_set(seed, max_nodes=50, p=0.15):
    """Seeded Erdos-Renyi edge list over string node ids."""
    rng = random.Random(seed)
    n = rng.randint(2, max_nodes)
    nodes = [f"n{i:02d}" for i in range(n)]
    edges = [
        (nodes[i], nodes[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    return nodes, edges
