"""Deliberately naive reference implementations used to cross-check the library.

Everything here works on a plain ``dict[node, set[node]]`` adjacency and favors
obviously-correct loops over speed: triangle enumeration is the O(n^3) triple
scan, shortest paths are Floyd-Warshall, modularity is the textbook double sum
over node pairs. Nothing imports from :mod:`citynet`, so agreement between the
two is meaningful.
"""

from itertools import combinations


def adjacency(edges, nodes=()):
    adj = {n: set() for n in nodes}
    for u, v in edges:
        adj.setdefault(u, set())
        adj.setdefault(v, set())
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def bf_triangles(adj):
    """All triangles as sorted 3-tuples, by scanning every node triple."""
    out = []
    for a, b, c in combinations(sorted(adj), 3):
        if b in adj[a] and c in adj[a] and c in adj[b]:
            out.append((a, b, c))
    return out


def bf_local_clustering(adj, node):
    nbrs = sorted(adj[node])
    k = len(nbrs)
    if k < 2:
        return 0.0
    links = 0
    for x, y in combinations(nbrs, 2):
        if y in adj[x]:
            links += 1
    return 2.0 * links / (k * (k - 1))


def bf_average_clustering(adj):
    vals = [bf_local_clustering(adj, n) for n in adj]
    return sum(vals) / len(vals)


def bf_average_shortest_path(adj):
    """Floyd-Warshall mean distance over ordered pairs; inf if disconnected."""
    nodes = sorted(adj)
    inf = float("inf")
    dist = {a: {b: (0 if a == b else (1 if b in adj[a] else inf)) for b in nodes} for a in nodes}
    for k in nodes:
        for i in nodes:
            dik = dist[i][k]
            if dik == inf:
                continue
            for j in nodes:
                alt = dik + dist[k][j]
                if alt < dist[i][j]:
                    dist[i][j] = alt
    total, count = 0.0, 0
    for a in nodes:
        for b in nodes:
            if a == b:
                continue
            if dist[a][b] == inf:
                return inf
            total += dist[a][b]
            count += 1
    return total / count


def bf_modularity(adj, labels):
    """Q = (1/2m) * sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j), pair by pair."""
    m2 = sum(len(adj[n]) for n in adj)  # 2m
    if m2 == 0:
        raise ValueError("no edges")
    q = 0.0
    for i in adj:
        for j in adj:
            if labels[i] != labels[j]:
                continue
            a_ij = 1.0 if j in adj[i] else 0.0
            q += a_ij - len(adj[i]) * len(adj[j]) / m2
    return q / m2


def bf_best_partition(adj):
    """Exhaustive max-modularity partition; only sane for <= 8 nodes."""
    nodes = sorted(adj)
    if len(nodes) > 8:
        raise ValueError("exhaustive search capped at 8 nodes")

    def set_partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for smaller in set_partitions(rest):
            for i in range(len(smaller)):
                yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1 :]
            yield [[first]] + smaller

    best_q, best = float("-inf"), None
    for blocks in set_partitions(nodes):
        labels = {}
        for ci, block in enumerate(blocks):
            for n in block:
                labels[n] = ci
        q = bf_modularity(adj, labels)
        if q > best_q:
            best_q, best = q, labels
    return best_q, best


def bf_common_place_fraction(triangles, visited):
    """Share of triangles whose three members all visited one common place."""
    if not triangles:
        return None
    hits = 0
    for a, b, c in triangles:
        if visited[a] & visited[b] & visited[c]:
            hits += 1
    return hits / len(triangles)
