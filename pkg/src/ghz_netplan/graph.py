"""Undirected simple graphs over dense integer node ids.

Every other module consumes :class:`Graph`. Nodes are ``0..n-1``; an optional
``labels`` tuple maps each dense id back to the id it had in a parent graph, so
induced subgraphs can still report results in the caller's numbering.
"""
from __future__ import annotations

import json
from collections import deque
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Graph",
    "GraphError",
    "degree_table",
    "bfs_tree",
    "is_connected",
    "connected_components",
    "largest_connected_component",
    "diameter",
    "eccentricity",
    "spanning_tree",
    "is_tree",
    "internal_nodes",
    "leaves",
    "load_graph",
    "dump_graph",
]


class GraphError(ValueError):
    """Raised for malformed graphs or invalid graph queries."""


class Graph:
    """Immutable simple undirected graph.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : iterable of (int, int)
        Undirected edges. Self-loops and repeated edges raise :class:`GraphError`
        unless ``merge_duplicates`` is set, in which case repeats are dropped.
    labels : sequence of int, optional
        External id of every node (defaults to the identity).
    """

    __slots__ = ("_n", "_adj", "_sets", "_m", "labels")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        labels: Sequence[int] | None = None,
        merge_duplicates: bool = False,
    ):
        if n < 0:
            raise GraphError(f"node count must be nonnegative, got {n}")
        adj: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if v in adj[u]:
                if merge_duplicates:
                    continue
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
            m += 1
        self._n = n
        self._m = m
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self._sets = tuple(frozenset(a) for a in adj)
        if labels is None:
            self.labels = tuple(range(n))
        else:
            if len(labels) != n:
                raise GraphError("labels must have one entry per node")
            self.labels = tuple(int(x) for x in labels)

    @property
    def n(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return self._m

    def __len__(self) -> int:
        return self._n

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, edges={self._m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._n, self._adj))

    def nodes(self) -> range:
        return range(self._n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._sets[u]

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, a in enumerate(self._adj):
            for v in a:
                if u < v:
                    yield (u, v)

    def edge_list(self) -> list[tuple[int, int]]:
        return list(self.edges())

    def induced_subgraph(self, nodes: Iterable[int]) -> "Graph":
        """Subgraph on ``nodes`` (sorted), with labels composed through ``self.labels``."""
        keep = sorted(set(int(v) for v in nodes))
        for v in keep:
            if not 0 <= v < self._n:
                raise GraphError(f"node {v} not in graph")
        index = {v: i for i, v in enumerate(keep)}
        sub_edges = []
        for v in keep:
            iv = index[v]
            for w in self._adj[v]:
                if w > v and w in index:
                    sub_edges.append((iv, index[w]))
        return Graph(len(keep), sub_edges, labels=[self.labels[v] for v in keep])

    def edge_subgraph(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Graph on the same node set keeping only ``edges`` (which must exist here)."""
        es = []
        for u, v in edges:
            if not self.has_edge(u, v):
                raise GraphError(f"({u}, {v}) is not an edge")
            es.append((u, v))
        return Graph(self._n, es, labels=self.labels)

    def to_dict(self) -> dict:
        return {"n": self._n, "edges": [list(e) for e in self.edges()]}


def degree_table(g: Graph, seed: int) -> list[tuple[int, int]]:
    """Nodes with their degrees, highest degree first.

    Equal degrees are ordered by a permutation drawn from ``seed``.
    """
    rng = np.random.default_rng(seed)
    order = rng.permutation(g.n)
    deg = g.degrees()
    # sorted() is stable, so the random permutation decides ties
    ranked = sorted(order.tolist(), key=lambda v: -deg[v])
    return [(v, deg[v]) for v in ranked]


def bfs_tree(g: Graph, root: int) -> tuple[dict[int, int | None], dict[int, int]]:
    """Breadth-first tree from ``root``.

    Returns ``(parent, level)`` maps over the component of ``root``; the root's
    parent is ``None``. Neighbors are visited in increasing id order.
    """
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} not in graph")
    parent: dict[int, int | None] = {root: None}
    level = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w not in level:
                level[w] = level[u] + 1
                parent[w] = u
                queue.append(w)
    return parent, level


def _bfs_distances(g: Graph, root: int) -> list[int]:
    dist = [-1] * g.n
    dist[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.neighbors(u):
            if dist[w] < 0:
                dist[w] = du
                queue.append(w)
    return dist


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by their smallest node."""
    seen = [False] * g.n
    comps = []
    for s in g.nodes():
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    """True iff ``g`` has at most one component (the empty graph counts as connected)."""
    if g.n == 0:
        return True
    return min(_bfs_distances(g, 0)) >= 0


def largest_connected_component(g: Graph) -> tuple[Graph, dict[int, int]]:
    """Induced subgraph on a largest component plus the map old id -> new id.

    Ties go to the component containing the smallest node id.
    """
    if g.n == 0:
        return Graph(0), {}
    comps = connected_components(g)
    best = max(comps, key=len)  # max keeps the first maximal one, i.e. smallest min-node
    sub = g.induced_subgraph(best)
    return sub, {v: i for i, v in enumerate(best)}


def eccentricity(g: Graph, v: int) -> int:
    dist = _bfs_distances(g, v)
    if min(dist) < 0:
        raise GraphError("graph is disconnected")
    return max(dist)


def diameter(g: Graph) -> int:
    """Longest shortest-path length, by BFS from every node."""
    if g.n == 0:
        raise GraphError("diameter of the empty graph is undefined")
    if not is_connected(g):
        raise GraphError("graph is disconnected")
    return max(max(_bfs_distances(g, v)) for v in g.nodes())


def spanning_tree(g: Graph, root: int = 0) -> Graph:
    """BFS spanning tree (every spanning tree is minimum on an unweighted graph)."""
    if g.n == 0:
        return Graph(0)
    parent, _ = bfs_tree(g, root)
    if len(parent) != g.n:
        raise GraphError("graph is disconnected")
    return Graph(g.n, [(v, p) for v, p in parent.items() if p is not None], labels=g.labels)


def is_tree(g: Graph) -> bool:
    return g.n >= 1 and g.num_edges == g.n - 1 and is_connected(g)


def internal_nodes(g: Graph) -> set[int]:
    return {v for v in g.nodes() if g.degree(v) >= 2}


def leaves(g: Graph) -> set[int]:
    return {v for v in g.nodes() if g.degree(v) == 1}


def load_graph(path: str | Path) -> Graph:
    """Read ``{"n": N, "edges": [[u, v], ...]}``."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return graph_from_dict(data)


def graph_from_dict(data: dict) -> Graph:
    try:
        n = int(data["n"])
        edges = [(int(u), int(v)) for u, v in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"graph JSON must look like {{'n': N, 'edges': [[u, v], ...]}}: {exc}") from exc
    return Graph(n, edges)


def dump_graph(g: Graph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(g.to_dict(), fh)
        fh.write("\n")
