"""Comparators: Steiner-tree approximation, prior-work gate models, dominating sets."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, bfs_tree, internal_nodes, is_connected, is_tree, spanning_tree
from .planner import Plan, plan_complete

__all__ = [
    "SteinerResult",
    "GateModelReport",
    "SourceCounts",
    "steiner_approx",
    "g1",
    "g2",
    "mmg_gate_cost",
    "mmg_upper_bound",
    "fischer_gate_cost_chain",
    "fischer_gate_cost_tree",
    "greedy_dominating_set",
    "exact_dominating_number",
    "is_dominating_set",
    "source_count_bounds",
]


@dataclass(frozen=True)
class SteinerResult:
    tree: Graph  # dense ids; tree.labels are ids in the input graph
    terminals: frozenset

    @property
    def nodes(self) -> frozenset:
        return frozenset(self.tree.labels)

    @property
    def node_count(self) -> int:
        return self.tree.n

    @property
    def edge_count(self) -> int:
        return self.tree.num_edges

    def edges(self) -> list[tuple[int, int]]:
        lab = self.tree.labels
        return sorted(tuple(sorted((lab[u], lab[v]))) for u, v in self.tree.edges())


class _DisjointSet:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _prune_to_terminals(nodes: set[int], edges: set[tuple[int, int]], terminals: set[int]):
    adj: dict[int, set[int]] = {v: set() for v in nodes}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    stack = [v for v in nodes if len(adj[v]) <= 1 and v not in terminals]
    while stack:
        v = stack.pop()
        if v not in adj:
            continue
        for w in adj.pop(v):
            adj[w].discard(v)
            if len(adj[w]) <= 1 and w not in terminals:
                stack.append(w)
    kept_edges = {(u, w) for u in adj for w in adj[u] if u < w}
    return set(adj), kept_edges


def steiner_approx(g: Graph, terminals) -> SteinerResult:
    """Distance-network 2-approximation of the Steiner tree (Mehlhorn's variant).

    A multi-source BFS assigns every node to its nearest terminal. Each graph
    edge joining two regions proposes a terminal-terminal link of length
    ``d(u) + 1 + d(v)``; the minimum spanning tree of those links is expanded
    back into graph paths, reduced to a spanning tree, and stripped of
    non-terminal leaves.
    """
    term = sorted({int(t) for t in terminals})
    if not term:
        raise GraphError("terminal set is empty")
    for t in term:
        if not 0 <= t < g.n:
            raise GraphError(f"terminal {t} not in graph")
    if len(term) == 1:
        return SteinerResult(g.induced_subgraph(term).edge_subgraph([]), frozenset(term))

    dist = [-1] * g.n
    src = [-1] * g.n
    pred = [-1] * g.n
    queue = deque(term)
    for t in term:
        dist[t] = 0
        src[t] = t
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                src[w] = src[u]
                pred[w] = u
                queue.append(w)

    best: dict[tuple[int, int], tuple[int, int, int]] = {}
    for u, v in g.edges():
        a, b = src[u], src[v]
        if a < 0 or b < 0:
            continue
        if a == b:
            continue
        w = dist[u] + 1 + dist[v]
        key = (a, b) if a < b else (b, a)
        cand = (w, u, v)
        if key not in best or cand < best[key]:
            best[key] = cand

    ds = _DisjointSet(term)
    chosen = []
    for (a, b), (w, u, v) in sorted(best.items(), key=lambda kv: (kv[1][0], kv[0])):
        if ds.union(a, b):
            chosen.append((u, v))
    if len({ds.find(t) for t in term}) != 1:
        raise GraphError("terminals are not all in one component")

    nodes: set[int] = set(term)
    edges: set[tuple[int, int]] = set()

    def walk(x: int) -> None:
        while pred[x] >= 0:
            p = pred[x]
            edges.add((min(x, p), max(x, p)))
            nodes.add(p)
            x = p

    for u, v in chosen:
        nodes.update((u, v))
        edges.add((min(u, v), max(u, v)))
        walk(u)
        walk(v)

    # the expanded paths can share nodes and close cycles; cut back to a tree
    sub = g.induced_subgraph(nodes)
    index = {v: i for i, v in enumerate(sorted(nodes))}
    union = sub.edge_subgraph([(index[u], index[v]) for u, v in edges])
    tree = spanning_tree(union, index[term[0]])
    t_nodes, t_edges = _prune_to_terminals(
        set(range(tree.n)), set(tree.edges()), {index[t] for t in term}
    )
    final = tree.induced_subgraph(t_nodes)
    remap = {v: i for i, v in enumerate(sorted(t_nodes))}
    final = final.edge_subgraph([(remap[u], remap[v]) for u, v in t_edges])
    return SteinerResult(final, frozenset(term))


def g1(k: int) -> int:
    """Gates for one MMG star expansion on a degree-``k`` node that is kept."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return k * (k - 1) // 2 + 2 * k - 1


def g2(k: int) -> int:
    """Gates for one MMG star expansion when the central node is discarded."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return k * (k - 1) // 2 + k


@dataclass(frozen=True)
class GateModelReport:
    total_gates: int
    expansion_log: tuple  # (node, degree, gates charged)

    def as_dict(self) -> dict:
        return {"total_gates": self.total_gates, "expansion_log": [list(e) for e in self.expansion_log]}


def mmg_upper_bound(n: int) -> int:
    return 2 * n * n - 2 * n - 1


def mmg_gate_cost(g: Graph, seed: int = 0) -> GateModelReport:
    """Gate count of the star-expansion (MMG) protocol, as a cost model.

    Works on a spanning tree of ``g`` (``g`` itself if it is already a tree).
    A random leaf is chosen and every non-leaf node is expanded in BFS order
    from it, each expansion charged ``g1`` of the node's tree degree. Node ids
    in the log are the labels of ``g``.
    """
    if g.n == 0:
        return GateModelReport(0, ())
    if not is_connected(g):
        raise GraphError("graph is disconnected")
    tree = g if is_tree(g) else spanning_tree(g)
    if tree.n <= 2:
        return GateModelReport(0, ())
    rng = np.random.default_rng([int(seed), 3])
    leaf_list = sorted(v for v in tree.nodes() if tree.degree(v) == 1)
    start = leaf_list[int(rng.integers(len(leaf_list)))]
    _, level = bfs_tree(tree, start)
    order = sorted(level, key=lambda v: (level[v], v))
    log = []
    for v in order:
        k = tree.degree(v)
        if k >= 2:
            log.append((tree.labels[v], k, g1(k)))
    return GateModelReport(sum(c for _, _, c in log), tuple(log))


def fischer_gate_cost_chain(n: int) -> int:
    """Connection-transfer gate count on an ``n``-node chain rooted at one end."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return n * (n - 3) // 2 + 1


def fischer_gate_cost_tree(tree: Graph, root: int = 0) -> int:
    """One gate per connection transfer: a node at depth d needs d - 1 of them."""
    if not is_tree(tree):
        raise GraphError("input is not a tree")
    _, level = bfs_tree(tree, root)
    return sum(max(d - 1, 0) for d in level.values())


def is_dominating_set(g: Graph, nodes) -> bool:
    covered = [False] * g.n
    for v in nodes:
        covered[v] = True
        for w in g.neighbors(v):
            covered[w] = True
    return all(covered)


def greedy_dominating_set(g: Graph) -> set[int]:
    """Classic greedy: repeatedly take the node covering the most uncovered nodes.

    Ties go to the smallest node id. Gains only shrink, so stale heap entries
    are re-scored lazily.
    """
    covered = [False] * g.n
    n_left = g.n
    chosen: set[int] = set()

    def gain(v: int) -> int:
        return (not covered[v]) + sum(1 for w in g.neighbors(v) if not covered[w])

    heap = [(-(g.degree(v) + 1), v) for v in g.nodes()]
    heapq.heapify(heap)
    while n_left:
        _, v = heapq.heappop(heap)
        key = (-gain(v), v)
        if heap and key > heap[0]:
            heapq.heappush(heap, key)
            continue
        chosen.add(v)
        for w in (v, *g.neighbors(v)):
            if not covered[w]:
                covered[w] = True
                n_left -= 1
    return chosen


def exact_dominating_number(g: Graph, max_nodes: int = 24) -> int:
    """Domination number by branch and bound.

    Branches on the ways to cover the lowest uncovered node (itself or one of
    its neighbors) and prunes with the bound ``ceil(uncovered / (maxdeg + 1))``.
    """
    n = g.n
    if n > max_nodes:
        raise ValueError(f"exact search limited to {max_nodes} nodes, got {n}")
    if n == 0:
        return 0
    closed = [(1 << v) | sum(1 << w for w in g.neighbors(v)) for v in range(n)]
    full = (1 << n) - 1
    reach = max(g.degrees()) + 1
    best = len(greedy_dominating_set(g))

    def search(covered: int, size: int) -> None:
        nonlocal best
        if covered == full:
            best = min(best, size)
            return
        left = n - bin(covered).count("1")
        if size + -(-left // reach) >= best:
            return
        u = (~covered & full & -(~covered & full)).bit_length() - 1
        cands = [u, *g.neighbors(u)]
        cands.sort(key=lambda c: -bin(closed[c] & ~covered).count("1"))
        for c in cands:
            search(covered | closed[c], size + 1)

    search(0, 0)
    return best


@dataclass(frozen=True)
class SourceCounts:
    lower: int  # greedy dominating set of the plan tree
    upper: int  # internal nodes of the plan tree
    msg: int  # stars in the plan

    def as_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "msg": self.msg}


def source_count_bounds(plan_or_tree: Plan | Graph, seed: int = 0) -> SourceCounts:
    """Bell-pair source counts: dominating-set estimate, internal nodes, and stars used.

    Given a tree instead of a plan, the tree is planned first with ``seed``.
    """
    if isinstance(plan_or_tree, Plan):
        plan = plan_or_tree
        tree = plan.tree()
    else:
        tree = plan_or_tree
        if not is_tree(tree):
            raise GraphError("source bounds need a tree")
        plan = plan_complete(tree, seed)
    return SourceCounts(
        lower=len(greedy_dominating_set(tree)),
        upper=len(internal_nodes(tree)),
        msg=plan.num_stars,
    )
