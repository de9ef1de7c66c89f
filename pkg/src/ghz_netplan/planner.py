"""GHZ distribution planning over a Bell-pair network.

A plan covers a connected graph with stars (one local GHZ state per star,
built from the star's Bell pairs) and fuses those GHZ states along a tree of
shared nodes. ``plan_complete`` spans every node; ``plan_subset`` first prunes
the network down to a connected subgraph containing the desired nodes.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphError, bfs_tree, degree_table, is_connected

__all__ = [
    "Star",
    "Plan",
    "CostReport",
    "PlanError",
    "OpCounter",
    "select_stars",
    "modify_stars",
    "plan_complete",
    "connected_subgraph",
    "plan_subset",
    "cost_report",
]


class PlanError(ValueError):
    pass


class OpCounter:
    """Tally of elementary steps (node/edge visits, heap operations)."""

    def __init__(self):
        self.steps = 0

    def add(self, k: int = 1) -> None:
        self.steps += k


_NULL = OpCounter()


@dataclass(frozen=True)
class Star:
    center: int
    leaves: frozenset

    def __post_init__(self):
        if self.center in self.leaves:
            raise PlanError(f"star center {self.center} listed as its own leaf")
        if not self.leaves:
            raise PlanError(f"star centered on {self.center} has no leaves")

    @property
    def nodes(self) -> frozenset:
        return self.leaves | {self.center}

    @property
    def size(self) -> int:
        return len(self.leaves) + 1

    def edges(self) -> list[tuple[int, int]]:
        return [(self.center, v) for v in sorted(self.leaves)]


@dataclass(frozen=True)
class CostReport:
    gates: int
    bell_pairs: int
    sources: int
    classical_bits: int
    subgraph_size: int
    removal_measurements: int = 0

    def as_dict(self) -> dict:
        return {
            "gates": self.gates,
            "bell_pairs": self.bell_pairs,
            "sources": self.sources,
            "classical_bits": self.classical_bits,
            "subgraph_size": self.subgraph_size,
            "removal_measurements": self.removal_measurements,
        }


@dataclass(frozen=True)
class Plan:
    """Stars in fusion order plus the fusion tree joining them.

    ``fusion_edges`` holds ``(parent_star, child_star, shared_node)``; the
    child is always the later star. Node ids refer to ``subgraph``.
    """

    stars: tuple
    fusion_edges: tuple
    subgraph: Graph
    root_star: int = 0
    steps: int = field(default=0, compare=False)

    @property
    def num_stars(self) -> int:
        return len(self.stars)

    def tree(self) -> Graph:
        """The spanning tree formed by the Bell pairs the plan consumes."""
        es = [e for s in self.stars for e in s.edges()]
        return Graph(self.subgraph.n, es, labels=self.subgraph.labels)

    def star_depths(self) -> list[int]:
        depth = [0] * len(self.stars)
        for parent, child, _ in self.fusion_edges:
            depth[child] = depth[parent] + 1
        return depth

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.stars]
        for parent, child, _ in self.fusion_edges:
            kids[parent].append(child)
        return kids

    def validate(self) -> None:
        """Raise :class:`PlanError` unless every structural invariant holds."""
        k = len(self.stars)
        g = self.subgraph
        if k == 0:
            raise PlanError("plan has no stars")
        if len(self.fusion_edges) != k - 1:
            raise PlanError("fusion edges do not form a tree over the stars")
        for s in self.stars:
            for u, v in s.edges():
                if not g.has_edge(u, v):
                    raise PlanError(f"star edge ({u}, {v}) missing from the graph")
        seen = {self.root_star}
        for parent, child, node in self.fusion_edges:
            if parent not in seen or child in seen:
                raise PlanError("fusion edges are not a rooted tree in insertion order")
            if node not in self.stars[parent].nodes or node not in self.stars[child].nodes:
                raise PlanError(f"shared node {node} not in both fused stars")
            seen.add(child)
        if len(seen) != k:
            raise PlanError("fusion tree does not reach every star")
        # every pair of stars meets in at most one node, which must be a shared node
        covered: dict[int, int] = {}
        total = 0
        for s in self.stars:
            for v in s.nodes:
                covered[v] = covered.get(v, 0) + 1
            total += s.size
        if set(covered) != set(g.nodes()):
            raise PlanError("stars do not cover the subgraph")
        if total != g.n + k - 1:
            raise PlanError("stars overlap in more than the fusion nodes")
        shared_counts: dict[int, int] = {}
        for _, _, node in self.fusion_edges:
            shared_counts[node] = shared_counts.get(node, 0) + 1
        for v, c in covered.items():
            if c - 1 != shared_counts.get(v, 0):
                raise PlanError(f"node {v} appears in stars without a matching fusion")

    def to_dict(self) -> dict:
        lab = self.subgraph.labels
        return {
            "stars": [
                {"center": lab[s.center], "leaves": sorted(lab[v] for v in s.leaves)} for s in self.stars
            ],
            "fusion_edges": [[a, b, lab[v]] for a, b, v in self.fusion_edges],
            "root_star": self.root_star,
            "nodes": list(lab),
        }


def _check_plannable(g: Graph) -> None:
    if g.n < 2:
        raise PlanError(f"need at least 2 nodes to distribute a GHZ state, got {g.n}")
    if not is_connected(g):
        raise PlanError("network graph is disconnected")


def select_stars(g: Graph, seed: int, counter: OpCounter | None = None) -> list[Star]:
    """Greedy star cover, highest-degree nodes first.

    Walks the degree table; each node becomes the center of a star over its
    neighbors still present, then is deleted with its edges. Stops once every
    node lies in some star. Edges left over between surviving nodes become
    2-node stars centered on the endpoint ranked higher in the table.
    """
    _check_plannable(g)
    counter = counter or _NULL
    n = g.n
    table = degree_table(g, seed)
    counter.add(n + g.num_edges + n * max(1, math.ceil(math.log2(n))))
    rank = [0] * n
    for i, (v, _) in enumerate(table):
        rank[v] = i

    alive = [True] * n
    covered = [False] * n
    n_covered = 0
    stars: list[Star] = []
    for v, _ in table:
        if n_covered == n:
            break
        nbrs = [w for w in g.neighbors(v) if alive[w]]
        counter.add(g.degree(v) + 1)
        alive[v] = False
        if not nbrs:
            # every neighbor was an earlier center whose star already holds v
            continue
        stars.append(Star(v, frozenset(nbrs)))
        for w in (v, *nbrs):
            if not covered[w]:
                covered[w] = True
                n_covered += 1

    leftover = []
    for u in range(n):
        if not alive[u]:
            continue
        for w in g.neighbors(u):
            counter.add()
            if alive[w] and u < w:
                leftover.append((u, w) if rank[u] < rank[w] else (w, u))
    leftover.sort(key=lambda e: (rank[e[0]], rank[e[1]]))
    stars.extend(Star(c, frozenset([l])) for c, l in leftover)
    return stars


def modify_stars(
    stars: list[Star],
    seed: int,
    graph: Graph | None = None,
    counter: OpCounter | None = None,
) -> Plan:
    """Trim the star cover so consecutive stars overlap in exactly one node.

    The largest star is the root. Stars touching the stars already kept are
    taken largest first (ties by their position in ``stars``). A star whose
    nodes are all already covered is dropped. Otherwise its overlap is removed
    except for one node: its own center when the center is shared, else a
    common node chosen at random. That node becomes the fusion point with the
    first kept star containing it.
    """
    if not stars:
        raise PlanError("no stars to modify")
    counter = counter or _NULL
    rng = np.random.default_rng([int(seed), 1])

    if graph is None:
        n = 1 + max(v for s in stars for v in s.nodes)
        graph = Graph(n, sorted({tuple(sorted(e)) for s in stars for e in s.edges()}))

    by_node: dict[int, list[int]] = {}
    for i, s in enumerate(stars):
        for v in s.nodes:
            by_node.setdefault(v, []).append(i)
        counter.add(s.size)

    root = max(range(len(stars)), key=lambda i: (stars[i].size, -i))
    owner: dict[int, int] = {}  # node -> first kept star holding it
    kept: list[Star] = []
    fusion: list[tuple[int, int, int]] = []
    done = [False] * len(stars)
    heap: list[tuple[int, int]] = []

    def admit(star: Star) -> None:
        idx = len(kept)
        kept.append(star)
        for v in star.nodes:
            counter.add()
            if v in owner:
                continue
            owner[v] = idx
            for j in by_node[v]:
                if not done[j]:
                    heapq.heappush(heap, (-stars[j].size, j))
                    counter.add()

    done[root] = True
    admit(stars[root])
    while heap:
        _, j = heapq.heappop(heap)
        counter.add()
        if done[j]:
            continue
        done[j] = True
        s1 = stars[j]
        common = [v for v in s1.nodes if v in owner]
        counter.add(s1.size)
        if len(common) == s1.size:
            continue
        if s1.center in owner:
            shared = s1.center
            leaves = s1.leaves.difference(common)
        else:
            common.sort()
            shared = common[int(rng.integers(len(common)))]
            leaves = s1.leaves.difference(common) | {shared}
        trimmed = Star(s1.center, frozenset(leaves))
        fusion.append((owner[shared], len(kept), shared))
        admit(trimmed)

    if not all(done):
        raise PlanError("star cover is not connected")
    return Plan(tuple(kept), tuple(fusion), graph, 0, counter.steps)


def plan_complete(g: Graph, seed: int, counter: OpCounter | None = None) -> Plan:
    """Plan a GHZ state over every node of the connected graph ``g``."""
    counter = counter or OpCounter()
    stars = select_stars(g, seed, counter)
    return modify_stars(stars, seed, g, counter)


def connected_subgraph(g: Graph, desired, seed: int) -> Graph:
    """Connected induced subgraph of ``g`` containing every desired node.

    If the desired nodes already induce a connected subgraph it is returned
    as is. Otherwise a BFS tree is grown from a random desired node, leaves
    that are not desired are stripped until none remain, and the subgraph of
    ``g`` induced by the surviving nodes is returned. Labels of the result are
    node ids of ``g`` (composed through ``g.labels``).
    """
    want = sorted({int(v) for v in desired})
    if not want:
        raise PlanError("desired node set is empty")
    for v in want:
        if not 0 <= v < g.n:
            raise GraphError(f"desired node {v} not in graph")
    induced = g.induced_subgraph(want)
    if is_connected(induced):
        return induced

    rng = np.random.default_rng([int(seed), 2])
    root = want[int(rng.integers(len(want)))]
    parent, _ = bfs_tree(g, root)
    if any(v not in parent for v in want):
        raise PlanError("desired nodes are not all in one component")
    child_count: dict[int, int] = {v: 0 for v in parent}
    for v, p in parent.items():
        if p is not None:
            child_count[p] += 1
    wanted = set(want)
    alive = set(parent)
    stack = [v for v, c in child_count.items() if c == 0 and v not in wanted]
    while stack:
        v = stack.pop()
        alive.discard(v)
        p = parent[v]
        child_count[p] -= 1
        if child_count[p] == 0 and p not in wanted:
            stack.append(p)
    return g.induced_subgraph(alive)


def cost_report(plan: Plan, removal_measurements: int = 0) -> CostReport:
    """Gate, Bell-pair, source and classical-bit counts of a plan.

    Each star of ``s`` nodes costs ``s - 2`` CNOTs, ``s - 1`` Bell pairs and
    ``s - 2`` measurement bits; each fusion costs one CNOT. In the fusion
    phase every leaf of the star tree receives one bit per fusion on its path
    to the root. Pauli corrections are not counted as gates.
    """
    sizes = [s.size for s in plan.stars]
    k = len(sizes)
    star_gates = sum(sz - 2 for sz in sizes)
    depth = plan.star_depths()
    kids = plan.children()
    fusion_bits = sum(depth[i] for i in range(k) if not kids[i])
    return CostReport(
        gates=star_gates + (k - 1),
        bell_pairs=sum(sz - 1 for sz in sizes),
        sources=k,
        classical_bits=star_gates + fusion_bits,
        subgraph_size=plan.subgraph.n,
        removal_measurements=removal_measurements,
    )


def plan_subset(g: Graph, desired, seed: int) -> tuple[Plan, CostReport]:
    """Plan a GHZ state shared by the desired nodes of ``g``.

    Non-desired nodes of the pruned subgraph are X-measured out at the end;
    those measurements are tallied in ``removal_measurements``.
    """
    want = {int(v) for v in desired}
    if len(want) < 2:
        raise PlanError("need at least two desired nodes")
    sub = connected_subgraph(g, want, seed)
    plan = plan_complete(sub, seed)
    return plan, cost_report(plan, removal_measurements=sub.n - len(want))
