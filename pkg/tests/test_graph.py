import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from conftest import complete, connected_graphs, gnp, path_graph, random_tree, star
from ghz_netplan.graph import (
    Graph,
    GraphError,
    bfs_tree,
    connected_components,
    degree_table,
    diameter,
    dump_graph,
    eccentricity,
    graph_from_dict,
    internal_nodes,
    is_connected,
    is_tree,
    largest_connected_component,
    leaves,
    load_graph,
    spanning_tree,
)
from ghz_netplan.netgen import WaxmanParams, gen_waxman


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


class TestConstruction:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            Graph(3, [(1, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(GraphError):
            Graph(3, [(0, 3)])

    def test_duplicate_edges(self):
        with pytest.raises(GraphError):
            Graph(3, [(0, 1), (1, 0)])
        assert Graph(3, [(0, 1), (1, 0)], merge_duplicates=True).num_edges == 1

    def test_induced_subgraph_composes_labels(self):
        g = path_graph(6)
        sub = g.induced_subgraph([1, 2, 3, 4])
        subsub = sub.induced_subgraph([2, 3])
        assert subsub.labels == (3, 4)
        assert subsub.edge_list() == [(0, 1)]

    def test_json_round_trip(self, tmp_path):
        g = gnp(12, 0.3, np.random.default_rng(1))
        path = tmp_path / "g.json"
        dump_graph(g, path)
        assert json.loads(path.read_text()) == {"n": 12, "edges": [list(e) for e in g.edges()]}
        assert load_graph(path) == g

    @pytest.mark.parametrize("data", [{"edges": []}, {"n": -1, "edges": []}, {"n": 2, "edges": [[0]]}])
    def test_bad_json(self, data):
        with pytest.raises(GraphError):
            graph_from_dict(data)


class TestDegreeTable:
    def test_empty(self):
        assert degree_table(Graph(0, []), 0) == []

    def test_star_head(self):
        assert degree_table(star(5), 7)[0] == (0, 4)

    @pytest.mark.parametrize("seed", range(10))
    def test_path_head(self, seed):
        assert degree_table(path_graph(3), seed)[0] == (1, 2)

    def test_ties_depend_on_seed(self):
        g = Graph(6, [])
        orders = {tuple(v for v, _ in degree_table(g, s)) for s in range(20)}
        assert len(orders) > 1

    @given(connected_graphs())
    @settings(max_examples=50, deadline=None)
    def test_permutation_and_sorted(self, g):
        t = degree_table(g, 3)
        assert sorted(v for v, _ in t) == list(range(g.n))
        degs = [d for _, d in t]
        assert degs == sorted(degs, reverse=True)
        assert all(d == g.degree(v) for v, d in t)
        assert t == degree_table(g, 3)


class TestBfs:
    def test_single_node(self):
        parent, level = bfs_tree(Graph(1, []), 0)
        assert parent == {0: None} and level == {0: 0}

    def test_path_levels(self):
        _, level = bfs_tree(path_graph(3), 0)
        assert [level[v] for v in range(3)] == [0, 1, 2]

    def test_spans_component(self):
        g = Graph(10, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 4), (2, 7), (7, 8)])
        parent, _ = bfs_tree(g, 8)
        assert set(parent) == nx.node_connected_component(to_nx(g), 8)

    @given(connected_graphs())
    @settings(max_examples=50, deadline=None)
    def test_levels_step_by_one(self, g):
        parent, level = bfs_tree(g, 0)
        for v, p in parent.items():
            if p is not None:
                assert level[v] - level[p] == 1
                assert g.has_edge(v, p)


class TestConnectivity:
    def test_two_isolated(self):
        assert not is_connected(Graph(2, []))

    def test_k4(self):
        assert is_connected(complete(4))

    def test_empty_is_connected(self):
        assert is_connected(Graph(0, []))

    @pytest.mark.parametrize("seed", range(10))
    def test_components_match_union_find(self, seed):
        g = gnp(20, 0.05, np.random.default_rng(seed))
        parent = list(range(g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in g.edges():
            parent[find(u)] = find(v)
        groups = {}
        for v in range(g.n):
            groups.setdefault(find(v), set()).add(v)
        assert sorted(map(sorted, groups.values())) == sorted(map(sorted, connected_components(g)))
        assert is_connected(g) == (len(groups) == 1)


class TestLcc:
    def test_connected_is_itself(self):
        g = path_graph(5)
        sub, mapping = largest_connected_component(g)
        assert sub == g and mapping == {v: v for v in range(5)}

    def test_picks_larger(self):
        g = Graph(8, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 6), (6, 7)])
        sub, mapping = largest_connected_component(g)
        assert sub.n == 5 and set(mapping) == {3, 4, 5, 6, 7}
        assert set(sub.labels) == {3, 4, 5, 6, 7}

    def test_waxman_sample(self):
        g, _ = gen_waxman(WaxmanParams(80, 150.0, 1.0, 22.0, seed=4))
        best = max(len(bfs_tree(g, v)[0]) for v in range(g.n))
        sub, _ = largest_connected_component(g)
        assert sub.n == best


class TestDiameter:
    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_complete(self, n):
        assert diameter(complete(n)) == 1

    def test_path(self):
        assert diameter(path_graph(5)) == 4

    def test_single(self):
        assert diameter(Graph(1, [])) == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_floyd_warshall(self, seed):
        rng = np.random.default_rng(seed)
        g = gnp(15, 0.2, rng)
        while not is_connected(g):
            g = gnp(15, 0.2, rng)
        n = g.n
        d = np.full((n, n), np.inf)
        np.fill_diagonal(d, 0)
        for u, v in g.edges():
            d[u, v] = d[v, u] = 1
        for k in range(n):
            d = np.minimum(d, d[:, [k]] + d[[k], :])
        assert diameter(g) == int(d.max())
        assert all(eccentricity(g, v) == int(d[v].max()) for v in range(n))

    @given(connected_graphs(max_n=15))
    @settings(max_examples=40, deadline=None)
    def test_matches_networkx(self, g):
        assert diameter(g) == nx.diameter(to_nx(g))
        assert diameter(g) >= eccentricity(g, 0)

    def test_disconnected_raises(self):
        with pytest.raises(GraphError):
            diameter(Graph(3, [(0, 1)]))


class TestSpanningTree:
    def test_tree_is_unchanged(self):
        t = random_tree(20, np.random.default_rng(2))
        assert set(spanning_tree(t).edges()) == set(t.edges())

    def test_triangle(self):
        t = spanning_tree(complete(3))
        assert t.num_edges == 2 and set(t.edges()) <= set(complete(3).edges())

    @pytest.mark.parametrize("seed", range(5))
    def test_gnp(self, seed):
        rng = np.random.default_rng(seed)
        g = gnp(30, 0.2, rng)
        while not is_connected(g):
            g = gnp(30, 0.2, rng)
        t = spanning_tree(g)
        assert is_tree(t) and nx.is_tree(to_nx(t))
        assert set(t.edges()) <= set(g.edges())

    @given(connected_graphs())
    @settings(max_examples=50, deadline=None)
    def test_property(self, g):
        t = spanning_tree(g)
        assert t.num_edges == g.n - 1 and is_connected(t)


class TestInternalLeaves:
    def test_path(self):
        g = path_graph(4)
        assert internal_nodes(g) == {1, 2} and leaves(g) == {0, 3}

    def test_star(self):
        g = star(5)
        assert internal_nodes(g) == {0} and leaves(g) == {1, 2, 3, 4}

    def test_random_tree_partition(self):
        t = random_tree(50, np.random.default_rng(3))
        hist = np.bincount(t.degrees())
        assert len(internal_nodes(t)) + len(leaves(t)) == 50
        assert len(leaves(t)) == hist[1]
