import itertools
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from conftest import complete, connected_graphs, cycle, gnp, path_graph, random_tree, star
from ghz_netplan.graph import Graph, GraphError, _bfs_distances, is_connected, is_tree
from ghz_netplan.netgen import ErParams, gen_er_connected
from ghz_netplan.planner import cost_report, plan_complete
from ghz_netplan.baselines import (
    exact_dominating_number,
    fischer_gate_cost_chain,
    fischer_gate_cost_tree,
    g1,
    g2,
    greedy_dominating_set,
    is_dominating_set,
    mmg_gate_cost,
    mmg_upper_bound,
    source_count_bounds,
    steiner_approx,
)


def brute_steiner_nodes(g: Graph, terminals) -> int:
    terminals = set(terminals)
    others = [v for v in range(g.n) if v not in terminals]
    for extra in range(len(others) + 1):
        for add in itertools.combinations(others, extra):
            if is_connected(g.induced_subgraph(sorted(terminals | set(add)))):
                return len(terminals) + extra
    raise AssertionError("terminals disconnected")


def brute_domination(g: Graph) -> int:
    for k in range(1, g.n + 1):
        if any(is_dominating_set(g, c) for c in itertools.combinations(range(g.n), k)):
            return k
    return 0


class TestSteiner:
    def test_all_terminals_spanning(self):
        g = gen_er_connected(ErParams(30, 0.2, 1))
        r = steiner_approx(g, range(30))
        assert r.node_count == 30 and r.edge_count == 29 and is_tree(r.tree)

    @pytest.mark.parametrize("seed", range(10))
    def test_two_terminals_shortest_path(self, seed):
        g = gen_er_connected(ErParams(40, 0.05, seed))
        rng = np.random.default_rng(seed)
        u, v = (int(x) for x in rng.choice(40, 2, replace=False))
        r = steiner_approx(g, [u, v])
        assert r.edge_count == _bfs_distances(g, u)[v]
        for a, b in r.edges():
            assert g.has_edge(a, b)

    def test_single_terminal(self):
        r = steiner_approx(path_graph(5), [3])
        assert r.node_count == 1 and r.edge_count == 0 and r.nodes == {3}

    def test_empty_terminals(self):
        with pytest.raises(GraphError):
            steiner_approx(path_graph(3), [])

    def test_disconnected_terminals(self):
        with pytest.raises(GraphError):
            steiner_approx(Graph(4, [(0, 1), (2, 3)]), [0, 3])

    def test_on_relabelled_subgraph(self):
        g = path_graph(10).induced_subgraph(range(4, 10))
        r = steiner_approx(g, [0, 3])
        assert r.nodes == {4, 5, 6, 7} and r.edges() == [(4, 5), (5, 6), (6, 7)]

    @pytest.mark.parametrize("seed", range(25))
    def test_two_approximation(self, seed):
        rng = np.random.default_rng(seed)
        g = gen_er_connected(ErParams(11, 0.15, seed))
        k = int(rng.integers(2, 6))
        terms = rng.choice(11, k, replace=False).tolist()
        r = steiner_approx(g, terms)
        best = brute_steiner_nodes(g, terms)
        assert best <= r.node_count
        assert r.node_count - 1 <= 2 * (best - 1)

    @given(connected_graphs(min_n=2, max_n=20))
    @settings(max_examples=60, deadline=None)
    def test_properties(self, g):
        terms = list(range(0, g.n, 3))
        r = steiner_approx(g, terms)
        assert is_tree(r.tree)
        assert set(terms) <= r.nodes and r.node_count >= len(terms)
        leaves = {r.tree.labels[v] for v in range(r.tree.n) if r.tree.degree(v) == 1}
        if r.node_count > 1:
            assert leaves <= set(terms)
        assert all(g.has_edge(a, b) for a, b in r.edges())

    @pytest.mark.parametrize("seed", range(5))
    def test_networkx_cross_check(self, seed):
        g = gen_er_connected(ErParams(80, 0.05, seed))
        h = nx.Graph(list(g.edges()))
        terms = np.random.default_rng(seed).choice(80, 8, replace=False).tolist()
        ref = nx.algorithms.approximation.steiner_tree(h, terms, method="mehlhorn")
        # both are 2-approximations of the same optimum
        r = steiner_approx(g, terms)
        assert r.edge_count <= 2 * ref.number_of_edges()
        assert ref.number_of_edges() <= 2 * r.edge_count


class TestGateFormulas:
    def test_values(self):
        assert (g1(1), g1(2), g2(2), g2(1)) == (1, 4, 3, 1)

    @pytest.mark.parametrize("k", range(1, 65))
    def test_closed_forms(self, k):
        assert g1(k) == Fraction(k * (k - 1), 2) + 2 * k - 1
        assert g2(k) == Fraction(k * (k - 1), 2) + k
        assert g2(k) <= g1(k) and g1(k) - g2(k) == k - 1

    def test_domain(self):
        with pytest.raises(ValueError):
            g1(0)


class TestMmg:
    @pytest.mark.parametrize("n", [3, 5, 12])
    def test_star(self, n):
        r = mmg_gate_cost(star(n), seed=4)
        assert r.total_gates == g1(n - 1) and len(r.expansion_log) == 1

    @pytest.mark.parametrize("n", [3, 6, 20])
    def test_path(self, n):
        r = mmg_gate_cost(path_graph(n))
        assert r.total_gates == 4 * (n - 2) <= mmg_upper_bound(n)

    def test_small(self):
        assert mmg_gate_cost(Graph(2, [(0, 1)])).total_gates == 0
        assert mmg_upper_bound(2) == 3

    @pytest.mark.parametrize("seed", range(200))
    def test_random_trees_beat_plan(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 40))
        t = random_tree(n, rng)
        total = mmg_gate_cost(t, seed).total_gates
        assert cost_report(plan_complete(t, seed)).gates == n - 2 <= total <= mmg_upper_bound(n)

    @given(connected_graphs(min_n=2, max_n=25))
    @settings(max_examples=60, deadline=None)
    def test_bound(self, g):
        r = mmg_gate_cost(g, 1)
        assert r.total_gates <= mmg_upper_bound(g.n)
        assert r.total_gates == sum(c for _, _, c in r.expansion_log)

    def test_logs_labels(self):
        g = path_graph(8).induced_subgraph([3, 4, 5, 6])
        assert {v for v, _, _ in mmg_gate_cost(g).expansion_log} == {4, 5}


class TestFischer:
    @pytest.mark.parametrize("n,expect", [(2, 0), (3, 1), (4, 3), (6, 10)])
    def test_chain(self, n, expect):
        assert fischer_gate_cost_chain(n) == expect

    @pytest.mark.parametrize("n", range(2, 15))
    def test_tree_counter_on_chain(self, n):
        assert fischer_gate_cost_tree(path_graph(n), 0) == fischer_gate_cost_chain(n) == (n - 2) * (n - 1) // 2

    def test_star_needs_no_transfer(self):
        assert fischer_gate_cost_tree(star(6), 0) == 0

    def test_not_tree(self):
        with pytest.raises(GraphError):
            fischer_gate_cost_tree(cycle(4))


class TestDomination:
    def test_star(self):
        assert greedy_dominating_set(star(7)) == {0}

    def test_path4(self):
        d = greedy_dominating_set(path_graph(4))
        assert len(d) == 2 == brute_domination(path_graph(4))

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_complete(self, n):
        assert exact_dominating_number(complete(n)) == 1

    def test_c6(self):
        assert exact_dominating_number(cycle(6)) == 2 == brute_domination(cycle(6))

    @pytest.mark.parametrize("seed", range(30))
    def test_exact_vs_brute(self, seed):
        rng = np.random.default_rng(seed)
        g = gnp(int(rng.integers(2, 12)), 0.25, rng)
        assert exact_dominating_number(g) == brute_domination(g)

    @pytest.mark.parametrize("seed", range(40))
    def test_greedy_vs_exact(self, seed):
        rng = np.random.default_rng(seed)
        g = gnp(int(rng.integers(2, 21)), float(rng.uniform(0.05, 0.4)), rng)
        d = greedy_dominating_set(g)
        assert is_dominating_set(g, d)
        assert exact_dominating_number(g) <= len(d) <= g.n

    def test_exact_size_limit(self):
        with pytest.raises(ValueError):
            exact_dominating_number(path_graph(30))


class TestSourceCounts:
    def test_star(self):
        s = source_count_bounds(plan_complete(star(6), 0))
        assert (s.lower, s.upper, s.msg) == (1, 1, 1)

    def test_path5(self):
        s = source_count_bounds(path_graph(5))
        assert s.upper == 3 and s.lower == 2

    def test_rejects_non_tree(self):
        with pytest.raises(GraphError):
            source_count_bounds(cycle(5))
