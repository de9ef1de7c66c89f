import itertools

import numpy as np
import pytest

from conftest import path_graph
from ghz_netplan.graph import Graph
from ghz_netplan.netgen import ErParams, gen_er_connected
from ghz_netplan.noise import (
    ChannelSpec,
    PauliWord,
    bipartite_b_fidelity,
    fidelity_star,
    fidelity_tree_fusion,
    mu_from_channel,
    pauli_channel_absorb,
)
from ghz_netplan.oracle import (
    CNOT,
    H,
    DensityMatrix,
    FusionTreeSpec,
    StateVector,
    bell_overlaps,
    bell_vector,
    cnot_star_matrix,
    exec_bipartite_b,
    exec_fusion_tree,
    exec_protocol2,
    fusion_tree_branches,
    ghz_fidelity,
    ghz_overlaps,
    ghz_vector,
    graph_state_vector,
    make_bell,
    noisy_cnot_star,
    protocol2_branches,
    random_bell_diagonal,
    random_density,
    star_graph,
    star_to_ghz_hadamards,
    x_measure_out,
)
from ghz_netplan.planner import plan_complete


def dm(v, labels):
    v = np.asarray(v, dtype=complex)
    return DensityMatrix(np.outer(v, v.conj()), labels)


class TestStates:
    def test_apply_matches_kron(self, rng):
        rho = random_density(3, rng)
        full = np.kron(np.eye(2), CNOT)
        out = rho.apply(CNOT, (1, 2))
        assert np.allclose(out.matrix, full @ rho.matrix @ full.conj().T)

    def test_apply_reversed_labels(self, rng):
        rho = random_density(2, rng)
        swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
        rev = swap @ CNOT @ swap
        assert np.allclose(rho.apply(CNOT, (1, 0)).matrix, rev @ rho.matrix @ rev.T)

    def test_reorder_round_trip(self, rng):
        rho = random_density(3, rng, labels=("a", "b", "c"))
        back = rho.reorder(("c", "a", "b")).reorder(("a", "b", "c"))
        assert np.allclose(back.matrix, rho.matrix)

    def test_measure_preserves_trace(self, rng):
        rho = random_density(3, rng)
        for basis in ("Z", "X"):
            out = rho.measure(1, basis, {1: [(np.array([[0, 1], [1, 0]]), [0])]})
            out.validate()

    def test_partial_trace(self):
        rho = make_bell()
        red = rho.partial_trace("B")
        assert np.allclose(red.matrix, np.eye(2) / 2)

    def test_caps(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(2**13), tuple(range(13)))

    def test_duplicate_labels(self):
        with pytest.raises(ValueError):
            StateVector(np.ones(4) / 2, ("a", "a"))

    def test_random_density_valid(self, rng):
        for q in (1, 2, 3):
            random_density(q, rng).validate()


class TestBellPairs:
    def test_ideal(self):
        assert np.allclose(make_bell(ChannelSpec("dep", 0.0)).matrix, make_bell().matrix)
        assert make_bell().expectation(bell_vector()) == pytest.approx(1.0)

    @pytest.mark.parametrize("g", [0.0, 0.3, 0.9])
    def test_amplitude_damping_form(self, g):
        v = np.array([1, 0, 0, np.sqrt(1 - g)]) / np.sqrt(2 - g)
        e10 = np.array([0, 0, 1, 0])
        expect = (g / 2) * np.outer(e10, e10) + (1 - g / 2) * np.outer(v, v)
        assert np.allclose(make_bell(ChannelSpec("ad", g)).matrix, expect, atol=1e-14)

    @pytest.mark.parametrize("kind", ["dep", "deph", "ad"])
    @pytest.mark.parametrize("p", [0.05, 0.4])
    def test_overlaps_match_channel(self, kind, p):
        spec = ChannelSpec(kind, p)
        got = bell_overlaps(make_bell(spec)).as_array()
        assert np.allclose(got, mu_from_channel(spec).as_array(), atol=1e-14)

    def test_custom_overlaps_round_trip(self, rng):
        mu = random_bell_diagonal(rng)
        rho = make_bell(ChannelSpec("custom", overlaps=mu))
        rho.validate()
        assert np.allclose(bell_overlaps(rho).as_array(), mu.as_array())


class TestProtocol2:
    @pytest.mark.parametrize("n", range(2, 7))
    def test_ideal(self, n):
        out = exec_protocol2([None] * n)
        assert out.labels == ("A1",) + tuple(f"B{i}" for i in range(1, n + 1))
        assert ghz_fidelity(out) >= 1 - 1e-10

    def test_identical_dephasing(self):
        spec = ChannelSpec("deph", 0.07)
        mu = mu_from_channel(spec)
        for n in (2, 3, 4):
            f = ghz_fidelity(exec_protocol2([spec] * n))
            assert f == pytest.approx(0.5 * ((mu.mu0 - mu.mu1) ** n + (mu.mu0 + mu.mu1) ** n), abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3])
    def test_arbitrary_pairs(self, n, rng):
        for _ in range(15):
            pairs = [random_density(2, rng, labels=("A", "B")) for _ in range(n)]
            f = ghz_fidelity(exec_protocol2(pairs))
            assert f == pytest.approx(fidelity_star([bell_overlaps(p) for p in pairs]), abs=1e-9)

    def test_trace_preserved(self, rng):
        out = exec_protocol2([random_density(2, rng) for _ in range(4)])
        out.validate()

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_branches_identical(self, n):
        branches = protocol2_branches(n)
        assert len(branches) == 2 ** (n - 1)
        assert sum(b.probability for b in branches) == pytest.approx(1.0)
        target = ghz_vector(n + 1)
        for b in branches:
            assert abs(np.vdot(target, b.state.vector)) == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(b.state.vector, branches[0].state.vector, atol=1e-12)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            exec_protocol2([None])


def random_spec(rng, max_qubits):
    while True:
        m = int(rng.integers(2, 5))
        sizes = [int(rng.integers(2, 4)) for _ in range(m)]
        if sum(sizes) <= max_qubits:
            break
    parent = [-1] + [int(rng.integers(0, i)) for i in range(1, m)]
    used = {i: set() for i in range(m)}
    links = [(0, 0)]
    for i in range(1, m):
        p = parent[i]
        pq = int(rng.choice([q for q in range(sizes[p]) if q not in used[p]]))
        cq = int(rng.integers(sizes[i]))
        used[i].add(cq)
        links.append((pq, cq))
    return FusionTreeSpec(tuple(sizes), tuple(parent), tuple(links))


class TestFusion:
    def test_two_ghz3(self):
        spec = FusionTreeSpec((3, 3), (-1, 0), ((0, 0), (2, 0)))
        out = exec_fusion_tree(spec)
        assert out.num_qubits == 5 and ghz_fidelity(out) >= 1 - 1e-12

    def test_star_configuration(self):
        spec = FusionTreeSpec((3, 3, 3), (-1, 0, 0), ((0, 0), (1, 0), (2, 0)))
        assert ghz_fidelity(exec_fusion_tree(spec)) >= 1 - 1e-12

    def test_noisy_chain(self, rng):
        spec = FusionTreeSpec((3, 2, 3), (-1, 0, 1), ((0, 0), (2, 1), (0, 0)))
        for _ in range(10):
            states = [random_density(n, rng) for n in spec.sizes]
            f = ghz_fidelity(exec_fusion_tree(spec, states))
            assert f == pytest.approx(fidelity_tree_fusion([ghz_overlaps(s) for s in states]), abs=1e-9)

    def test_random_trees_ideal(self, rng):
        for _ in range(20):
            spec = random_spec(rng, 10)
            assert ghz_fidelity(exec_fusion_tree(spec)) >= 1 - 1e-10

    def test_branches(self, rng):
        for _ in range(5):
            spec = random_spec(rng, 10)
            branches = fusion_tree_branches(spec)
            target = ghz_vector(len(spec.survivors()))
            assert sum(b.probability for b in branches) == pytest.approx(1.0)
            for b in branches:
                assert abs(np.vdot(target, b.state.vector)) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_control_on_measured_qubit(self):
        with pytest.raises(ValueError):
            FusionTreeSpec((2, 2, 2), (-1, 0, 1), ((0, 0), (1, 0), (0, 0)))

    def test_from_plan(self):
        g = gen_er_connected(ErParams(9, 0.15, 2))
        plan = plan_complete(g, 2)
        spec = FusionTreeSpec.from_plan(plan)
        assert len(spec.survivors()) == g.n
        out = exec_fusion_tree(spec)
        assert ghz_fidelity(out) >= 1 - 1e-10


class TestBipartiteB:
    def test_path3(self):
        g = path_graph(3)
        out = exec_bipartite_b(g, [None] * 3)
        assert out.expectation(graph_state_vector(g)) >= 1 - 1e-12

    def test_edgeless(self):
        out = exec_bipartite_b(Graph(3, []), [None] * 3)
        plus = np.ones(8) / np.sqrt(8)
        assert out.expectation(plus) == pytest.approx(1.0)

    def test_all_small_graphs(self):
        for n in (1, 2, 3, 4):
            pairs = list(itertools.combinations(range(n), 2))
            for k in range(len(pairs) + 1):
                for es in itertools.combinations(pairs, k):
                    g = Graph(n, es)
                    assert exec_bipartite_b(g, [None] * n).expectation(graph_state_vector(g)) >= 1 - 1e-10

    def test_with_center(self):
        g = star_graph(4, 0)
        out = exec_bipartite_b(g, [None] * 3, include_center=True)
        assert out.labels == ("C", "B1", "B2", "B3")
        assert out.expectation(graph_state_vector(g)) >= 1 - 1e-12

    def test_noisy(self, rng):
        for n in (2, 3, 4):
            g = Graph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5])
            mus = [random_bell_diagonal(rng) for _ in range(n)]
            f = exec_bipartite_b(g, mus).expectation(graph_state_vector(g))
            assert f == pytest.approx(bipartite_b_fidelity(g, mus), abs=1e-9)


class TestMeasureOut:
    def test_ghz4_to_ghz3(self):
        rho = dm(ghz_vector(4), "abcd")
        out = x_measure_out(rho, ["b"])
        assert ghz_fidelity(out) >= 1 - 1e-12

    def test_down_to_bell(self):
        rho = dm(ghz_vector(5), "abcde")
        out = x_measure_out(rho, ["b", "c", "e"])
        assert out.expectation(bell_vector()) == pytest.approx(1.0)

    def test_noisy_trace(self, rng):
        out = x_measure_out(random_density(4, rng), [1, 3])
        assert out.trace() == pytest.approx(1.0, abs=1e-10)

    def test_cannot_remove_all(self):
        with pytest.raises(ValueError):
            x_measure_out(dm(ghz_vector(2), "ab"), ["a", "b"])


class TestFrames:
    def test_ghz3(self):
        assert ghz_fidelity(dm(ghz_vector(3), (0, 1, 2))) == pytest.approx(1.0)

    @pytest.mark.parametrize("center", [0, 1, 2])
    def test_star_graph_state_to_ghz(self, center):
        psi = StateVector(graph_state_vector(star_graph(3, center)), (0, 1, 2))
        for q in star_to_ghz_hadamards(center, 3):
            psi = psi.apply(H, [q])
        # center plays the role of the first GHZ qubit; GHZ is symmetric so order does not matter
        assert ghz_fidelity(psi) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_center_shift_two_hadamards(self, n):
        for k, k2 in itertools.permutations(range(n), 2):
            diff = set(star_to_ghz_hadamards(k, n)) ^ set(star_to_ghz_hadamards(k2, n))
            assert diff == {k, k2}


class TestNoisyCnot:
    def test_identity_channel(self, rng):
        rho = random_density(3, rng)
        out = noisy_cnot_star(rho, {PauliWord.identity(3): 1.0})
        c = cnot_star_matrix(3)
        assert np.allclose(out.matrix, c @ rho.matrix @ c.T)

    def test_cnot_star_n2(self):
        assert np.allclose(cnot_star_matrix(2), CNOT)

    def _before(self, rho, dist, n):
        total = None
        for w, p in pauli_channel_absorb(dist, n).items():
            t = rho.apply(w.to_matrix(), rho.labels).tensor * p
            total = t if total is None else total + t
        return DensityMatrix(total, rho.labels).apply(cnot_star_matrix(n), rho.labels)

    def test_dephasing_per_qubit(self, rng):
        q = 0.15
        dist = {((0, 0), (z1, z2)): (q if z1 else 1 - q) * (q if z2 else 1 - q) for z1 in (0, 1) for z2 in (0, 1)}
        rho = random_density(2, rng)
        assert np.abs(noisy_cnot_star(rho, dist).matrix - self._before(rho, dist, 2).matrix).max() <= 1e-12

    def test_random_channels(self, rng):
        words = [PauliWord.hermitian(b[:2], b[2:]) for b in itertools.product((0, 1), repeat=4)]
        for _ in range(100):
            dist = dict(zip(words, rng.dirichlet(np.ones(16))))
            rho = random_density(2, rng)
            assert np.abs(noisy_cnot_star(rho, dist).matrix - self._before(rho, dist, 2).matrix).max() <= 1e-12
