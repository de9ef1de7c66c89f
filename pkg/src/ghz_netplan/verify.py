"""Formula-vs-oracle self check, as run by ``ghz-netplan verify``."""
from __future__ import annotations

import itertools

import numpy as np

from .graph import Graph
from .noise import (
    ChannelSpec,
    boundary_fidelity,
    bipartite_b_fidelity,
    fidelity_star,
    fidelity_tree_fusion,
    iter_pauli_words,
    pauli_channel_absorb,
    pauli_conjugate_cnot_star,
    threshold,
)
from .oracle import (
    DensityMatrix,
    FusionTreeSpec,
    bell_overlaps,
    cnot_star_matrix,
    exec_bipartite_b,
    exec_fusion_tree,
    exec_protocol2,
    ghz_fidelity,
    ghz_overlaps,
    graph_state_vector,
    make_bell,
    noisy_cnot_star,
    random_bell_diagonal,
    random_density,
    x_measure_out,
)

__all__ = ["run_verify"]


def _check(name: str, errors: list[float], tol: float) -> dict:
    worst = max(errors) if errors else 0.0
    return {"name": name, "passed": bool(worst <= tol), "max_error": worst, "tolerance": tol, "instances": len(errors)}


def _random_pair(rng, arbitrary: bool) -> DensityMatrix:
    if arbitrary:
        return random_density(2, rng, labels=("A", "B"))
    return make_bell(ChannelSpec("custom", overlaps=random_bell_diagonal(rng)))


def _random_tree_spec(rng, max_qubits: int) -> FusionTreeSpec:
    while True:
        m = int(rng.integers(2, 4))
        sizes = [int(rng.integers(2, 4)) for _ in range(m)]
        if sum(sizes) <= max_qubits:
            break
    parent = [-1] + [int(rng.integers(0, i)) for i in range(1, m)]
    used_targets = {i: set() for i in range(m)}
    links = [(0, 0)]
    for i in range(1, m):
        p = parent[i]
        pq = int(rng.choice([q for q in range(sizes[p]) if q not in used_targets[p]]))
        cq = int(rng.integers(sizes[i]))
        used_targets[i].add(cq)
        links.append((pq, cq))
    return FusionTreeSpec(tuple(sizes), tuple(parent), tuple(links))


def run_verify(seed: int = 0, instances: int = 20) -> dict:
    """Compare every closed-form fidelity with the dense simulator."""
    rng = np.random.default_rng(seed)
    checks = []

    errs = [1.0 - ghz_fidelity(exec_protocol2([None] * n)) for n in range(2, 7)]
    checks.append(_check("star_protocol_ideal", errs, 1e-10))

    for arbitrary in (False, True):
        errs = []
        for n in (2, 3, 4):
            for _ in range(instances):
                pairs = [_random_pair(rng, arbitrary) for _ in range(n)]
                f = ghz_fidelity(exec_protocol2(pairs))
                errs.append(abs(f - fidelity_star([bell_overlaps(p) for p in pairs])))
        checks.append(_check(f"star_fidelity_{'arbitrary' if arbitrary else 'bell_diagonal'}", errs, 1e-9))

    errs = []
    for _ in range(instances):
        spec = _random_tree_spec(rng, 9)
        states = [random_density(n, rng) for n in spec.sizes]
        f = ghz_fidelity(exec_fusion_tree(spec, states))
        errs.append(abs(f - fidelity_tree_fusion([ghz_overlaps(s) for s in states])))
    checks.append(_check("tree_fusion_fidelity", errs, 1e-9))

    errs = []
    for n in (2, 3, 4):
        for _ in range(max(1, instances // 2)):
            edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5]
            g = Graph(n, edges)
            pairs = [_random_pair(rng, False) for _ in range(n)]
            f = exec_bipartite_b(g, pairs).expectation(graph_state_vector(g))
            errs.append(abs(f - bipartite_b_fidelity(g, [bell_overlaps(p) for p in pairs])))
    checks.append(_check("bipartite_b_fidelity", errs, 1e-9))

    errs = []
    for n in (2, 3):
        c = cnot_star_matrix(n)
        for w in iter_pauli_words(n):
            diff = c @ w.to_matrix() @ c - pauli_conjugate_cnot_star(w).to_matrix()
            errs.append(float(np.abs(diff).max()))
    checks.append(_check("pauli_conjugation", errs, 0.0))

    errs = []
    words = list(iter_pauli_words(2))
    for _ in range(instances):
        dist = dict(zip(words, rng.dirichlet(np.ones(len(words)))))
        rho = random_density(2, rng)
        after = noisy_cnot_star(rho, dist)
        before = None
        for w, p in pauli_channel_absorb(dist, 2).items():
            t = rho.apply(w.to_matrix(), rho.labels).tensor * p
            before = t if before is None else before + t
        before = DensityMatrix(before, rho.labels).apply(cnot_star_matrix(2), rho.labels)
        errs.append(float(np.abs(after.matrix - before.matrix).max()))
    checks.append(_check("pauli_channel_absorb", errs, 1e-12))

    errs = []
    for kind in ("depolarizing", "amplitude_damping"):
        for n in range(1, 21):
            for f in (0.85, 0.95):
                errs.append(abs(boundary_fidelity(kind, n, threshold(kind, n, f)) - f))
    checks.append(_check("threshold_boundary", errs, 1e-10))

    errs = []
    for n in range(3, 7):
        ghz = exec_protocol2([None] * (n - 1))
        out = x_measure_out(ghz, list(ghz.labels[1:2]))
        errs.append(abs(1.0 - ghz_fidelity(out)))
    checks.append(_check("x_measure_out", errs, 1e-10))

    return {"seed": seed, "passed": all(c["passed"] for c in checks), "checks": checks}
