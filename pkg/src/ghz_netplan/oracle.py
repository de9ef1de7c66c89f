"""Dense state-vector / density-matrix simulator that runs the protocols literally.

Qubits carry hashable labels; the tensor axis order follows ``labels`` with
the first label as the most significant bit. Measurements are outcome
averaged by default (the protocol as a channel, corrections included);
``*_branches`` helpers keep every outcome separately on pure states.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .graph import Graph
from .noise import BellOverlaps, ChannelSpec, GhzOverlaps, _as_distribution, _check_distribution

__all__ = [
    "DensityMatrix",
    "StateVector",
    "FusionTreeSpec",
    "Branch",
    "I2",
    "X",
    "Y",
    "Z",
    "H",
    "CNOT",
    "CZ",
    "bell_vector",
    "ghz_vector",
    "graph_state_vector",
    "make_bell",
    "bell_overlaps",
    "ghz_overlaps",
    "random_density",
    "random_bell_diagonal",
    "exec_protocol2",
    "protocol2_branches",
    "exec_fusion_tree",
    "fusion_tree_branches",
    "exec_bipartite_b",
    "x_measure_out",
    "ghz_fidelity",
    "star_to_ghz_hadamards",
    "star_graph",
    "cnot_star_matrix",
    "noisy_cnot_star",
    "MAX_PURE_QUBITS",
    "MAX_MIXED_QUBITS",
]

MAX_PURE_QUBITS = 22
MAX_MIXED_QUBITS = 12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)

Op = tuple  # (matrix, labels)


def _apply(t: np.ndarray, u: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _check_labels(labels) -> tuple:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate qubit labels in {labels}")
    return labels


class StateVector:
    """Pure state on labeled qubits."""

    __slots__ = ("tensor", "labels")

    def __init__(self, amplitudes, labels):
        labels = _check_labels(labels)
        q = len(labels)
        if q > MAX_PURE_QUBITS:
            raise ValueError(f"pure-state simulation limited to {MAX_PURE_QUBITS} qubits")
        self.tensor = np.asarray(amplitudes, dtype=complex).reshape((2,) * q)
        self.labels = labels

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    @property
    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def _axes(self, labels) -> list[int]:
        try:
            return [self.labels.index(l) for l in labels]
        except ValueError as exc:
            raise ValueError(f"unknown qubit label: {exc}") from None

    def tensor_with(self, other: "StateVector") -> "StateVector":
        return StateVector(np.multiply.outer(self.tensor, other.tensor), self.labels + other.labels)

    def apply(self, u: np.ndarray, labels) -> "StateVector":
        return StateVector(_apply(self.tensor, u, self._axes(labels)), self.labels)

    def reorder(self, labels) -> "StateVector":
        labels = tuple(labels)
        if len(labels) != len(self.labels) or set(labels) != set(self.labels):
            raise ValueError("reorder needs a permutation of the current labels")
        return StateVector(np.transpose(self.tensor, self._axes(labels)), labels)

    def project(self, label, outcome: int, basis: str = "Z") -> tuple[float, "StateVector"]:
        """Unnormalized post-measurement state with ``label`` removed, and its probability."""
        s = self.apply(H, [label]) if basis == "X" else self
        a = s._axes([label])[0]
        sub = np.take(s.tensor, outcome, axis=a)
        prob = float(np.vdot(sub, sub).real)
        labels = s.labels[:a] + s.labels[a + 1 :]
        return prob, StateVector(sub, labels)

    def to_density(self) -> "DensityMatrix":
        v = self.vector
        return DensityMatrix(np.outer(v, v.conj()), self.labels)


class DensityMatrix:
    """Mixed state on labeled qubits, stored as a ``(2,)*2q`` tensor."""

    __slots__ = ("tensor", "labels")

    def __init__(self, matrix, labels):
        labels = _check_labels(labels)
        q = len(labels)
        if q > MAX_MIXED_QUBITS:
            raise ValueError(f"density-matrix simulation limited to {MAX_MIXED_QUBITS} qubits")
        self.tensor = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * q))
        self.labels = labels

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    @property
    def matrix(self) -> np.ndarray:
        d = 2 ** self.num_qubits
        return self.tensor.reshape(d, d)

    def _axes(self, labels) -> list[int]:
        try:
            return [self.labels.index(l) for l in labels]
        except ValueError as exc:
            raise ValueError(f"unknown qubit label: {exc}") from None

    def relabel(self, labels) -> "DensityMatrix":
        labels = tuple(labels)
        if len(labels) != self.num_qubits:
            raise ValueError("relabel needs one label per qubit")
        return DensityMatrix(self.tensor, labels)

    def tensor_with(self, other: "DensityMatrix") -> "DensityMatrix":
        q1, q2 = self.num_qubits, other.num_qubits
        t = np.multiply.outer(self.tensor, other.tensor)
        # (r1, c1, r2, c2) -> (r1, r2, c1, c2)
        order = (
            list(range(q1))
            + list(range(2 * q1, 2 * q1 + q2))
            + list(range(q1, 2 * q1))
            + list(range(2 * q1 + q2, 2 * q1 + 2 * q2))
        )
        return DensityMatrix(np.transpose(t, order), self.labels + other.labels)

    def apply(self, u: np.ndarray, labels) -> "DensityMatrix":
        axes = self._axes(labels)
        q = self.num_qubits
        t = _apply(self.tensor, u, axes)
        t = _apply(t, u.conj(), [q + a for a in axes])
        return DensityMatrix(t, self.labels)

    def apply_ops(self, ops: Iterable[Op]) -> "DensityMatrix":
        s = self
        for u, labels in ops:
            s = s.apply(u, labels)
        return s

    def reorder(self, labels) -> "DensityMatrix":
        labels = tuple(labels)
        if len(labels) != self.num_qubits or set(labels) != set(self.labels):
            raise ValueError("reorder needs a permutation of the current labels")
        ax = self._axes(labels)
        q = self.num_qubits
        return DensityMatrix(np.transpose(self.tensor, ax + [q + a for a in ax]), labels)

    def _project(self, a: int, outcome: int) -> np.ndarray:
        q = self.num_qubits
        sub = np.take(self.tensor, outcome, axis=q + a)
        return np.take(sub, outcome, axis=a)

    def measure(
        self,
        label,
        basis: str = "Z",
        corrections: Mapping[int, Sequence[Op]] | Callable[[int], Sequence[Op]] | None = None,
    ) -> "DensityMatrix":
        """Measure ``label`` in the Z or X basis, correct, and average over outcomes.

        ``corrections[outcome]`` lists ``(matrix, labels)`` gates applied to the
        remaining qubits after that outcome. The measured qubit is removed.
        """
        if basis not in ("Z", "X"):
            raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")
        s = self.apply(H, [label]) if basis == "X" else self
        a = s._axes([label])[0]
        labels = s.labels[:a] + s.labels[a + 1 :]
        total = None
        for m in (0, 1):
            part = DensityMatrix(s._project(a, m), labels)
            ops = corrections(m) if callable(corrections) else (corrections or {}).get(m, ())
            part = part.apply_ops(ops)
            total = part.tensor if total is None else total + part.tensor
        return DensityMatrix(total, labels)

    def partial_trace(self, label) -> "DensityMatrix":
        a = self._axes([label])[0]
        q = self.num_qubits
        t = np.trace(self.tensor, axis1=a, axis2=q + a)
        return DensityMatrix(t, self.labels[:a] + self.labels[a + 1 :])

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        return bool(np.allclose(m, m.conj().T, atol=tol, rtol=0))

    def validate(self, tol: float = 1e-10) -> None:
        if abs(self.trace() - 1.0) > tol:
            raise ValueError(f"trace {self.trace()} differs from 1")
        if not self.is_hermitian(tol):
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(self.matrix).min() < -1e-9:
            raise ValueError("density matrix has a negative eigenvalue")

    def expectation(self, psi) -> float:
        """``<psi|rho|psi>`` for a vector in this state's label order."""
        v = psi.vector if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex).reshape(-1)
        return float(np.vdot(v, self.matrix @ v).real)


# ---------------------------------------------------------------- reference states


def bell_vector(z: int = 0, x: int = 0) -> np.ndarray:
    """``(Z^z X^x (x) 1)|Phi>``."""
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    u = np.linalg.matrix_power(Z, z) @ np.linalg.matrix_power(X, x)
    return np.kron(u, I2) @ phi


def ghz_vector(n: int, z: int = 0, xs: Sequence[int] | None = None) -> np.ndarray:
    """``(Z^z (x) X^xs)|GHZ_n>``, with Z on the first qubit and X on the rest."""
    if n < 1:
        raise ValueError("GHZ state needs at least one qubit")
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    if n == 1:
        v = np.array([1, 1], dtype=complex) / np.sqrt(2)
    ops = [np.linalg.matrix_power(Z, z)] + [np.linalg.matrix_power(X, b) for b in (xs or [0] * (n - 1))]
    t = v.reshape((2,) * n)
    for i, u in enumerate(ops):
        t = _apply(t, u, [i])
    return t.reshape(-1)


def graph_state_vector(g: Graph) -> np.ndarray:
    n = g.n
    bits = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64).reshape(-1, n)
    phase = np.zeros(len(bits), dtype=np.int64)
    for u, v in g.edges():
        phase += bits[:, u] * bits[:, v]
    return ((-1.0) ** phase).astype(complex) / np.sqrt(2**n)


def star_graph(n: int, center: int) -> Graph:
    return Graph(n, [(center, j) for j in range(n) if j != center])


def make_bell(spec: ChannelSpec | None = None, labels=("A", "B")) -> DensityMatrix:
    """Noisy Bell pair: the channel acts on the second qubit of ``|Phi>``."""
    phi = bell_vector()
    rho = DensityMatrix(np.outer(phi, phi.conj()), labels)
    if spec is None:
        return rho
    b = labels[1]
    p = spec.param
    if spec.kind == "depolarizing":
        parts = [(1 - p, I2), (p / 3, X), (p / 3, Y), (p / 3, Z)]
        return _mix(rho, [(w, [(u, [b])]) for w, u in parts])
    if spec.kind == "dephasing":
        return _mix(rho, [(1 - p, [(I2, [b])]), (p, [(Z, [b])])])
    if spec.kind == "amplitude_damping":
        k0 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
        k1 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
        return _kraus(rho, [k0, k1], [b])
    mu = spec.overlaps
    m = sum(mu[z, x] * np.outer(bell_vector(z, x), bell_vector(z, x).conj()) for z in (0, 1) for x in (0, 1))
    return DensityMatrix(m, labels)


def _mix(rho: DensityMatrix, parts) -> DensityMatrix:
    total = None
    for w, ops in parts:
        t = rho.apply_ops(ops).tensor * w
        total = t if total is None else total + t
    return DensityMatrix(total, rho.labels)


def _kraus(rho: DensityMatrix, ks, labels) -> DensityMatrix:
    # Kraus operators are not unitary, but apply() only needs a linear map
    total = None
    for k in ks:
        t = rho.apply(k, labels).tensor
        total = t if total is None else total + t
    return DensityMatrix(total, rho.labels)


def bell_overlaps(rho: DensityMatrix) -> BellOverlaps:
    """Bell-basis diagonal ``<Phi^{z,x}|rho|Phi^{z,x}>`` of a two-qubit state."""
    vals = [[max(0.0, rho.expectation(bell_vector(z, x))) for x in (0, 1)] for z in (0, 1)]
    s = sum(map(sum, vals))
    if s > 1:
        vals = [[v / s for v in row] for row in vals]
    return BellOverlaps(tuple(map(tuple, vals)))


def ghz_overlaps(rho: DensityMatrix) -> GhzOverlaps:
    n = rho.num_qubits
    return GhzOverlaps(
        max(0.0, rho.expectation(ghz_vector(n, 0))),
        max(0.0, rho.expectation(ghz_vector(n, 1))),
    )


def random_density(num_qubits: int, rng: np.random.Generator, labels=None, rank: int | None = None) -> DensityMatrix:
    """Random mixed state from a complex Ginibre matrix."""
    d = 2**num_qubits
    r = rank or d
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix(m, labels or tuple(range(num_qubits)))


def random_bell_diagonal(rng: np.random.Generator) -> BellOverlaps:
    w = rng.dirichlet(np.ones(4))
    return BellOverlaps(((w[0], w[1]), (w[2], w[3])))


# ---------------------------------------------------------------- protocols


def _pair_state(p, labels) -> DensityMatrix:
    if p is None:
        return make_bell(None, labels)
    if isinstance(p, BellOverlaps):
        return make_bell(ChannelSpec("custom", overlaps=p), labels)
    if isinstance(p, ChannelSpec):
        return make_bell(p, labels)
    if isinstance(p, StateVector):
        p = p.to_density()
    if p.num_qubits != 2:
        raise ValueError("Bell pairs must be two-qubit states")
    return p.relabel(labels)


def exec_protocol2(pairs: Sequence) -> DensityMatrix:
    """Turn ``n`` Bell pairs around a center into an ``(n+1)``-qubit GHZ state.

    The center holds ``A1..An``; outer node ``i`` holds ``Bi``. CNOTs run from
    ``A1`` onto every other ``Aj``; each ``Aj`` is Z-measured and outcome 1
    triggers X on ``Bj``. The output is ordered ``A1, B1, ..., Bn``.
    ``pairs`` items may be ``None`` (ideal), a :class:`DensityMatrix`,
    :class:`BellOverlaps` or :class:`ChannelSpec`. Pair ``j`` is merged in,
    entangled and measured before pair ``j + 1`` is added; the skipped
    reordering only swaps operations on disjoint qubits, so the channel is
    unchanged while the largest state holds ``n + 2`` qubits instead of ``2n``.
    """
    n = len(pairs)
    if n < 2:
        raise ValueError("need at least two Bell pairs")
    if n + 2 > MAX_MIXED_QUBITS:
        raise ValueError(f"at most {MAX_MIXED_QUBITS - 2} pairs in density mode")
    state = _pair_state(pairs[0], ("A1", "B1"))
    for j in range(2, n + 1):
        a, b = f"A{j}", f"B{j}"
        state = state.tensor_with(_pair_state(pairs[j - 1], (a, b)))
        state = state.apply(CNOT, ("A1", a))
        state = state.measure(a, "Z", {1: [(X, [b])]})
    return state


@dataclass(frozen=True)
class Branch:
    outcomes: tuple
    probability: float
    state: StateVector  # normalized, corrections applied


def protocol2_branches(n: int) -> list[Branch]:
    """Every measurement branch of the literal protocol on ideal pairs.

    All CNOTs are applied first, then ``A2..An`` are measured together.
    """
    if n < 2:
        raise ValueError("need at least two Bell pairs")
    psi = StateVector(bell_vector(), ("A1", "B1"))
    for j in range(2, n + 1):
        psi = psi.tensor_with(StateVector(bell_vector(), (f"A{j}", f"B{j}")))
    for j in range(2, n + 1):
        psi = psi.apply(CNOT, ("A1", f"A{j}"))
    out = []
    for outcomes in itertools.product((0, 1), repeat=n - 1):
        s = psi
        prob = 1.0
        for j, m in zip(range(2, n + 1), outcomes):
            p, s = s.project(f"A{j}", m)
            prob = p  # projections compound on the unnormalized vector
            if m:
                s = s.apply(X, [f"B{j}"])
        out.append(Branch(outcomes, prob, StateVector(s.vector / np.sqrt(prob), s.labels)))
    return out


@dataclass(frozen=True)
class FusionTreeSpec:
    """GHZ states to fuse along a tree.

    ``sizes[i]`` is the qubit count of state ``i``; ``parent[i]`` its parent
    (``-1`` for the root, which must be state 0). ``links[i]`` is
    ``(parent_qubit, child_qubit)``: qubit indices, within the parent and
    child states, that sit at the shared network node. The parent qubit is
    the CNOT control, the child qubit the target that gets measured.
    """

    sizes: tuple
    parent: tuple
    links: tuple

    def __post_init__(self):
        m = len(self.sizes)
        if m < 1 or len(self.parent) != m or len(self.links) != m:
            raise ValueError("sizes, parent and links need one entry per state")
        if self.parent[0] != -1 or any(p == -1 for p in self.parent[1:]):
            raise ValueError("state 0 must be the only root")
        targets = set()
        for i in range(1, m):
            p = self.parent[i]
            if not 0 <= p < m or p == i:
                raise ValueError(f"bad parent {p} for state {i}")
            pq, cq = self.links[i]
            if not (0 <= pq < self.sizes[p] and 0 <= cq < self.sizes[i]):
                raise ValueError(f"link qubits out of range for state {i}")
            targets.add((i, cq))
        for i in range(1, m):
            if (self.parent[i], self.links[i][0]) in targets:
                raise ValueError("a measured target qubit cannot also be a fusion control")
        if len(self._order()) != m:
            raise ValueError("parent pointers do not form a tree")

    def _order(self) -> list[int]:
        kids = self.children()
        order, queue = [], deque([0])
        seen = {0}
        while queue:
            u = queue.popleft()
            order.append(u)
            for c in kids[u]:
                if c not in seen:
                    seen.add(c)
                    queue.append(c)
        return order

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.sizes]
        for i, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(i)
        return kids

    def subtree(self, i: int) -> list[int]:
        kids = self.children()
        out, stack = [], [i]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(kids[u])
        return out

    @property
    def total_qubits(self) -> int:
        return sum(self.sizes)

    def survivors(self) -> list[tuple[int, int]]:
        measured = {(i, self.links[i][1]) for i in range(1, len(self.sizes))}
        return [(i, k) for i in range(len(self.sizes)) for k in range(self.sizes[i]) if (i, k) not in measured]

    @classmethod
    def from_plan(cls, plan) -> "FusionTreeSpec":
        """One GHZ state per star (center first, then leaves ascending)."""
        order = [[s.center, *sorted(s.leaves)] for s in plan.stars]
        parent = [-1] * len(order)
        links: list = [None] * len(order)
        links[0] = (0, 0)
        for a, b, v in plan.fusion_edges:
            parent[b] = a
            links[b] = (order[a].index(v), order[b].index(v))
        return cls(tuple(len(o) for o in order), tuple(parent), tuple(links))


def _ghz_state(n: int, labels) -> DensityMatrix:
    return StateVector(ghz_vector(n), labels).to_density()


def _fusion_inputs(spec: FusionTreeSpec, states) -> DensityMatrix:
    if spec.total_qubits > MAX_MIXED_QUBITS:
        raise ValueError(f"fusion tree uses {spec.total_qubits} qubits, limit {MAX_MIXED_QUBITS}")
    states = states if states is not None else [None] * len(spec.sizes)
    if len(states) != len(spec.sizes):
        raise ValueError("need one state per tree node")
    full = None
    for i, (n, s) in enumerate(zip(spec.sizes, states)):
        labels = tuple((i, k) for k in range(n))
        if s is None:
            d = _ghz_state(n, labels)
        else:
            if isinstance(s, StateVector):
                s = s.to_density()
            if s.num_qubits != n:
                raise ValueError(f"state {i} has {s.num_qubits} qubits, expected {n}")
            d = s.relabel(labels)
        full = d if full is None else full.tensor_with(d)
    return full


def exec_fusion_tree(spec: FusionTreeSpec, states: Sequence | None = None) -> DensityMatrix:
    """Fuse GHZ states along the tree into one GHZ state.

    All CNOTs (parent qubit onto child qubit) are applied first, root side
    first. Then each child target is Z-measured; outcome 1 flips every
    surviving qubit of every state in that child's subtree, so a state at
    depth ``d`` ends up corrected by the XOR of the ``d`` outcomes on its path
    to the root. Output qubits are ``(state, qubit)`` pairs in state order.
    """
    full = _fusion_inputs(spec, states)
    order = spec._order()
    for i in order[1:]:
        pq, cq = spec.links[i]
        full = full.apply(CNOT, ((spec.parent[i], pq), (i, cq)))
    survivors = spec.survivors()
    for i in order[1:]:
        flips = [(X, [lab]) for lab in survivors if lab[0] in set(spec.subtree(i))]
        full = full.measure((i, spec.links[i][1]), "Z", {1: flips})
    return full.reorder(survivors)


def fusion_tree_branches(spec: FusionTreeSpec) -> list[Branch]:
    """Per-outcome corrected states of the fusion tree on ideal GHZ inputs."""
    if spec.total_qubits > MAX_PURE_QUBITS:
        raise ValueError("too many qubits")
    psi = None
    for i, n in enumerate(spec.sizes):
        s = StateVector(ghz_vector(n), tuple((i, k) for k in range(n)))
        psi = s if psi is None else psi.tensor_with(s)
    order = spec._order()
    for i in order[1:]:
        pq, cq = spec.links[i]
        psi = psi.apply(CNOT, ((spec.parent[i], pq), (i, cq)))
    survivors = spec.survivors()
    out = []
    for outcomes in itertools.product((0, 1), repeat=len(order) - 1):
        s = psi
        prob = 1.0
        for i, m in zip(order[1:], outcomes):
            prob, s = s.project((i, spec.links[i][1]), m)
            if m:
                sub = set(spec.subtree(i))
                for lab in survivors:
                    if lab[0] in sub:
                        s = s.apply(X, [lab])
        if prob > 1e-14:
            s = StateVector(s.vector / np.sqrt(prob), s.labels).reorder(survivors)
            out.append(Branch(outcomes, prob, s))
    return out


def exec_bipartite_b(target: Graph, pairs: Sequence, include_center: bool = False) -> DensityMatrix:
    """Central node distributes the graph state of ``target`` to the outer nodes.

    The center applies CZ along ``target`` to its halves ``A1..An``, measures
    each in the X basis, and outcome 1 on ``Ai`` triggers Z on ``Bi``. With
    ``include_center`` the center also holds an ideal internal pair
    ``(C, A0)``; ``target`` then has ``n + 1`` nodes with node 0 standing for
    the center, and the output keeps ``C``. Output order: ``[C,] B1..Bn``.
    """
    n = len(pairs)
    offset = 1 if include_center else 0
    if target.n != n + offset:
        raise ValueError(f"target graph needs {n + offset} nodes, got {target.n}")
    if 2 * (n + offset) > MAX_MIXED_QUBITS:
        raise ValueError("too many qubits for density-matrix simulation")
    a_label = [f"A{i}" for i in range(1 - offset, n + 1)]
    b_label = (["C"] if include_center else []) + [f"B{i}" for i in range(1, n + 1)]
    state = make_bell(None, ("C", "A0")) if include_center else None
    for i, p in enumerate(pairs, start=1):
        d = _pair_state(p, (f"A{i}", f"B{i}"))
        state = d if state is None else state.tensor_with(d)
    for u, v in target.edges():
        state = state.apply(CZ, (a_label[u], a_label[v]))
    for a, b in zip(a_label, b_label):
        state = state.measure(a, "X", {1: [(Z, [b])]})
    return state.reorder(b_label)


def x_measure_out(state: DensityMatrix, qubits: Sequence) -> DensityMatrix:
    """Remove ``qubits`` from a GHZ-type state by X measurements.

    The parity of the outcomes is corrected by a Z on the first remaining qubit.
    """
    qubits = list(qubits)
    if not qubits:
        return state
    for q in qubits:
        if q not in state.labels:
            raise ValueError(f"unknown qubit {q!r}")
    rest = [l for l in state.labels if l not in qubits]
    if not rest:
        raise ValueError("cannot measure out every qubit")
    for q in qubits:
        state = state.measure(q, "X", {1: [(Z, [rest[0]])]})
    return state


def ghz_fidelity(state, order: Sequence | None = None) -> float:
    """``<GHZ|rho|GHZ>`` with the qubits taken in ``order`` (default: as stored)."""
    if isinstance(state, StateVector):
        state = state.to_density()
    if order is not None:
        state = state.reorder(order)
    return state.expectation(ghz_vector(state.num_qubits))


def star_to_ghz_hadamards(center: int, n: int) -> tuple[int, ...]:
    """Qubits needing H to map the star graph state centered at ``center`` to GHZ."""
    if not 0 <= center < n:
        raise ValueError(f"center {center} outside 0..{n - 1}")
    return tuple(j for j in range(n) if j != center)


def cnot_star_matrix(n: int) -> np.ndarray:
    """Dense ``CNOT_n``: control qubit 0, targets 1..n-1."""
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        bits = [(b >> (n - 1 - i)) & 1 for i in range(n)]
        if bits[0]:
            bits = [1] + [1 - x for x in bits[1:]]
        out = 0
        for x in bits:
            out = (out << 1) | x
        m[out, b] = 1
    return m


def noisy_cnot_star(state: DensityMatrix, dist, qubits: Sequence | None = None) -> DensityMatrix:
    """Apply ``CNOT_n`` on ``qubits`` (control first) followed by a Pauli channel."""
    qubits = list(qubits if qubits is not None else state.labels)
    n = len(qubits)
    d = _as_distribution(dist)
    _check_distribution(d, n)
    s = state.apply(cnot_star_matrix(n), qubits)
    total = None
    for w, pr in d.items():
        t = s.apply(w.to_matrix(), qubits).tensor * pr
        total = t if total is None else total + t
    return DensityMatrix(total, s.labels)
