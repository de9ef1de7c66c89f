"""Closed-form fidelities, noise thresholds, and Pauli-frame bookkeeping.

Bell basis: ``|Phi^{z,x}> = (Z^z X^x (x) 1)|Phi>``. A noisy pair is summarized by
its Bell-diagonal overlaps ``mu[z, x]``. GHZ basis states
``|GHZ^{(z, 0)}>`` carry overlaps ``lambda_z``.

Both the star and the tree-fusion fidelities are sums over bit strings with
even total parity of products of per-input weights; they are evaluated in
linear time as ``(prod(w0 + w1) + prod(w0 - w1)) / 2``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import Graph

__all__ = [
    "BellOverlaps",
    "GhzOverlaps",
    "ChannelSpec",
    "PauliWord",
    "mu_from_channel",
    "fidelity_star",
    "fidelity_tree_fusion",
    "fidelity_composed",
    "star_output_overlaps",
    "boundary_fidelity",
    "threshold",
    "pauli_conjugate_cnot_star",
    "pauli_channel_absorb",
    "bipartite_b_fidelity",
    "iter_pauli_words",
]

_TOL = 1e-12


@dataclass(frozen=True)
class BellOverlaps:
    """Diagonal of a two-qubit state in the Bell basis, indexed ``mu[z][x]``."""

    mu: tuple  # ((mu00, mu01), (mu10, mu11))

    def __post_init__(self):
        arr = np.asarray(self.mu, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError("mu must be a 2x2 table indexed [z][x]")
        if np.any(arr < -_TOL) or np.any(arr > 1 + _TOL):
            raise ValueError(f"overlaps must lie in [0, 1], got {arr.tolist()}")
        if arr.sum() > 1 + _TOL:
            raise ValueError(f"overlaps sum to {arr.sum()} > 1")
        object.__setattr__(self, "mu", tuple(tuple(float(v) for v in row) for row in arr))

    @classmethod
    def from_z(cls, mu0: float, mu1: float) -> "BellOverlaps":
        """Pair with only Z-type (phase-flip) weight."""
        return cls(((mu0, 0.0), (mu1, 0.0)))

    def __getitem__(self, zx: tuple[int, int]) -> float:
        z, x = zx
        return self.mu[z][x]

    @property
    def mu0(self) -> float:
        return self.mu[0][0]

    @property
    def mu1(self) -> float:
        return self.mu[1][0]

    def as_array(self) -> np.ndarray:
        return np.array(self.mu)


@dataclass(frozen=True)
class GhzOverlaps:
    lambda0: float
    lambda1: float

    def __post_init__(self):
        for v in (self.lambda0, self.lambda1):
            if not -_TOL <= v <= 1 + _TOL:
                raise ValueError(f"GHZ overlaps must lie in [0, 1], got {v}")
        if self.lambda0 + self.lambda1 > 1 + _TOL:
            raise ValueError("GHZ overlaps sum to more than 1")


CHANNEL_KINDS = ("depolarizing", "dephasing", "amplitude_damping", "custom")
_ALIASES = {"dep": "depolarizing", "deph": "dephasing", "ad": "amplitude_damping"}


@dataclass(frozen=True)
class ChannelSpec:
    """Noise acting on the second qubit of a Bell pair."""

    kind: str
    param: float = 0.0
    overlaps: BellOverlaps | None = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "custom":
            if self.overlaps is None:
                raise ValueError("custom channel needs overlaps")
        elif not 0.0 <= self.param <= 1.0:
            raise ValueError(f"channel parameter must lie in [0, 1], got {self.param}")


def mu_from_channel(spec: ChannelSpec) -> BellOverlaps:
    """Bell-diagonal overlaps of ``(id (x) N)(Phi)`` for the channel ``N``."""
    p = spec.param
    if spec.kind == "depolarizing":
        return BellOverlaps(((1 - p, p / 3), (p / 3, p / 3)))
    if spec.kind == "dephasing":
        return BellOverlaps(((1 - p, 0.0), (p, 0.0)))
    if spec.kind == "amplitude_damping":
        s = math.sqrt(1 - p)
        return BellOverlaps((((1 + s) ** 2 / 4, p / 4), ((1 - s) ** 2 / 4, p / 4)))
    return spec.overlaps


def _pair_weights(items) -> tuple[list[float], list[float]]:
    w0, w1 = [], []
    for it in items:
        if isinstance(it, BellOverlaps):
            w0.append(it.mu0)
            w1.append(it.mu1)
        elif isinstance(it, GhzOverlaps):
            w0.append(it.lambda0)
            w1.append(it.lambda1)
        else:
            a, b = it
            w0.append(float(a))
            w1.append(float(b))
    return w0, w1


def _even_parity_sum(w0: Sequence[float], w1: Sequence[float]) -> float:
    a = math.prod(x + y for x, y in zip(w0, w1))
    b = math.prod(x - y for x, y in zip(w0, w1))
    return 0.5 * (a + b)


def fidelity_star(mus: Sequence) -> float:
    """GHZ fidelity after turning ``n`` noisy Bell pairs of a star into a GHZ state.

    Only the Z-type overlaps ``mu[z][0]`` enter: the result is the total weight
    of phase-flip patterns with even parity. Entries may be
    :class:`BellOverlaps` or ``(mu0, mu1)`` pairs.
    """
    if len(mus) < 2:
        raise ValueError("a star needs at least two Bell pairs")
    return _even_parity_sum(*_pair_weights(mus))


def fidelity_tree_fusion(lams: Sequence) -> float:
    """GHZ fidelity after fusing ``m`` noisy GHZ states along any tree."""
    if len(lams) < 2:
        raise ValueError("fusion needs at least two GHZ states")
    return _even_parity_sum(*_pair_weights(lams))


def star_output_overlaps(mus: Sequence) -> GhzOverlaps:
    """``(lambda0, lambda1)`` of the GHZ state produced from the given pairs."""
    w0, w1 = _pair_weights(mus)
    a = math.prod(x + y for x, y in zip(w0, w1))
    b = math.prod(x - y for x, y in zip(w0, w1))
    return GhzOverlaps(0.5 * (a + b), 0.5 * (a - b))


def fidelity_composed(n: int, m: int, mu0: float, mu1: float) -> float:
    """Fidelity of ``m`` fused GHZ states, each built from ``n`` identical pairs."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    nm = n * m
    return 0.5 * ((mu0 + mu1) ** nm + (mu0 - mu1) ** nm)


def boundary_fidelity(kind: str, n: int, param: float) -> float:
    """Star fidelity with ``n`` identical pairs under the named channel."""
    mu = mu_from_channel(ChannelSpec(kind, param))
    return 0.5 * ((mu.mu0 + mu.mu1) ** n + (mu.mu0 - mu.mu1) ** n)


def threshold(kind: str, n: int, fidelity: float, iterations: int = 200) -> float:
    """Largest channel parameter for which ``n`` identical pairs still reach ``fidelity``.

    Dephasing has a closed form. Depolarizing and amplitude damping are found
    by bisection on an interval where the fidelity decreases monotonically
    (``[0, 3/4]`` and ``[0, 1]``).
    """
    kind = ChannelSpec(kind).kind
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.5 < fidelity <= 1.0:
        raise ValueError(f"target fidelity must lie in (1/2, 1], got {fidelity}")
    if kind == "dephasing":
        return 0.5 * (1.0 - (2.0 * fidelity - 1.0) ** (1.0 / n))
    if kind == "depolarizing":
        hi = 0.75
    elif kind == "amplitude_damping":
        hi = 1.0
    else:
        raise ValueError("thresholds exist only for named channels")
    lo = 0.0
    if boundary_fidelity(kind, n, lo) < fidelity:
        return 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if boundary_fidelity(kind, n, mid) >= fidelity:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16:
            break
    return lo


@dataclass(frozen=True)
class PauliWord:
    """Operator ``i**phase * X^x Z^z`` on ``len(x)`` qubits (qubit 0 leftmost)."""

    x: tuple
    z: tuple
    phase: int = 0

    def __post_init__(self):
        if len(self.x) != len(self.z):
            raise ValueError("x and z must have equal length")
        object.__setattr__(self, "x", tuple(int(b) & 1 for b in self.x))
        object.__setattr__(self, "z", tuple(int(b) & 1 for b in self.z))
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def hermitian(cls, x, z) -> "PauliWord":
        """The Hermitian word ``i^(x.z) X^x Z^z``."""
        return cls(tuple(x), tuple(z), sum(a & b for a, b in zip(x, z)))

    @classmethod
    def identity(cls, n: int) -> "PauliWord":
        return cls((0,) * n, (0,) * n)

    @property
    def n(self) -> int:
        return len(self.x)

    def to_matrix(self) -> np.ndarray:
        X = np.array([[0, 1], [1, 0]], dtype=complex)
        Z = np.array([[1, 0], [0, -1]], dtype=complex)
        out = np.array([[1.0 + 0j]])
        for xb, zb in zip(self.x, self.z):
            f = np.linalg.matrix_power(X, xb) @ np.linalg.matrix_power(Z, zb)
            out = np.kron(out, f)
        return (1j**self.phase) * out


def pauli_conjugate_cnot_star(p: PauliWord) -> PauliWord:
    """``CNOT_n P CNOT_n`` where ``CNOT_n`` has control 0 and targets 1..n-1.

    ``x' = (x1, x1^x2, ..., x1^xn)``, ``z' = (z1^...^zn, z2, ..., zn)``;
    the phase is unchanged.
    """
    if p.n < 2:
        raise ValueError("CNOT_n needs at least two qubits")
    x1 = p.x[0]
    xs = (x1,) + tuple(x1 ^ b for b in p.x[1:])
    zp = 0
    for b in p.z:
        zp ^= b
    zs = (zp,) + p.z[1:]
    return PauliWord(xs, zs, p.phase)


def _as_distribution(dist) -> dict[PauliWord, float]:
    if isinstance(dist, Mapping):
        items = dist.items()
    else:
        items = dist
    out: dict[PauliWord, float] = {}
    for w, pr in items:
        if not isinstance(w, PauliWord):
            x, z = w
            w = PauliWord.hermitian(x, z)
        out[w] = out.get(w, 0.0) + float(pr)
    return out


def _check_distribution(dist: dict[PauliWord, float], n: int) -> None:
    if any(w.n != n for w in dist):
        raise ValueError(f"all words must act on {n} qubits")
    if any(pr < -_TOL for pr in dist.values()):
        raise ValueError("negative probability in Pauli channel")
    total = sum(dist.values())
    if abs(total - 1.0) > _TOL:
        raise ValueError(f"Pauli probabilities sum to {total}, not 1")


def pauli_channel_absorb(dist, n: int) -> dict[PauliWord, float]:
    """Rewrite a Pauli channel acting after ``CNOT_n`` as one acting before it.

    ``dist`` maps :class:`PauliWord` (or ``(x, z)`` bit tuples) to
    probabilities. Since ``CNOT_n`` is its own inverse the rewritten words are
    the conjugated ones, with unchanged probabilities.
    """
    d = _as_distribution(dist)
    _check_distribution(d, n)
    out: dict[PauliWord, float] = {}
    for w, pr in d.items():
        w2 = pauli_conjugate_cnot_star(w)
        out[w2] = out.get(w2, 0.0) + pr
    return out


def bipartite_b_fidelity(g: Graph, overlaps: Sequence[BellOverlaps]) -> float:
    """Graph-state fidelity of the central-node CZ protocol with noisy pairs.

    Sum over ``x`` in ``{0,1}^n`` of ``prod_i mu_i[z_i][x_i]`` where
    ``z = A(G) x`` over GF(2): an X error on pair ``i`` acts on the output like
    Z errors on the neighbors of ``i``.
    """
    n = g.n
    if len(overlaps) != n:
        raise ValueError(f"need {n} overlap tables, got {len(overlaps)}")
    mus = np.array([o.as_array() if isinstance(o, BellOverlaps) else np.asarray(o) for o in overlaps])
    adj = np.zeros((n, n), dtype=np.int64)
    for u, v in g.edges():
        adj[u, v] = adj[v, u] = 1
    xs = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64).reshape(-1, n)
    zs = (xs @ adj) % 2
    idx = np.arange(n)
    terms = mus[idx, zs, xs]  # shape (2^n, n)
    return float(np.prod(terms, axis=1).sum())


def iter_pauli_words(n: int) -> Iterable[PauliWord]:
    """All ``4**n`` Hermitian words on ``n`` qubits."""
    for bits in itertools.product((0, 1), repeat=2 * n):
        yield PauliWord.hermitian(bits[:n], bits[n:])
