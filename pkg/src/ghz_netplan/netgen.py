"""Seeded random-network ensembles: connected Erdős–Rényi, Barabási–Albert, Waxman.

All randomness goes through :func:`numpy.random.default_rng` (PCG64), so a
generator called twice with the same parameters returns the same graph.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph

__all__ = [
    "ErParams",
    "BaParams",
    "WaxmanParams",
    "gen_er_connected",
    "gen_ba",
    "gen_waxman",
    "trial_seed",
    "ba_attachment",
]


def trial_seed(master_seed: int, index: int) -> int:
    """Per-trial 64-bit seed derived from ``(master_seed, index)`` via SeedSequence."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ErParams:
    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    def as_dict(self) -> dict:
        return {"model": "er", **asdict(self)}


def ba_attachment(n: int, p: float) -> int:
    """Attachment count ``ceil(n * p)``, clipped to at least 1."""
    return max(1, math.ceil(n * p))


@dataclass(frozen=True)
class BaParams:
    n: int
    c: int
    seed: int = 0

    def __post_init__(self):
        if self.c < 1:
            raise ValueError(f"c must be >= 1, got {self.c}")

    @classmethod
    def from_fraction(cls, n: int, p: float, seed: int = 0) -> "BaParams":
        return cls(n, ba_attachment(n, p), seed)

    def as_dict(self) -> dict:
        return {"model": "ba", **asdict(self)}


@dataclass(frozen=True)
class WaxmanParams:
    n: int
    diameter_km: float
    beta: float = 1.0
    attenuation_km: float = 22.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.diameter_km <= 0 or self.attenuation_km <= 0:
            raise ValueError("diameter and attenuation length must be positive")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")

    def as_dict(self) -> dict:
        return {"model": "waxman", **asdict(self)}


def gen_er_connected(params: ErParams) -> Graph:
    """G(n, p) with a connectivity pre-step.

    Every node first gets one random edge: node ``i > 0`` links to a uniform
    node among ``0..i-1`` and node 0 links to a uniform node among the rest.
    The first ``n - 1`` of those edges form a random recursive tree, so the
    result is always connected. Each remaining pair is then joined
    independently with probability ``p``; repeats are merged.
    """
    n = params.n
    if n < 2:
        raise ValueError("the connected ER variant needs n >= 2")
    rng = np.random.default_rng(params.seed)
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.add((j, i))
    j = int(rng.integers(1, n))
    edges.add((0, j))
    iu, ju = np.triu_indices(n, k=1)
    hit = rng.random(iu.size) < params.p
    edges.update(zip(iu[hit].tolist(), ju[hit].tolist()))
    return Graph(n, sorted(edges))


def gen_ba(params: BaParams) -> Graph:
    """Preferential attachment grown from the complete graph on ``c + 1`` nodes.

    Each new node picks ``c`` distinct targets; every draw is proportional to
    the current degree and repeats are redrawn.
    """
    n, c = params.n, params.c
    if n <= c:
        raise ValueError(f"need n > c, got n={n}, c={c}")
    rng = np.random.default_rng(params.seed)
    edges = [(u, v) for u in range(c + 1) for v in range(u + 1, c + 1)]
    degree = np.zeros(n, dtype=np.int64)
    degree[: c + 1] = c
    for new in range(c + 1, n):
        cum = np.cumsum(degree[:new])
        total = int(cum[-1])
        chosen: set[int] = set()
        while len(chosen) < c:
            r = int(rng.integers(0, total))
            chosen.add(int(np.searchsorted(cum, r, side="right")))
        for t in sorted(chosen):
            edges.append((t, new))
            degree[t] += 1
        degree[new] = c
    return Graph(n, edges)


def _disc_points(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    pts = np.empty((n, 2))
    filled = 0
    while filled < n:
        cand = rng.uniform(-radius, radius, size=(2 * (n - filled) + 8, 2))
        inside = cand[(cand**2).sum(axis=1) <= radius * radius]
        take = min(len(inside), n - filled)
        pts[filled : filled + take] = inside[:take]
        filled += take
    return pts


def gen_waxman(params: WaxmanParams) -> tuple[Graph, np.ndarray]:
    """Waxman graph on a disc of the given diameter plus the node coordinates (km).

    Points are drawn uniformly in the disc by rejection from the bounding
    square. Pair ``(u, v)`` is joined with probability
    ``beta * exp(-d(u, v) / attenuation_km)``. The graph may be disconnected.
    """
    n = params.n
    rng = np.random.default_rng(params.seed)
    pts = _disc_points(rng, n, params.diameter_km / 2.0)
    iu, ju = np.triu_indices(n, k=1)
    d = np.hypot(*(pts[iu] - pts[ju]).T)
    prob = params.beta * np.exp(-d / params.attenuation_km)
    hit = rng.random(iu.size) < prob
    return Graph(n, zip(iu[hit].tolist(), ju[hit].tolist())), pts
