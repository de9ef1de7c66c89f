"""Monte Carlo sweeps over random networks, threshold grids, and plot tables.

Every trial draws its own 64-bit seed from ``(master_seed, trial_index)``, so
results do not depend on how trials are spread over worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .baselines import greedy_dominating_set, mmg_gate_cost, steiner_approx
from .graph import Graph, internal_nodes, largest_connected_component, spanning_tree
from .netgen import BaParams, ErParams, WaxmanParams, ba_attachment, gen_ba, gen_er_connected, gen_waxman, trial_seed
from .noise import threshold
from .planner import cost_report, plan_complete, plan_subset

__all__ = [
    "SweepConfig",
    "TrialRecord",
    "CSV_VERSION",
    "run_trial",
    "run_sweep",
    "write_trials_csv",
    "read_trials_csv",
    "trials_csv_text",
    "summarize",
    "run_threshold_grid",
    "emit_plotdata",
    "PLOT_SPECS",
]

CSV_VERSION = "ghz-netplan trials v1"
MODELS = ("er", "ba", "waxman")
ALGORITHMS = ("ours", "steiner", "mmg", "sources")


@dataclass
class SweepConfig:
    """One sweep: the cartesian grid ``n_values x p_values x diameters_km``.

    ``p_values`` is used by the ER and BA models (BA attaches ``ceil(N p)``
    edges per new node unless ``ba_c`` is set); ``diameters_km`` by Waxman.
    ``fraction`` is the share of nodes to entangle; 1 means every node.
    """

    model: str = "er"
    n_values: Sequence[int] = (100,)
    samples: int = 10
    fraction: float = 0.3
    p_values: Sequence[float] = (0.05,)
    ba_c: int | None = None
    diameters_km: Sequence[float] = (100.0,)
    beta: float = 1.0
    attenuation_km: float = 22.0
    seed: int = 0
    algorithms: Sequence[str] = ALGORITHMS
    workers: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"fraction must lie in (0, 1], got {self.fraction}")
        if not self.n_values or any(int(n) < 2 for n in self.n_values):
            raise ValueError("every network size must be >= 2")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        self.n_values = tuple(int(n) for n in self.n_values)
        self.p_values = tuple(float(p) for p in self.p_values)
        self.diameters_km = tuple(float(d) for d in self.diameters_km)
        self.algorithms = tuple(a for a in ALGORITHMS if a in self.algorithms)

    def grid(self) -> list[tuple[int, float, float]]:
        """``(N, p, D)`` points; the unused axis is pinned to NaN."""
        if self.model == "waxman":
            return [(n, math.nan, d) for n in self.n_values for d in self.diameters_km]
        return [(n, p, math.nan) for n in self.n_values for p in self.p_values]

    def tasks(self) -> list[tuple]:
        out = []
        idx = 0
        for n, p, d in self.grid():
            for _ in range(self.samples):
                out.append((idx, n, p, d))
                idx += 1
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**data)

    def as_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


@dataclass
class TrialRecord:
    trial: int
    seed: int
    model: str
    p: float
    c: int
    diameter_km: float
    beta: float
    attenuation_km: float
    N: int
    desired: int
    S: int
    gates_ours: int
    bell_pairs: int
    classical_bits: int
    gates_mmg: int
    steiner_nodes: int
    subset_ratio_ours: float
    subset_ratio_steiner: float
    sources_msg: int
    sources_internal: int
    sources_mds_plan: int
    sources_mds_mst: int
    lcc_size: int
    lcc_density: float
    runtime_ms: float = field(default=0.0)  # excluded from determinism checks; keep last


COLUMNS = [f.name for f in fields(TrialRecord)]
_INT_COLS = {f.name for f in fields(TrialRecord) if f.type in ("int", int)}
_STR_COLS = {"model"}


def _density(g: Graph) -> float:
    return 0.0 if g.n < 2 else 2.0 * g.num_edges / (g.n * (g.n - 1))


def run_trial(cfg: SweepConfig, index: int, n: int, p: float, d: float) -> TrialRecord:
    """One network draw, one desired subset, every requested measurement."""
    t0 = time.perf_counter()
    ts = trial_seed(cfg.seed, index)
    c = 0
    if cfg.model == "er":
        g = gen_er_connected(ErParams(n, p, ts))
    elif cfg.model == "ba":
        c = cfg.ba_c if cfg.ba_c is not None else ba_attachment(n, p)
        g = gen_ba(BaParams(n, c, ts))
    else:
        full, _ = gen_waxman(WaxmanParams(n, d, cfg.beta, cfg.attenuation_km, ts))
        g, _ = largest_connected_component(full)

    rec = dict(
        trial=index,
        seed=ts,
        model=cfg.model,
        p=p,
        c=c,
        diameter_km=d,
        beta=cfg.beta if cfg.model == "waxman" else math.nan,
        attenuation_km=cfg.attenuation_km if cfg.model == "waxman" else math.nan,
        N=n,
        lcc_size=g.n,
        lcc_density=_density(g),
    )
    zero = dict(
        desired=0, S=g.n, gates_ours=0, bell_pairs=0, classical_bits=0, gates_mmg=0, steiner_nodes=0,
        subset_ratio_ours=math.nan, subset_ratio_steiner=math.nan, sources_msg=0, sources_internal=0,
        sources_mds_plan=0, sources_mds_mst=0,
    )
    rec.update(zero)
    if g.n < 2:
        rec["runtime_ms"] = (time.perf_counter() - t0) * 1e3
        return TrialRecord(**rec)

    k = max(2, math.ceil(cfg.fraction * g.n))
    rng = np.random.default_rng([ts, 5])
    desired = sorted(rng.choice(g.n, size=k, replace=False).tolist())
    rec["desired"] = k

    full_plan = None
    if "ours" in cfg.algorithms:
        if k == g.n:
            full_plan = plan_complete(g, ts)
            cost = cost_report(full_plan)
        else:
            _, cost = plan_subset(g, desired, ts)
        rec.update(
            S=cost.subgraph_size,
            gates_ours=cost.gates,
            bell_pairs=cost.bell_pairs,
            classical_bits=cost.classical_bits,
            subset_ratio_ours=cost.subgraph_size / k,
        )
    if "steiner" in cfg.algorithms or "mmg" in cfg.algorithms:
        st = steiner_approx(g, desired)
        rec["steiner_nodes"] = st.node_count
        rec["subset_ratio_steiner"] = st.node_count / k
        if "mmg" in cfg.algorithms:
            rec["gates_mmg"] = mmg_gate_cost(st.tree, ts).total_gates
    if "sources" in cfg.algorithms:
        if full_plan is None:
            full_plan = plan_complete(g, ts)
        tree = full_plan.tree()
        mst = spanning_tree(g)
        rec.update(
            sources_msg=full_plan.num_stars,
            sources_internal=len(internal_nodes(tree)),
            sources_mds_plan=len(greedy_dominating_set(tree)),
            sources_mds_mst=len(greedy_dominating_set(mst)),
        )
    rec["runtime_ms"] = (time.perf_counter() - t0) * 1e3
    return TrialRecord(**rec)


def _run_task(args) -> TrialRecord:
    cfg, task = args
    return run_trial(cfg, *task)


def run_sweep(cfg: SweepConfig) -> list[TrialRecord]:
    """All trials of ``cfg`` in trial order, optionally over worker processes."""
    tasks = cfg.tasks()
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map() yields in submission order, whatever finishes first
            return list(pool.map(_run_task, [(cfg, t) for t in tasks], chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    return [run_trial(cfg, *t) for t in tasks]


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def trials_csv_text(records: Iterable[TrialRecord], runtime: bool = True) -> str:
    cols = COLUMNS if runtime else COLUMNS[:-1]
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        d = asdict(r)
        w.writerow([_fmt(d[c]) for c in cols])
    return buf.getvalue()


def write_trials_csv(records: Iterable[TrialRecord], path: str | Path) -> None:
    Path(path).write_text(trials_csv_text(records), encoding="utf-8")


def _parse(col: str, s: str):
    if col in _STR_COLS:
        return s
    if col in _INT_COLS:
        return int(s)
    return float(s)


def read_trials_csv(path: str | Path) -> list[TrialRecord]:
    lines = [l for l in Path(path).read_text(encoding="utf-8").splitlines() if not l.startswith("#")]
    if not lines:
        return []
    reader = csv.DictReader(lines)
    missing = set(COLUMNS[:-1]) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"trial CSV is missing columns {sorted(missing)}")
    out = []
    for row in reader:
        vals = {c: _parse(c, row[c]) for c in COLUMNS if c in row}
        out.append(TrialRecord(**vals))
    return out


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    vals = [v for v in values if not (isinstance(v, float) and math.isnan(v))]
    if not vals:
        return math.nan, math.nan
    arr = np.asarray(vals, dtype=float)
    se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return float(arr.mean()), se


_SUMMARY_COLS = [
    "S", "gates_ours", "bell_pairs", "classical_bits", "gates_mmg", "steiner_nodes", "subset_ratio_ours",
    "subset_ratio_steiner", "sources_msg", "sources_internal", "sources_mds_plan", "sources_mds_mst",
    "lcc_size", "lcc_density",
]


def _key(v):
    return "nan" if isinstance(v, float) and math.isnan(v) else v


def summarize(records: Sequence[TrialRecord]) -> dict:
    """Per-grid-point means and standard errors, keyed by model, N, p and D."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.model, r.N, _key(r.p), _key(r.diameter_km)), []).append(r)
    points = []
    for (model, n, p, d), rs in groups.items():
        entry = {"model": model, "N": n, "p": p, "diameter_km": d, "samples": len(rs)}
        for col in _SUMMARY_COLS:
            m, se = _mean_se([getattr(r, col) for r in rs])
            entry[col] = {"mean": _key(m), "stderr": _key(se)}
        points.append(entry)
    return {"version": CSV_VERSION, "trials": len(records), "points": points}


def run_threshold_grid(channel: str, n_values: Sequence[int], fidelities: Sequence[float]) -> list[dict]:
    """Largest tolerable noise parameter for each ``(n, F)`` pair."""
    return [
        {"channel": channel, "n": int(n), "fidelity": float(f), "threshold": threshold(channel, int(n), float(f))}
        for f in fidelities
        for n in n_values
    ]


# figure name -> (models used, grouping columns, value columns)
PLOT_SPECS = {
    "fig4": (("er", "ba"), ("model", "N"), ("S", "gates_ours", "gates_mmg")),
    "fig5L": (("er", "ba"), ("model", "p"), ("gates_ours", "gates_mmg")),
    "fig5R": (("er", "ba"), ("model", "p"), ("S",)),
    "fig6a": (("waxman",), ("N", "diameter_km"), ("lcc_size",)),
    "fig6b": (("waxman",), ("N", "diameter_km"), ("lcc_density",)),
    "fig6c": (("waxman",), ("N", "diameter_km"), ("gates_ours", "gates_mmg")),
    "fig6d": (("waxman",), ("lcc_size",), ("gates_ours", "gates_mmg")),
    "fig7": (("er", "ba"), ("model", "N"), ("subset_ratio_ours", "subset_ratio_steiner")),
    "fig8": (("er", "ba"), ("model", "N"), ("sources_msg", "sources_internal", "sources_mds_plan", "sources_mds_mst")),
}


def plot_table(records: Sequence[TrialRecord], name: str) -> list[dict]:
    models, keys, values = PLOT_SPECS[name]
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        if r.model in models:
            groups.setdefault(tuple(_key(getattr(r, k)) for k in keys), []).append(r)
    rows = []
    for key in sorted(groups, key=lambda t: tuple((str(type(x)), x) for x in t)):
        rs = groups[key]
        row = dict(zip(keys, key))
        row["count"] = len(rs)
        for v in values:
            m, se = _mean_se([getattr(r, v) for r in rs])
            row[f"{v}_mean"] = m
            row[f"{v}_stderr"] = se
        rows.append(row)
    return rows


def emit_plotdata(records: Sequence[TrialRecord] | str | Path, outdir: str | Path) -> dict[str, Path]:
    """Write one aggregated CSV per figure into ``outdir``; returns name -> path."""
    if isinstance(records, (str, Path)):
        records = read_trials_csv(records)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = {}
    for name, (_, keys, values) in PLOT_SPECS.items():
        header = list(keys) + ["count"] + [f"{v}_{s}" for v in values for s in ("mean", "stderr")]
        path = outdir / f"{name}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in plot_table(records, name):
                w.writerow([_fmt(row[h]) for h in header])
        written[name] = path
    return written


def write_summary(records: Sequence[TrialRecord], path: str | Path) -> None:
    Path(path).write_text(json.dumps(summarize(records), indent=2) + "\n", encoding="utf-8")
