"""``ghz-netplan`` command line.

Exit status: 0 on success, 2 on invalid input, 1 on internal errors (and
when ``verify`` finds a failing check).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .baselines import (
    exact_dominating_number,
    fischer_gate_cost_chain,
    fischer_gate_cost_tree,
    greedy_dominating_set,
    mmg_gate_cost,
    steiner_approx,
)
from .graph import GraphError, dump_graph, graph_from_dict, is_tree, load_graph, spanning_tree
from .harness import SweepConfig, emit_plotdata, run_sweep, run_threshold_grid, write_summary, write_trials_csv
from .netgen import BaParams, ErParams, WaxmanParams, gen_ba, gen_er_connected, gen_waxman
from .noise import (
    BellOverlaps,
    ChannelSpec,
    GhzOverlaps,
    bipartite_b_fidelity,
    fidelity_composed,
    fidelity_star,
    fidelity_tree_fusion,
    mu_from_channel,
    threshold,
)
from .planner import PlanError, cost_report, plan_complete, plan_subset


class UsageError(ValueError):
    pass


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _float_list(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _range_or_list(s: str) -> list[int]:
    """``"2:10"`` (inclusive) or ``"2,4,8"``."""
    if ":" in s:
        parts = [int(x) for x in s.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(lo, hi + 1, step))
    return _int_list(s)


def cmd_generate(args) -> int:
    if args.model == "er":
        params = ErParams(args.n, args.p, args.seed)
        g, coords = gen_er_connected(params), None
    elif args.model == "ba":
        params = BaParams(args.n, args.c, args.seed) if args.c else BaParams.from_fraction(args.n, args.p, args.seed)
        g, coords = gen_ba(params), None
    else:
        params = WaxmanParams(args.n, args.diameter_km, args.beta, args.attenuation_km, args.seed)
        g, coords = gen_waxman(params)
    meta = {"params": params.as_dict(), "n": g.n, "edges": g.num_edges}
    if coords is not None:
        meta["coordinates_km"] = coords.tolist()
    if args.out:
        dump_graph(g, args.out)
        meta_path = args.meta or str(Path(args.out).with_suffix("")) + ".meta.json"
        Path(meta_path).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    else:
        print(json.dumps(g.to_dict()))
    return 0


def cmd_plan(args) -> int:
    g = load_graph(args.graph)
    if args.subset == "all":
        plan = plan_complete(g, args.seed)
        cost = cost_report(plan)
    else:
        plan, cost = plan_subset(g, _int_list(args.subset), args.seed)
    plan.validate()
    _emit({**plan.to_dict(), "cost": cost.as_dict()}, args.out)
    return 0


def cmd_baseline(args) -> int:
    algo = args.algo
    if algo == "fischer" and args.graph is None:
        if args.n is None:
            raise UsageError("fischer needs --graph or --n")
        _emit({"algo": algo, "n": args.n, "gates": fischer_gate_cost_chain(args.n)}, args.out)
        return 0
    if args.graph is None:
        raise UsageError(f"{algo} needs --graph")
    g = load_graph(args.graph)
    if algo == "steiner":
        if not args.terminals:
            raise UsageError("steiner needs --terminals")
        r = steiner_approx(g, _int_list(args.terminals))
        out = {"nodes": sorted(r.nodes), "edges": [list(e) for e in r.edges()], "node_count": r.node_count}
    elif algo == "mmg":
        out = mmg_gate_cost(g, args.seed).as_dict()
    elif algo == "fischer":
        tree = g if is_tree(g) else spanning_tree(g, args.root)
        out = {"gates": fischer_gate_cost_tree(tree, args.root), "root": args.root}
    elif algo == "mds-greedy":
        d = sorted(greedy_dominating_set(g))
        out = {"size": len(d), "nodes": d}
    else:
        out = {"domination_number": exact_dominating_number(g)}
    _emit({"algo": algo, **out}, args.out)
    return 0


def _pair_from_json(item) -> BellOverlaps:
    if isinstance(item, dict):
        if "mu" in item:
            return BellOverlaps(tuple(map(tuple, item["mu"])))
        if "channel" in item:
            return mu_from_channel(ChannelSpec(item["channel"], float(item.get("param", 0.0))))
        raise UsageError(f"cannot read Bell pair from {item}")
    if isinstance(item, (list, tuple)) and len(item) == 2 and all(isinstance(v, (int, float)) for v in item):
        return BellOverlaps.from_z(float(item[0]), float(item[1]))
    if isinstance(item, (list, tuple)) and len(item) == 2:
        return BellOverlaps(tuple(map(tuple, item)))
    raise UsageError(f"cannot read Bell pair from {item!r}")


def cmd_fidelity(args) -> int:
    raw = sys.stdin.read() if args.input == "-" else Path(args.input).read_text(encoding="utf-8")
    data = json.loads(raw)
    if isinstance(data, list):
        data = {"kind": "star", "pairs": data}
    kind = data.get("kind", "star")
    if kind == "star":
        pairs = [_pair_from_json(p) for p in data["pairs"]]
        value = fidelity_star(pairs)
    elif kind == "tree":
        value = fidelity_tree_fusion([GhzOverlaps(*map(float, l)) for l in data["ghz"]])
    elif kind == "composed":
        value = fidelity_composed(int(data["n"]), int(data["m"]), float(data["mu0"]), float(data["mu1"]))
    elif kind == "bipartite_b":
        g = graph_from_dict(data["graph"])
        value = bipartite_b_fidelity(g, [_pair_from_json(p) for p in data["pairs"]])
    else:
        raise UsageError(f"unknown fidelity kind {kind!r}")
    _emit({"kind": kind, "fidelity": value}, args.out)
    return 0


def cmd_threshold(args) -> int:
    if args.n_range or args.fidelities:
        ns = _range_or_list(args.n_range) if args.n_range else [args.n]
        fs = _float_list(args.fidelities) if args.fidelities else [args.fidelity]
        if None in ns or None in fs:
            raise UsageError("grid mode needs --n/--n-range and --fidelity/--fidelities")
        rows = run_threshold_grid(args.channel, ns, fs)
        if args.out and args.out.endswith(".csv"):
            lines = ["channel,n,fidelity,threshold"]
            lines += [f"{r['channel']},{r['n']},{r['fidelity']!r},{r['threshold']!r}" for r in rows]
            Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        else:
            _emit(rows, args.out)
        return 0
    if args.n is None or args.fidelity is None:
        raise UsageError("threshold needs --n and --fidelity")
    value = threshold(args.channel, args.n, args.fidelity)
    _emit({"channel": ChannelSpec(args.channel).kind, "n": args.n, "fidelity": args.fidelity, "threshold": value}, args.out)
    return 0


def cmd_verify(args) -> int:
    from .verify import run_verify

    report = run_verify(seed=args.seed, instances=args.instances)
    _emit(report, args.out)
    return 0 if report["passed"] else 1


def cmd_sweep(args) -> int:
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    else:
        data = {}
    flags = {
        "model": args.model,
        "n_values": _range_or_list(args.n) if args.n else None,
        "samples": args.samples,
        "fraction": args.fraction,
        "p_values": _float_list(args.p) if args.p else None,
        "ba_c": args.c,
        "diameters_km": _float_list(args.diameters) if args.diameters else None,
        "beta": args.beta,
        "attenuation_km": args.attenuation_km,
        "seed": args.seed,
        "algorithms": args.algorithms.split(",") if args.algorithms else None,
        "workers": args.workers,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    cfg = SweepConfig.from_dict(data)
    records = run_sweep(cfg)
    write_trials_csv(records, args.out)
    summary = args.summary or str(Path(args.out).with_suffix("")) + ".summary.json"
    write_summary(records, summary)
    print(json.dumps({"trials": len(records), "csv": args.out, "summary": summary}))
    return 0


def cmd_plot_data(args) -> int:
    written = emit_plotdata(args.input, args.outdir)
    print(json.dumps({k: str(v) for k, v in written.items()}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ghz-netplan", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a random network")
    p.add_argument("--model", choices=("er", "ba", "waxman"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.05, help="ER edge probability / BA fraction")
    p.add_argument("--c", type=int, help="BA attachment count (overrides --p)")
    p.add_argument("--diameter-km", type=float, default=100.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--attenuation-km", type=float, default=22.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="graph JSON path (stdout if omitted)")
    p.add_argument("--meta", help="sidecar JSON path for parameters and coordinates")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("plan", help="plan GHZ distribution on a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--subset", default="all", help="comma list of node ids, or 'all'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("baseline", help="run a comparison algorithm")
    p.add_argument("--algo", choices=("steiner", "mmg", "fischer", "mds-greedy", "mds-exact"), required=True)
    p.add_argument("--graph")
    p.add_argument("--terminals", help="comma list (steiner)")
    p.add_argument("--n", type=int, help="chain length (fischer without --graph)")
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("fidelity", help="closed-form fidelity from a JSON overlap list")
    p.add_argument("--input", required=True, help="JSON file, or '-' for stdin")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("threshold", help="largest tolerable noise parameter")
    p.add_argument("--channel", choices=("dep", "deph", "ad", "depolarizing", "dephasing", "amplitude_damping"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--fidelity", type=float)
    p.add_argument("--n-range", help="grid mode: '1:20' or '2,4,8'")
    p.add_argument("--fidelities", help="grid mode: comma list")
    p.add_argument("--out", help="JSON, or CSV when the name ends in .csv")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("verify", help="check closed forms against the dense simulator")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="Monte Carlo sweep to CSV plus summary JSON")
    p.add_argument("--config", help="JSON config; flags override its keys")
    p.add_argument("--model", choices=("er", "ba", "waxman"))
    p.add_argument("--n", help="sizes: '100:500:100' or '100,200'")
    p.add_argument("--samples", type=int)
    p.add_argument("--fraction", type=float)
    p.add_argument("--p", help="comma list of p values")
    p.add_argument("--c", type=int, help="fixed BA attachment count")
    p.add_argument("--diameters", help="comma list of Waxman diameters (km)")
    p.add_argument("--beta", type=float)
    p.add_argument("--attenuation-km", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--algorithms", help="subset of ours,steiner,mmg,sources")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=True, help="trial CSV path")
    p.add_argument("--summary", help="summary JSON path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot-data", help="aggregate a trial CSV into per-figure tables")
    p.add_argument("--input", required=True)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_plot_data)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GraphError, PlanError, ValueError, KeyError, TypeError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
