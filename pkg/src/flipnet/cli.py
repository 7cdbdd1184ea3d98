"""Batch front-end: load graphs and node economics, solve either defender
arrangement across a sweep of the network discount ratio, and emit CSV or
JSON series.

Numbers are printed with 12 significant digits so CSV and JSON outputs of
the same run parse to identical values. Uninsurable rows carry T = 0 and an
absent coverage (empty CSV cell, JSON null). In centralized mode the single
contract is reported per node as its 1/N share of the premium, matching how
the distributed columns read.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from .game import NodeParams
from .insurance_c import solve_network_c
from .insurance_d import design_contract_d, solve_network_d
from .network import (
    InfluenceKernel,
    NetworkSpec,
    compute_kernel,
    network_from_json,
    risk_levels,
    validate_network,
)

CSV_COLUMNS = [
    "eta",
    "mode",
    "node_id",
    "insurable",
    "s",
    "T",
    "p_d",
    "p_a",
    "alpha",
    "L_d",
    "L_d_bare",
    "L_a",
    "L_i",
    "L_d_total",
    "L_a_total",
    "L_i_total",
    "T_total",
]


def _ring(n: int) -> np.ndarray:
    w = np.zeros((n, n))
    for i in range(n):
        w[i, (i - 1) % n] = 0.5
        w[i, (i + 1) % n] = 0.5
    return w


def _complete(n: int) -> np.ndarray:
    w = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(w, 0.0)
    return w


def _fig9_weights() -> np.ndarray:
    w = np.zeros((4, 4))
    w[0, 1] = w[0, 2] = w[0, 3] = 1.0 / 3.0
    w[1, 0] = w[1, 2] = 0.5
    w[2, 0] = w[2, 1] = 0.5
    w[3, 0] = 1.0
    return w


def preset(name: str) -> tuple[np.ndarray, tuple[str, ...], list[NodeParams]]:
    """Compiled-in experiment networks; returns (weights, node ids, params)."""
    if name == "fig8a":
        w = _ring(6)
        params = [NodeParams(gamma_d=1.0, c_d=1.0, gamma_a=1.0, c_a=0.8)] * 6
    elif name == "fig8b":
        w = _complete(6)
        params = [NodeParams(gamma_d=1.0, c_d=1.0, gamma_a=1.0, c_a=0.8)] * 6
    elif name == "fig9":
        w = _fig9_weights()
        params = [NodeParams(gamma_d=1.0, c_d=1.2, gamma_a=1.0, c_a=0.8)] * 4
    elif name == "fig10":
        w = _ring(4)
        params = [
            NodeParams(gamma_d=1.0, c_d=c_d, gamma_a=1.0, c_a=1.0)
            for c_d in (0.5, 1.0, 2.0, 4.0)
        ]
    else:
        raise ValueError(f"unknown preset {name!r}")
    ids = tuple(str(i + 1) for i in range(w.shape[0]))
    return w, ids, params


def params_from_json(source, node_ids: tuple[str, ...]) -> list[NodeParams]:
    """Read {"nodes": [{"id", "gamma_d", "c_d", "gamma_a", "c_a"}]} and order
    the entries to match the network's node ids."""
    if isinstance(source, dict):
        doc = source
    else:
        with open(str(source)) as f:
            doc = json.load(f)
    if "nodes" not in doc:
        raise ValueError("params file missing key 'nodes'")
    by_id = {}
    for entry in doc["nodes"]:
        node_id = str(entry["id"])
        if node_id in by_id:
            raise ValueError(f"duplicate params for node {node_id!r}")
        by_id[node_id] = NodeParams(
            gamma_d=float(entry["gamma_d"]),
            c_d=float(entry["c_d"]),
            gamma_a=float(entry["gamma_a"]),
            c_a=float(entry["c_a"]),
        )
    missing = [i for i in node_ids if i not in by_id]
    if missing:
        raise ValueError(f"params missing for nodes {missing}")
    extra = [i for i in by_id if i not in node_ids]
    if extra:
        raise ValueError(f"params for unknown nodes {extra}")
    return [by_id[i] for i in node_ids]


def _round12(v: float) -> float:
    return float(f"{v:.12g}")


def _mode_d_rows(spec: NetworkSpec, params: list[NodeParams]) -> list[dict]:
    net = solve_network_d(spec, params)
    agg = {
        "L_d_total": net.defender_loss_total,
        "L_a_total": net.attacker_utility_total,
        "L_i_total": net.insurer_profit_total,
        "T_total": net.premium_total,
    }
    rows = []
    for node_id, o in zip(spec.node_ids, net.outcomes):
        rows.append(
            {
                "eta": spec.eta,
                "mode": "d",
                "node_id": node_id,
                "insurable": o.insurable,
                "s": o.contract.s if o.contract else None,
                "T": o.contract.T if o.contract else 0.0,
                "p_d": o.equilibrium.p_d,
                "p_a": o.equilibrium.p_a,
                "alpha": o.equilibrium.alpha,
                "L_d": o.defender_total_loss,
                "L_d_bare": o.defender_loss_no_premium,
                "L_a": o.attacker_utility,
                "L_i": o.insurer_profit,
                **agg,
            }
        )
    return rows


def _mode_c_rows(spec: NetworkSpec, params: list[NodeParams]) -> list[dict]:
    out = solve_network_c(spec, params)
    kernel = compute_kernel(spec)
    alphas = np.array([eq.alpha for eq in out.per_node_equilibria])
    risks = risk_levels(kernel, alphas)
    n = spec.node_count
    s = out.contract.s if out.contract else None
    s_eff = s if out.insurable else 0.0
    premium = out.contract.T if out.contract else 0.0
    share = premium / n
    rows = []
    attacker_total = sum(eq.attacker_utility for eq in out.per_node_equilibria)
    for i, (node_id, node, eq) in enumerate(zip(spec.node_ids, params, out.per_node_equilibria)):
        covered = s_eff * node.gamma_d * risks[i]
        bare = (1.0 - s_eff) * node.gamma_d * risks[i] + node.c_d * eq.p_d
        rows.append(
            {
                "eta": spec.eta,
                "mode": "c",
                "node_id": node_id,
                "insurable": out.insurable,
                "s": s,
                "T": share,
                "p_d": eq.p_d,
                "p_a": eq.p_a,
                "alpha": eq.alpha,
                "L_d": bare + share,
                "L_d_bare": bare,
                "L_a": eq.attacker_utility,
                "L_i": share - covered,
                "L_d_total": out.defender_total_loss,
                "L_a_total": attacker_total,
                "L_i_total": out.insurer_profit,
                "T_total": premium,
            }
        )
    return rows


def _solve_point(weights, node_ids, params, mode, eta) -> list[dict]:
    spec = NetworkSpec(weights=weights, eta=float(eta), node_ids=node_ids)
    rows = []
    if mode in ("d", "both"):
        rows.extend(_mode_d_rows(spec, params))
    if mode in ("c", "both"):
        rows.extend(_mode_c_rows(spec, params))
    return rows


def sweep_records(
    weights: np.ndarray,
    node_ids: tuple[str, ...],
    params: list[NodeParams],
    mode: str,
    etas,
) -> list[dict]:
    """One record per (eta, mode, node). Points are solved on a thread pool
    (the dense solves drop the GIL) but records come out in sweep order."""
    if mode not in ("d", "c", "both"):
        raise ValueError(f"mode must be d, c, or both, got {mode!r}")
    etas = list(etas)
    if len(etas) == 1:
        return _solve_point(weights, node_ids, params, mode, etas[0])
    with ThreadPoolExecutor(max_workers=min(8, len(etas))) as pool:
        chunks = pool.map(
            lambda eta: _solve_point(weights, node_ids, params, mode, eta), etas
        )
        return [row for chunk in chunks for row in chunk]


def _render_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def render_csv(rows: list[dict], timestamp: bool) -> str:
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_render_cell(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def render_json(rows: list[dict], timestamp: bool) -> str:
    def clean(v):
        return _round12(v) if isinstance(v, float) else v

    doc = {"records": [{c: clean(row[c]) for c in CSV_COLUMNS} for row in rows]}
    if timestamp:
        doc = {"generated": datetime.now(timezone.utc).isoformat(), **doc}
    return json.dumps(doc, indent=1) + "\n"


def _write_output(text: str, out: str | None):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _load_graph(args) -> tuple[np.ndarray, tuple[str, ...], list[NodeParams] | None]:
    """Resolve --network/--preset (+ optional --params) to raw ingredients."""
    if getattr(args, "preset", None):
        weights, ids, params = preset(args.preset)
    else:
        spec = network_from_json(args.network)
        weights, ids, params = spec.weights, spec.node_ids, None
        if getattr(args, "eta", None) is None:
            args.eta = spec.eta
    if getattr(args, "params", None):
        params = params_from_json(args.params, ids)
    return weights, ids, params


def _single_node_kernel(w_star_nn: float) -> InfluenceKernel:
    return InfluenceKernel(entries=np.array([[w_star_nn]]), eta=0.0)


def _print_pairs(pairs):
    for key, v in pairs:
        print(f"{key} {_render_cell(v)}")


def _cmd_solve_local(args) -> int:
    from .game import UnifiedGameParams, local_equilibrium

    u = UnifiedGameParams(
        s_tilde=args.s,
        gamma_tilde=args.gamma_d * args.w_star_nn,
        c_d=args.c_d,
        gamma_a=args.gamma_a,
        c_a=args.c_a,
    )
    eq = local_equilibrium(u)
    _print_pairs(
        [
            ("regime", eq.regime.value),
            ("p_d", eq.p_d),
            ("p_a", eq.p_a),
            ("alpha", eq.alpha),
            ("defender_cost", eq.defender_cost),
            ("attacker_utility", eq.attacker_utility),
        ]
    )
    return 0


def _cmd_contract_d(args) -> int:
    if args.network or args.preset:
        weights, ids, params = _load_graph(args)
        if params is None:
            raise ValueError("--params is required with --network")
        if args.eta is None:
            raise ValueError("--eta is required with --preset")
        rows = sweep_records(weights, ids, params, "d", [args.eta])
        text = (render_csv if args.format == "csv" else render_json)(
            rows, not args.no_header_timestamp
        )
        _write_output(text, args.out)
        return 0
    node = NodeParams(
        gamma_d=args.gamma_d, c_d=args.c_d, gamma_a=args.gamma_a, c_a=args.c_a
    )
    o = design_contract_d(node, _single_node_kernel(args.w_star_nn), 0, np.zeros(1))
    _print_pairs(
        [
            ("insurable", o.insurable),
            ("delta", o.delta),
            ("s", o.contract.s if o.contract else None),
            ("T", o.contract.T if o.contract else 0.0),
            ("profit", o.insurer_profit),
            ("p_d", o.equilibrium.p_d),
            ("p_a", o.equilibrium.p_a),
            ("alpha", o.equilibrium.alpha),
            ("L_d", o.defender_total_loss),
            ("L_d_bare", o.defender_loss_no_premium),
            ("L_a", o.attacker_utility),
        ]
    )
    return 0


def _cmd_contract_c(args) -> int:
    weights, ids, params = _load_graph(args)
    if params is None:
        raise ValueError("--params is required with --network")
    if args.eta is None:
        raise ValueError("--eta is required with --preset")
    rows = sweep_records(weights, ids, params, "c", [args.eta])
    text = (render_csv if args.format == "csv" else render_json)(
        rows, not args.no_header_timestamp
    )
    _write_output(text, args.out)
    return 0


def _cmd_sweep(args) -> int:
    weights, ids, params = _load_graph(args)
    if params is None:
        raise ValueError("--params is required with --network")
    lo, hi = args.sweep_eta[0], args.sweep_eta[1]
    steps = int(args.sweep_eta[2])
    if steps < 2:
        raise ValueError(f"sweep needs at least 2 steps, got {steps}")
    if not (0.0 <= lo <= hi < 1.0):
        raise ValueError(f"sweep bounds must satisfy 0 <= from <= to < 1, got {lo}, {hi}")
    etas = np.linspace(lo, hi, steps)
    rows = sweep_records(weights, ids, params, args.mode, etas)
    text = (render_csv if args.format == "csv" else render_json)(
        rows, not args.no_header_timestamp
    )
    _write_output(text, args.out)
    return 0


def _cmd_simulate(args) -> int:
    from .simulate import SimulationConfig, simulate_flipit

    cfg = SimulationConfig(horizon=args.horizon, runs=args.runs, seed=args.seed)
    res = simulate_flipit(args.p_d, args.p_a, cfg)
    print(
        f"alpha_hat {res.alpha_hat:.12g} +/- {res.std_error:.12g} (runs={res.runs})"
    )
    return 0


def _cmd_validate(args) -> int:
    if args.preset:
        weights, ids, _ = preset(args.preset)
        spec = NetworkSpec(weights=weights, eta=args.eta or 0.0, node_ids=ids)
    else:
        spec = network_from_json(args.network)
    violations = validate_network(spec)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return 1
    print("ok")
    return 0


def _add_graph_flags(p: argparse.ArgumentParser, with_mode=False):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--network", help="network JSON file")
    src.add_argument("--preset", help="compiled-in network: fig8a, fig8b, fig9, fig10")
    p.add_argument("--params", help="per-node params JSON file")
    p.add_argument("--eta", type=float, default=None, help="discount ratio (presets)")
    if with_mode:
        p.add_argument("--mode", choices=["d", "c", "both"], default="both")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--no-header-timestamp", action="store_true")


def _add_node_flags(p: argparse.ArgumentParser):
    p.add_argument("--gamma-d", type=float, default=1.0)
    p.add_argument("--c-d", type=float, default=1.0)
    p.add_argument("--gamma-a", type=float, default=1.0)
    p.add_argument("--c-a", type=float, default=1.0)
    p.add_argument("--w-star-nn", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flipnet",
        description="equilibria and insurance contracts for networked FlipIt games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-local", help="closed-form local equilibrium")
    _add_node_flags(p)
    p.add_argument("--s", type=float, default=0.0, help="coverage level")
    p.set_defaults(func=_cmd_solve_local)

    p = sub.add_parser("contract-d", help="distributed (per-node) contracts")
    _add_node_flags(p)
    _add_graph_flags(p)
    p.set_defaults(func=_cmd_contract_d)

    p = sub.add_parser("contract-c", help="single network-wide contract")
    _add_graph_flags(p)
    p.set_defaults(func=_cmd_contract_c)

    p = sub.add_parser("sweep", help="solve across a range of eta")
    _add_graph_flags(p, with_mode=True)
    p.add_argument(
        "--sweep-eta",
        nargs=3,
        type=float,
        required=True,
        metavar=("FROM", "TO", "STEPS"),
    )
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="Monte-Carlo controlling fraction")
    p.add_argument("--p-d", type=float, required=True)
    p.add_argument("--p-a", type=float, required=True)
    p.add_argument("--horizon", type=float, default=10000.0)
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("validate", help="check a network file against the rules")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--network")
    src.add_argument("--preset")
    p.add_argument("--eta", type=float, default=None)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
