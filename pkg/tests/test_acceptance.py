"""Acceptance gate: every release-blocking behavior, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines. Each check
carries a wall-clock budget so regressions in the numeric kernels or the
simulator surface here and not in CI timeouts.
"""

import time

import numpy as np
import pytest

from flipnet.cli import preset, sweep_records
from flipnet.game import (
    NodeParams,
    Regime,
    UnifiedGameParams,
    attacker_controlling_fraction,
    local_equilibrium,
)
from flipnet.insurance_c import (
    design_contract_c_numeric,
    design_contract_semi_homogeneous,
)
from flipnet.insurance_d import (
    INSURABILITY_THRESHOLD,
    design_contract_d,
    feasible_coverage_interval,
    solve_network_d,
)
from flipnet.network import InfluenceKernel, NetworkSpec, compute_kernel
from flipnet.simulate import (
    SimulationConfig,
    deviation_scan,
    grid_contract_oracle,
    simulate_flipit,
)


def report(number, title, ok, detail, elapsed, budget):
    line = (
        f"{'PASS' if ok else 'FAIL'}: criterion {number} ({title}) "
        f"- {detail} [{elapsed:.2f}s / budget {budget:.0f}s]"
    )
    print(line)
    assert ok, line
    assert elapsed < budget, f"criterion {number} exceeded budget: {line}"


def random_row_stochastic(rng, n):
    w = rng.random((n, n))
    np.fill_diagonal(w, 0.0)
    return w / w.sum(axis=1, keepdims=True)


def test_criterion_1_kernel_correctness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst_identity, worst_colsum = 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(2, 51))
        eta = float(rng.uniform(0.0, 0.95))
        spec = NetworkSpec(weights=random_row_stochastic(rng, n), eta=eta)
        k = compute_kernel(spec)
        lhs = (np.eye(n) - eta * spec.weights.T) @ k.entries
        worst_identity = max(worst_identity, float(np.abs(lhs - np.eye(n)).max()))
        worst_colsum = max(
            worst_colsum,
            float(np.abs(k.entries.sum(axis=0) - 1.0 / (1.0 - eta)).max()),
        )
    elapsed = time.perf_counter() - t0
    ok = worst_identity < 1e-10 and worst_colsum < 1e-10
    report(
        1,
        "influence kernel",
        ok,
        f"100 networks, worst identity residual {worst_identity:.2e}, "
        f"worst column-sum error {worst_colsum:.2e}",
        elapsed,
        5.0,
    )


def test_criterion_2_simulation_matches_closed_form():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    hits, results = 0, []
    for i in range(20):
        p_d = int(rng.integers(50, 201)) / 100.0
        p_a = int(rng.integers(50, 201)) / 100.0
        horizon = 1e4 / min(p_d, p_a)
        cfg = SimulationConfig(horizon=horizon, runs=200, seed=9000 + i)
        res = simulate_flipit(p_d, p_a, cfg)
        alpha = attacker_controlling_fraction(p_d, p_a)
        err = abs(res.alpha_hat - alpha)
        within = err <= 3.0 * res.std_error
        hits += within
        results.append((p_d, p_a, err, res.std_error, within))
    elapsed = time.perf_counter() - t0
    report(
        2,
        "Monte-Carlo controlling fraction",
        hits >= 18,
        f"{hits}/20 pairs within 3 standard errors",
        elapsed,
        60.0,
    )


def test_criterion_3_equilibria_survive_deviation_scans():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    regimes = {Regime.E1: 0, Regime.E2: 0}
    worst_eq = 0.0
    detected = 0
    n_draws = 200
    for _ in range(n_draws):
        u = UnifiedGameParams(
            s_tilde=float(rng.uniform(0.0, 0.9)),
            gamma_tilde=float(10.0 ** rng.uniform(-1, 1)),
            c_d=float(10.0 ** rng.uniform(-1, 1)),
            gamma_a=float(10.0 ** rng.uniform(-1, 1)),
            c_a=float(10.0 ** rng.uniform(-1, 1)),
        )
        eq = local_equilibrium(u)
        regimes[eq.regime] += 1
        scan = deviation_scan(eq, u)
        worst_eq = max(worst_eq, scan.defender_improvement, scan.attacker_improvement)

        off = local_equilibrium(u)
        perturbed = type(eq)(
            p_d=eq.p_d * 1.5,
            p_a=eq.p_a,
            alpha=attacker_controlling_fraction(eq.p_d * 1.5, eq.p_a),
            regime=eq.regime,
            defender_cost=off.defender_cost,
            attacker_utility=off.attacker_utility,
        )
        pscan = deviation_scan(perturbed, u)
        if max(pscan.defender_improvement, pscan.attacker_improvement) >= 1e-6:
            detected += 1
    elapsed = time.perf_counter() - t0
    ok = (
        worst_eq <= 1e-9
        and detected >= 0.95 * n_draws
        and min(regimes.values()) >= 20
    )
    report(
        3,
        "equilibrium deviation scans",
        ok,
        f"worst improvement at equilibrium {worst_eq:.2e}, perturbation "
        f"detected in {detected}/{n_draws}, regime counts "
        f"E1={regimes[Regime.E1]} E2={regimes[Regime.E2]}",
        elapsed,
        30.0,
    )


def test_criterion_4_insurability_threshold():
    t0 = time.perf_counter()
    transition = None
    agree = True
    deltas = [0.80 + 0.002 * k for k in range(61)]
    for delta in deltas:
        node = NodeParams(gamma_d=1.0, c_d=1.0, gamma_a=delta, c_a=1.0)
        found = grid_contract_oracle(node, 1.0, s_steps=400, t_steps=200)
        interval = feasible_coverage_interval(delta)
        if (found is None) != (interval is None):
            agree = False
        if found is not None and transition is None:
            transition = delta
    elapsed = time.perf_counter() - t0
    ok = (
        agree
        and transition is not None
        and abs(transition - INSURABILITY_THRESHOLD) <= 0.002
    )
    report(
        4,
        "insurability threshold",
        ok,
        f"oracle and interval agree at all 61 points: {agree}; first feasible "
        f"delta {transition} vs threshold {INSURABILITY_THRESHOLD:.6f}",
        elapsed,
        120.0,
    )


def test_criterion_5_optimal_coverage_and_premium():
    t0 = time.perf_counter()
    rng = np.random.default_rng(505)
    worst_s, worst_T, worst_profit = 0.0, 0.0, 0.0
    kernel = InfluenceKernel(entries=np.eye(1), eta=0.0)
    for _ in range(100):
        delta = float(rng.uniform(0.86, 2.0))
        gamma_d = float(10.0 ** rng.uniform(-1, 1))
        c_d = float(10.0 ** rng.uniform(-1, 1))
        c_a = float(10.0 ** rng.uniform(-1, 1))
        gamma_a = delta * gamma_d * c_a / c_d
        node = NodeParams(gamma_d=gamma_d, c_d=c_d, gamma_a=gamma_a, c_a=c_a)

        best = grid_contract_oracle(node, 1.0, s_steps=10_000, t_steps=100)
        worst_s = max(worst_s, abs(best.s - 0.5))

        o = design_contract_d(node, kernel, 0, np.zeros(1))
        gt = gamma_d
        if delta >= 1.0:
            expect_T = gt / 2.0
            expect_profit = gt * gt * c_a / (8.0 * gamma_a * c_d)
        else:
            expect_T = gamma_a * c_d / c_a - gt / 2.0
            expect_profit = (
                gamma_a * c_d / c_a - gt + gt * gt * c_a / (8.0 * gamma_a * c_d)
            )
        worst_T = max(worst_T, abs(o.contract.T - expect_T) / expect_T)
        worst_profit = max(
            worst_profit, abs(o.insurer_profit - expect_profit) / expect_profit
        )
    elapsed = time.perf_counter() - t0
    ok = worst_s <= 1e-3 and worst_T <= 1e-9 and worst_profit <= 1e-9
    report(
        5,
        "optimal coverage one half",
        ok,
        f"100 insurable nodes: grid argmax off by at most {worst_s:.2e}, "
        f"premium rel err {worst_T:.2e}, profit rel err {worst_profit:.2e}",
        elapsed,
        60.0,
    )


def test_criterion_6_reductions():
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    params = [
        NodeParams(
            gamma_d=float(10.0 ** rng.uniform(-1, 1)),
            c_d=float(10.0 ** rng.uniform(-1, 1)),
            gamma_a=float(10.0 ** rng.uniform(-1, 1)),
            c_a=float(10.0 ** rng.uniform(-1, 1)),
        )
        for _ in range(5)
    ]
    spec = NetworkSpec(weights=np.zeros((5, 5)), eta=0.37)
    net = solve_network_d(spec, params)
    lone_kernel = InfluenceKernel(entries=np.eye(1), eta=0.0)
    exact = True
    for node, o in zip(params, net.outcomes):
        lone = design_contract_d(node, lone_kernel, 0, np.zeros(1))
        exact &= o.insurable == lone.insurable
        exact &= o.insurer_profit == lone.insurer_profit
        exact &= o.defender_total_loss == lone.defender_total_loss
        exact &= o.equilibrium.p_d == lone.equilibrium.p_d
        exact &= o.equilibrium.p_a == lone.equilibrium.p_a
        if o.contract or lone.contract:
            exact &= (
                o.contract.s == lone.contract.s and o.contract.T == lone.contract.T
            )

    shared = NodeParams(gamma_d=1.0, c_d=1.0, gamma_a=1.0, c_a=0.8)
    ring = np.zeros((6, 6))
    for i in range(6):
        ring[i, (i - 1) % 6] = ring[i, (i + 1) % 6] = 0.5
    worst_s, worst_T = 0.0, 0.0
    for eta in (0.0, 0.1, 0.2, 0.3):
        numeric = design_contract_c_numeric(
            [shared] * 6, compute_kernel(NetworkSpec(weights=ring, eta=eta))
        )
        closed = design_contract_semi_homogeneous(shared, 6, eta)
        worst_s = max(worst_s, abs(numeric.contract.s - closed.contract.s))
        worst_T = max(
            worst_T, abs(numeric.contract.T - closed.contract.T) / closed.contract.T
        )
    elapsed = time.perf_counter() - t0
    ok = exact and worst_s <= 1e-6 and worst_T <= 1e-6
    report(
        6,
        "network reductions",
        ok,
        f"unconnected network bitwise-equals isolated nodes: {exact}; "
        f"numeric vs closed form worst |ds| {worst_s:.2e}, "
        f"worst rel dT {worst_T:.2e}",
        elapsed,
        30.0,
    )


def test_criterion_7_experiment_reproduction():
    t0 = time.perf_counter()
    etas = np.round(np.linspace(0.0, 0.9, 181), 10)

    weights, ids, params = preset("fig8a")
    rows = sweep_records(weights, ids, params, "both", etas)
    by_mode = {
        mode: [
            next(
                r
                for r in rows
                if r["mode"] == mode and r["eta"] == eta and r["node_id"] == "1"
            )
            for eta in etas
        ]
        for mode in ("d", "c")
    }

    # (i) distributed premium rises with connectivity until the node drops out
    t_d = np.array([r["T_total"] for r in by_mode["d"]])
    nz = np.nonzero(t_d > 0.0)[0]
    cutoff = nz[-1]
    rises = bool(np.all(np.diff(t_d[: cutoff + 1]) >= -1e-12))
    zero_after = bool(np.all(t_d[cutoff + 1 :] == 0.0))

    # (ii) centralized premium dies at the closed-form cutoff
    t_c = np.array([r["T_total"] for r in by_mode["c"]])
    c_first_zero = float(etas[int(np.nonzero(t_c == 0.0)[0][0])])
    c_cutoff_expect = 1.0 - 0.8 * INSURABILITY_THRESHOLD
    cutoff_ok = abs(c_first_zero - c_cutoff_expect) <= 0.01

    # (iii) who bears less total loss flips as connectivity grows
    order_ok = True
    for eta, rd, rc in zip(etas, by_mode["d"], by_mode["c"]):
        if 0.05 - 1e-9 <= eta <= 0.2 + 1e-9:
            order_ok &= rc["L_d_total"] > rd["L_d_total"]
        if 0.8 - 1e-9 <= eta <= 0.9 + 1e-9:
            order_ok &= rc["L_d_total"] < rd["L_d_total"]

    weights9, ids9, params9 = preset("fig9")
    rows9 = sweep_records(weights9, ids9, params9, "d", etas)
    hub_premium_ok = True
    last_insurable = {}
    for eta in etas:
        pts = {
            r["node_id"]: r for r in rows9 if r["eta"] == eta and r["mode"] == "d"
        }
        if pts["1"]["insurable"]:
            hub_premium_ok &= all(
                pts["1"]["T"] >= pts[k]["T"] - 1e-12 for k in ("2", "3", "4")
            )
        for k, r in pts.items():
            if r["insurable"]:
                last_insurable[k] = eta
    hub_dies_first = last_insurable["1"] < min(
        last_insurable[k] for k in ("2", "3", "4")
    )

    weights10, ids10, params10 = preset("fig10")
    rows10 = sweep_records(weights10, ids10, params10, "d", etas)
    cheap_node_never_insurable = not any(
        r["insurable"] for r in rows10 if r["node_id"] == "1"
    )

    elapsed = time.perf_counter() - t0
    ok = (
        rises
        and zero_after
        and cutoff_ok
        and order_ok
        and hub_premium_ok
        and hub_dies_first
        and cheap_node_never_insurable
    )
    report(
        7,
        "experiment reproduction",
        ok,
        f"ring: premium monotone {rises}, zero after cutoff {zero_after}, "
        f"centralized cutoff {c_first_zero:.3f} vs {c_cutoff_expect:.4f} "
        f"({cutoff_ok}), loss ordering flips {order_ok}; hub graph: premium "
        f"dominance {hub_premium_ok}, hub drops first {hub_dies_first}; "
        f"cheap-defense node never insurable {cheap_node_never_insurable}",
        elapsed,
        120.0,
    )


def test_criterion_8_risk_compensation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    grid = [k / 10.0 for k in range(10)]

    e1_ok = True
    for _ in range(50):
        gt = float(10.0 ** rng.uniform(-1, 1))
        c_d = float(10.0 ** rng.uniform(-1, 1))
        c_a = float(10.0 ** rng.uniform(-1, 1))
        gamma_a = gt * c_a / c_d * float(rng.uniform(1.0, 3.0))
        eqs = [
            local_equilibrium(
                UnifiedGameParams(s_tilde=s, gamma_tilde=gt, c_d=c_d,
                                  gamma_a=gamma_a, c_a=c_a)
            )
            for s in grid
        ]
        e1_ok &= all(eq.regime is Regime.E1 for eq in eqs)
        for a, b in zip(eqs, eqs[1:]):
            e1_ok &= b.p_d < a.p_d and b.p_a < a.p_a and b.alpha > a.alpha

    e2_ok = True
    for _ in range(50):
        gamma_a = float(10.0 ** rng.uniform(-1, 1))
        c_d = float(10.0 ** rng.uniform(-1, 1))
        c_a = float(10.0 ** rng.uniform(-1, 1))
        gt = gamma_a * c_d / c_a * float(rng.uniform(11.0, 50.0))
        eqs = [
            local_equilibrium(
                UnifiedGameParams(s_tilde=s, gamma_tilde=gt, c_d=c_d,
                                  gamma_a=gamma_a, c_a=c_a)
            )
            for s in grid
        ]
        e2_ok &= all(eq.regime is Regime.E2 for eq in eqs)
        for a, b in zip(eqs, eqs[1:]):
            e2_ok &= b.p_d == a.p_d and b.alpha > a.alpha

    elapsed = time.perf_counter() - t0
    report(
        8,
        "risk compensation",
        e1_ok and e2_ok,
        f"50 fully-contested instances monotone: {e1_ok}; 50 attacker-deterred "
        f"instances defense-invariant with rising takeover: {e2_ok}",
        elapsed,
        10.0,
    )
