"""Exit criteria for the package; one PASS/FAIL line per criterion in the terminal summary.

Run just this module with ``pytest tests/test_acceptance.py -v``.
"""
import math
import time

import numpy as np
import pytest

from dchfc.config import SimConfig, load_config
from dchfc.election import ElectionConfig, elect_dchfc, select_heads_chufl, select_heads_dchfc
from dchfc.fuzzy import OUTPUT_TERMS, AggregatedFuzzySet, default_rulebase, defuzzify_centroid, evaluate
from dchfc.potential import PotentialScore, reachability, score_all
from dchfc.simulation import Mode, SimState, compare, lifetime, rounds_csv, run_round, run_simulation
from dchfc.topology import NodeStatus, generate_topology
from dchfc.trust import TrustConfig, detect_malicious, trust_factor
from conftest import ACCEPTANCE, make_topo


def record(key, ok, detail=""):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"{key}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{key}: {detail}"


# -- 1. trust -------------------------------------------------------------------


def test_c1_trust():
    t0 = time.perf_counter()
    ok = all(trust_factor(0, x) == 100.0 for x in np.linspace(0.01, 0.99, 99))
    for x in (0.3, 0.5, 0.9, 0.99):
        vals = [trust_factor(n, x) for n in range(60)]
        ok &= all(b < a for a, b in zip(vals, vals[1:]))
    topo = make_topo([(0, 0), (10, 0)])
    topo.nodes[1].consecutive_drops = 1
    ok &= detect_malicious(topo, TrustConfig(x=0.5, ttf=50)) == {1}
    elapsed = time.perf_counter() - t0
    record("C1 trust", ok and elapsed < 1.0, f"{elapsed:.3f}s")


# -- 2. fuzzy -------------------------------------------------------------------

OUT_BP = {
    "VeryLow": (0.0, 0.0, 0.25),
    "Low": (0.0, 0.25, 0.5),
    "Medium": (0.25, 0.5, 0.75),
    "High": (0.5, 0.75, 1.0),
    "VeryHigh": (0.75, 1.0, 1.0),
}


def _triangle(v, a, b, c):
    up = np.ones_like(v) if b == a else (v - a) / (b - a)
    down = np.ones_like(v) if c == b else (c - v) / (c - b)
    return np.clip(np.minimum(up, down), 0.0, 1.0) * ((v >= a) & (v <= c))


def _aggregate(v, heights):
    return np.max([np.minimum(h, _triangle(v, *OUT_BP[t])) for t, h in zip(OUTPUT_TERMS, heights)], axis=0)


def test_c2_fuzzy():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    rb = default_rulebase()
    dense = np.linspace(0.0, 1.0, 1_000_000)
    worst = 0.0
    for _ in range(25):
        heights = rng.uniform(0, 1, 5) * (rng.uniform(size=5) < 0.6)
        if not heights.any():
            heights[rng.integers(5)] = rng.uniform(0.1, 1)
        mu = _aggregate(dense, heights)
        oracle = np.trapezoid(dense * mu, dense) / np.trapezoid(mu, dense)
        got = defuzzify_centroid(AggregatedFuzzySet(rb.grid, _aggregate(rb.grid, heights)))
        worst = max(worst, abs(got - oracle))
    combos = sorted(r.antecedent for r in rb.rules)
    total = len(combos) == 27 and len(set(combos)) == 27
    corner = evaluate(rb, [[0.9, 0.9, 0.9]])[0] > evaluate(rb, [[0.1, 0.1, 0.1]])[0]
    elapsed = time.perf_counter() - t0
    record(
        "C2 fuzzy",
        worst < 1e-3 and total and corner and elapsed < 10,
        f"max centroid err {worst:.2e}, totality={total}, corner={corner}, {elapsed:.2f}s",
    )


# -- 3. reachability ------------------------------------------------------------


def test_c3_reachability():
    t0 = time.perf_counter()
    cfg = SimConfig(node_count=15, malicious_count=0)
    worst = 0.0
    for seed in range(50):
        topo = generate_topology(cfg, seed)
        pts = topo.positions
        dist = [[math.dist(pts[i], pts[j]) for j in range(15)] for i in range(15)]
        for i in range(15):
            near = [dist[i][j] for j in range(15) if j != i and dist[i][j] <= topo.tx_range]
            expected = sum(near) / (len(near) + 1) if near else 2 * topo.tx_range
            worst = max(worst, abs(reachability(topo, i) - expected))
    elapsed = time.perf_counter() - t0
    record("C3 reachability", worst <= 1e-9 and elapsed < 5, f"max err {worst:.1e}, {elapsed:.2f}s")


# -- 4. election ----------------------------------------------------------------


def test_c4_election():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    rb = default_rulebase()
    ecfg = ElectionConfig()
    spacing_ok = no_malicious = chufl_ok = True
    for k in range(100):
        n = int(rng.integers(50, 201))
        topo = generate_topology(SimConfig(node_count=n, malicious_count=n // 10), int(rng.integers(2**31)))
        for node in topo.nodes:
            node.energy = float(rng.uniform(0.01, 0.5))
            if node.is_dropper:
                node.status = NodeStatus.MALICIOUS
        scores = score_all(topo, rb, 0.5)
        res = elect_dchfc(scores, topo, ecfg)
        pos = topo.positions
        for idx in range(res.initial_count, len(res.heads)):
            h = res.heads[idx]
            spacing_ok &= all(math.dist(pos[h], pos[g]) > ecfg.d_threshold for g in res.heads[:idx])
        no_malicious &= not any(topo.nodes[h].status is NodeStatus.MALICIOUS for h in res.heads)
        want = [s.node_id for s in sorted(scores, key=lambda s: (-s.potential, s.node_id))]
        chufl_ok &= select_heads_chufl(scores, ecfg) == want[: ecfg.head_count(ecfg.chufl_head_pct, len(scores))]

    line = make_topo([(x, 0) for x in (0, 150, 400, 450, 900)])
    flat = [PotentialScore(i, 0.5) for i in range(5)]
    line_ok = select_heads_dchfc(flat, line, ElectionConfig(p_initial=0.1, d_threshold=200)) == ([0, 2, 4], [1, 3])
    elapsed = time.perf_counter() - t0
    record(
        "C4 election",
        spacing_ok and no_malicious and chufl_ok and line_ok and elapsed < 10,
        f"spacing={spacing_ok} no_malicious={no_malicious} chufl={chufl_ok} line={line_ok}, {elapsed:.2f}s",
    )


# -- 5. conservation ------------------------------------------------------------


def _ledger_errors(cfg, seed, mode):
    """Recompute each round's charges from the election and compare with the energy drop."""
    topo = generate_topology(cfg, seed)
    state = SimState(topo.copy(), cfg, cfg.fuzzy.rulebase(), mode)
    em = cfg.energy
    bits = em.packet_bits
    worst_rel = 0.0
    flow_ok = True
    series = []
    while state.topo.alive_mask().any() and state.round < cfg.max_rounds:
        before = {n.id: n.energy for n in state.topo.nodes if n.alive}
        m = run_round(state)
        series.append(m)
        cost = dict.fromkeys(before, 0.0)
        sink = state.topo.sink_pos
        res = state.last_election
        if res is None:
            for i in before:
                cost[i] += em.e_elec * bits + em.eps_amp * bits * math.dist(state.topo.nodes[i].pos, sink) ** 2
        else:
            for member, head in res.assignment.items():
                d = math.dist(state.topo.nodes[member].pos, state.topo.nodes[head].pos)
                cost[member] += em.e_elec * bits + em.eps_amp * bits * d * d
                cost[head] += em.e_elec * bits
            for h in res.heads:
                cost[h] += em.e_elec * bits + em.eps_amp * bits * math.dist(state.topo.nodes[h].pos, sink) ** 2
        charged = sum(min(c, before[i]) for i, c in cost.items())
        drop = sum(before.values()) - sum(n.energy for n in state.topo.nodes)
        worst_rel = max(worst_rel, abs(drop - charged) / charged)
        flow_ok &= m.packets_delivered + m.packets_lost == m.packets_offered
    return worst_rel, flow_ok, series


def _six_node_ledger_error():
    e_elec, eps, bits = 50e-9, 10e-12, 2000
    pts = [(500, 520), (400, 520), (620, 560), (500, 380), (560, 650), (420, 430)]
    cfg = load_config(None, ["network.node_count=6", "network.malicious_count=0", "election.d_threshold=5000"])
    topo = make_topo(pts, sink=(500, 500))
    state = SimState(topo, cfg, default_rulebase(), Mode.DCHFC)
    run_round(state)
    assert state.last_election.heads == [0]
    expected = [0.5 - 5 * e_elec * bits - (e_elec * bits + eps * bits * math.dist(pts[0], (500, 500)) ** 2)]
    expected += [0.5 - (e_elec * bits + eps * bits * math.dist(p, pts[0]) ** 2) for p in pts[1:]]
    return max(abs(n.energy - e) for n, e in zip(topo.nodes, expected))


def test_c5_conservation():
    six = _six_node_ledger_error()
    cfg = SimConfig()
    worst, flow, order = 0.0, True, True
    for mode in Mode:
        rel, ok, series = _ledger_errors(cfg, cfg.seed, mode)
        worst = max(worst, rel)
        flow &= ok
        lt = lifetime(series, cfg.node_count)
        reached = [v for v in (lt.fnd, lt.hna, lt.lnd) if v is not None]
        order &= reached == sorted(reached) and len(reached) == 3
    record(
        "C5 conservation",
        six <= 1e-12 and worst <= 1e-9 and flow and order,
        f"six-node err {six:.1e}, ledger rel err {worst:.1e}, flow={flow}, fnd<=hna<=lnd={order}",
    )


# -- 6. directional reproduction ------------------------------------------------

N_SEEDS = 20


@pytest.fixture(scope="module")
def default_comparison():
    cfg = load_config(
        None,
        ["network.node_count=122", "network.malicious_count=13", "election.p_initial=0.08", "election.d_threshold=200"],
    )
    t0 = time.perf_counter()
    report = compare(cfg, Mode.DCHFC, Mode.CHUFL, list(range(1, N_SEEDS + 1)))
    return report, time.perf_counter() - t0


def _direction(report, metric, better):
    """Fraction of seeds where DCHFC beats the baseline, and whether the means agree."""
    d = report.deltas(metric)
    wins = (d < 0).sum() if better == "lower" else (d > 0).sum()
    mean_ok = d.mean() < 0 if better == "lower" else d.mean() > 0
    return mean_ok, wins / len(d), report.mean("a", metric), report.mean("b", metric)


@pytest.mark.slow
@pytest.mark.parametrize(
    "key, metric, better",
    [
        ("C6a packet loss", "cumulative_loss", "lower"),
        ("C6b throughput", "mean_throughput", "higher"),
        ("C6c residual energy @ baseline HNA", "residual_at_reference", "higher"),
        ("C6d FND", "fnd", "higher"),
        ("C6e HNA", "hna", "higher"),
    ],
)
def test_c6_directional(default_comparison, key, metric, better):
    report, _ = default_comparison
    mean_ok, frac, a, b = _direction(report, metric, better)
    record(key, mean_ok and frac >= 0.8, f"DCHFC {a:.4g} vs CHUFL {b:.4g}, DCHFC better in {frac:.0%} of seeds")


@pytest.mark.slow
def test_c6_runtime(default_comparison):
    _, elapsed = default_comparison
    record("C6f runtime", elapsed < 300, f"{N_SEEDS} seeds x 2 modes in {elapsed:.1f}s")


# -- 7. determinism -------------------------------------------------------------


def test_c7_determinism():
    cfg = SimConfig()
    a = rounds_csv(run_simulation(cfg, 7).rounds)
    b = rounds_csv(run_simulation(cfg, 7).rounds)
    record("C7 determinism", a == b and len(a.splitlines()) > 1, f"{len(a.splitlines()) - 1} rounds")
