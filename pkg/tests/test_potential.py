import math
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dchfc.potential import reachability, reception_power, score_all, score_table, write_score_csv
from dchfc.topology import NodeStatus, generate_topology
from conftest import make_topo


def brute_reachability(points, i, tx_range, alive=None):
    alive = alive or [True] * len(points)
    d = [math.dist(points[i], q) for j, q in enumerate(points) if j != i and alive[j] and math.dist(points[i], q) <= tx_range]
    if not d:
        return 2 * tx_range
    return sum(d) / (len(d) + 1)


def test_one_neighbor():
    topo = make_topo([(0, 0), (10, 0), (500, 500)], tx_range=100)
    assert reachability(topo, 0) == pytest.approx(5.0)


def test_two_neighbors():
    topo = make_topo([(0, 0), (6, 0), (0, 12)], tx_range=100)
    assert reachability(topo, 0) == pytest.approx(6.0)


def test_isolated_sentinel():
    topo = make_topo([(0, 0), (900, 900)], tx_range=100)
    assert reachability(topo, 0) == 200.0


def test_dead_neighbors_ignored():
    topo = make_topo([(0, 0), (10, 0), (0, 20)], tx_range=100)
    topo.nodes[2].status = NodeStatus.DEAD
    assert reachability(topo, 0) == pytest.approx(5.0)


def test_reachability_matches_distance_matrix(cfg):
    for seed in range(5):
        topo = generate_topology(cfg.replace(node_count=15, malicious_count=0), seed)
        pts = [tuple(n.pos) for n in topo.nodes]
        for i in range(15):
            assert reachability(topo, i) == pytest.approx(brute_reachability(pts, i, topo.tx_range), abs=1e-9)


def test_reception_power_examples():
    topo = make_topo([(100, 0), (30, 40), (250, 0)], sink=(0, 0), lqi=[200, 0, None])
    assert reception_power(topo, 0) == pytest.approx(2.0)
    assert reception_power(topo, 1) == 0.0


def test_reception_power_default_lqi_model():
    topo = make_topo([(250, 0)], sink=(0, 0), tx_range=250)
    assert reception_power(topo, 0) == pytest.approx((255 / 2) / 250)
    assert reception_power(topo, 0) == pytest.approx(0.51)


def test_reception_power_floor_at_sink():
    topo = make_topo([(0, 0)], sink=(0, 0), lqi=[255])
    assert reception_power(topo, 0) == 255.0


def test_all_malicious_gives_no_scores(rulebase):
    topo = make_topo([(0, 0), (10, 0), (20, 0)])
    for n in topo.nodes:
        n.status = NodeStatus.MALICIOUS
    assert score_all(topo, rulebase) == []


def test_excluded_statuses(rulebase):
    topo = make_topo([(0, 0), (10, 0), (20, 0), (30, 0)], sink=(15, 100))
    topo.nodes[1].status = NodeStatus.MALICIOUS
    topo.nodes[3].status = NodeStatus.DEAD
    assert [s.node_id for s in score_all(topo, rulebase)] == [0, 2]


def test_symmetric_nodes_tie(rulebase):
    topo = make_topo([(400, 500), (600, 500)], sink=(500, 500))
    a, b = score_all(topo, rulebase)
    assert a.potential == pytest.approx(b.potential, abs=1e-12)


# independent end-to-end oracle: hand-coded normalisation, trapezoids, table
# parsing and dense-grid centroid


def _trap(a, b, c, d):
    def f(v):
        if b <= v <= c:
            return 1.0
        if a < v < b:
            return (v - a) / (b - a)
        if c < v < d:
            return (d - v) / (d - c)
        return 0.0

    return f


IN_TERMS = {"Low": _trap(0, 0, 0.2, 0.45), "Medium": _trap(0.25, 0.45, 0.55, 0.75), "High": _trap(0.55, 0.8, 1, 1)}
OUT_TERMS = {
    "VeryLow": (0, 0, 0, 0.25),
    "Low": (0, 0.25, 0.25, 0.5),
    "Medium": (0.25, 0.5, 0.5, 0.75),
    "High": (0.5, 0.75, 0.75, 1),
    "VeryHigh": (0.75, 1, 1, 1),
}


def _out_on_grid(bp, v):
    a, b, c, d = bp
    up = np.ones_like(v) if b == a else (v - a) / (b - a)
    down = np.ones_like(v) if d == c else (d - v) / (d - c)
    return np.clip(np.minimum(up, down), 0, 1) * ((v >= a) & (v <= d))


def oracle_potential(e, r, p, n=100_001):
    text = resources.files("dchfc").joinpath("data/default_rules.txt").read_text()
    v = np.linspace(0, 1, n)
    agg = np.zeros_like(v)
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        lhs, rhs = line.split("->")
        te, tr, tp = (t.strip() for t in lhs.split(","))
        w = min(IN_TERMS[te](e), IN_TERMS[tr](r), IN_TERMS[tp](p))
        if w > 0:
            agg = np.maximum(agg, np.minimum(w, _out_on_grid(OUT_TERMS[rhs.strip()], v)))
    return np.trapezoid(v * agg, v) / np.trapezoid(agg, v)


def test_scores_match_end_to_end_oracle(rulebase):
    pts = [(100, 100), (180, 140), (300, 420), (520, 480), (700, 650)]
    energy = [0.5, 0.31, 0.12, 0.44, 0.27]
    topo = make_topo(pts, tx_range=250, sink=(500, 500))
    for node, en in zip(topo.nodes, energy):
        node.energy = en
    rp = [topo.nodes[i].lqi / max(1.0, math.dist(pts[i], (500, 500))) for i in range(5)]
    got = {s.node_id: s.potential for s in score_all(topo, rulebase, initial_energy=0.5)}
    for i in range(5):
        e = energy[i] / 0.5
        r = max(0.0, 1 - brute_reachability(pts, i, 250) / 250)
        p = rp[i] / max(rp)
        assert got[i] == pytest.approx(oracle_potential(e, r, p), abs=1e-3)


def test_energy_corner(rulebase):
    # all-High plateau beats all-Low plateau through the full scoring path
    from dchfc.fuzzy import evaluate

    assert evaluate(rulebase, [[0.9, 0.9, 0.9]])[0] > evaluate(rulebase, [[0.1, 0.1, 0.1]])[0]


def test_raising_energy_never_lowers_high_membership(rulebase):
    topo = make_topo([(100, 100), (200, 200), (300, 300)], sink=(500, 500))
    t1 = score_table(topo, rulebase, 0.5)
    topo.nodes[0].energy = 0.2
    t2 = score_table(topo, rulebase, 0.5)
    high = rulebase.inputs[0].terms["High"]
    assert high(t1.normalized[0, 0]) >= high(t2.normalized[0, 0])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_scores_in_unit_interval_and_id_free(seed):
    from dchfc.config import SimConfig
    from dchfc.fuzzy import default_rulebase

    rb = default_rulebase()
    cfg = SimConfig(node_count=20, malicious_count=0)
    topo = generate_topology(cfg, seed)
    scores = score_all(topo, rb, 0.5)
    assert all(0.0 <= s.potential <= 1.0 for s in scores)
    by_pos = sorted((tuple(topo.nodes[s.node_id].pos), round(s.potential, 12)) for s in scores)

    perm = np.random.default_rng(seed).permutation(20)
    shuffled = make_topo([tuple(topo.nodes[j].pos) for j in perm], sink=tuple(topo.sink_pos))
    again = sorted(
        (tuple(shuffled.nodes[s.node_id].pos), round(s.potential, 12)) for s in score_all(shuffled, rb, 0.5)
    )
    assert by_pos == again


def test_debug_dump(rulebase, tmp_path, cfg):
    topo = generate_topology(cfg, 2)
    write_score_csv(score_table(topo, rulebase, 0.5), tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0].startswith("node_id,residual_energy,reachability,reception_power")
    assert len(lines) == 123
