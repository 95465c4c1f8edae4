"""Round-based network simulation with first-order radio energy accounting."""
from __future__ import annotations

import csv
import enum
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import election as el
from .config import EnergyModel, SimConfig
from .fuzzy import RuleBase
from .potential import score_table
from .topology import NodeStatus, Topology, generate_topology
from .trust import detect_malicious


class Mode(str, enum.Enum):
    DCHFC = "dchfc"
    CHUFL = "chufl"


def tx_cost(em: EnergyModel, bits: float, d) -> float | np.ndarray:
    """First-order radio transmit energy: ``e_elec*bits + eps_amp*bits*d**2``."""
    return em.e_elec * bits + em.eps_amp * bits * np.square(d)


def rx_cost(em: EnergyModel, bits: float) -> float:
    return em.e_elec * bits


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    packets_offered: int
    packets_delivered: int
    packets_lost: int
    throughput: int
    total_residual_energy: float
    alive_count: int
    head_count: int
    energy_spent: float


ROUND_FIELDS = [f for f in RoundMetrics.__dataclass_fields__]


@dataclass(frozen=True)
class LifetimeReport:
    fnd: int | None = None
    hna: int | None = None
    lnd: int | None = None


@dataclass
class ElectionSnapshot:
    round: int
    topology: Topology
    result: el.ElectionResult
    potentials: dict[int, float]


@dataclass
class SimState:
    topo: Topology
    cfg: SimConfig
    rb: RuleBase
    mode: Mode = Mode.DCHFC
    round: int = 0
    last_election: el.ElectionResult | None = None
    last_potentials: dict[int, float] = field(default_factory=dict)
    _dist: np.ndarray | None = field(default=None, repr=False)

    @property
    def dist(self) -> np.ndarray:
        if self._dist is None:
            self._dist = self.topo.distance_matrix()
        return self._dist


def run_round(state: SimState) -> RoundMetrics:
    """Advance ``state`` by one round and return that round's metrics.

    Order of work: detection (DCHFC, after warm-up), scoring, election,
    cluster joining, member uplink, head-to-sink forwarding, deaths.
    Election-side computation is free for the nodes; with
    ``energy.fuzzy_cost`` set, CHUFL nodes pay for computing it themselves.
    """
    cfg, topo, em = state.cfg, state.topo, state.cfg.energy
    state.round += 1
    for node in topo.nodes:
        if node.status is NodeStatus.CLUSTER_HEAD:
            node.status = NodeStatus.ALIVE

    alive = topo.alive_mask()
    if not alive.any():
        raise RuntimeError("run_round called on a network with no alive nodes")
    energy_before = topo.energies()
    cost = np.zeros(len(topo))
    bits = em.packet_bits

    if state.mode is Mode.DCHFC and state.round > cfg.trust.warmup_rounds:
        detect_malicious(topo, cfg.trust)

    table = score_table(topo, state.rb, em.initial_energy, state.dist)
    state.last_potentials = dict(zip(table.ids.tolist(), table.potential.tolist()))
    if state.mode is Mode.CHUFL and em.fuzzy_cost > 0:
        cost[table.ids] += em.fuzzy_cost

    offered = int(alive.sum())
    delivered = 0
    sink_d = topo.sink_distances()
    if table.ids.size == 0:
        # nobody may lead: every alive node reports straight to the sink
        state.last_election = None
        cost[alive] += tx_cost(em, bits, sink_d[alive])
        delivered = offered
        heads: list[int] = []
    else:
        scores = table.scores
        if state.mode is Mode.DCHFC:
            res = el.elect_dchfc(scores, topo, cfg.election)
        else:
            res = el.elect_chufl(scores, topo, cfg.election)
        state.last_election = res
        heads = res.heads
        for h in heads:
            topo.nodes[h].status = NodeStatus.CLUSTER_HEAD

        members = np.fromiter(res.assignment.keys(), dtype=int, count=len(res.assignment))
        their_head = np.fromiter(res.assignment.values(), dtype=int, count=len(res.assignment))
        if members.size:
            cost[members] += tx_cost(em, bits, state.dist[members, their_head])
            np.add.at(cost, their_head, rx_cost(em, bits))
        head_arr = np.asarray(heads, dtype=int)
        # droppers pay the honest head's cost: dropping never buys lifetime
        cost[head_arr] += tx_cost(em, bits, sink_d[head_arr])

        n_members = np.bincount(their_head, minlength=len(topo)) if members.size else np.zeros(len(topo), int)
        for h in heads:
            node = topo.nodes[h]
            k = int(n_members[h])
            if node.is_dropper:
                node.consecutive_drops += k
                delivered += 1
            else:
                if k:
                    node.consecutive_drops = 0
                delivered += k + 1

    charged = np.minimum(cost, energy_before)
    energy_after = energy_before - charged
    for node, e in zip(topo.nodes, energy_after):
        if node.status is NodeStatus.DEAD:
            continue
        if e <= 0.0:
            node.energy = 0.0
            node.status = NodeStatus.DEAD
        else:
            node.energy = float(e)

    alive_after = topo.alive_mask()
    return RoundMetrics(
        round=state.round,
        packets_offered=offered,
        packets_delivered=delivered,
        packets_lost=offered - delivered,
        throughput=delivered,
        total_residual_energy=float(energy_after.sum()),
        alive_count=int(alive_after.sum()),
        head_count=len(heads),
        energy_spent=float(charged.sum()),
    )


def lifetime(series: Sequence[RoundMetrics], node_count: int) -> LifetimeReport:
    fnd = hna = lnd = None
    for m in series:
        if fnd is None and m.alive_count < node_count:
            fnd = m.round
        if hna is None and m.alive_count <= node_count / 2:
            hna = m.round
        if lnd is None and m.alive_count == 0:
            lnd = m.round
    return LifetimeReport(fnd, hna, lnd)


@dataclass
class SimulationResult:
    mode: Mode
    seed: int
    rounds: list[RoundMetrics]
    lifetime: LifetimeReport
    topology: Topology
    election: ElectionSnapshot | None = None
    detected: list[int] = field(default_factory=list)

    def residual_energy_at(self, r: int) -> float:
        """Total residual energy after round ``r``; 0 once the network is dead."""
        if r <= 0:
            return float(sum(n.energy for n in self.topology.nodes))
        if r <= len(self.rounds):
            return self.rounds[r - 1].total_residual_energy
        return self.rounds[-1].total_residual_energy if self.rounds else 0.0


def run_simulation(
    cfg: SimConfig,
    seed: int | None = None,
    mode: Mode | str = Mode.DCHFC,
    topology: Topology | None = None,
    rulebase: RuleBase | None = None,
) -> SimulationResult:
    """Run rounds until the last node dies or ``cfg.max_rounds`` is hit.

    The election snapshot kept on the result is the first one taken after
    the trust warm-up (or the last one if the run ends earlier).
    """
    mode = Mode(mode)
    seed = cfg.seed if seed is None else seed
    initial = topology if topology is not None else generate_topology(cfg, seed)
    state = SimState(initial.copy(), cfg, rulebase or cfg.fuzzy.rulebase(), mode)
    snap_round = cfg.trust.warmup_rounds + 1
    series: list[RoundMetrics] = []
    snapshot = None
    while state.round < cfg.max_rounds and state.topo.alive_mask().any():
        series.append(run_round(state))
        if state.last_election is not None and (snapshot is None or snapshot.round < snap_round):
            snapshot = ElectionSnapshot(state.round, state.topo.copy(), state.last_election, state.last_potentials)
    detected = [n.id for n in state.topo.nodes if n.status is NodeStatus.MALICIOUS]
    return SimulationResult(mode, seed, series, lifetime(series, len(initial)), initial, snapshot, detected)


# -- comparison ----------------------------------------------------------------


@dataclass
class RunSummary:
    cumulative_loss: int
    mean_throughput: float
    residual_at_reference: float
    fnd: int | None
    hna: int | None
    lnd: int | None
    residual_curve: list[float]


@dataclass
class SeedComparison:
    seed: int
    reference_round: int
    a: RunSummary
    b: RunSummary


COMPARED = ("cumulative_loss", "mean_throughput", "residual_at_reference", "fnd", "hna", "lnd")


@dataclass
class ComparisonReport:
    mode_a: str
    mode_b: str
    seeds: list[SeedComparison]

    def _values(self, side: str, metric: str) -> np.ndarray:
        out = []
        for s in self.seeds:
            v = getattr(getattr(s, side), metric)
            if v is None:
                # milestone not reached: count it as one round past the horizon
                v = len(getattr(s, side).residual_curve) + 1
            out.append(v)
        return np.asarray(out, dtype=float)

    def mean(self, side: str, metric: str) -> float:
        return float(self._values(side, metric).mean())

    def deltas(self, metric: str) -> np.ndarray:
        """Per-seed ``a - b``."""
        return self._values("a", metric) - self._values("b", metric)

    def summary(self) -> dict:
        out = {"mode_a": self.mode_a, "mode_b": self.mode_b, "n_seeds": len(self.seeds), "metrics": {}}
        for m in COMPARED:
            d = self.deltas(m)
            out["metrics"][m] = {
                "mean_a": self.mean("a", m),
                "mean_b": self.mean("b", m),
                "mean_delta": float(d.mean()),
                "positive": int((d > 0).sum()),
                "negative": int((d < 0).sum()),
                "zero": int((d == 0).sum()),
            }
        out["per_seed"] = [
            {
                "seed": s.seed,
                "reference_round": s.reference_round,
                "a": {m: getattr(s.a, m) for m in COMPARED},
                "b": {m: getattr(s.b, m) for m in COMPARED},
            }
            for s in self.seeds
        ]
        return out


def _summarise(res: SimulationResult, horizon: int, reference: int) -> RunSummary:
    delivered = sum(m.packets_delivered for m in res.rounds)
    curve = [m.total_residual_energy for m in res.rounds]
    curve += [curve[-1] if curve else 0.0] * (horizon - len(curve))
    return RunSummary(
        cumulative_loss=sum(m.packets_lost for m in res.rounds),
        mean_throughput=delivered / horizon if horizon else 0.0,
        residual_at_reference=res.residual_energy_at(reference),
        fnd=res.lifetime.fnd,
        hna=res.lifetime.hna,
        lnd=res.lifetime.lnd,
        residual_curve=curve,
    )


def _compare_seed(args) -> tuple[SeedComparison, SimulationResult, SimulationResult]:
    cfg, mode_a, mode_b, seed = args
    topo = generate_topology(cfg, seed)
    rb = cfg.fuzzy.rulebase()
    ra = run_simulation(cfg, seed, mode_a, topo, rb)
    rb_ = ra if mode_a == mode_b else run_simulation(cfg, seed, mode_b, topo, rb)
    horizon = max(len(ra.rounds), len(rb_.rounds))
    ref = rb_.lifetime.hna or len(rb_.rounds)
    return (
        SeedComparison(seed, ref, _summarise(ra, horizon, ref), _summarise(rb_, horizon, ref)),
        ra,
        rb_,
    )


def compare(
    cfg: SimConfig,
    mode_a: Mode | str,
    mode_b: Mode | str,
    seeds: Sequence[int],
    workers: int = 1,
    keep_runs: bool = False,
):
    """Run both modes on the same topology for every seed.

    Throughput is averaged over the longer of the two runs (a dead network
    delivers nothing), and residual energy is read at mode_b's HNA round.
    With ``keep_runs`` the raw results come back alongside the report as
    ``{seed: (result_a, result_b)}``.
    """
    if not seeds:
        raise ValueError("compare needs at least one seed")
    mode_a, mode_b = Mode(mode_a), Mode(mode_b)
    jobs = [(cfg, mode_a, mode_b, s) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            out = list(ex.map(_compare_seed, jobs))
    else:
        out = [_compare_seed(j) for j in jobs]
    report = ComparisonReport(mode_a.value, mode_b.value, [o[0] for o in out])
    if keep_runs:
        return report, {o[0].seed: (o[1], o[2]) for o in out}
    return report


# -- artifacts -----------------------------------------------------------------


def rounds_csv(series: Sequence[RoundMetrics]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROUND_FIELDS)
    for m in series:
        w.writerow([repr(v) for v in asdict(m).values()])
    return buf.getvalue()


def write_rounds_csv(series: Sequence[RoundMetrics], path: str | Path) -> None:
    Path(path).write_text(rounds_csv(series))


def lifetime_json(report: LifetimeReport) -> str:
    return json.dumps({k: ("not reached" if v is None else v) for k, v in asdict(report).items()}, indent=2)
