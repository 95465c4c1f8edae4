"""Crisp fuzzy inputs per node and the resulting Potential scores."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fuzzy
from .topology import NodeStatus, Topology, neighbor_matrix

ISOLATION_PENALTY = 2.0
SINK_DISTANCE_FLOOR = 1.0


@dataclass(frozen=True)
class NodeInputs:
    residual_energy: float
    reachability: float
    reception_power: float


@dataclass(frozen=True)
class PotentialScore:
    node_id: int
    potential: float


def _reachability_from(dist: np.ndarray, adj: np.ndarray, tx_range: float) -> np.ndarray:
    # divisor is the neighbour count plus one, summing over the neighbours only
    count = adj.sum(axis=1)
    total = np.where(adj, dist, 0.0).sum(axis=1)
    r = total / (count + 1)
    return np.where(count > 0, r, ISOLATION_PENALTY * tx_range)


def reachability(topo: Topology, i: int) -> float:
    """Sum of distances to alive neighbours divided by (neighbour count + 1).

    An isolated node gets ``2 * tx_range``. Small values mean a well
    connected node.
    """
    p = topo.positions
    d = np.hypot(*(p - p[i]).T)
    mask = (d <= topo.tx_range) & topo.alive_mask()
    mask[i] = False
    if not mask.any():
        return ISOLATION_PENALTY * topo.tx_range
    return float(d[mask].sum() / (mask.sum() + 1))


def reception_power(topo: Topology, i: int) -> float:
    node = topo.nodes[i]
    d = np.hypot(node.pos.x - topo.sink_pos.x, node.pos.y - topo.sink_pos.y)
    return node.lqi / max(float(d), SINK_DISTANCE_FLOOR)


def eligible_mask(topo: Topology) -> np.ndarray:
    return np.fromiter(
        (n.status not in (NodeStatus.DEAD, NodeStatus.MALICIOUS) for n in topo.nodes),
        dtype=bool,
        count=len(topo),
    )


@dataclass
class ScoreTable:
    """Everything computed while scoring one round, indexed like ``ids``."""

    ids: np.ndarray
    raw: np.ndarray  # (k, 3): energy J, reachability m, reception power
    normalized: np.ndarray  # (k, 3) in [0, 1]
    potential: np.ndarray

    @property
    def scores(self) -> list[PotentialScore]:
        return [PotentialScore(int(i), float(p)) for i, p in zip(self.ids, self.potential)]


def score_table(
    topo: Topology,
    rb: fuzzy.RuleBase,
    initial_energy: float,
    dist: np.ndarray | None = None,
) -> ScoreTable:
    if dist is None:
        dist = topo.distance_matrix()
    ids = np.flatnonzero(eligible_mask(topo))
    if ids.size == 0:
        empty = np.zeros((0, 3))
        return ScoreTable(ids, empty, empty, np.zeros(0))

    adj = neighbor_matrix(topo, dist)
    reach = _reachability_from(dist[ids], adj[ids], topo.tx_range)
    energy = topo.energies()[ids]
    dsink = np.maximum(topo.sink_distances()[ids], SINK_DISTANCE_FLOOR)
    lqi = np.array([topo.nodes[i].lqi for i in ids])
    rp = lqi / dsink

    rp_max = rp.max()
    norm = np.column_stack(
        [
            energy / initial_energy,
            np.maximum(0.0, 1.0 - reach / topo.tx_range),
            rp / rp_max if rp_max > 0 else np.zeros_like(rp),
        ]
    )
    norm = np.clip(norm, 0.0, 1.0)
    pot = fuzzy.evaluate(rb, norm)
    return ScoreTable(ids, np.column_stack([energy, reach, rp]), norm, pot)


def score_all(topo: Topology, rb: fuzzy.RuleBase, initial_energy: float | None = None) -> list[PotentialScore]:
    """Potential for every alive, non-malicious node, ordered by node id.

    ``initial_energy`` defaults to the largest energy present, which is the
    deployment energy for a freshly generated topology.
    """
    if initial_energy is None:
        initial_energy = max((n.energy for n in topo.nodes), default=1.0) or 1.0
    return score_table(topo, rb, initial_energy).scores


def write_score_csv(table: ScoreTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "node_id",
                "residual_energy",
                "reachability",
                "reception_power",
                "energy_norm",
                "reachability_norm",
                "reception_power_norm",
                "potential",
            ]
        )
        for i, raw, norm, p in zip(table.ids, table.raw, table.normalized, table.potential):
            w.writerow([int(i), *map(repr, map(float, raw)), *map(repr, map(float, norm)), repr(float(p))])
