"""Cluster-head election (spatially filtered DCHFC and the CHUFL baseline) and cluster joining."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .potential import PotentialScore
from .topology import ConfigError, NodeStatus, Topology

ROUNDING = {"ceil": math.ceil, "floor": math.floor, "round": lambda v: int(math.floor(v + 0.5))}


class ElectionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ElectionConfig:
    p_initial: float = 0.08
    d_threshold: float = 200.0
    chufl_head_pct: float = 0.14
    rounding: str = "ceil"
    strict_initial_spacing: bool = False

    def __post_init__(self):
        if not 0.0 < self.p_initial < 1.0:
            raise ConfigError(f"election.p_initial must lie in (0, 1), got {self.p_initial}")
        if self.d_threshold <= 0:
            raise ConfigError("election.d_threshold must be positive")
        if not 0.0 < self.chufl_head_pct <= 1.0:
            raise ConfigError(f"election.chufl_head_pct must lie in (0, 1], got {self.chufl_head_pct}")
        if self.rounding not in ROUNDING:
            raise ConfigError(f"election.rounding must be one of {sorted(ROUNDING)}")

    def head_count(self, fraction: float, n: int) -> int:
        # guard against 0.07 * 100 = 7.000000000000001 style ceil surprises
        k = ROUNDING[self.rounding](round(fraction * n, 9))
        return max(1, min(n, int(k)))


@dataclass
class ElectionResult:
    heads: list[int]
    assignment: dict[int, int] = field(default_factory=dict)
    rejected: list[int] = field(default_factory=list)
    initial_count: int = 0
    out_of_range: set[int] = field(default_factory=set)

    @property
    def clusters(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {h: [] for h in self.heads}
        for node, head in self.assignment.items():
            out[head].append(node)
        return out


def rank_scores(scores: Iterable[PotentialScore]) -> list[PotentialScore]:
    """Potential descending, ties broken by ascending node id."""
    return sorted(scores, key=lambda s: (-s.potential, s.node_id))


def select_heads_dchfc(
    scores: Sequence[PotentialScore], topo: Topology, ecfg: ElectionConfig
) -> tuple[list[int], list[int]]:
    """Greedy spatially-distributed election.

    The top ``p_initial`` fraction of ranked nodes are admitted outright;
    every later candidate needs its nearest admitted head to be strictly
    farther than ``d_threshold``. Returns ``(heads, rejected)`` in
    admission / examination order.
    """
    if not scores:
        raise ElectionError("no eligible nodes to elect from")
    ranked = rank_scores(scores)
    k0 = ecfg.head_count(ecfg.p_initial, len(ranked))
    if ecfg.strict_initial_spacing:
        k0 = 1

    pos = topo.positions
    heads = [s.node_id for s in ranked[:k0]]
    rejected = []
    # running nearest-head distance for every node; updated as heads are admitted
    dmin = np.min(np.hypot(*(pos[:, None, :] - pos[heads][None, :, :]).transpose(2, 0, 1)), axis=1)
    for s in ranked[k0:]:
        i = s.node_id
        if dmin[i] > ecfg.d_threshold:
            heads.append(i)
            dmin = np.minimum(dmin, np.hypot(*(pos - pos[i]).T))
        else:
            rejected.append(i)
    return heads, rejected


def select_heads_chufl(
    scores: Sequence[PotentialScore],
    ecfg: ElectionConfig,
    malicious: Iterable[int] | None = None,
) -> list[int]:
    """Top ``chufl_head_pct`` of the candidates by potential, no spatial filter.

    Passing ``malicious`` removes those ids from candidacy; the baseline
    mode leaves it ``None`` so undetected droppers stay electable.
    """
    cand = list(scores)
    if malicious is not None:
        bad = set(malicious)
        cand = [s for s in cand if s.node_id not in bad]
    if not cand:
        raise ElectionError("no eligible nodes to elect from")
    k = ecfg.head_count(ecfg.chufl_head_pct, len(cand))
    return [s.node_id for s in rank_scores(cand)[:k]]


def assign_clusters(
    topo: Topology, heads: Sequence[int], out_of_range: set[int] | None = None
) -> dict[int, int]:
    """Join every alive non-head node to its nearest head.

    Signal strength falls with distance, so the strongest head is the
    closest; exact ties go to the smaller head id. Members farther than
    ``tx_range`` from every head still join and are added to
    ``out_of_range`` when a set is supplied.
    """
    if not heads:
        raise ElectionError("cannot form clusters without heads")
    order = np.array(sorted(heads))
    pos = topo.positions
    diff = pos[:, None, :] - pos[order][None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    # argmin returns the first minimum, i.e. the smallest head id on ties
    best = d.argmin(axis=1)
    head_set = set(heads)
    assignment = {}
    for node in topo.nodes:
        if not node.alive or node.id in head_set:
            continue
        j = best[node.id]
        assignment[node.id] = int(order[j])
        if out_of_range is not None and d[node.id, j] > topo.tx_range:
            out_of_range.add(node.id)
    return assignment


def elect_dchfc(scores: Sequence[PotentialScore], topo: Topology, ecfg: ElectionConfig) -> ElectionResult:
    heads, rejected = select_heads_dchfc(scores, topo, ecfg)
    k0 = 1 if ecfg.strict_initial_spacing else ecfg.head_count(ecfg.p_initial, len(scores))
    res = ElectionResult(heads, rejected=rejected, initial_count=min(k0, len(heads)))
    res.assignment = assign_clusters(topo, heads, res.out_of_range)
    return res


def elect_chufl(
    scores: Sequence[PotentialScore], topo: Topology, ecfg: ElectionConfig, malicious: Iterable[int] | None = None
) -> ElectionResult:
    heads = select_heads_chufl(scores, ecfg, malicious)
    res = ElectionResult(heads, initial_count=len(heads))
    res.assignment = assign_clusters(topo, heads, res.out_of_range)
    return res


ROLE_INITIAL = "initial-head"
ROLE_SPATIAL = "spatial-head"
ROLE_MEMBER = "member"
ROLE_REJECTED = "rejected"
ROLE_MALICIOUS = "malicious"
ROLE_DEAD = "dead"


def roles(topo: Topology, result: ElectionResult) -> dict[int, str]:
    rejected = set(result.rejected)
    initial = set(result.heads[: result.initial_count])
    spatial = set(result.heads[result.initial_count :])
    out = {}
    for n in topo.nodes:
        if n.id in initial:
            out[n.id] = ROLE_INITIAL
        elif n.id in spatial:
            out[n.id] = ROLE_SPATIAL
        elif n.status is NodeStatus.DEAD:
            out[n.id] = ROLE_DEAD
        elif n.status is NodeStatus.MALICIOUS:
            out[n.id] = ROLE_MALICIOUS
        elif n.id in rejected:
            out[n.id] = ROLE_REJECTED
        else:
            out[n.id] = ROLE_MEMBER
    return out


def write_election_csv(
    topo: Topology, result: ElectionResult, potentials: dict[int, float], path: str | Path
) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "potential", "role", "assigned_head"])
        for nid, role in roles(topo, result).items():
            pot = potentials.get(nid)
            head = nid if role in (ROLE_INITIAL, ROLE_SPATIAL) else result.assignment.get(nid, "")
            w.writerow([nid, "" if pot is None else repr(pot), role, head])
