"""Spatial network model: node placement, distances, neighborhoods and synthetic LQI."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, NamedTuple

import numpy as np

if TYPE_CHECKING:
    from .config import SimConfig

LQI_MAX = 255.0


class ConfigError(ValueError):
    """Raised for invalid simulation configuration values."""


class Position(NamedTuple):
    x: float
    y: float


class NodeStatus(str, enum.Enum):
    ALIVE = "alive"
    DEAD = "dead"
    MALICIOUS = "malicious"
    CLUSTER_HEAD = "cluster-head"


@dataclass
class Node:
    id: int
    pos: Position
    energy: float
    lqi: float
    consecutive_drops: int = 0
    status: NodeStatus = NodeStatus.ALIVE
    # ground truth for the blackhole model; detection sets status=MALICIOUS
    is_dropper: bool = False

    @property
    def alive(self) -> bool:
        return self.status is not NodeStatus.DEAD


@dataclass
class Topology:
    nodes: list[Node]
    field_width: float
    field_height: float
    sink_pos: Position
    tx_range: float
    rng_seed: int = 0
    _positions: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def positions(self) -> np.ndarray:
        """(n, 2) array of node coordinates, cached (positions never change)."""
        if self._positions is None or len(self._positions) != len(self.nodes):
            self._positions = np.array([[n.pos.x, n.pos.y] for n in self.nodes], dtype=float).reshape(-1, 2)
        return self._positions

    def alive_mask(self) -> np.ndarray:
        return np.fromiter((n.alive for n in self.nodes), dtype=bool, count=len(self.nodes))

    def energies(self) -> np.ndarray:
        return np.fromiter((n.energy for n in self.nodes), dtype=float, count=len(self.nodes))

    def sink_distances(self) -> np.ndarray:
        return np.hypot(*(self.positions - np.asarray(self.sink_pos)).T)

    def distance_matrix(self) -> np.ndarray:
        p = self.positions
        diff = p[:, None, :] - p[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    def copy(self) -> "Topology":
        nodes = [
            Node(n.id, n.pos, n.energy, n.lqi, n.consecutive_drops, n.status, n.is_dropper)
            for n in self.nodes
        ]
        return Topology(nodes, self.field_width, self.field_height, self.sink_pos, self.tx_range, self.rng_seed)

    def validate(self) -> None:
        ids = [n.id for n in self.nodes]
        if ids != list(range(len(ids))):
            raise ConfigError("node ids must be dense 0..n-1 in order")
        for n in self.nodes:
            if not (0 <= n.pos.x <= self.field_width and 0 <= n.pos.y <= self.field_height):
                raise ConfigError(f"node {n.id} lies outside the field")


def distance(a: Position, b: Position) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def synthetic_lqi(sink_distance: np.ndarray | float, tx_range: float, lqi_max: float = LQI_MAX):
    """LQI that decays with distance to the sink; equals lqi_max/2 at d = tx_range."""
    r2 = tx_range * tx_range
    return lqi_max * r2 / (r2 + np.square(sink_distance))


def generate_topology(cfg: "SimConfig", seed: int) -> Topology:
    """Place ``cfg.node_count`` nodes uniformly at random and flag the droppers.

    The result is a pure function of ``(cfg, seed)``.
    """
    n = cfg.node_count
    if n < 2:
        raise ConfigError("node_count must be >= 2")
    if cfg.field_width <= 0 or cfg.field_height <= 0:
        raise ConfigError("field dimensions must be positive")
    if not 0 <= cfg.malicious_count < n:
        raise ConfigError(f"malicious_count ({cfg.malicious_count}) must be in [0, node_count={n})")

    rng = np.random.default_rng(seed)
    xy = rng.uniform(0.0, 1.0, size=(n, 2)) * [cfg.field_width, cfg.field_height]
    droppers = set(rng.choice(n, size=cfg.malicious_count, replace=False).tolist())

    sink = Position(float(cfg.sink_x), float(cfg.sink_y))
    dsink = np.hypot(xy[:, 0] - sink.x, xy[:, 1] - sink.y)
    lqi = synthetic_lqi(dsink, cfg.tx_range)
    nodes = [
        Node(
            id=i,
            pos=Position(float(xy[i, 0]), float(xy[i, 1])),
            energy=float(cfg.energy.initial_energy),
            lqi=float(lqi[i]),
            is_dropper=i in droppers,
        )
        for i in range(n)
    ]
    return Topology(nodes, float(cfg.field_width), float(cfg.field_height), sink, float(cfg.tx_range), seed)


def neighbors(topo: Topology, i: int) -> set[int]:
    """Alive nodes within ``tx_range`` of node ``i`` (excluding ``i``)."""
    p = topo.positions
    d = np.hypot(*(p - p[i]).T)
    mask = (d <= topo.tx_range) & topo.alive_mask()
    mask[i] = False
    return set(np.flatnonzero(mask).tolist())


def neighbor_matrix(topo: Topology, dist: np.ndarray | None = None) -> np.ndarray:
    """Boolean adjacency over alive nodes; the diagonal is False."""
    if dist is None:
        dist = topo.distance_matrix()
    alive = topo.alive_mask()
    adj = (dist <= topo.tx_range) & alive[:, None] & alive[None, :]
    np.fill_diagonal(adj, False)
    return adj


_CSV_FIELDS = ["id", "x", "y", "energy", "lqi", "is_dropper"]


def write_topology_csv(topo: Topology, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_CSV_FIELDS)
        for n in topo.nodes:
            w.writerow([n.id, repr(n.pos.x), repr(n.pos.y), repr(n.energy), repr(n.lqi), int(n.is_dropper)])


def read_topology_csv(
    path: str | Path,
    field_width: float,
    field_height: float,
    sink_pos: Iterable[float],
    tx_range: float,
) -> Topology:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    nodes = [
        Node(
            id=int(r["id"]),
            pos=Position(float(r["x"]), float(r["y"])),
            energy=float(r["energy"]),
            lqi=float(r["lqi"]),
            is_dropper=bool(int(r["is_dropper"])),
        )
        for r in rows
    ]
    topo = Topology(nodes, float(field_width), float(field_height), Position(*map(float, sink_pos)), float(tx_range))
    topo.validate()
    return topo
