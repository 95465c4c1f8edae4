"""Static SVG figures: cluster maps and metric curves."""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .election import ElectionResult  # noqa: E402
from .topology import NodeStatus, Topology  # noqa: E402

# fixed hash salt and no date keep the SVG bytes reproducible
plt.rcParams["svg.hashsalt"] = "dchfc"
_META = {"Date": None}


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)


def plot_clusters(topo: Topology, result: ElectionResult, path: str | Path, title: str = "") -> None:
    """Members linked to their heads; heads red, detected malicious nodes black."""
    pos = topo.positions
    fig, ax = plt.subplots(figsize=(6, 6))
    for member, head in result.assignment.items():
        ax.plot(*pos[[member, head]].T, color="0.75", lw=0.6, zorder=1)
    mal = [n.id for n in topo.nodes if n.status is NodeStatus.MALICIOUS]
    dead = [n.id for n in topo.nodes if n.status is NodeStatus.DEAD]
    others = [n.id for n in topo.nodes if n.id not in set(result.heads) | set(mal) | set(dead)]
    ax.scatter(*pos[others].T, s=12, c="tab:blue", label="member", zorder=2)
    if mal:
        ax.scatter(*pos[mal].T, s=18, c="black", label="malicious", zorder=3)
    if dead:
        ax.scatter(*pos[dead].T, s=10, marker="x", c="0.5", label="dead", zorder=2)
    ax.scatter(*pos[result.heads].T, s=40, c="red", label="cluster head", zorder=4)
    ax.scatter([topo.sink_pos.x], [topo.sink_pos.y], s=80, marker="^", c="tab:green", label="sink", zorder=5)
    ax.set_xlim(0, topo.field_width)
    ax.set_ylim(0, topo.field_height)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=7)
    _save(fig, path)


def plot_series(
    curves: Mapping[str, Sequence[float]], path: str | Path, ylabel: str, title: str = "", xlabel: str = "round"
) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, ys in curves.items():
        ax.plot(range(1, len(ys) + 1), ys, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def plot_lifetime(milestones: Mapping[str, Mapping[str, float]], path: str | Path, title: str = "") -> None:
    """Grouped bars of FND / HNA / LND per mode."""
    names = ("fnd", "hna", "lnd")
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / max(1, len(milestones))
    for k, (label, vals) in enumerate(milestones.items()):
        ax.bar([i + k * width for i in range(len(names))], [vals[n] for n in names], width, label=label)
    ax.set_xticks([i + width * (len(milestones) - 1) / 2 for i in range(len(names))])
    ax.set_xticklabels([n.upper() for n in names])
    ax.set_ylabel("round")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)
