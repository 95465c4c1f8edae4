"""Exponential trust factor and blackhole detection."""
from __future__ import annotations

from dataclasses import dataclass

from .topology import ConfigError, NodeStatus, Topology


@dataclass(frozen=True)
class TrustConfig:
    x: float = 0.9
    ttf: float = 50.0
    warmup_rounds: int = 5

    def __post_init__(self):
        if not 0.0 < self.x < 1.0:
            raise ConfigError(f"trust.x must lie in (0, 1), got {self.x}")
        if not 0.0 < self.ttf <= 100.0:
            raise ConfigError(f"trust.ttf must lie in (0, 100], got {self.ttf}")
        if self.warmup_rounds < 0:
            raise ConfigError("trust.warmup_rounds must be >= 0")


def trust_factor(n: int, x: float) -> float:
    """Trust percentage ``100 * x**n`` after ``n`` consecutive drops."""
    if not 0.0 < x < 1.0:
        raise ConfigError(f"decay base must lie in (0, 1), got {x}")
    if n < 0:
        raise ValueError("drop count must be non-negative")
    return 100.0 * x**n


def detect_malicious(topo: Topology, tcfg: TrustConfig) -> set[int]:
    """Flag every node whose trust factor is at or below the threshold.

    Detected nodes are marked ``NodeStatus.MALICIOUS`` in place; dead nodes
    are never re-labelled. Returns the ids of all nodes meeting the
    threshold, including ones detected on an earlier call.
    """
    detected = set()
    for node in topo.nodes:
        if trust_factor(node.consecutive_drops, tcfg.x) <= tcfg.ttf:
            detected.add(node.id)
            if node.status is not NodeStatus.DEAD:
                node.status = NodeStatus.MALICIOUS
    return detected
