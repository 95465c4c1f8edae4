import numpy as np
import pytest

from dchfc.config import SimConfig
from dchfc.fuzzy import default_rulebase
from dchfc.topology import Node, Position, Topology, synthetic_lqi


def make_topo(points, tx_range=250.0, sink=(0.0, 0.0), energy=0.5, field=1000.0, lqi=None, droppers=()):
    """Hand-built topology from a list of (x, y) points."""
    sink = Position(*sink)
    nodes = []
    for i, (x, y) in enumerate(points):
        q = synthetic_lqi(np.hypot(x - sink.x, y - sink.y), tx_range) if lqi is None or lqi[i] is None else lqi[i]
        nodes.append(Node(i, Position(float(x), float(y)), float(energy), float(q), is_dropper=i in droppers))
    return Topology(nodes, field, field, sink, tx_range)


@pytest.fixture(scope="session")
def rulebase():
    return default_rulebase()


@pytest.fixture
def cfg():
    return SimConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


# criterion id -> (passed, detail); printed by the acceptance summary hook
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key}: {'PASS' if ok else 'FAIL'}  {detail}")
