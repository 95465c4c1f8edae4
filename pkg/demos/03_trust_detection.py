"""A packet-dropping head, and how the trust factor removes it.

TF = 100 * x**n where n counts the packets a node dropped in a row. Once
TF falls to the threshold the node stays a member but is never elected
again. The baseline has no such check, so the dropper keeps winning.
"""
from dchfc import SimConfig, trust_factor
from dchfc.simulation import Mode, SimState, run_round
from dchfc.topology import generate_topology

x, ttf = 0.9, 50
n_needed = next(n for n in range(100) if trust_factor(n, x) <= ttf)
print(f"x={x}: TF drops to {trust_factor(n_needed, x):.1f} after {n_needed} consecutive drops")

cfg = SimConfig()
topo = generate_topology(cfg, seed=3)
for mode in Mode:
    state = SimState(topo.copy(), cfg, cfg.fuzzy.rulebase(), mode)
    lost = [run_round(state).packets_lost for _ in range(30)]
    flagged = sum(n.status.value == "malicious" for n in state.topo.nodes)
    print(f"{mode.value:6s} lost per round: {lost[:12]} ... total {sum(lost)}, flagged {flagged}")
