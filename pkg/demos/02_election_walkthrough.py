"""One DCHFC election on the default 122-node field, next to CHUFL.

DCHFC takes the top 8% of nodes by Potential unconditionally, then walks
the rest in Potential order and keeps a candidate only if it is more than
d_threshold metres from every head so far. CHUFL just keeps the top 14%.
Writes clusters_dchfc.svg and clusters_chufl.svg to the current directory.
"""
import numpy as np

from dchfc import SimConfig, default_rulebase, generate_topology, score_all
from dchfc.election import ElectionConfig, elect_chufl, elect_dchfc
from dchfc.plots import plot_clusters

cfg = SimConfig()
topo = generate_topology(cfg, seed=1)
scores = score_all(topo, default_rulebase(), cfg.energy.initial_energy)
ecfg = ElectionConfig()

for name, result in (("dchfc", elect_dchfc(scores, topo, ecfg)), ("chufl", elect_chufl(scores, topo, ecfg))):
    heads = np.array([topo.nodes[h].pos for h in result.heads])
    gaps = np.hypot(*(heads[:, None] - heads[None]).transpose(2, 0, 1))
    np.fill_diagonal(gaps, np.inf)
    sizes = sorted((len(m) for m in result.clusters.values()), reverse=True)
    print(f"{name}: {len(result.heads)} heads, closest pair {gaps.min():.0f} m, cluster sizes {sizes}")
    plot_clusters(topo, result, f"clusters_{name}.svg", title=name.upper())
