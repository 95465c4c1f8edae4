"""DCHFC vs CHUFL over several seeds: loss, throughput, energy and lifetime.

Prints per-metric means and how many seeds favour each protocol. Pass a
seed count as the first argument (default 5); the full 20 seeds takes
about a minute and a half on one core.
"""
import sys

from dchfc import SimConfig, compare

n = int(sys.argv[1]) if len(sys.argv) > 1 else 5
report = compare(SimConfig(), "dchfc", "chufl", range(1, n + 1))
print(f"{'metric':24s} {'dchfc':>10s} {'chufl':>10s}  a>b a<b")
for metric, row in report.summary()["metrics"].items():
    print(f"{metric:24s} {row['mean_a']:10.2f} {row['mean_b']:10.2f}  {row['positive']:3d} {row['negative']:3d}")
