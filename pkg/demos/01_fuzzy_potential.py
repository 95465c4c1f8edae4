"""How the fuzzy engine turns three normalized inputs into a Potential.

Each input (residual energy, reachability, reception power) is fuzzified
into Low/Medium/High, the 27-rule table fires with min-AND, the clipped
output terms are max-aggregated and the centroid is the crisp Potential.
"""
import numpy as np

from dchfc.fuzzy import default_rulebase, evaluate, infer, defuzzify_centroid

rb = default_rulebase()

print("input terms:")
for term, mf in rb.inputs[0].terms.items():
    print(f"  {term:7s} {mf}")

probe = [0.7, 0.4, 0.9]
agg = infer(rb, probe)
print(f"\nenergy={probe[0]} reach={probe[1]} rx_power={probe[2]}")
print(f"  aggregated support {agg.support}, centroid {defuzzify_centroid(agg):.4f}")

# Sweep energy with the other two inputs held at the middle: the surface
# is monotone because the rule table is.
energies = np.linspace(0, 1, 11)
pot = evaluate(rb, np.column_stack([energies, np.full(11, 0.5), np.full(11, 0.5)]))
print("\nenergy sweep (reach=rx_power=0.5):")
for e, p in zip(energies, pot):
    print(f"  {e:4.1f} -> {p:.3f} " + "#" * int(40 * p))
