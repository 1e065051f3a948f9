"""The satisfaction curve behind every allocation decision.

Satisfaction (QoE) follows a logistic curve in the mean resource demand of
the assigned tier: steep gains around the midpoint, diminishing returns
beyond it.  That shape is the whole reason balanced tier assignments beat
maxing out single users.  This script prints the bundled three-tier catalog
and draws the curve with the tiers marked.

Run:  python demos/01_qoe_curve.py [out.svg]
"""

import sys

import numpy as np

from edgealloc import default_catalog, default_qoe_params, qoe_of_demand

params = default_qoe_params()
catalog = default_catalog(params)

print(f"logistic parameters: max={params.max_value}, growth={params.growth_rate}, "
      f"midpoint={params.midpoint}")
print()
print("tier  demand           mean  qoe")
for lvl in catalog.levels:
    print(f"  W{lvl.index}  {str(lvl.demand.components):16s} {lvl.demand.mean():4.1f}  {lvl.qoe:.2f}")

# the marginal value of an upgrade collapses past the midpoint
w1, w2, w3 = catalog.levels
print()
print(f"upgrade W1 -> W2 gains {w2.qoe - w1.qoe:.2f} QoE")
print(f"upgrade W2 -> W3 gains {w3.qoe - w2.qoe:.2f} QoE for much more resource")

# draw the curve
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

means = np.linspace(0, 8, 400)
values = [qoe_of_demand((x,), params) for x in means]

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(means, values)
for lvl in catalog.levels:
    ax.plot(lvl.demand.mean(), lvl.qoe, "o", color="tab:red")
    ax.annotate(f"W{lvl.index}", (lvl.demand.mean(), lvl.qoe),
                textcoords="offset points", xytext=(6, -10))
ax.set_xlabel("mean resource demand")
ax.set_ylabel("QoE")
ax.set_title("logistic satisfaction curve with the bundled tiers")
ax.grid(alpha=0.3)
fig.tight_layout()

out = sys.argv[1] if len(sys.argv) > 1 else "qoe_curve.svg"
fig.savefig(out)
print(f"\ncurve written to {out}")
