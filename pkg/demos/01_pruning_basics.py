"""Why a missing edge can pin down a node.

Two range measurements leave two mirror-image candidate positions. In a
unit-disk network a candidate can be impossible: if it sits within sensing
range of a node the target never heard, the deployment could not have
produced it. This script builds the smallest such scene and walks through
the decision.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from udgloc import (
    AlgorithmConfig,
    LocalizationState,
    Point,
    PlacementRecord,
    bilaterate,
    udg_from_positions,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# Four nodes, sensing range 1. d hears a and c but NOT b.
theta = 1.0
pts = [Point(0.0, 0.0), Point(0.7, 0.6), Point(1.4, 0.0), Point(0.7, -0.5)]
names = "abcd"
g = udg_from_positions(pts, theta)

print("edges:", sorted(g.deltas))
print("node d (id 3) hears:", [names[i] for i in g.neighbors[3]])

# Localize a, b, c at their true positions, then place d from its two
# ranges. The mirror candidate (0.7, +0.5) lands right next to b.
state = LocalizationState(g)
for node in (0, 1, 2):
    state.place(node, g.positions[node],
                PlacementRecord(node=node, method="seed", position=g.positions[node]))

result = bilaterate(3, state, g, AlgorithmConfig(mode="violations"))
rec = result.record
print("candidates:", [tuple(round(c, 3) for c in p) for p in rec.candidates])
print("violation verdicts:", rec.violations)
print(f"chosen position: ({result.position.x:.3f}, {result.position.y:.3f})")
print(f"true position:   ({g.positions[3].x:.3f}, {g.positions[3].y:.3f})")

fig, ax = plt.subplots(figsize=(6, 5))
for (u, v) in g.deltas:
    ax.plot([pts[u].x, pts[v].x], [pts[u].y, pts[v].y], "k-", lw=1, alpha=0.5)
for i, p in enumerate(pts):
    ax.plot(p.x, p.y, "o", ms=10, color="tab:blue")
    ax.annotate(names[i], (p.x, p.y), textcoords="offset points", xytext=(8, 6))
ax.add_patch(plt.Circle(pts[1], theta, fill=False, ls="--", color="tab:red", alpha=0.7))
for cand, bad in zip(rec.candidates, rec.violations):
    color = "tab:red" if bad else "tab:green"
    label = "pruned candidate" if bad else "accepted candidate"
    ax.plot(cand.x, cand.y, "x", ms=12, mew=3, color=color, label=label)
ax.set_aspect("equal")
ax.legend(loc="lower left")
ax.set_title("The dashed disk is b's sensing range;\nd never heard b, so no candidate may fall inside it")
fig.tight_layout()
fig.savefig(OUT / "pruning_basics.png", dpi=120)
print(f"figure written to {OUT / 'pruning_basics.png'}")
