"""How much connectivity does each mode need?

Noiseless deployments at increasing average degree, localized both ways.
Pruning reaches high recall several degrees earlier than the pure
baseline because it keeps working where nodes have only two references.

A reduced trial count keeps this demo quick; the bundled acceptance suite
runs the full 20-trial version.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from udgloc import ExperimentConfig, run_sweep_degree, summarize

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

config = ExperimentConfig(
    experiment="sweep-degree",
    n=100,
    area_side=100.0,
    degrees=tuple(float(d) for d in range(4, 19, 2)),
    trials=5,
    base_seed=1,
    triple_cap=40,
    output_path=OUT / "recall_sweep.csv",
)
rows = run_sweep_degree(config)
means = summarize(rows, "avg_degree")

fig, ax = plt.subplots(figsize=(7, 4.5))
for mode, style in (("violations", "o-"), ("pure", "s--")):
    ys = [means[(mode, d)]["mean_recall"] for d in config.degrees]
    ax.plot(config.degrees, ys, style, label=mode)
    print(f"{mode:10s}:",
          " ".join(f"{d:.0f}:{y:5.1f}" for d, y in zip(config.degrees, ys)))
ax.axhline(99.0, color="0.6", ls=":", label="99% recall")
ax.set_xlabel("average degree")
ax.set_ylabel("mean recall (%)")
ax.set_title(f"Recall vs. connectivity (n={config.n}, {config.trials} trials/point)")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "recall_vs_connectivity.png", dpi=120)
print(f"rows written to {config.output_path}")
print(f"figure written to {OUT / 'recall_vs_connectivity.png'}")
