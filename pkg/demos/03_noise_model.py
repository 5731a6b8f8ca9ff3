"""The range-error model, visually.

Measured ranges are the true distances plus a Gaussian error whose mean
depends on the sensing range (a slight underestimate for short ranges,
overestimate for long ones) and whose spread is the error magnitude P as
a fraction: one draw per link, symmetric both ways.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from udgloc import NoiseModel, Point, apply_noise, ranging_bias, udg_from_positions

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# Dense deployment: every pair in range, tens of thousands of links.
rng = np.random.default_rng(3)
pts = [Point(x, y) for x, y in rng.uniform(0, 7.0, size=(180, 2))]
graph = udg_from_positions(pts, 10.0)
print(f"{graph.n} nodes, {graph.edge_count} measured links")

P = 10.0
noisy = apply_noise(graph, NoiseModel(P, graph.theta, rng_seed=1))
errors = np.array([noisy.deltas[e] - graph.deltas[e] for e in sorted(graph.deltas)])
print(f"P={P:g}: sample mean {errors.mean():+.4f} m "
      f"(model mean {ranging_bias(graph.theta):+.4f} m), "
      f"sample std {errors.std(ddof=1):.4f} m (model std {P / 100:.4f} m)")

fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4.5))

left.hist(errors, bins=60, density=True, alpha=0.7, label="measured errors")
xs = np.linspace(errors.min(), errors.max(), 300)
mu, sigma = ranging_bias(graph.theta), P / 100.0
left.plot(xs, np.exp(-0.5 * ((xs - mu) / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi)),
          "k-", lw=2, label="model density")
left.axvline(mu, color="tab:red", ls="--", label="model mean")
left.set_xlabel("range error (m)")
left.set_title(f"Error distribution at P={P:g}, range {graph.theta:g} m")
left.legend()

thetas = np.linspace(0.0, 40.0, 200)
right.plot(thetas, [ranging_bias(t) for t in thetas], lw=2)
right.axhline(0.0, color="0.6", lw=0.8)
right.set_xlabel("sensing range (m)")
right.set_ylabel("mean range error (m)")
right.set_title("Systematic bias vs. sensing range")

fig.tight_layout()
fig.savefig(OUT / "noise_model.png", dpi=120)
print(f"figure written to {OUT / 'noise_model.png'}")
