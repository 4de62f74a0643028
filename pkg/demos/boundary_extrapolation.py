"""Why local constant fits sag at the edge of the data and local linear
fits do not.

Draws a sample whose mean keeps rising toward the right, then predicts at
the last design point using only the observations to its left.  The local
constant fit averages points that all sit below the target, so it comes in
low; the signed-weight local linear fit extrapolates the trend; the
monotone-corrected fit stays close to it while keeping a usable
distribution behind the number.
"""

import os

import numpy as np

from monollr.estimators import EstimatorConfig, RegressionSample, point_predict

OUT_DIR = os.path.join(os.path.dirname(__file__), "output")

rng = np.random.default_rng(7)
n = 300
xs = np.arange(1, n + 1) / n
ys = np.sin(xs) + 0.1 * rng.standard_normal(n)
sample = RegressionSample(xs, ys)

# hold out the last point and predict it from everything to its left
target_x = float(xs[-1])
target_y = float(ys[-1])
train = sample.without_index(n - 1)
cfg = EstimatorConfig(b=40.0, window="one_sided_left")

print(f"predicting at x = {target_x:.3f} (true mean {np.sin(target_x):.4f},"
      f" observed {target_y:.4f})")
preds = {}
for method in ("LC", "LL", "LLH", "LLM"):
    preds[method] = point_predict(train, target_x, cfg, method)
    print(f"  {method:3s}: {preds[method]:.4f}"
          f"  (error vs mean {preds[method] - np.sin(target_x):+.4f})")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
    print("matplotlib not installed; skipping the plot")

if plt is not None:
    os.makedirs(OUT_DIR, exist_ok=True)
    zoom = xs > 0.7
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.scatter(xs[zoom], ys[zoom], s=8, alpha=0.4, label="sample")
    ax.plot(xs[zoom], np.sin(xs[zoom]), "k--", lw=1, label="true mean")
    for method, marker in (("LC", "v"), ("LL", "o"), ("LLH", "s"), ("LLM", "D")):
        ax.scatter([target_x], [preds[method]], marker=marker, s=60,
                   label=f"{method} prediction", zorder=3)
    ax.axvline(target_x, color="gray", lw=0.5)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("One-sided prediction at the right edge")
    ax.legend(fontsize=8)
    path = os.path.join(OUT_DIR, "boundary_extrapolation.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")
