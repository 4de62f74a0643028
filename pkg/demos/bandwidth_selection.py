"""Picking a bandwidth by local delete-one prediction error.

Scores a grid of candidate bandwidths at one design point: for each of the
m nearest neighbors, remove it, predict its response from the rest, and sum
the squared errors.  Small bandwidths chase noise, large ones flatten the
curve; the minimum sits in between.
"""

import os

import numpy as np

from monollr.bandwidth import CvConfig, select_bandwidth
from monollr.estimators import EstimatorConfig, RegressionSample

OUT_DIR = os.path.join(os.path.dirname(__file__), "output")

rng = np.random.default_rng(21)
n = 400
xs = np.arange(1, n + 1) / n
ys = np.sin(3.0 * xs) + 0.15 * rng.standard_normal(n)
sample = RegressionSample(xs, ys)

x = 0.5
candidates = tuple(float(b) for b in range(4, 81, 4))
cv = CvConfig(candidates=candidates, method="LL")
result = select_bandwidth(sample, x, cv, EstimatorConfig(b=candidates[0]))

print(f"delete-one error at x = {x} over m = {cv.m or 'default'} neighbors")
for b in candidates:
    err = result.err_by_b[b]
    mark = "  <-- best" if b == result.best_b else ""
    print(f"  b = {b:5.1f}: err = {err:.5f}{mark}")
print(f"selected b = {result.best_b:g}"
      f"  (h = {result.best_b / n:.4f} in regressor units)")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
    print("matplotlib not installed; skipping the plot")

if plt is not None:
    os.makedirs(OUT_DIR, exist_ok=True)
    errs = [result.err_by_b[b] for b in candidates]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(candidates, errs, "o-", ms=4)
    ax.axvline(result.best_b, color="tab:red", lw=1,
               label=f"selected b = {result.best_b:g}")
    ax.set_xlabel("candidate bandwidth b (observation counts)")
    ax.set_ylabel("delete-one squared error")
    ax.set_title("Local bandwidth selection")
    ax.legend(fontsize=8)
    path = os.path.join(OUT_DIR, "bandwidth_selection.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")
