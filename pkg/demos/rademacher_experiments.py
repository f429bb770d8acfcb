"""Small seed sweeps over random sign matrices: Boolean-slice counts and exact d, d2.

Run from the repository root:  python demos/rademacher_experiments.py
"""

# %%
import statistics
from collections import Counter

from gapforge.gadget import (
    boolean_slice_kernel,
    exact_d2_real,
    exact_min_distance_real,
    gadget_params,
    sample_gadget,
    sample_rademacher,
    slice_expectation,
    small_ball_estimate,
)

# %% |ker(R) ∩ H_2^12| for 3 x 12 sign matrices: the exact mean is 66 / 8
counts = [len(boolean_slice_kernel(sample_rademacher(3, 12, s), 2)) for s in range(500)]
print("mean over 500 seeds:", statistics.mean(counts), " exact:", float(slice_expectation(12, 2, 3)))
print("histogram:", sorted(Counter(counts).items()))

# %% exact d and d2 of ker(R) at h = 6, N = 12
for seed in range(8):
    R = sample_rademacher(6, 12, seed)
    d = exact_min_distance_real(R).size
    d2 = exact_d2_real(R, start=d + 1).size
    print(f"seed {seed}: d = {d}, d2 = {d2}, d2/d = {d2 / d:.2f}")

# %% parameter derivation for a sampled gadget
p = gadget_params(2, "1/2")
print(p)
g = sample_gadget(2, "1/2", seed=0)
print("R is", g.R.rows, "x", g.R.cols, "; T density", sum(map(sum, g.T.tolist())) / (g.T.rows * g.T.cols))

# %% joint small-ball probability for an orthonormal pair, exact vs Monte Carlo
u1 = [0.5, 0.5, 0.5, 0.5, 0, 0, 0, 0]
u2 = [0, 0, 0, 0, 0.5, 0.5, 0.5, 0.5]
print("exact:", small_ball_estimate(u1, u2, 0.1))
print("monte carlo:", small_ball_estimate(u1, u2, 0.1, trials=50_000, seed=1, mode="montecarlo"))
