"""
Counting prediction errors four ways
====================================

How wrong is a predictor?  Counting wrong rounds, counting inverted pairs
(two rounds whose predicted order disagrees with the true order) and counting
rounds that sit in some inverted pair all give different answers.  Two
periodic traces show the last two can disagree by orders of magnitude in
either direction.
"""
import numpy as np

from paging_regret import (ExplicitPredictionStream, augment_sequence, compute_metrics,
                           derive_consistent_nat)

# %%
# The smallest example: page 1 twice, then page 2 twice, while the predictor
# believes the opposite order.
trace = augment_sequence([1, 1, 2, 2], n=2)
guess = derive_consistent_nat(ExplicitPredictionStream([2, 2, 1, 1], 2), trace)
print("predicted next arrivals:", guess.values.tolist())
print(compute_metrics(trace, None, guess))

# %%
# Scale the same idea up: inverted pairs grow quadratically, inverted rounds
# only linearly.
T = 1000
sigma = [1] * (T // 2) + [2] * (T // 2)
trace = augment_sequence(sigma, 2)
m = compute_metrics(trace, None, derive_consistent_nat(ExplicitPredictionStream(sigma[::-1], 2), trace))
print(f"\nT={T}: {m.inverted_pairs} inverted pairs but {m.inverted_rounds} inverted rounds")

# %%
# Two cyclic patterns over k pages.  In the first, the predictor is wrong only
# at the ends yet every round ends up in an inverted pair.  In the second it
# is off by one everywhere while the predicted order is almost always right.
k, T = 10, 10_000
t = np.arange(1, T + 1)
cases = {
    "wrong at the edges": (np.where((t > 1) & (t < T), t % (k - 1) + 1, k),
                           np.where(t > 2, t % (k - 1) + 1, k)),
    "off by one everywhere": (t % (k - 1) + 1, np.where(t > 1, (t - 1) % (k - 1) + 1, k)),
}
for name, (sigma, pi) in cases.items():
    trace = augment_sequence(sigma, k)
    m = compute_metrics(trace, None, derive_consistent_nat(ExplicitPredictionStream(pi, k), trace))
    print(f"{name:>22}: error_rounds={m.error_rounds:>5}  inverted_rounds={m.inverted_rounds:>5}"
          f"  both={m.eta_refined}")
