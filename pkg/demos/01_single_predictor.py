"""
Following one noisy predictor
=============================

Belady's rule (evict the page needed furthest in the future) is optimal when
the future is known.  Sim runs the same rule on predicted next arrivals,
patched up so that stale predictions cannot pin a page in the cache forever.
Here we corrupt a perfect predictor at increasing rates and watch the regret
grow with the refined error count, never past ``6 * eta + 5k``.
"""
import numpy as np

from paging_regret import (ErrorInjection, NatTable, TraceSpec, compute_metrics, fitf_run,
                           gen_trace, inject_errors, lru_run, perfect_nat, sim_run)

n, k, T = 40, 8, 20_000
trace = gen_trace(TraceSpec("zipf", n, T, seed=1, zipf_s=0.9))
nat = NatTable(trace)
opt = fitf_run(trace, nat, k=k).cost
print(f"zipf trace, n={n}, k={k}, T={T}: OPT = {opt} misses, LRU = {lru_run(trace, k=k).cost}")

# %%
# A perfect predictor reproduces Belady up to a small additive term.
clean = perfect_nat(trace, nat)
print(f"Sim with perfect predictions: {sim_run(trace, clean, k=k).cost}")

# %%
# Now resample a growing fraction of predictions uniformly at random.
print(f"\n{'rate':>6} {'errors':>7} {'eta':>7} {'regret':>7} {'6 eta + 5k':>11}")
for rate in (0.01, 0.05, 0.1, 0.3, 1.0):
    noisy = inject_errors(clean, ErrorInjection("uniform", rate, seed=7), trace)
    m = compute_metrics(trace, nat, noisy)
    regret = sim_run(trace, noisy, k=k).cost - opt
    print(f"{rate:>6} {m.error_rounds:>7} {m.eta_refined:>7} {regret:>7} "
          f"{6 * m.eta_refined + 5 * k:>11}")

# %%
# Not every wrong prediction hurts.  Shifting every prediction by the same
# amount changes no ordering, so almost no error takes part in an inversion.
shifted = inject_errors(clean, ErrorInjection("offset", 1.0, seed=0, shift=3), trace)
m = compute_metrics(trace, nat, shifted)
print(f"\nconstant shift: {m.error_rounds} wrong rounds, only {m.eta_refined} inverted, "
      f"regret {sim_run(trace, shifted, k=k).cost - opt}")
