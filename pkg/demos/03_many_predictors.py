"""
Choosing among many predictors
==============================

Ten predictors, one of them perfect and nine pure noise, and we do not know
which is which.  With full information the multiplexer runs one Sim per
predictor and hops between them by multiplicative weights.  With bandit
access (one predictor may be read per round) S-C&S picks a predictor per
epoch with a bandit learner and restarts its predictions at each epoch.
"""
import numpy as np

from paging_regret import (NatTable, TraceSpec, fitf_run, gen_trace, multiplexer_run,
                           perfect_nat, scs_run, sim_run, uniform_noise)

n, k, M = 50, 10, 10

for T in (2**12, 2**14, 2**16):
    trace = gen_trace(TraceSpec("uniform", n, T, seed=3))
    nat = NatTable(trace)
    streams = [perfect_nat(trace, nat)] + [uniform_noise(trace, 3, f"noise:{j}")
                                           for j in range(2, M + 1)]
    opt = fitf_run(trace, nat, k=k).cost
    noisy = sim_run(trace, streams[1], k=k).cost - opt
    mux = multiplexer_run(trace, streams, k=k, seed=3)
    scs, records = scs_run(trace, streams, k=k, seed=3)
    good = np.mean([r.predictor == 1 for r in records[len(records) // 2:]])
    print(f"T={T:>6}: regret/T  noisy Sim {noisy / T:.3f}   multiplexer {(mux.cost - opt) / T:.4f}"
          f"   S-C&S {(scs.cost - opt) / T:.3f}  (perfect arm in {good:.0%} of late epochs)")

# %%
# The multiplexer settles on the good predictor quickly.  S-C&S pays a
# restart on every epoch and must learn from one noisy number per epoch.
# Its regret per round does fall, but slowly at these sizes.
