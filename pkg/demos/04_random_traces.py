"""
Why predictions are needed at all
=================================

With k + 1 pages requested uniformly at random no online algorithm can do
much: every eviction guesses which of k pages comes back last.  Belady misses
at most twice per phase (a phase is the shortest stretch containing every
page, about n * H_n requests), while LRU misses about once per k requests.
"""
from paging_regret.experiment import lower_bound_experiment

for k in (4, 16, 64):
    s = lower_bound_experiment(k, 200_000, range(3))
    print(f"k={k:>3}: phase length {s.mean_phase_length:7.1f} (n H_n = {s.expected_phase_length:7.1f}),"
          f" worst FitF misses per phase {s.max_fitf_misses_per_phase},"
          f" LRU/FitF = {s.lru_ratio:.1f}")
