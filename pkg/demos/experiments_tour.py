"""Small versions of the Monte Carlo experiments.

Each one prints its summary.  The full-size runs live in the acceptance suite.
"""
from __future__ import annotations

from sosclique.experiments import (
    TrialConfig,
    concentration_cliques,
    concentration_degree,
    exact_expectation_oracle,
    gap_probe,
    norm_r_a,
    psd_frequency,
)

oracle = exact_expectation_oracle(4, 1, 2)
print(f"averaging over all {oracle.graphs} graphs on 4 vertices: {oracle.checks}")

cliques = concentration_cliques(TrialConfig(40, trials=50, master_seed=1), a=3)
s = cliques.summary
print(f"triangles in G(40,1/2): mean {s['empirical_mean']:.1f} vs {s['theory_center']}, "
      f"max deviation {s['empirical_max_dev']:.1f} vs threshold {s['theory_threshold']:.3g}")

degree = concentration_degree(TrialConfig(40, r=2, trials=50, master_seed=1, epsilon=0.1), i=2)
s = degree.summary
print(f"4-cliques through a fixed edge: mean {s['empirical_mean']:.2f} vs {s['theory_center']}")

norms = norm_r_a(TrialConfig(60, trials=10, master_seed=1, epsilon=0.01), a=2)
s = norms.summary
print(f"||R_2|| at n=60: max {s['max_norm']:.1f}, mean ratio to n^1.5 {s['mean_ratio']:.3f}, "
      f"bound {s['theory_threshold']:.3g}")

psd = psd_frequency(TrialConfig(30, r=1, k=3, trials=10, master_seed=1), inject_complete=True)
s = psd.summary
print(f"M' PSD in {s['mprime_psd_count']}/{s['trials']} trials, implication violations {s['violation_count']}")

gap = gap_probe(40, 1, seed=2, k_range=range(2, 12))
print(f"gap probe (n=40, r=1): largest k with M' PSD {gap.largest_psd_k}, "
      f"downward closed {gap.downward_closed}")
