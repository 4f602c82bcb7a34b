"""
Binary fitness model of the trade network
=========================================

Each country carries one hidden variable, its GDP x_i, and a link between
i and j exists with probability delta x_i x_j / (1 + delta x_i x_j). A single
global delta is fixed by asking the expected number of links to equal the
observed one.
"""
import numpy as np

from itn_ensemble import BinaryModel, binarize, expected_degrees, fit_delta
from itn_ensemble.binary import binary_log_partition, expected_edges
from itn_ensemble.cli import synth_snapshot

# a synthetic year: 40 countries, log-normal GDP, exponential flows
snap = synth_snapshot(40, seed=1)

# keep only pairs trading more than 2000 million USD in either direction
graph = binarize(snap, threshold=2000.0)
print("countries:", snap.n, " links:", graph.L, " density: %.3f" % (graph.L / (snap.n * (snap.n - 1) / 2)))

delta = fit_delta(snap.gdp, graph.L)
model = BinaryModel(snap.gdp, delta, codes=snap.codes)
print("fitted delta: %.6g" % delta)
print("expected links: %.9f" % expected_edges(model))

# degrees grow with GDP and saturate at N - 1 for the largest economies
k_obs = graph.degrees
k_exp = expected_degrees(model)
order = np.argsort(snap.gdp)
print("\n code     GDP(M$)  k_obs  <k>")
for i in order[:: max(1, snap.n // 8)]:
    print(f" {snap.codes[i]}  {snap.gdp[i]:10.0f}  {k_obs[i]:5d}  {k_exp[i]:5.1f}")

print("\nln Z =", binary_log_partition(model))
