"""
How trade responds to a change in GDP shares
============================================

Under the weighted model <v_ij> = xi_i xi_j, so a country whose GDP share
falls by 2% sees all of its bilateral trade shares fall by roughly 2% too.
"""
import numpy as np

from itn_ensemble import WeightedModel, predict_relative_changes
from itn_ensemble.sampling import draw_weighted, make_rng

rng = np.random.default_rng(3)
n = 15
xi = rng.lognormal(0.0, 1.0, n)
xi /= xi.sum()

xi_next = xi.copy()
xi_next[0] *= 0.98
xi_next[1:] *= (1 - xi_next[0]) / xi_next[1:].sum()

change = predict_relative_changes(xi, xi_next)
print("predicted change of country 0's pairs: %.4f" % change.differential[0, 1:].mean())
print("exact ratio minus one:                 %.4f" % (change.multiplicative[0, 1:].mean() - 1))
print("pairs not involving country 0:         %.4f" % change.differential[1, 2])

# the same number from simulated epochs
T, reps = 1e4, 20_000
rows, cols = np.nonzero(~np.eye(n, dtype=bool))
touched = rows == 0
before = draw_weighted(WeightedModel(xi, T), make_rng(1), reps)[:, touched].mean(axis=0)
after = draw_weighted(WeightedModel(xi_next, T), make_rng(2), reps)[:, touched].mean(axis=0)
print("simulated change over %d replicas:   %.4f" % (reps, (after / before - 1).mean()))
