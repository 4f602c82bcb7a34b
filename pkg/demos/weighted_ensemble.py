"""
Weighted ensemble: exponential flows and the gravity law
========================================================

Every directed flow w_ij is exponential with mean T xi_i xi_j, where xi are
GDP shares and T is world trade. Expected flows are therefore exactly
proportional to the product of the partners' GDPs.
"""
import numpy as np

from itn_ensemble import (
    WeightedModel,
    expected_strengths,
    expected_weight_matrix,
    theta_parameters,
    weighted_hamiltonian,
    weighted_log_partition,
)

rng = np.random.default_rng(0)
xi = rng.lognormal(0.0, 1.5, 25)
xi /= xi.sum()
model = WeightedModel(xi, T=9e5)

theta_i, theta_ij = theta_parameters(model)
w = expected_weight_matrix(model)
off = ~np.eye(model.n, dtype=bool)
print("smallest and largest pair rates:", np.nanmin(theta_ij), np.nanmax(theta_ij))

# gravity: log <w_ij> - log(xi_i xi_j) is one constant, ln T
resid = np.log(w[off]) - np.log(np.outer(xi, xi)[off])
print("ln T = %.6f, spread of the residual = %.2e" % (np.log(model.T), resid.std()))

# the expected matrix sits at energy N(N-1): one unit per directed pair
print("H(<w>) =", weighted_hamiltonian(w, model), " N(N-1) =", model.n * (model.n - 1))

total, per_country = weighted_log_partition(model)
print("ln Z = %.6f, sum of per-country factors = %.6f" % (total, per_country.sum()))

# strengths: the share-of-GDP rule drops the j = i term
st = expected_strengths(model)
exact, approx = st["exact"][0], st["paper_approx"][0]
big = np.argmax(xi)
print("\nlargest economy: xi = %.3f" % xi[big])
print("  exact out-strength  %.1f" % exact[big])
print("  T xi                %.1f  (%.1f%% high)" % (approx[big], 100 * (approx[big] / exact[big] - 1)))
