"""
From CSV tables to plot-ready comparisons
=========================================

Trade is read as one row per ordered pair, with the exporter's and the
importer's report of the same flow; GDP comes from population and GDP per
capita. The comparison tables are what one would plot: mean flow against
GDP product, and the distribution of flows.
"""
import numpy as np

from itn_ensemble import (
    assemble_snapshot,
    build_model_from_snapshot,
    censor_below_threshold,
    log_binned_curve,
    parse_gdp_table,
    parse_trade_table,
    relative_quantities,
    weight_distribution,
)
from itn_ensemble.analytics import scatter_points
from itn_ensemble.cli import synth_snapshot
from itn_ensemble.sampling import sample_weighted_direct

trade_csv = """year,reporter,partner,export,import
1975,ARG,BRA,700,650
1975,BRA,ARG,,820
1975,BRA,USA,2500,2600
1975,USA,BRA,3100,
1975,USA,ARG,900,950
1975,ARG,USA,,400
"""
gdp_csv = """year,code,population,gdp_per_capita
1975,ARG,26000000,2100
1975,BRA,108000000,1200
1975,USA,216000000,7800
"""

snap = assemble_snapshot(parse_trade_table(trade_csv), parse_gdp_table(gdp_csv), 1975)
rel = relative_quantities(snap)
print("codes:", snap.codes)
print("flows (M$):\n", snap.weights)
print("GDP shares:", np.round(rel.xi, 4), " world trade T =", rel.T)

# a bigger synthetic world for the curves
world = synth_snapshot(120, seed=5, sigma=2.0)
sim = sample_weighted_direct(build_model_from_snapshot(relative_quantities(world)), seed=6).matrix

curve = log_binned_curve(scatter_points(world.gdp, sim), bins_per_decade=2)
print("\nmean flow against GDP product (every other bin):")
for lo, mx, my, c in list(zip(curve.bin_lo, curve.mean_x, curve.mean_y, curve.count))[::2]:
    if c:
        print(f"  x_i x_j ~ {mx:9.3g}   <w> = {my:9.3g}   ratio {my / mx:.3g}   ({c} pairs)")

# source data omit flows under 1000 USD; the simulated cloud shrinks the same way
off = ~np.eye(world.n, dtype=bool)
cut = censor_below_threshold(sim, 1000.0)
hist = weight_distribution(cut[off])
print("\nflows below 1000 USD: %d of %d" % (hist.zero_count, hist.total))
print("smallest retained flow: %.4g M$" % cut[off][cut[off] > 0].min())
