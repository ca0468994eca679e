"""Static pipeline: prices -> returns -> correlation -> distance -> tree."""

import io

import numpy as np

import corrnet as cn
from corrnet.synthetic import one_factor_returns, prices_from_returns, write_price_file

# %% a small synthetic market written out and read back as a price file
r = one_factor_returns(8, 500, loadings=np.linspace(0.2, 0.8, 8), seed=1)
buf = io.StringIO()
write_price_file(prices_from_returns(r), buf)
buf.seek(0)
prices = cn.parse_prices(buf)
print(prices.symbols, len(prices.dates), "dates")

# %% returns and their correlation matrix
returns = cn.log_returns(cn.align_common_dates(prices))
c = cn.correlation_matrix(returns)
print(np.round(c.values, 2))
print("mean correlation", round(cn.mean_correlation(c), 4))
print("variance", round(cn.correlation_variance(c), 5))

# %% distances and the minimum spanning tree
d = cn.distance_matrix(c)
tree = cn.mst_prim(d)
for i, j, w in tree.edges:
    print(f"{tree.symbols[i]} -- {tree.symbols[j]}  {w:.3f}")

# %% node measures: the most loaded series should sit near the middle of the tree
table = cn.node_table(d, tree)
for k, s in enumerate(table.symbols):
    print(f"{s:>4} deg={table.degree[k]} strength={table.strength[k]:.3f} betweenness={table.betweenness[k]:.3f}")
print("central node and mean occupation layer:", cn.mean_occupation_layer(tree))
