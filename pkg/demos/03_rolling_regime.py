"""Rolling windows across a switch from independent to correlated returns."""

import corrnet as cn
from corrnet.synthetic import two_regime_returns

r = two_regime_returns(20, 1600, loading=0.6, seed=3)

# %% mean correlation rises once windows enter the second half
series = cn.rolling_apply(r, 400, step=100, observable=cn.mean_correlation)
for date, value in zip(series.dates, series.values):
    print(date, f"{value:+.3f}")

# %% so does the share of variance in the leading eigenvalue
lam = cn.rolling_apply(
    r, 400, step=100, observable=lambda c: cn.normalized_largest_eigenvalue(cn.eigendecompose(c))
)
print([round(x, 3) for x in lam.values])

# %% the tree contracts: mean occupation layer drops as one hub takes over
layers = cn.rolling_apply(
    r, 400, step=200, observable=lambda c: cn.mean_occupation_layer(cn.mst_prim(cn.distance_matrix(c)))[1]
)
print([round(x, 2) for x in layers.values])
