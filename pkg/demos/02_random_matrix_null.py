"""Eigenvalues of a correlation matrix against the random-matrix band."""

import corrnet as cn
from corrnet.synthetic import one_factor_returns

n, t = 35, 2190
bounds = cn.rmt_bounds(t, n)
print(f"Q={bounds.q:.3f}  band=[{bounds.lambda_min:.4f}, {bounds.lambda_max:.4f}]")

# %% pure noise: nearly everything falls inside the band
noise = cn.eigendecompose(cn.correlation_matrix(one_factor_returns(n, t, 0.0, seed=5)))
print("noise largest", round(noise.eigenvalues[0], 3), "outside", cn.fraction_outside_rmt(noise, bounds))

# %% one common factor pushes a single eigenvalue far above the band
market = cn.eigendecompose(cn.correlation_matrix(one_factor_returns(n, t, 0.5, seed=5)))
print("factor largest", round(market.eigenvalues[0], 3), "outside", cn.fraction_outside_rmt(market, bounds))
print("normalised", round(cn.normalized_largest_eigenvalue(market), 3))

# the leading eigenvector loads evenly on every series
v1 = cn.leading_eigenvector_components(market)
print(min(v1.values()), max(v1.values()))
