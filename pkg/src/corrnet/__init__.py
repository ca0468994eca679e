"""Correlation networks of asset returns: correlation matrices, random-matrix
bounds, minimal spanning trees and their rolling-window evolution."""

from .correlation import (
    CorrelationMatrix,
    RollingSeries,
    correlation_matrix,
    correlation_variance,
    mean_correlation,
    pearson,
    rolling_apply,
)
from .errors import CorrnetError, DataError, NumericalError
from .netstruct import (
    DistanceMatrix,
    SpanningTree,
    betweenness,
    betweenness_count,
    distance_matrix,
    mean_occupation_layer,
    mst_prim,
    node_degree,
    node_strength,
    node_table,
    strength_errorbar,
    strengths,
)
from .spectral import (
    EigenDecomposition,
    RmtBounds,
    eigendecompose,
    fraction_outside_rmt,
    jacobi_eigh,
    leading_eigenvector_components,
    normalized_largest_eigenvalue,
    rmt_bounds,
)
from .timeseries import PriceTable, ReturnMatrix, align_common_dates, log_returns, parse_prices

__version__ = "0.1.0"
