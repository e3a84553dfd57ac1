"""Numerical tolerances shared across the package.

All validation thresholds live here so they can be tuned in one place.
"""

#: Max-norm deviation allowed between a matrix and its conjugate transpose.
HERMITIAN_TOL = 1e-12
#: Allowed deviation of a density-matrix trace from one.
TRACE_TOL = 1e-12
#: Most negative eigenvalue still accepted as positive semidefinite.
PSD_TOL = 1e-10
#: Slack on Bloch-vector lengths.
BLOCH_TOL = 1e-12
#: ||b|| at or above ``1 - DEGENERATE_B_TOL`` collapses the ellipsoid to a point.
DEGENERATE_B_TOL = 1e-9
#: Eigenvalues of Q in [-CLAMP_TOL, 0) are treated as zero.
CLAMP_TOL = 1e-12
#: Default relative tolerance for shape classification.
SHAPE_TOL = 1e-6
