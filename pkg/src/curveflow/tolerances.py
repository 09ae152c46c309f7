"""Numerical tolerances shared by the geometry routines and all checkers.

Keeping them in one place means a checker and the test that exercises it can
never silently disagree about what "holds" means.
"""

# Slack applied to the right-hand side of every inequality check:
#   lhs <= rhs * (1 + REL_SLACK) + ABS_SLACK
REL_SLACK = 1e-8
ABS_SLACK = 1e-12

# Fourier coefficients below FILTER_LEVEL * max|f| are treated as roundoff and
# zeroed before differentiation (Krasny-type filter).
FILTER_LEVEL = 1e-15

# Maximum distance of (1/2pi) * int k ds from an integer before a curve is
# considered under-resolved.
TURNING_TOL = 0.01

# Mesh ratio (max/min segment length) beyond which spectral accuracy is no
# longer claimed; results computed on such curves are flagged "degraded".
MESH_RATIO_SPECTRAL = 2.0

# Mesh ratio beyond which arclength redistribution refuses to run.
MESH_RATIO_REFUSE = 100.0

# Relative degeneracy threshold for |gamma_x| compared with its mean.
SPEED_DEGENERATE = 1e-12

# Fraction of spectral energy in the top quarter of modes beyond which a curve
# is considered under-resolved (also flagged "degraded").
SPECTRAL_TAIL = 1e-10


def holds(lhs: float, rhs: float) -> bool:
    """``lhs <= rhs`` up to the shared slack."""
    return lhs <= rhs * (1.0 + REL_SLACK) + ABS_SLACK
