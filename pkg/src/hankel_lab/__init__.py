"""Numerical laboratory for truncated Wiener-Hopf and Hankel-type operators with
sharp cutoffs in space and frequency: operator realisations on periodic grids,
the predicted coefficients of their trace and counting asymptotics, and sweeps
that compare the two."""

__version__ = "0.1.0"

from . import coefficients, errors, geometry, symbols  # noqa: F401
