"""Grid realisations of the cutoff operators and the spectral primitives."""

from .assembly import (
    DenseOperator,
    apply_pdo,
    band_mask,
    build_composite,
    build_multiplier,
    build_pdo,
    build_projection,
    composite_blocks,
    fourier_multiplier,
)
from .bandspace import BandSpace
from .dump import read_matrix, read_spectrum, write_matrix, write_spectrum
from .grid import Grid, GridPolicy, check_nyquist, check_padding, minimal_points
from .hankel import build_truncated_hankel, nystrom_rule, panel_edges
from .spectral import (
    SpectralData,
    hermitian_eigen,
    residuals,
    schatten_norm,
    singular_values,
    trace_of_function,
    tql_implicit,
    tridiagonalize,
)

__all__ = [
    "BandSpace", "DenseOperator", "Grid", "GridPolicy", "SpectralData",
    "apply_pdo", "band_mask", "build_composite", "build_multiplier", "build_pdo",
    "build_projection", "build_truncated_hankel", "check_nyquist", "check_padding",
    "composite_blocks", "fourier_multiplier", "hermitian_eigen", "minimal_points",
    "nystrom_rule", "panel_edges", "read_matrix", "read_spectrum", "residuals",
    "schatten_norm", "singular_values", "trace_of_function", "tql_implicit",
    "tridiagonalize", "write_matrix", "write_spectrum",
]
