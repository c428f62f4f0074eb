"""Dense matrices of projections, cutoffs, PDOs and the T / G / H compositions.

Fourier multipliers act through the FFT on the periodic grid, so the discrete
frequency projection is an exact orthogonal projection and the cutoff in x an
exact 0/1 diagonal. All matrices act on grid samples (no quadrature weights),
which keeps them unitarily equivalent to the operators on the torus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..geometry import Domain
from ..symbols import Constant, SeparableSymbol
from .grid import Grid, check_nyquist, check_padding


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """A matrix on grid samples.

    ``rows`` / ``cols`` hold the grid indices of a restricted block (``None``
    means all points).
    """

    matrix: np.ndarray
    kind: str
    grid: Grid
    rows: np.ndarray | None = None
    cols: np.ndarray | None = None

    @property
    def shape(self):
        return self.matrix.shape

    def embed(self):
        """The block placed into a full ``N^d x N^d`` matrix."""
        if self.rows is None and self.cols is None:
            return self.matrix
        n = self.grid.size
        full = np.zeros((n, n), dtype=self.matrix.dtype)
        r = np.arange(n) if self.rows is None else self.rows
        c = np.arange(n) if self.cols is None else self.cols
        full[np.ix_(r, c)] = self.matrix
        return full


def fourier_multiplier(grid: Grid, values, U):
    """Apply ``F* diag(values) F`` to the columns of ``U`` (shape ``(N^d, k)``)."""
    k = U.shape[1]
    axes = tuple(range(grid.dimension))
    V = np.fft.fftn(U.reshape(grid.shape + (k,)), axes=axes)
    V *= values.reshape(grid.shape + (1,))
    return np.fft.ifftn(V, axes=axes).reshape(grid.size, k)


def lattice_values(grid: Grid, phi):
    """``phi(eta_k / alpha)`` on the frequency lattice, FFT order."""
    if isinstance(phi, Constant):
        return np.full(grid.shape, phi.value, dtype=float)
    return np.asarray(phi(grid.frequencies), dtype=float)


def band_mask(grid: Grid, omega: Domain):
    return np.asarray(omega.contains(grid.frequencies), dtype=bool)


def _symbol_xi_extent(a: SeparableSymbol):
    ext = [p.support() for _, p in a.terms if not isinstance(p, Constant)]
    return max(ext, default=0.0)


def _symbol_x_extent(a: SeparableSymbol):
    ext = [f.support() for f, _ in a.terms if not isinstance(f, Constant)]
    return max(ext, default=0.0)


def build_projection(grid: Grid, omega: Domain, margin=0.8) -> DenseOperator:
    if omega.dimension != grid.dimension:
        raise InputError("frequency domain and grid dimensions differ")
    check_nyquist(grid, omega.max_abs(), margin)
    mask = band_mask(grid, omega).astype(float)
    P = fourier_multiplier(grid, mask, np.eye(grid.size))
    return DenseOperator(P, "projection", grid)


def build_multiplier(grid: Grid, lam: Domain) -> DenseOperator:
    if lam.dimension != grid.dimension:
        raise InputError("spatial domain and grid dimensions differ")
    inside = np.asarray(lam.contains(grid.points), dtype=float)
    return DenseOperator(np.diag(inside), "multiplier", grid)


def apply_pdo(grid: Grid, a: SeparableSymbol, U, side="left"):
    """``Op^l(a) U`` or ``Op^r(a) U`` without forming the matrix."""
    out = np.zeros(U.shape, dtype=complex)
    x = grid.points
    for f, phi in a.terms:
        fx = np.asarray(f(x), dtype=float)[:, None]
        vals = lattice_values(grid, phi)
        if side == "left":
            out += fx * fourier_multiplier(grid, vals, U)
        elif side == "right":
            out += fourier_multiplier(grid, vals, fx * U)
        else:
            raise InputError(f"side must be 'left' or 'right', got {side!r}")
    return out


def build_pdo(grid: Grid, a: SeparableSymbol, side="left", margin=0.8) -> DenseOperator:
    if a.dimension != grid.dimension:
        raise InputError("symbol and grid dimensions differ")
    check_padding(grid, _symbol_x_extent(a))
    check_nyquist(grid, _symbol_xi_extent(a), margin)
    return DenseOperator(apply_pdo(grid, a, np.eye(grid.size, dtype=complex), side),
                         f"pdo_{side}", grid)


def composite_blocks(grid: Grid, a: SeparableSymbol, lam: Domain, omega: Domain, margin=0.8):
    """Return ``(inside, outside, T_block, G_block)``.

    ``T_block`` is ``chi P Op^l(a) P chi`` restricted to the points of ``lam``
    and ``G_block`` the ``(1 - chi) ... chi`` block (rows outside, columns inside).
    """
    check_nyquist(grid, omega.max_abs(), margin)
    check_padding(grid, lam.max_abs(), _symbol_x_extent(a))
    chi = np.asarray(lam.contains(grid.points), dtype=bool)
    inside = np.flatnonzero(chi)
    outside = np.flatnonzero(~chi)
    mask = band_mask(grid, omega).astype(float)
    X = np.zeros((grid.size, len(inside)), dtype=complex)
    X[inside, np.arange(len(inside))] = 1.0
    Y = fourier_multiplier(grid, mask, X)
    Y = apply_pdo(grid, a, Y, "left")
    Y = fourier_multiplier(grid, mask, Y)
    return inside, outside, Y[inside], Y[outside]


def build_composite(grid: Grid, a: SeparableSymbol, lam: Domain, omega: Domain, kind="H",
                    margin=0.8) -> DenseOperator:
    """T (square block on the points of ``lam``), G (rectangular block) or H = G + G*
    (full grid)."""
    inside, outside, T, G = composite_blocks(grid, a, lam, omega, margin)
    if kind == "T":
        return DenseOperator(T, "T", grid, inside, inside)
    if kind == "G":
        return DenseOperator(G, "G", grid, outside, inside)
    if kind == "H":
        H = np.zeros((grid.size, grid.size), dtype=complex)
        H[np.ix_(outside, inside)] = G
        H[np.ix_(inside, outside)] = G.conj().T
        return DenseOperator(H, "H", grid)
    raise InputError(f"composite kind must be T, G or H, got {kind!r}")
