"""Periodic grids on ``[-L, L)^d`` and the policy that sizes them for a given alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import InputError, NyquistError


@dataclass(frozen=True)
class Grid:
    dimension: int
    L: float
    N: int
    alpha: float

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise InputError(f"grid dimension must be 1 or 2, got {self.dimension}")
        if self.N < 2 or self.N & (self.N - 1):
            raise InputError(f"points per axis must be a power of two, got {self.N}")
        if not self.alpha >= 1:
            raise InputError(f"alpha must be >= 1, got {self.alpha}")
        if not self.L > 0:
            raise InputError("box half-width must be positive")

    @property
    def h(self):
        return 2.0 * self.L / self.N

    @property
    def size(self):
        return self.N**self.dimension

    @property
    def shape(self):
        return (self.N,) * self.dimension

    @cached_property
    def axis(self):
        return -self.L + self.h * np.arange(self.N)

    @cached_property
    def points(self):
        """Grid points, ``(N^d, d)``, first axis slowest."""
        mesh = np.meshgrid(*([self.axis] * self.dimension), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @cached_property
    def wavenumbers(self):
        """Integer lattice labels per axis in FFT order (``k`` with ``eta_k = pi k / L``)."""
        return np.rint(np.fft.fftfreq(self.N) * self.N).astype(int)

    @cached_property
    def frequencies(self):
        """Scaled frequencies ``eta_k / alpha`` on the full lattice, shape ``(N,)*d + (d,)``."""
        eta = math.pi * self.wavenumbers / self.L / self.alpha
        mesh = np.meshgrid(*([eta] * self.dimension), indexing="ij")
        return np.stack(mesh, axis=-1)

    @property
    def nyquist(self):
        """Largest representable ``|eta|`` per axis."""
        return math.pi * self.N / (2.0 * self.L)


def minimal_points(L, alpha, xi_max, margin):
    """Smallest N (not rounded to a power of two) with ``alpha*xi_max <= margin*pi*N/(2L)``."""
    return int(math.ceil(2.0 * L * alpha * xi_max / (margin * math.pi) - 1e-9))


def check_nyquist(grid: Grid, xi_max, margin=0.8):
    if grid.alpha * xi_max > margin * grid.nyquist * (1 + 1e-12):
        n_min = minimal_points(grid.L, grid.alpha, xi_max, margin)
        raise NyquistError(
            f"alpha*|xi| = {grid.alpha * xi_max:.6g} exceeds {margin} of the grid Nyquist "
            f"frequency {grid.nyquist:.6g}; need N >= {n_min} "
            f"(power of two: {_next_pow2(n_min)}), have N = {grid.N}",
            minimal_n=n_min,
        )


def _next_pow2(n):
    return 1 << max(1, int(math.ceil(math.log2(max(n, 2)))))


@dataclass(frozen=True)
class GridPolicy:
    """How a grid is chosen for each alpha.

    ``N`` fixes the points per axis (checked against the Nyquist bound);
    otherwise N is the next power of two above ``oversample`` times the
    Nyquist minimum. With ``snap_L`` the half-width is enlarged (by less than
    ``pi / (alpha * xi_max)``) until ``alpha * L * xi_max / pi`` sits halfway
    between integers, which keeps the band edge off the frequency lattice.
    """

    L: float = 2.0
    margin: float = 0.8
    oversample: float = 1.0
    N: int | None = None
    snap_L: bool = True
    m: int = 256
    gate_tol: float = 0.005

    def __post_init__(self):
        if not 0 < self.margin <= 1:
            raise InputError("margin must lie in (0, 1]")
        if self.oversample < 1:
            raise InputError("oversample must be >= 1")
        if self.N is not None and (self.N < 2 or self.N & (self.N - 1)):
            raise InputError(f"N must be a power of two, got {self.N}")
        if not self.gate_tol > 0:
            raise InputError("gate tolerance must be positive")

    def half_width(self, alpha, band_edge):
        if not self.snap_L or band_edge <= 0:
            return self.L
        m = math.ceil(alpha * self.L * band_edge / math.pi - 0.5)
        return math.pi * (m + 0.5) / (alpha * band_edge)

    def grid(self, alpha, dimension, xi_max, band_edge=None, refine=1):
        """Grid for ``alpha``; ``refine`` multiplies N (used by the doubling gate)."""
        L = self.half_width(alpha, xi_max if band_edge is None else band_edge)
        if self.N is not None:
            g = Grid(dimension, L, self.N * refine, alpha)
            check_nyquist(g, xi_max, self.margin)
            return g
        n_min = minimal_points(L, alpha, xi_max, self.margin)
        N = _next_pow2(int(math.ceil(self.oversample * max(n_min, 2))))
        return Grid(dimension, L, N * refine, alpha)


def check_padding(grid: Grid, *extents):
    """Spatial supports must sit inside ``[-L/2, L/2]^d`` to keep wrap-around away."""
    for e in extents:
        if math.isfinite(e) and e > 0.5 * grid.L + 1e-12:
            raise InputError(f"spatial extent {e:.6g} exceeds the padded half-box {0.5 * grid.L:.6g}")
