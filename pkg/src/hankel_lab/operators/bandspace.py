"""Exact reduction of T, G and H to the band of the frequency projection.

With ``Q`` the rows of the unitary DFT that fall inside ``alpha * Omega``,
``P = Q* Q`` and every operator in question factors through ``Q``:

* ``C = Q chi Q*`` (band Gram matrix of the spatial cutoff),
* ``M = Q Op^l(a) Q* = sum_i Toeplitz(f_i) diag(phi_i)``,
* ``G = (1 - chi) Q* M Q chi`` has the nonzero singular values of
  ``(I - C)^(1/2) M C^(1/2)``,
* ``tr(B T^p) = tr(Q chi B chi Q* . M (C M)^(p-1))``.

So spectra and traces are computed on ``n_band x n_band`` matrices whatever
the grid size, and the grid only enters through FFTs of sampled functions.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from ..geometry import Domain
from ..symbols import Constant, SeparableSymbol
from .assembly import band_mask
from .grid import Grid, check_nyquist
from .spectral import SpectralData, hermitian_eigen, singular_values


class BandSpace:
    def __init__(self, grid: Grid, omega: Domain, margin=0.8):
        check_nyquist(grid, omega.max_abs(), margin)
        self.grid = grid
        self.omega = omega
        mask = band_mask(grid, omega)
        k = grid.wavenumbers
        mesh = np.meshgrid(*([k] * grid.dimension), indexing="ij")
        labels = np.stack([m[mask] for m in mesh], axis=-1)
        # deterministic lexicographic order of the integer labels
        order = np.lexsort(labels.T[::-1])
        self.labels = labels[order]

    @property
    def size(self):
        return len(self.labels)

    def _spectrum_of(self, values):
        """``sum_j v_j exp(-i eta_q . x_j) / N^d`` as a lookup by integer label ``q``."""
        g = self.grid
        vals = np.asarray(values).reshape(g.shape)
        return np.fft.fftn(vals) / g.size

    def _lookup(self, spec, q):
        g = self.grid
        idx = tuple(np.mod(q[..., i], g.N) for i in range(g.dimension))
        sign = np.where(np.sum(q, axis=-1) % 2 == 0, 1.0, -1.0)
        return sign * spec[idx]

    def toeplitz(self, values, rows=None, cols=None):
        """``Q diag(values) Q*`` between two label sets (band by default)."""
        rows = self.labels if rows is None else rows
        cols = self.labels if cols is None else cols
        spec = self._spectrum_of(values)
        q = rows[:, None, :] - cols[None, :, :]
        return self._lookup(spec, q)

    def lattice(self, phi, labels=None):
        labels = self.labels if labels is None else labels
        if isinstance(phi, Constant):
            return np.full(len(labels), phi.value, dtype=float)
        xi = math.pi * labels / self.grid.L / self.grid.alpha
        return np.asarray(phi(xi), dtype=float)

    def indicator(self, lam: Domain):
        return np.asarray(lam.contains(self.grid.points), dtype=float)

    def gram(self, lam: Domain):
        """``C = Q chi_Lambda Q*``; its eigenvalues are the nonzero spectrum of T(1)."""
        return self.toeplitz(self.indicator(lam))

    def symbol_matrix(self, a: SeparableSymbol):
        n = self.size
        if a.is_constant:
            return a.constant_value * np.eye(n, dtype=complex)
        M = np.zeros((n, n), dtype=complex)
        x = self.grid.points
        for f, phi in a.terms:
            ph = self.lattice(phi)
            if isinstance(f, Constant):
                M += np.diag(f.value * ph)
            else:
                M += self.toeplitz(f(x)) * ph[None, :]
        return M

    def weighted_gram(self, lam: Domain, b: SeparableSymbol):
        """``Q chi Op^l(b) chi Q*`` for a separable weight ``b``."""
        chi = self.indicator(lam)
        x = self.grid.points
        n = self.size
        out = np.zeros((n, n), dtype=complex)
        for f, phi in b.terms:
            fx = f(x) if not isinstance(f, Constant) else np.full(len(chi), f.value)
            if isinstance(phi, Constant):
                out += phi.value * self.toeplitz(chi * fx)
                continue
            # only lattice points where phi is nonzero contribute
            g = self.grid
            mesh = np.meshgrid(*([g.wavenumbers] * g.dimension), indexing="ij")
            full = np.stack([m.ravel() for m in mesh], axis=-1)
            vals = self.lattice(phi, full)
            keep = vals != 0.0
            mid = full[keep]
            left = self.toeplitz(chi * fx, self.labels, mid)
            right = self.toeplitz(chi, mid, self.labels)
            out += (left * vals[keep][None, :]) @ right
        return out

    @cached_property
    def _gram_cache(self):
        return {}

    def gram_eigen(self, lam: Domain):
        # the domain is kept in the entry so its id cannot be recycled
        entry = self._gram_cache.get(id(lam))
        if entry is None or entry[0] is not lam:
            s = hermitian_eigen(self.gram(lam), vectors=True)
            entry = (lam, np.clip(s.values, 0.0, 1.0), s.vectors)
            self._gram_cache[id(lam)] = entry
        return entry[1], entry[2]

    def g_factor(self, a: SeparableSymbol, lam: Domain):
        """``(I - C)^(1/2) M C^(1/2)`` in the eigenbasis of ``C``."""
        mu, V = self.gram_eigen(lam)
        M = V.conj().T @ self.symbol_matrix(a) @ V
        return np.sqrt(1.0 - mu)[:, None] * M * np.sqrt(mu)[None, :]

    def g_singular_values(self, a: SeparableSymbol, lam: Domain) -> SpectralData:
        """Singular values of ``G_alpha(a)``; ``kernel_dim`` completes the spectrum of H."""
        kernel = self.grid.size - 2 * self.size
        if a.is_constant:
            mu, _ = self.gram_eigen(lam)
            s = abs(a.constant_value) * np.sqrt(mu * (1.0 - mu))
            return SpectralData(np.sort(s), "singular", kernel)
        s = singular_values(self.g_factor(a, lam))
        return SpectralData(s.values, "singular", kernel)

    def hs_norm_squared(self, a: SeparableSymbol, lam: Domain):
        """``||G||_S2^2`` as a Frobenius sum (independent of any eigensolve)."""
        if a.is_constant:
            mu, _ = self.gram_eigen(lam)
            return abs(a.constant_value) ** 2 * math.fsum(mu * (1.0 - mu))
        S = self.g_factor(a, lam)
        return math.fsum((np.abs(S) ** 2).ravel())

    def weighted_power_traces(self, a: SeparableSymbol, lam: Domain, p_max,
                              b: SeparableSymbol | None = None):
        """``[tr(Op^l(b) T^p) for p = 1..p_max]`` with ``T = T_alpha(a)``."""
        C = self.gram(lam)
        M = self.symbol_matrix(a)
        B = C if b is None or (b.is_constant and b.constant_value == 1.0) else \
            self.weighted_gram(lam, b)
        out = []
        W = M
        for p in range(1, p_max + 1):
            if p > 1:
                W = W @ (C @ M)
            out.append(complex(np.sum(B.T * W)))
        return out
