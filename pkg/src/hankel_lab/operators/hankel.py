"""Nyström discretisation of the truncated Hankel operator on ``(a, b)``.

The operator ``(Gamma u)(x) = int_a^b k(x + y) u(y) dy`` is replaced by the
symmetric matrix ``sqrt(w_i) k(x_i + x_j) sqrt(w_j)`` on composite
Gauss-Legendre panels. Panel edges grow geometrically from ``a``, which
resolves the ``1/t`` scale of the Carleman kernel with ``O(log(b/a))`` panels.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InputError
from .assembly import DenseOperator


def carleman(t):
    return 1.0 / t


def panel_edges(a_lo, b_hi, ratio=2.0):
    """Edges ``a_lo * rho^m`` with ``rho <= ratio`` chosen to land on ``b_hi``."""
    if a_lo > 0:
        count = max(1, math.ceil(math.log(b_hi / a_lo) / math.log(ratio)))
        return a_lo * (b_hi / a_lo) ** (np.arange(count + 1) / count)
    # a_lo = 0 only arises for bounded kernels: dyadic panels down to a fixed floor
    floor = b_hi * 2.0**-10
    inner = panel_edges(floor, b_hi, ratio)
    return np.concatenate([[0.0], inner])


def nystrom_rule(a_lo, b_hi, n, ratio=2.0):
    """Nodes and weights on ``(a_lo, b_hi)`` with at least ``n`` nodes in total."""
    edges = panel_edges(a_lo, b_hi, ratio)
    panels = len(edges) - 1
    q = max(4, math.ceil(n / panels))
    t, w = np.polynomial.legendre.leggauss(q)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = 0.5 * (hi - lo) * t[None, :] + 0.5 * (hi + lo)
    wx = 0.5 * (hi - lo) * w[None, :]
    return x.ravel(), wx.ravel()


def build_truncated_hankel(a_lo, b_hi, kernel="carleman", n=256, ratio=2.0):
    """Symmetric Nyström matrix of the Hankel operator with kernel ``k(x + y)`` on ``(a_lo, b_hi)``.

    Parameters
    ----------
    a_lo, b_hi : float
        Interval ends, ``0 <= a_lo < b_hi``.
    kernel : "carleman" or callable
        ``k(t)``, vectorised, continuous on ``[2 a_lo, 2 b_hi]``.
    n : int
        Minimum number of nodes; the actual count is a multiple of the panel count.
    ratio : float
        Largest ratio between consecutive panel edges.
    """
    if not (0 <= a_lo < b_hi) or not math.isfinite(b_hi):
        raise InputError(f"need 0 <= a_lo < b_hi < inf, got a_lo={a_lo}, b_hi={b_hi}")
    if n < 1:
        raise InputError("need at least one node")
    if ratio <= 1:
        raise InputError("panel ratio must exceed 1")
    if isinstance(kernel, str):
        if kernel != "carleman":
            raise InputError(f"unknown kernel {kernel!r}")
        if a_lo == 0:
            raise InputError("the Carleman kernel on (0, b) is not compact; use a_lo > 0")
        kernel = carleman
    x, w = nystrom_rule(a_lo, b_hi, n, ratio)
    K = np.asarray(kernel(x[:, None] + x[None, :]), dtype=float)
    K = np.broadcast_to(K, (len(x), len(x)))
    if not np.all(np.isfinite(K)):
        raise InputError("kernel is not finite on [2 a_lo, 2 b_hi]")
    sw = np.sqrt(w)
    M = sw[:, None] * K * sw[None, :]
    M = 0.5 * (M + M.T)
    return DenseOperator(M, "hankel", None)
