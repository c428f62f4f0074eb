"""Least-squares fits of the log-law ``y = D a^d + A a^(d-1) log a + B a^(d-1) + C``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import FitError, InputError


@dataclass(frozen=True)
class LogLawFit:
    coefficients: dict
    stderr: dict
    r2: float
    n_points: int
    model: tuple = field(default=())

    @property
    def A(self):
        return self.coefficients.get("A", 0.0)

    def __getitem__(self, key):
        return self.coefficients[key]

    def predict(self, alpha, d):
        alpha = np.asarray(alpha, dtype=float)
        cols = _columns(alpha, d, self.model)
        return sum(self.coefficients[k] * c for k, c in zip(self.model, cols))

    def as_dict(self):
        out = dict(self.coefficients)
        out.update({f"stderr_{k}": v for k, v in self.stderr.items()})
        out["r2"] = self.r2
        return out


def _columns(alpha, d, model):
    base = alpha ** (d - 1)
    table = {
        "D": alpha**d,
        "A": base * np.log(alpha),
        "B": base,
        "C": np.ones_like(alpha),
    }
    return [table[k] for k in model]


def log_law_model(d, leading=False, constant=None):
    """Column names for the fit.

    For ``d = 1`` the ``B`` and ``C`` columns coincide, so ``C`` is dropped
    unless explicitly requested.
    """
    model = ["D"] if leading else []
    model += ["A", "B"]
    if constant is None:
        constant = d != 1
    if constant:
        model.append("C")
    return tuple(model)


def fit_log_law(points, d, leading=False, constant=None, model=None):
    """Fit ``y`` against ``alpha`` with the log-law model.

    Parameters
    ----------
    points : sequence of (alpha, y)
    d : int
        Dimension, sets the powers of alpha.
    leading : bool
        Include the ``D alpha^d`` volume term.
    constant : bool or None
        Include ``C``; defaults to ``d != 1``.
    model : tuple of str, optional
        Explicit subset of ``"D", "A", "B", "C"`` overriding the two flags.

    Returns
    -------
    LogLawFit
        Coefficients, standard errors and ``r2``. Missing model terms read as 0.

    Raises
    ------
    FitError
        If fewer than 4 points, repeated alphas, or a rank-deficient design.
    """
    pts = sorted((float(a), float(y)) for a, y in points)
    if len(pts) < 4:
        raise FitError(f"a log-law fit needs at least 4 points, got {len(pts)}")
    alpha = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(np.diff(alpha) <= 0):
        raise FitError("alpha values must be distinct")
    if np.any(alpha <= 0) or not np.all(np.isfinite(y)):
        raise InputError("alphas must be positive and values finite")
    model = tuple(model) if model is not None else log_law_model(d, leading, constant)
    X = np.column_stack(_columns(alpha, d, model))
    k = X.shape[1]
    if len(y) < k:
        raise FitError(f"{k} coefficients cannot be fitted from {len(y)} points")
    scale = np.sqrt(np.sum(X**2, axis=0))
    Xs = X / scale
    normal = Xs.T @ Xs
    rhs = Xs.T @ y
    cond = np.linalg.cond(normal)
    if not math.isfinite(cond) or cond > 1e12:
        raise FitError(f"rank-deficient design for model {model} (condition {cond:.3e})")
    c = np.linalg.solve(normal, rhs)
    coef = c / scale
    resid = y - X @ coef
    ss_res = math.fsum(resid**2)
    ss_tot = math.fsum((y - y.mean()) ** 2)
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    dof = len(y) - k
    sigma2 = ss_res / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(normal) / np.outer(scale, scale)
    stderr = {name: float(math.sqrt(max(cov[i, i], 0.0))) for i, name in enumerate(model)}
    coeffs = {name: float(coef[i]) for i, name in enumerate(model)}
    return LogLawFit(coeffs, stderr, float(r2), len(y), model)


def fit_affine_log(points):
    """``y = s log x + c``; returns ``(s, c, r2)``. Used for the b-sweep counts."""
    pts = sorted((float(x), float(y)) for x, y in points)
    if len(pts) < 2:
        raise FitError("need at least 2 points")
    x = np.log([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    X = np.column_stack([x, np.ones_like(x)])
    if np.linalg.matrix_rank(X) < 2:
        raise FitError("abscissae must be distinct")
    (s, c), *_ = np.linalg.lstsq(X, y, rcond=None)
    ss_tot = math.fsum((y - y.mean()) ** 2)
    ss_res = math.fsum((y - X @ np.array([s, c])) ** 2)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return float(s), float(c), float(r2)
