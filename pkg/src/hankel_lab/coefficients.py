"""Asymptotic coefficients for trace and counting formulas.

Volume term ``w0`` and boundary term ``w1``, the one-dimensional kernels
``a_widom`` (for compressions T) and ``u_frak`` (for the Hankel-type H),
and the predictors assembled from them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from .errors import InputError, UnsupportedError
from .geometry import AxisBox, Disk, Domain, Interval, StarBoundary, normal_pair_integral
from .symbols import SeparableSymbol

TWO_PI = 2.0 * math.pi


class HypothesisWarning(UserWarning):
    """A domain falls outside the smoothness class the asymptotics are proved for."""


# --------------------------------------------------------------------------
# test functions


class TestFunction:
    __test__ = False  # keep pytest from collecting this

    def __call__(self, t):
        raise NotImplementedError

    @property
    def is_polynomial(self):
        return False


@dataclass(frozen=True)
class Polynomial(TestFunction):
    """``sum_k coefficients[k] * t**k`` with a vanishing constant term."""

    coefficients: tuple

    def __post_init__(self):
        c = [float(v) for v in self.coefficients]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if c and c[0] != 0.0:
            raise InputError("test function must vanish at 0 (constant term must be zero)")
        object.__setattr__(self, "coefficients", tuple(c))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for c in reversed(self.coefficients):
            out = out * t + c
        return out

    @property
    def is_polynomial(self):
        return True

    def terms(self):
        return [(p, c) for p, c in enumerate(self.coefficients) if c != 0.0]

    @property
    def degree(self):
        return len(self.coefficients) - 1


@dataclass(frozen=True)
class Monomial(TestFunction):
    p: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise InputError(f"monomial power must be a positive integer, got {self.p}")

    def __call__(self, t):
        return np.asarray(t, dtype=float) ** self.p

    @property
    def is_polynomial(self):
        return True

    def terms(self):
        return [(self.p, 1.0)]

    @property
    def degree(self):
        return self.p


@dataclass(frozen=True)
class IndicatorAbove(TestFunction):
    """Characteristic function of ``(lam, inf)``; equal on any bounded spectrum
    to the indicator of ``(lam, ||H|| + 1)``."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise InputError(f"threshold must be positive, got {self.lam}")

    def __call__(self, t):
        return (np.asarray(t, dtype=float) > self.lam).astype(float)


@dataclass(frozen=True)
class EvenIndicator(TestFunction):
    """Even part of :class:`IndicatorAbove`: ``0.5 * [|t| > lam]``."""

    lam: float

    def __call__(self, t):
        return 0.5 * (np.abs(np.asarray(t, dtype=float)) > self.lam)


@dataclass(frozen=True, eq=False)
class Generic(TestFunction):
    """Arbitrary vectorised ``func``; the continuity of ``g_ev(t)/t^2`` is trusted."""

    func: Callable
    name: str = "generic"
    even_ok: bool = True

    def __call__(self, t):
        return np.asarray(self.func(np.asarray(t, dtype=float)), dtype=float)


def even_part(g):
    if isinstance(g, Monomial):
        return g if g.p % 2 == 0 else Polynomial((0.0,))
    if isinstance(g, Polynomial):
        return Polynomial(tuple(c if k % 2 == 0 else 0.0 for k, c in enumerate(g.coefficients)))
    if isinstance(g, IndicatorAbove):
        return EvenIndicator(g.lam)
    if isinstance(g, EvenIndicator):
        return g
    return Generic(lambda t: 0.5 * (g(t) + g(-t)), f"even({getattr(g, 'name', g)})", g.even_ok)


def test_function_from_spec(spec):
    kind = spec.get("type")
    if kind == "monomial":
        return Monomial(int(spec["p"]))
    if kind == "polynomial":
        return Polynomial(tuple(spec["coefficients"]))
    if kind == "indicator_above":
        lam = spec["lambda"]
        if isinstance(lam, list):
            raise InputError("a single threshold is expected here")
        return IndicatorAbove(float(lam))
    raise InputError(f"unknown test function type {kind!r}")


# --------------------------------------------------------------------------
# one-dimensional kernels


def _power_sum(t, n):
    """1 + t + ... + t**(n-1)."""
    out = np.zeros(np.shape(t))
    for _ in range(n):
        out = out * t + 1.0
    return out


def a_widom(g, b_value, epsabs=1e-11, full_output=False):
    """``(2 pi)^-2 * int_0^1 [g(b t) - t g(b)] / (t (1 - t)) dt``.

    Split at 1/2. For polynomials the integrand is evaluated through the exact
    difference quotient ``-(sum_p c_p b^p (1 + t + ... + t^(p-2)))``; for other
    functions the removable endpoint singularities are left to the interior
    Gauss-Kronrod nodes, with ``s = 1 - t`` on the upper half.
    """
    if isinstance(g, (IndicatorAbove, EvenIndicator)):
        raise UnsupportedError("a_widom is undefined for indicator test functions; "
                               "use u_frak / u_indicator instead")
    b = float(b_value)
    if g.is_polynomial:
        terms = g.terms()

        def lower(t):
            return -sum(c * b**p * _power_sum(t, p - 1) for p, c in terms if p >= 2)

        def upper(s):
            return lower(1.0 - s)
    else:
        gb = float(g(b))

        def lower(t):
            return (float(g(b * t)) - t * gb) / (t * (1.0 - t))

        def upper(s):
            t = 1.0 - s
            return (float(g(b * t)) - t * gb) / (t * s)

    v1, e1 = quad(lower, 0.0, 0.5, epsabs=epsabs, epsrel=0.0, limit=200)
    v2, e2 = quad(upper, 0.0, 0.5, epsabs=epsabs, epsrel=0.0, limit=200)
    value = (v1 + v2) / TWO_PI**2
    if full_output:
        return value, (e1 + e2) / TWO_PI**2
    return value


def u_indicator(lam, b_value):
    """``(2/pi^2) arccosh(b / (2 lam))`` above ``2 lam``, zero below. Vectorised in ``b``."""
    if not lam > 0:
        raise InputError(f"threshold must be positive, got {lam}")
    b = np.asarray(b_value, dtype=float)
    if np.any(b < 0):
        raise InputError("u_indicator needs |a| >= 0")
    ratio = np.maximum(b / (2.0 * lam), 1.0)
    out = (2.0 / math.pi**2) * np.arccosh(ratio)
    return float(out) if out.ndim == 0 else out


def u_frak(g, b_value, epsabs=1e-11, closed_form=True):
    """``(2/pi^2) int_0^1 g(b t / 2) / (t sqrt(1 - t^2)) dt`` via ``t = sin(theta)``."""
    b = float(b_value)
    if b < 0:
        raise InputError(f"u_frak takes |a| >= 0, got {b}")
    if b == 0.0:
        return 0.0
    if isinstance(g, IndicatorAbove) and closed_form:
        return u_indicator(g.lam, b)
    if isinstance(g, EvenIndicator) and closed_form:
        return 0.5 * u_indicator(g.lam, b)
    points = None
    if isinstance(g, (IndicatorAbove, EvenIndicator)):
        if b <= 2 * g.lam:
            return 0.0
        points = [math.asin(2 * g.lam / b)]

    def integrand(th):
        s = math.sin(th)
        return float(g(0.5 * b * s)) / s

    val, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=epsabs, epsrel=0.0,
                  limit=200, points=points)
    return 2.0 / math.pi**2 * val


def _homogeneous_values(kernel, g, b):
    """Evaluate ``kernel(g, b)`` over an array, using degree-p homogeneity for polynomials."""
    b = np.asarray(b, dtype=float)
    if g.is_polynomial:
        out = np.zeros(b.shape)
        for p, c in g.terms():
            out = out + c * kernel(Monomial(p), 1.0) * b**p
        return out
    uniq, inv = np.unique(b, return_inverse=True)
    vals = np.array([kernel(g, v) for v in uniq])
    return vals[inv].reshape(b.shape)


def u_frak_values(g, b):
    b = np.asarray(b, dtype=float)
    if isinstance(g, IndicatorAbove):
        return u_indicator(g.lam, b) * np.ones(b.shape)
    if isinstance(g, EvenIndicator):
        return 0.5 * u_indicator(g.lam, b) * np.ones(b.shape)
    return _homogeneous_values(u_frak, g, b)


def a_widom_values(g, b):
    return _homogeneous_values(a_widom, g, b)


# --------------------------------------------------------------------------
# volume and boundary coefficients


@dataclass(frozen=True)
class CoefficientReport:
    value: float
    quadrature_error_estimate: float
    hypotheses_ok: bool

    def __float__(self):
        return self.value


def _check_pair(lam, omega):
    if lam.dimension != omega.dimension:
        raise InputError(f"dimension mismatch: {lam.dimension} vs {omega.dimension}")
    ok = bool(lam.smooth and omega.smooth)
    if not ok:
        warnings.warn("domain smoothness hypotheses violated; coefficient is exploratory",
                      HypothesisWarning, stacklevel=3)
    return ok


def domain_rule(domain: Domain, q: int):
    """Tensor Gauss rule of order ``q`` over the domain: ``(nodes (n, d), weights (n,))``."""
    t, w = leggauss(q)
    if isinstance(domain, Interval):
        h = 0.5 * (domain.hi - domain.lo)
        return (h * t + domain.lo + h)[:, None], h * w
    if isinstance(domain, AxisBox):
        hx = 0.5 * (domain.hi[0] - domain.lo[0])
        hy = 0.5 * (domain.hi[1] - domain.lo[1])
        X, Y = np.meshgrid(hx * t + domain.lo[0] + hx, hy * t + domain.lo[1] + hy, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], -1), np.outer(hx * w, hy * w).ravel()
    # polar rules: rho in [0, 1] scaled by the boundary radius
    n_th = 2 * q
    th = TWO_PI * np.arange(n_th) / n_th
    rho = 0.5 * (t + 1.0)
    wr = 0.5 * w
    if isinstance(domain, Disk):
        R = np.full(n_th, domain.r)
    elif isinstance(domain, StarBoundary):
        R = domain.r(th)
    else:
        raise UnsupportedError(f"no volume rule for {type(domain).__name__}")
    c = np.asarray(domain.center)
    rr = rho[:, None] * R[None, :]
    pts = c + np.stack([rr * np.cos(th), rr * np.sin(th)], -1)
    wts = wr[:, None] * rho[:, None] * R[None, :] ** 2 * (TWO_PI / n_th)
    return pts.reshape(-1, 2), wts.ravel()


def _product_integral(func, lam, omega, q, chunk=512):
    x, wx = domain_rule(lam, q)
    xi, wxi = domain_rule(omega, q)
    total = 0.0
    for i in range(0, len(wx), chunk):
        xs = x[i:i + chunk]
        X = np.repeat(xs, len(wxi), axis=0)
        XI = np.tile(xi, (len(xs), 1))
        vals = np.asarray(func(X, XI), dtype=float).reshape(len(xs), len(wxi))
        total += float(wx[i:i + chunk] @ vals @ wxi)
    return total


def _adaptive(fn, q0, q_max, rtol):
    prev = fn(q0)
    q = 2 * q0
    err = math.inf
    while q <= q_max:
        cur = fn(q)
        err = abs(cur - prev)
        if err <= rtol * abs(cur) + 1e-15:
            return cur, err
        prev, q = cur, 2 * q
    return prev, err


def w0(b, lam: Domain, omega: Domain, rtol=1e-10):
    """``(2 pi)^-d`` times the integral of ``b`` over ``lam x omega``."""
    ok = _check_pair(lam, omega)
    d = lam.dimension
    scale = TWO_PI ** (-d)
    if isinstance(b, (int, float)):
        return CoefficientReport(scale * b * lam.volume() * omega.volume(), 0.0, ok)
    if isinstance(b, SeparableSymbol) and b.is_constant:
        return CoefficientReport(scale * b.constant_value * lam.volume() * omega.volume(), 0.0, ok)
    q_max = 512 if d == 1 else 64
    if isinstance(b, SeparableSymbol):
        total, err = 0.0, 0.0
        for f, p in b.terms:
            fi, ef = _adaptive(lambda q: float(np.dot(f(domain_rule(lam, q)[0]),
                                                      domain_rule(lam, q)[1])), 8, q_max, rtol)
            pi, ep = _adaptive(lambda q: float(np.dot(p(domain_rule(omega, q)[0]),
                                                      domain_rule(omega, q)[1])), 8, q_max, rtol)
            total += fi * pi
            err += abs(fi) * ep + abs(pi) * ef
        return CoefficientReport(scale * total, scale * err, ok)
    val, err = _adaptive(lambda q: _product_integral(b, lam, omega, q), 8, q_max, rtol)
    return CoefficientReport(scale * val, scale * err, ok)


def w1(b, lam: Domain, omega: Domain, m=256):
    """``(2 pi)^-(d-1)`` times the boundary-pair integral of ``b |n_S . n_P|``.

    ``b`` is a number or a vectorised ``b(x, xi)`` evaluated pointwise at the
    boundary nodes. In 2D the error estimate compares against ``m // 2``.
    """
    ok = _check_pair(lam, omega)
    d = lam.dimension
    scale = TWO_PI ** (-(d - 1))
    if isinstance(b, (int, float)):
        c = float(b)
        if c == 0.0:
            return CoefficientReport(0.0, 0.0, ok)
        func = None
    else:
        c, func = 1.0, b
    val = c * normal_pair_integral(lam, omega, func, m)
    err = 0.0
    if d == 2:
        err = abs(val - c * normal_pair_integral(lam, omega, func, max(8, m // 2)))
    return CoefficientReport(scale * val, scale * err, ok)


# --------------------------------------------------------------------------
# predictors


def _as_symbol(a, d):
    if a is None:
        return SeparableSymbol.constant(1.0, d)
    if isinstance(a, (int, float)):
        return SeparableSymbol.constant(float(a), d)
    return a


def predicted_coefficients(kind, g, a, lam, omega, b=None, m=256):
    """Coefficients of the predicted law.

    Returns ``{"A": ..., "D": ...}`` where the law reads
    ``D * alpha^d + A * alpha^(d-1) * log(alpha)`` (``D`` is zero except for
    ``trace_T``), together with ``hypotheses_ok``.
    """
    d = lam.dimension
    a = _as_symbol(a, d)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisWarning)
        if kind == "trace_H":
            gev = even_part(g)
            rep = w1(lambda x, xi: u_frak_values(gev, np.abs(a(x, xi))), lam, omega, m)
            out = {"A": rep.value, "D": 0.0}
        elif kind == "count":
            lam_t = g.lam if isinstance(g, IndicatorAbove) else float(g)
            rep = w1(lambda x, xi: u_indicator(lam_t, np.abs(a(x, xi))), lam, omega, m)
            out = {"A": 0.5 * rep.value, "D": 0.0}
        elif kind == "trace_T":
            if not g.is_polynomial:
                raise UnsupportedError("trace_T prediction needs a polynomial test function")
            wgt = _as_symbol(b, d)
            rep = w1(lambda x, xi: wgt(x, xi) * a_widom_values(g, a(x, xi)), lam, omega, m)
            if a.is_constant and wgt.is_constant:
                lead = w0(wgt.constant_value * float(g(a.constant_value)), lam, omega)
            else:
                lead = w0(lambda x, xi: wgt(x, xi) * g(a(x, xi)), lam, omega)
            out = {"A": rep.value, "D": lead.value}
        else:
            raise InputError(f"unknown prediction kind {kind!r}")
    ok = bool(lam.smooth and omega.smooth)
    if not ok:
        warnings.warn("domain smoothness hypotheses violated; prediction is exploratory",
                      HypothesisWarning, stacklevel=2)
    out["hypotheses_ok"] = ok
    return out


def law_value(coeffs, alpha, d):
    alpha = np.asarray(alpha, dtype=float)
    return coeffs["D"] * alpha**d + coeffs["A"] * alpha ** (d - 1) * np.log(alpha)


def predict(kind, g, a, lam, omega, alpha, b=None, m=256):
    """Right-hand side of the trace or counting law at ``alpha`` (remainder dropped).

    ``kind`` is ``trace_H``, ``trace_T`` or ``count``; for ``count`` pass the
    threshold (or an :class:`IndicatorAbove`) as ``g``.
    """
    if alpha < 1:
        raise InputError(f"alpha must be >= 1, got {alpha}")
    coeffs = predicted_coefficients(kind, g, a, lam, omega, b=b, m=m)
    return float(law_value(coeffs, alpha, lam.dimension))
