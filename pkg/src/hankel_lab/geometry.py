"""Spatial and frequency domains: indicators, volumes and boundary quadratures.

Domains are immutable. Two-dimensional shapes expose their boundary as a list
of parametrised arcs, which is what the kink-splitting pair integrator in
:func:`normal_pair_integral` works on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .errors import InputError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BoundaryQuadrature:
    nodes: np.ndarray    # (n, d)
    normals: np.ndarray  # (n, d), exterior, unit length
    weights: np.ndarray  # (n,)

    def __len__(self):
        return len(self.weights)

    def integrate(self, f):
        """Approximate the boundary integral of ``f(nodes, normals)``."""
        return float(np.dot(self.weights, f(self.nodes, self.normals)))


@dataclass(frozen=True)
class Arc:
    """A smooth boundary piece ``s -> point(s)`` for ``s`` in ``[s0, s1]``."""

    s0: float
    s1: float
    point: Callable[[np.ndarray], np.ndarray]
    normal: Callable[[np.ndarray], np.ndarray]
    speed: Callable[[np.ndarray], np.ndarray]
    periodic: bool = False
    # Angles where n(s) . v == 0 for a given direction v, if known in closed form.
    orthogonal_params: Callable[[np.ndarray], np.ndarray] | None = None


def _as_points(points, dim):
    p = np.asarray(points, dtype=float)
    if dim == 1 and (p.ndim == 0 or p.shape[-1] != 1):
        p = p[..., None]
    if p.shape[-1] != dim:
        raise InputError(f"point dimension {p.shape[-1]} does not match domain dimension {dim}")
    return p


def _gauss_panels(a, b, n_panels, q):
    t, w = leggauss(q)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return s, ws


class Domain:
    """Common interface; concrete shapes below."""

    dimension: int
    smooth: bool

    def contains(self, points):
        raise NotImplementedError

    def volume(self):
        raise NotImplementedError

    def boundary_quadrature(self, m=256):
        raise NotImplementedError

    def max_abs(self):
        """sup over the closed domain of the sup-norm of a point."""
        raise NotImplementedError

    def radius(self):
        """sup over the closed domain of the Euclidean norm of a point."""
        raise NotImplementedError

    def arcs(self):
        raise NotImplementedError(f"{type(self).__name__} has no curve boundary")


@dataclass(frozen=True)
class Interval(Domain):
    lo: float
    hi: float
    dimension: int = field(default=1, init=False)
    smooth: bool = field(default=True, init=False)

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InputError(f"Interval needs lo < hi, got ({self.lo}, {self.hi})")

    def contains(self, points):
        p = _as_points(points, 1)[..., 0]
        return (p >= self.lo) & (p <= self.hi)

    def volume(self):
        return self.hi - self.lo

    def boundary_quadrature(self, m=None):
        return BoundaryQuadrature(
            nodes=np.array([[self.lo], [self.hi]]),
            normals=np.array([[-1.0], [1.0]]),
            weights=np.array([1.0, 1.0]),
        )

    def max_abs(self):
        return max(abs(self.lo), abs(self.hi))

    radius = max_abs


@dataclass(frozen=True)
class Disk(Domain):
    center: tuple = (0.0, 0.0)
    r: float = 1.0
    dimension: int = field(default=2, init=False)
    smooth: bool = field(default=True, init=False)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) != 2:
            raise InputError("Disk center must be a pair")
        if not self.r > 0:
            raise InputError(f"Disk radius must be positive, got {self.r}")

    def contains(self, points):
        p = _as_points(points, 2) - np.asarray(self.center)
        return np.einsum("...i,...i->...", p, p) <= self.r**2

    def volume(self):
        return math.pi * self.r**2

    def boundary_quadrature(self, m=256):
        if m < 8:
            raise InputError(f"boundary_quadrature needs m >= 8 in 2D, got {m}")
        th = TWO_PI * np.arange(m) / m
        normals = np.stack([np.cos(th), np.sin(th)], axis=-1)
        nodes = np.asarray(self.center) + self.r * normals
        return BoundaryQuadrature(nodes, normals, np.full(m, TWO_PI * self.r / m))

    def max_abs(self):
        return max(abs(c) for c in self.center) + self.r

    def radius(self):
        return math.hypot(*self.center) + self.r

    def arcs(self):
        c = np.asarray(self.center)
        r = self.r

        def normal(s):
            return np.stack([np.cos(s), np.sin(s)], axis=-1)

        def orthogonal(v):
            psi = math.atan2(v[1], v[0])
            return np.mod(np.array([psi - 0.5 * math.pi, psi + 0.5 * math.pi]), TWO_PI)

        return [Arc(0.0, TWO_PI, lambda s: c + r * normal(s), normal,
                    lambda s: np.full(np.shape(s), r), periodic=True,
                    orthogonal_params=orthogonal)]


@dataclass(frozen=True)
class AxisBox(Domain):
    lo: tuple
    hi: tuple
    dimension: int = field(default=2, init=False)
    smooth: bool = field(default=False, init=False)

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != 2 or len(self.hi) != 2:
            raise InputError("AxisBox corners must be pairs")
        if not all(a < b for a, b in zip(self.lo, self.hi)):
            raise InputError(f"AxisBox needs lo < hi componentwise, got {self.lo}, {self.hi}")

    def contains(self, points):
        p = _as_points(points, 2)
        return np.all((p >= np.asarray(self.lo)) & (p <= np.asarray(self.hi)), axis=-1)

    def volume(self):
        return (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])

    def _edges(self):
        (x0, y0), (x1, y1) = self.lo, self.hi
        # (start, end, exterior normal), counter-clockwise
        return [((x0, y0), (x1, y0), (0.0, -1.0)),
                ((x1, y0), (x1, y1), (1.0, 0.0)),
                ((x1, y1), (x0, y1), (0.0, 1.0)),
                ((x0, y1), (x0, y0), (-1.0, 0.0))]

    def boundary_quadrature(self, m=256, panel=16):
        if m < 8:
            raise InputError(f"boundary_quadrature needs m >= 8 in 2D, got {m}")
        perim = 2 * ((self.hi[0] - self.lo[0]) + (self.hi[1] - self.lo[1]))
        nodes, normals, weights = [], [], []
        for a, b, n in self._edges():
            a, b = np.asarray(a), np.asarray(b)
            length = float(np.linalg.norm(b - a))
            ne = max(2, int(round(m * length / perim)))
            n_panels = -(-ne // panel)
            s, w = _gauss_panels(0.0, 1.0, n_panels, -(-ne // n_panels))
            nodes.append(a + s[:, None] * (b - a))
            normals.append(np.tile(n, (len(s), 1)))
            weights.append(w * length)
        return BoundaryQuadrature(np.concatenate(nodes), np.concatenate(normals),
                                  np.concatenate(weights))

    def max_abs(self):
        return max(abs(v) for v in self.lo + self.hi)

    def radius(self):
        return max(math.hypot(x, y) for x in (self.lo[0], self.hi[0])
                   for y in (self.lo[1], self.hi[1]))

    def arcs(self):
        out = []
        for a, b, n in self._edges():
            a, b, n = np.asarray(a), np.asarray(b), np.asarray(n)
            length = float(np.linalg.norm(b - a))
            out.append(Arc(0.0, 1.0,
                           lambda s, a=a, b=b: a + np.asarray(s)[..., None] * (b - a),
                           lambda s, n=n: np.broadcast_to(n, np.shape(s) + (2,)),
                           lambda s, L=length: np.full(np.shape(s), L)))
        return out


@dataclass(frozen=True)
class StarBoundary(Domain):
    """Star-shaped region ``|x - center| <= r(angle)`` with a trigonometric radius."""

    center: tuple = (0.0, 0.0)
    c0: float = 1.0
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()
    dimension: int = field(default=2, init=False)
    smooth: bool = field(default=True, init=False)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))
        th = TWO_PI * np.arange(4096) / 4096
        if not np.min(self.r(th)) > 0:
            raise InputError("StarBoundary radius must stay positive")

    @property
    def order(self):
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    def _coeffs(self):
        M = self.order
        c = np.zeros(M)
        s = np.zeros(M)
        c[:len(self.cos_coeffs)] = self.cos_coeffs
        s[:len(self.sin_coeffs)] = self.sin_coeffs
        return c, s, np.arange(1, M + 1)

    def r(self, theta):
        theta = np.asarray(theta, dtype=float)
        c, s, k = self._coeffs()
        kt = theta[..., None] * k
        return self.c0 + np.cos(kt) @ c + np.sin(kt) @ s

    def dr(self, theta):
        theta = np.asarray(theta, dtype=float)
        c, s, k = self._coeffs()
        kt = theta[..., None] * k
        return np.sin(kt) @ (-k * c) + np.cos(kt) @ (k * s)

    def contains(self, points):
        p = _as_points(points, 2) - np.asarray(self.center)
        rho = np.hypot(p[..., 0], p[..., 1])
        return rho <= self.r(np.arctan2(p[..., 1], p[..., 0]))

    def volume(self):
        # r^2 is a trigonometric polynomial of degree 2M; the trapezoid rule is exact.
        n = 4 * self.order + 16
        th = TWO_PI * np.arange(n) / n
        return float(0.5 * np.mean(self.r(th) ** 2) * TWO_PI)

    def _point(self, th):
        u = np.stack([np.cos(th), np.sin(th)], axis=-1)
        return np.asarray(self.center) + self.r(th)[..., None] * u

    def _normal(self, th):
        r, dr = self.r(th), self.dr(th)
        c, s = np.cos(th), np.sin(th)
        # tangent = dr*(c, s) + r*(-s, c); exterior normal = tangent rotated clockwise
        nx = dr * s + r * c
        ny = -dr * c + r * s
        norm = np.hypot(nx, ny)
        return np.stack([nx / norm, ny / norm], axis=-1)

    def _speed(self, th):
        return np.hypot(self.r(th), self.dr(th))

    def boundary_quadrature(self, m=1024):
        if m < 8:
            raise InputError(f"boundary_quadrature needs m >= 8 in 2D, got {m}")
        th = TWO_PI * np.arange(m) / m
        return BoundaryQuadrature(self._point(th), self._normal(th),
                                  self._speed(th) * TWO_PI / m)

    def _boundary_sup(self, norm):
        th = TWO_PI * np.arange(4096) / 4096
        return float(np.max(norm(self._point(th))))

    def max_abs(self):
        return self._boundary_sup(lambda p: np.max(np.abs(p), axis=-1))

    def radius(self):
        return self._boundary_sup(lambda p: np.hypot(p[:, 0], p[:, 1]))

    def arcs(self):
        return [Arc(0.0, TWO_PI, self._point, self._normal, self._speed, periodic=True)]


def contains(domain, point):
    """Closed-set indicator of ``domain`` at ``point`` (scalar or array of points)."""
    out = domain.contains(point)
    return bool(out) if np.ndim(out) == 0 else out


def volume(domain):
    return domain.volume()


def boundary_quadrature(domain, m=256):
    return domain.boundary_quadrature(m)


def _orthogonal_split(arc, v, samples):
    """Parameters in (s0, s1) where n(s) . v changes sign."""
    if arc.orthogonal_params is not None:
        z = arc.orthogonal_params(v)
        return np.sort(z[(z > arc.s0) & (z < arc.s1)])
    s = np.linspace(arc.s0, arc.s1, samples + 1)
    f = arc.normal(s) @ v
    roots = []
    for i in range(samples):
        if f[i] == 0.0 and i > 0:
            roots.append(s[i])
        elif f[i] * f[i + 1] < 0:
            roots.append(brentq(lambda t: float(arc.normal(np.array(t)) @ v),
                                s[i], s[i + 1], xtol=1e-15))
    return np.asarray(roots)


def _inner_rule(arcs, v, q, max_panel, samples):
    """Nodes/normals/weights on the arcs with panel breaks at the kinks of |n . v|."""
    pts, nrm, wts = [], [], []
    for arc in arcs:
        cuts = _orthogonal_split(arc, v, samples)
        if arc.periodic and len(cuts):
            # rotate so that pieces start at a kink; wrap the last one past s1
            period = arc.s1 - arc.s0
            breaks = np.concatenate([cuts, [cuts[0] + period]])
        else:
            breaks = np.concatenate([[arc.s0], cuts, [arc.s1]])
        for a, b in zip(breaks[:-1], breaks[1:]):
            if b <= a:
                continue
            n_panels = max(1, int(math.ceil((b - a) / max_panel)))
            s, w = _gauss_panels(a, b, n_panels, q)
            pts.append(arc.point(s))
            nrm.append(arc.normal(s))
            wts.append(w * arc.speed(s))
    return np.concatenate(pts), np.concatenate(nrm), np.concatenate(wts)


def normal_pair_integral(S, P, func=None, m=256, q=16, samples=512):
    """Integral over the two boundaries of ``func(x, xi) * |n_S(x) . n_P(xi)|``.

    The outer boundary uses ``boundary_quadrature(S, m)``. For each outer node
    the inner boundary is split where ``n_P`` is orthogonal to the outer
    normal, since ``|n_S . n_P|`` has a kink there that would otherwise cap
    the rule at second order. ``func`` takes two ``(k, d)`` arrays and returns
    ``(k,)`` values; ``None`` means the constant 1.
    """
    if S.dimension != P.dimension:
        raise InputError(f"dimension mismatch: {S.dimension} vs {P.dimension}")
    outer = S.boundary_quadrature(m)
    if S.dimension == 1:
        inner = P.boundary_quadrature()
        X = np.repeat(outer.nodes, len(inner), axis=0)
        XI = np.tile(inner.nodes, (len(outer), 1))
        w = np.outer(outer.weights, inner.weights).ravel()
        dots = np.abs(np.outer(outer.normals[:, 0], inner.normals[:, 0])).ravel()
    else:
        arcs = P.arcs()
        blocks = [_inner_rule(arcs, n, q, math.pi / 8, samples) for n in outer.normals]
        sizes = [len(b[2]) for b in blocks]
        X = np.repeat(outer.nodes, sizes, axis=0)
        XI = np.concatenate([b[0] for b in blocks])
        NX = np.repeat(outer.normals, sizes, axis=0)
        dots = np.abs(np.einsum("ij,ij->i", NX, np.concatenate([b[1] for b in blocks])))
        w = np.repeat(outer.weights, sizes) * np.concatenate([b[2] for b in blocks])
    vals = np.ones(len(w)) if func is None else np.asarray(func(X, XI))
    return float(np.sum(vals * dots * w))


def domain_from_spec(spec: dict) -> Domain:
    """Build a domain from a config fragment such as ``{"shape": "disk", "r": 1}``."""
    shape = spec.get("shape")
    args = {k: v for k, v in spec.items() if k != "shape"}
    builders = {
        "interval": lambda lo, hi: Interval(lo, hi),
        "disk": lambda r=1.0, center=(0.0, 0.0): Disk(center, r),
        "box": lambda lo, hi: AxisBox(lo, hi),
        "star": lambda c0, cos=(), sin=(), center=(0.0, 0.0): StarBoundary(center, c0, cos, sin),
    }
    if shape not in builders:
        raise InputError(f"unknown domain shape {shape!r}")
    try:
        return builders[shape](**args)
    except TypeError as exc:
        raise InputError(f"bad parameters for {shape} domain: {exc}") from None


def domain_to_spec(domain: Domain) -> dict:
    if isinstance(domain, Interval):
        return {"shape": "interval", "lo": domain.lo, "hi": domain.hi}
    if isinstance(domain, Disk):
        return {"shape": "disk", "r": domain.r, "center": list(domain.center)}
    if isinstance(domain, AxisBox):
        return {"shape": "box", "lo": list(domain.lo), "hi": list(domain.hi)}
    return {"shape": "star", "c0": domain.c0, "cos": list(domain.cos_coeffs),
            "sin": list(domain.sin_coeffs), "center": list(domain.center)}


__all__ = [
    "Arc", "AxisBox", "BoundaryQuadrature", "Disk", "Domain", "Interval",
    "StarBoundary", "boundary_quadrature", "contains", "domain_from_spec",
    "domain_to_spec", "normal_pair_integral", "volume",
]
