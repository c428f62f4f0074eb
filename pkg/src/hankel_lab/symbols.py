"""Separable symbols ``a(x, xi) = sum_i f_i(x) * phi_i(xi)`` and their factors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


def _pts(x, d):
    x = np.asarray(x, dtype=float)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    return x


@dataclass(frozen=True)
class Constant:
    value: float = 1.0
    dimension: int = 1

    def __call__(self, x):
        x = _pts(x, self.dimension)
        return np.full(x.shape[:-1], self.value, dtype=float)

    def support(self):
        """Sup-norm radius of the support; ``inf`` unless the constant is zero."""
        return 0.0 if self.value == 0 else math.inf


@dataclass(frozen=True)
class Bump:
    """``height * exp(1 - 1/(1 - |x-c|^2/r^2))`` inside the ball, zero outside.

    Normalised so the peak value is ``height``; C-infinity with compact support.
    """

    center: tuple
    radius: float
    height: float = 1.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", tuple(c.tolist()))
        if not self.radius > 0:
            raise InputError("bump radius must be positive")

    @property
    def dimension(self):
        return len(self.center)

    def __call__(self, x):
        x = _pts(x, self.dimension)
        rho2 = np.sum((x - np.asarray(self.center)) ** 2, axis=-1) / self.radius**2
        out = np.zeros(rho2.shape)
        inside = rho2 < 1.0
        out[inside] = self.height * np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
        return out

    def support(self):
        return max(abs(c) for c in self.center) + self.radius


@dataclass(frozen=True)
class Gaussian:
    center: tuple
    width: float
    height: float = 1.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", tuple(c.tolist()))
        if not self.width > 0:
            raise InputError("gaussian width must be positive")

    @property
    def dimension(self):
        return len(self.center)

    def __call__(self, x):
        x = _pts(x, self.dimension)
        rho2 = np.sum((x - np.asarray(self.center)) ** 2, axis=-1) / self.width**2
        return self.height * np.exp(-0.5 * rho2)

    def support(self):
        # below 1e-14 of the peak past 8 widths
        return max(abs(c) for c in self.center) + 8.0 * self.width


@dataclass(frozen=True)
class SeparableSymbol:
    """Finite sum of products ``f(x) * phi(xi)``.

    The smoothness condition the asymptotic theory needs on ``a`` is taken on
    trust; Bump and Gaussian factors satisfy it, and a constant symbol is
    admitted because the cutoffs already localise.
    """

    terms: tuple
    dimension: int = 1
    note: str = field(default="smooth factors (trusted)", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(tuple(t) for t in self.terms))

    @classmethod
    def constant(cls, value=1.0, dimension=1):
        c = Constant(1.0, dimension)
        return cls(((Constant(value, dimension), c),), dimension)

    @property
    def is_constant(self):
        return all(isinstance(f, Constant) and isinstance(p, Constant) for f, p in self.terms)

    @property
    def constant_value(self):
        return sum(f.value * p.value for f, p in self.terms)

    @property
    def depends_on_x(self):
        return any(not isinstance(f, Constant) for f, _ in self.terms)

    def __call__(self, x, xi):
        x = _pts(x, self.dimension)
        xi = _pts(xi, self.dimension)
        out = 0.0
        for f, p in self.terms:
            out = out + f(x) * p(xi)
        return np.asarray(out, dtype=float)

    def __mul__(self, other):
        if not isinstance(other, SeparableSymbol):
            return NotImplemented
        terms = tuple((_Product(f1, f2), _Product(p1, p2))
                      for f1, p1 in self.terms for f2, p2 in other.terms)
        return SeparableSymbol(terms, self.dimension)

    def x_support(self):
        return max((f.support() for f, _ in self.terms), default=0.0)

    def xi_support(self):
        return max((p.support() for _, p in self.terms), default=0.0)


@dataclass(frozen=True)
class _Product:
    left: object
    right: object

    def __call__(self, x):
        return self.left(x) * self.right(x)

    def support(self):
        return min(self.left.support(), self.right.support())


def function_from_spec(spec, dimension):
    kind = spec.get("kind")
    args = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "const":
            return Constant(float(args.pop("value", 1.0)), dimension, **args)
        if kind == "bump":
            return Bump(**args)
        if kind == "gaussian":
            return Gaussian(**args)
    except TypeError as exc:
        raise InputError(f"bad parameters for {kind}: {exc}") from None
    raise InputError(f"unknown function kind {kind!r}")


def symbol_from_spec(terms, dimension):
    """``terms`` is a list of ``{"f": {...}, "phi": {...}}`` or a bare number."""
    if isinstance(terms, (int, float)):
        return SeparableSymbol.constant(float(terms), dimension)
    built = []
    for t in terms:
        f = function_from_spec(t["f"], dimension)
        p = function_from_spec(t["phi"], dimension)
        for g in (f, p):
            if g.dimension != dimension:
                raise InputError(f"symbol factor dimension {g.dimension} != {dimension}")
        built.append((f, p))
    return SeparableSymbol(tuple(built), dimension)
