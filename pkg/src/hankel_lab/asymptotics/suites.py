"""Exact-identity checks on small dense instances and Schatten-norm growth trends."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..geometry import Disk, Domain, Interval
from ..operators.assembly import apply_pdo, band_mask, composite_blocks, fourier_multiplier
from ..operators.bandspace import BandSpace
from ..operators.grid import Grid, GridPolicy, check_padding
from ..operators.spectral import hermitian_eigen, schatten_norm, singular_values
from ..symbols import Bump, Constant, Gaussian, SeparableSymbol
from .sweeps import Check


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    lam: Domain
    omega: Domain
    alpha: float
    symbol: SeparableSymbol


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    sequences: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"


def default_instances(symbol=None):
    """d=1 on (0, 1) x (-1, 1) at alpha 20 and 40, and d=2 unit disks at alpha 8."""
    a1 = symbol if symbol is not None and symbol.dimension == 1 else SeparableSymbol.constant(1.0, 1)
    a2 = symbol if symbol is not None and symbol.dimension == 2 else SeparableSymbol.constant(1.0, 2)
    return [
        Instance("d1_alpha20", Interval(0.0, 1.0), Interval(-1.0, 1.0), 20.0, a1),
        Instance("d1_alpha40", Interval(0.0, 1.0), Interval(-1.0, 1.0), 40.0, a1),
        Instance("d2_disk_alpha8", Disk((0.0, 0.0), 1.0), Disk((0.0, 0.0), 1.0), 8.0, a2),
    ]


def _max_abs(X):
    return float(np.max(np.abs(X))) if X.size else 0.0


def _rel(x, y):
    return abs(x - y) / max(1.0, abs(x), abs(y))


def identity_checks(inst: Instance, policy: GridPolicy, tol=1e-9):
    """Checks that hold to rounding for the discrete operators."""
    d = inst.lam.dimension
    xi_max = max(inst.omega.max_abs(),
                 inst.symbol.xi_support() if math.isfinite(inst.symbol.xi_support()) else 0.0)
    grid = policy.grid(inst.alpha, d, xi_max, inst.omega.max_abs())
    inside, outside, T, G = composite_blocks(grid, inst.symbol, inst.lam, inst.omega, policy.margin)
    n = grid.size
    H = np.zeros((n, n), dtype=complex)
    H[np.ix_(outside, inside)] = G
    H[np.ix_(inside, outside)] = G.conj().T
    Gfull = np.zeros_like(H)
    Gfull[np.ix_(outside, inside)] = G
    u = np.where(np.isin(np.arange(n), inside), 1.0, -1.0)
    scale = max(1.0, _max_abs(H))
    ev = hermitian_eigen(H).values
    out = []

    def add(name, value, limit=tol, detail=""):
        out.append(Check(f"{inst.name}:{name}", float(value), limit, bool(value <= limit), detail))

    add("UHU_plus_H", _max_abs(u[:, None] * H * u[None, :] + H) / scale)
    add("G_squared", _max_abs(Gfull @ Gfull) / scale**2)
    add("spectrum_symmetry", _max_abs(ev + ev[::-1]) / scale)
    for name, odd, even in (("parity_t+t2", lambda t: t, lambda t: t**2),
                            ("parity_t3+t4", lambda t: t**3, lambda t: t**4)):
        full = math.fsum(odd(ev) + even(ev))
        ev_part = math.fsum(even(ev))
        add(name, _rel(full, ev_part))
    GG = G.conj().T @ G
    mu = hermitian_eigen(GG).values
    for p in (1, 2, 3):
        lhs = math.fsum(ev ** (2 * p))
        rhs = 2.0 * math.fsum(mu**p)
        add(f"trace_H{2 * p}_vs_2trace_GstarG{p}", _rel(lhs, rhs) if lhs or rhs else 0.0)
    if inst.symbol.is_constant and inst.symbol.constant_value == 1.0:
        add("GstarG_equals_T_minus_T2", _max_abs(GG - (T - T @ T)))
    else:
        out.append(Check(f"{inst.name}:GstarG_equals_T_minus_T2", 0.0, tol, True,
                         "skipped: holds for a = 1 only"))
    s_right = singular_values(G).values
    s_left = np.sqrt(np.maximum(hermitian_eigen(G @ G.conj().T).values, 0.0))
    k = min(len(s_right), len(s_left))
    big = np.sort(s_right)[len(s_right) - k:]
    big_left = np.sort(s_left)[len(s_left) - k:]
    rest = np.sort(s_left)[: len(s_left) - k]
    dev = max(_max_abs(big**2 - big_left**2), _max_abs(rest**2))
    add("nonzero_spectra_GstarG_GGstar", dev / scale**2)
    H2 = H @ H
    add("H2_block_diagonal", max(_max_abs(H2[np.ix_(inside, outside)]),
                                 _max_abs(H2[np.ix_(outside, inside)])) / scale**2, 1e-10)
    return out


def identity_suite(instances=None, policy=None, tol=1e-9) -> SuiteReport:
    t0 = time.perf_counter()
    policy = policy or GridPolicy(oversample=2.0)
    rep = SuiteReport("identity_suite")
    for inst in instances or default_instances():
        rep.checks.extend(identity_checks(inst, policy, tol))
    rep.runtime = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# growth of Schatten norms with alpha


def default_growth_symbols():
    """Smooth pair whose supports straddle the edges of (0, 1) and of (-1, 1)."""
    a = SeparableSymbol(((Gaussian((0.0,), 0.1, 1.0), Bump((0.0,), 1.5, 1.0)),), 1)
    b = SeparableSymbol(((Gaussian((0.2,), 0.1, 1.0), Bump((0.2,), 1.0, 1.0)),), 1)
    return a, b


def _dense_pdo(grid, a, side="left"):
    return apply_pdo(grid, a, np.eye(grid.size, dtype=complex), side)


def growth_quantities(grid: Grid, a, b, lam: Domain, omega: Domain):
    """Trace norms of the four commutator-type differences at one alpha."""
    chi = np.asarray(lam.contains(grid.points), dtype=float)
    mask = band_mask(grid, omega).astype(float)
    A_l = _dense_pdo(grid, a, "left")
    out = {}
    if a.depends_on_x:
        out["S1_left_minus_right"] = schatten_norm(A_l - _dense_pdo(grid, a, "right"), 1)
    else:
        out["S1_left_minus_right"] = 0.0
    B_l = _dense_pdo(grid, b, "left")
    AB = apply_pdo(grid, a * b, np.eye(grid.size, dtype=complex), "left")
    out["S1_product_defect"] = schatten_norm(A_l @ B_l - AB, 1)
    PA = fourier_multiplier(grid, mask, A_l)
    AP = fourier_multiplier(grid, mask, A_l.conj().T).conj().T
    out["S1_commutator_P"] = schatten_norm(AP - PA, 1)
    out["S1_commutator_chi"] = schatten_norm(A_l * chi[None, :] - chi[:, None] * A_l, 1)
    return out


def growth_suite(alphas=(50.0, 100.0, 200.0, 400.0, 800.0), symbols=None,
                 lam=None, omega=None, policy=None, ratio_limit=2.0, drift_tol=0.15,
                 drift_window=2.0) -> SuiteReport:
    """Boundedness of the S1 quantities in d=1 and the drift of ``||G||_S2^2 / log alpha``."""
    t0 = time.perf_counter()
    a, b = symbols or default_growth_symbols()
    lam = lam or Interval(0.0, 1.0)
    omega = omega or Interval(-1.0, 1.0)
    policy = policy or GridPolicy()
    rep = SuiteReport("growth_suite")
    seq = {k: [] for k in ("S1_left_minus_right", "S1_product_defect", "S1_commutator_P",
                           "S1_commutator_chi", "hs_over_log")}
    xi_max = max(omega.max_abs(), *(s.xi_support() for s in (a, b)
                                    if math.isfinite(s.xi_support())))
    for alpha in alphas:
        grid = policy.grid(alpha, lam.dimension, xi_max, omega.max_abs())
        check_padding(grid, lam.max_abs(), a.x_support(), b.x_support())
        q = growth_quantities(grid, a, b, lam, omega)
        for k, v in q.items():
            seq[k].append(v)
        hs = BandSpace(grid, omega, policy.margin).hs_norm_squared(a, lam)
        seq["hs_over_log"].append(hs / math.log(alpha))
    rep.sequences = {"alpha": list(alphas), **seq}
    for k in ("S1_left_minus_right", "S1_product_defect", "S1_commutator_P", "S1_commutator_chi"):
        v = np.asarray(seq[k])
        if np.all(v == 0):
            rep.checks.append(Check(f"bounded:{k}", 1.0, ratio_limit, True, "identically zero"))
            continue
        r = float(v.max() / v.min()) if v.min() > 0 else math.inf
        rep.checks.append(Check(f"bounded:{k}", r, ratio_limit, r <= ratio_limit,
                                "max/min over the sweep"))
    top = max(alphas)
    window = [h for al, h in zip(alphas, seq["hs_over_log"]) if al >= top / drift_window * (1 - 1e-12)]
    drift = max(window) / min(window) - 1.0 if min(window) > 0 else math.inf
    rep.checks.append(Check("drift:hs_over_log", drift, drift_tol, drift <= drift_tol,
                            f"alpha >= {top / drift_window:g}"))
    rep.runtime = time.perf_counter() - t0
    return rep
