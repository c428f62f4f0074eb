"""Hermitian eigenvalues, singular values and trace functionals.

Two eigen-routes are available. ``method="householder"`` is the in-package
solver: Householder reduction to a real symmetric tridiagonal matrix followed
by implicit-shift QL. ``method="lapack"`` (the default) hands the same problem
to LAPACK through numpy, which runs the identical algorithm class in compiled
code and is what the large sweeps use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, NumericalError
from .assembly import DenseOperator

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Ascending eigenvalues (``kind="eigen"``) or singular values (``kind="singular"``).

    For singular data of a block G, ``kernel_dim`` counts the zero eigenvalues
    of ``G + G*`` beyond the ``+-sigma`` pairs.
    """

    values: np.ndarray
    kind: str = "eigen"
    kernel_dim: int = 0
    vectors: np.ndarray | None = None

    def __len__(self):
        return len(self.values)

    def signed_spectrum(self):
        """Eigenvalues of ``G + G*`` reconstructed from singular data."""
        if self.kind != "singular":
            return self.values
        s = self.values
        return np.sort(np.concatenate([-s, np.zeros(self.kernel_dim), s]))


def _matrix(A):
    return A.matrix if isinstance(A, DenseOperator) else np.asarray(A)


def tridiagonalize(A, want_vectors=False):
    """Householder reduction of a Hermitian matrix.

    Returns ``(d, e, Q)`` with ``Q* A Q`` real symmetric tridiagonal with
    diagonal ``d`` and off-diagonal ``e`` (``Q`` is ``None`` unless requested).
    """
    A = np.array(A, dtype=complex, copy=True)
    n = A.shape[0]
    Q = np.eye(n, dtype=complex) if want_vectors else None
    for k in range(n - 2):
        x = A[k + 1:, k]
        sigma = np.linalg.norm(x)
        if sigma == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * sigma
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        sub = A[k + 1:, k + 1:]
        p = sub @ v
        w = p - np.vdot(v, p).real * v
        sub -= 2.0 * (np.outer(v, w.conj()) + np.outer(w, v.conj()))
        A[k + 1:, k] = 0.0
        A[k, k + 1:] = 0.0
        A[k + 1, k] = alpha
        A[k, k + 1] = np.conj(alpha)
        if Q is not None:
            Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
    d = A.diagonal().real.copy()
    sub = A.diagonal(-1).copy()
    e = np.abs(sub)
    if Q is not None:
        # unit diagonal similarity that makes the off-diagonal real and nonnegative
        phases = np.ones(n, dtype=complex)
        for j in range(n - 1):
            u = sub[j] / e[j] if e[j] != 0 else 1.0
            phases[j + 1] = phases[j] * u
        Q = Q * phases[None, :]
    return d, e, Q


def tql_implicit(d, e, Z=None, max_iter=60):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    ``e[i]`` couples ``d[i]`` and ``d[i+1]``. ``Z``, if given, is updated in
    place with the accumulated rotations (pass the tridiagonalising basis to
    get eigenvectors of the original matrix). Returns unsorted eigenvalues.
    """
    d = np.array(d, dtype=float, copy=True)
    n = len(d)
    e = np.concatenate([np.asarray(e, dtype=float), [0.0]])
    dl = d.tolist()
    el = e.tolist()
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(dl[m]) + abs(dl[m + 1])
                if abs(el[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise NumericalError(f"QL iteration did not converge for eigenvalue {l} "
                                     f"after {max_iter} sweeps (|e| = {abs(el[l]):.3e})")
            g = (dl[l + 1] - dl[l]) / (2.0 * el[l])
            r = math.hypot(g, 1.0)
            g = dl[m] - dl[l] + el[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * el[i]
                b = c * el[i]
                r = math.hypot(f, g)
                el[i + 1] = r
                if r == 0.0:
                    dl[i + 1] -= p
                    el[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = dl[i + 1] - p
                r = (dl[i] - g) * s + 2.0 * c * b
                p = s * r
                dl[i + 1] = g + p
                g = c * r - b
                if Z is not None:
                    zi1 = Z[:, i + 1].copy()
                    Z[:, i + 1] = s * Z[:, i] + c * zi1
                    Z[:, i] = c * Z[:, i] - s * zi1
                i -= 1
            if deflated:
                continue
            dl[l] -= p
            el[l] = g
            el[m] = 0.0
    return np.array(dl)


def hermitian_eigen(A, method="lapack", vectors=False, hermitian_tol=1e-10):
    """Full spectrum of a self-adjoint matrix, ascending.

    The input is symmetrised as ``(A + A*) / 2`` after checking it is
    Hermitian to ``hermitian_tol`` relative to its largest entry.
    """
    M = _matrix(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"hermitian_eigen needs a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - M.conj().T)) > hermitian_tol * scale:
        raise InputError("matrix is not self-adjoint within tolerance")
    M = 0.5 * (M + M.conj().T)
    if method == "lapack":
        try:
            if vectors:
                w, V = np.linalg.eigh(M)
                return SpectralData(w, "eigen", 0, V)
            return SpectralData(np.linalg.eigvalsh(M), "eigen")
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"LAPACK eigensolver failed: {exc}; "
                                 f"condition estimate {np.linalg.cond(M):.3e}") from None
    if method == "householder":
        d, e, Q = tridiagonalize(M, want_vectors=vectors)
        try:
            w = tql_implicit(d, e, Q)
        except NumericalError as exc:
            raise NumericalError(f"{exc}; condition estimate {np.linalg.cond(M):.3e}") from None
        order = np.argsort(w, kind="stable")
        return SpectralData(w[order], "eigen", 0, None if Q is None else Q[:, order])
    raise InputError(f"unknown eigen method {method!r}")


def residuals(A, spectral: SpectralData, sample=5, seed=0):
    """Max ``||A v - lam v||`` over ``sample`` eigenpairs picked deterministically."""
    M = _matrix(A)
    if spectral.vectors is None:
        raise InputError("spectral data carries no eigenvectors")
    n = len(spectral.values)
    idx = np.random.default_rng(seed).choice(n, size=min(sample, n), replace=False)
    V = spectral.vectors[:, idx]
    R = M @ V - V * spectral.values[idx]
    return float(np.max(np.linalg.norm(R, axis=0)))


def singular_values(A, method="lapack"):
    """Singular values from the smaller Gram block, ascending."""
    M = _matrix(A)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return SpectralData(np.zeros(0), "singular", abs(rows - cols))
    gram = M.conj().T @ M if rows >= cols else M @ M.conj().T
    lam = hermitian_eigen(gram, method=method).values
    return SpectralData(np.sqrt(np.maximum(lam, 0.0)), "singular", abs(rows - cols))


def trace_of_function(S: SpectralData, g):
    """``sum g(lam_i)``; for singular data of G this is ``tr g(G + G*)``."""
    if float(np.asarray(g(np.zeros(1)))[0]) != 0.0:
        raise InputError("trace_of_function needs g(0) = 0")
    v = np.asarray(S.values, dtype=float)
    if S.kind == "singular":
        gp, gm = np.asarray(g(v), dtype=float), np.asarray(g(-v), dtype=float)
        pair = gp + gm
        # odd g cancels exactly in exact arithmetic; drop rounding-level residues
        pair[np.abs(pair) <= 8 * _EPS * np.maximum(np.abs(gp), np.abs(gm))] = 0.0
        return math.fsum(pair)
    return math.fsum(np.asarray(g(v)))


def schatten_norm(A, p):
    """Schatten 1-, 2- or infinity-norm (``p`` in ``{1, 2, inf}``)."""
    if isinstance(A, SpectralData):
        s = A.values if A.kind == "singular" else np.abs(A.values)
    else:
        s = singular_values(A).values
    if p == 1:
        return math.fsum(s)
    if p == 2:
        return math.sqrt(math.fsum(s**2))
    if p in (math.inf, "inf"):
        return float(np.max(s)) if len(s) else 0.0
    raise InputError(f"Schatten index must be 1, 2 or inf, got {p}")
