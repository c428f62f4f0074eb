import math

import numpy as np
import pytest

from hankel_lab.errors import InputError, NyquistError
from hankel_lab.geometry import Disk, Interval
from hankel_lab.operators import (
    BandSpace,
    Grid,
    GridPolicy,
    SpectralData,
    build_composite,
    build_multiplier,
    build_pdo,
    build_projection,
    build_truncated_hankel,
    hermitian_eigen,
    panel_edges,
    read_matrix,
    read_spectrum,
    residuals,
    schatten_norm,
    singular_values,
    trace_of_function,
    write_matrix,
    write_spectrum,
)
from hankel_lab.operators.dump import MAGIC
from hankel_lab.symbols import Bump, Constant, Gaussian, SeparableSymbol

from oracles import jacobi_eigenvalues

LAM, OM = Interval(0.0, 1.0), Interval(-1.0, 1.0)
ONE = SeparableSymbol.constant(1.0, 1)
ZERO = SeparableSymbol.constant(0.0, 1)


def grid_for(alpha, d=1, oversample=2.0, snap=True):
    return GridPolicy(oversample=oversample, snap_L=snap).grid(alpha, d, 1.0)


def smooth_symbol():
    return SeparableSymbol(((Gaussian((0.3,), 0.08, 1.0), Bump((0.0,), 1.5, 1.0)),
                            (Constant(0.5, 1), Constant(1.0, 1))), 1)


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (X + X.conj().T)


# -- grid and projections ---------------------------------------------------

def test_projection_trace_example():
    g = Grid(1, 2.0, 64, 10.0)
    P = build_projection(g, OM).matrix
    assert np.trace(P).real == pytest.approx(13.0, abs=1e-12)
    assert np.max(np.abs(P @ P - P)) <= 1e-12
    assert np.max(np.abs(P - P.conj().T)) <= 1e-12


@pytest.mark.parametrize("d,N,omega", [(1, 128, Interval(-0.7, 1.0)), (2, 32, Disk((0, 0), 1.0))])
def test_projection_idempotent_and_self_adjoint(d, N, omega):
    g = Grid(d, 2.0, N, 8.0)
    P = build_projection(g, omega).matrix
    assert np.max(np.abs(P @ P - P)) <= 1e-12
    assert np.max(np.abs(P - P.conj().T)) <= 1e-12
    ev = hermitian_eigen(P).values
    assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10


def test_projection_empty_band_is_zero():
    g = Grid(1, 2.0, 64, 10.0)
    P = build_projection(g, Interval(0.5, 0.55)).matrix
    assert np.max(np.abs(P)) == 0.0


def test_projection_nyquist_refusal_names_minimal_n():
    g = Grid(1, 2.0, 16, 20.0)
    with pytest.raises(NyquistError) as info:
        build_projection(g, OM)
    n_min = info.value.minimal_n
    assert n_min == math.ceil(2 * 2.0 * 20.0 / (0.8 * math.pi))
    assert str(n_min) in str(info.value)
    build_projection(Grid(1, 2.0, 64, 20.0), OM)


def test_multiplier_example():
    g = Grid(1, 2.0, 8, 1.0)
    C = build_multiplier(g, LAM).matrix
    assert np.allclose(np.diag(g.points[:, 0]), np.diag(np.linspace(-2, 1.5, 8)))
    assert np.flatnonzero(np.diag(C)).tolist() == [4, 5, 6]
    assert np.array_equal(C @ C, C)
    full = build_multiplier(g, Interval(-2.0, 2.0)).matrix
    assert np.array_equal(full, np.eye(8))


# -- pseudo-differential operators ------------------------------------------

def test_pdo_identity_symbol():
    g = Grid(1, 2.0, 32, 4.0)
    assert np.allclose(build_pdo(g, ONE).matrix, np.eye(32), atol=1e-14)


def test_pdo_x_only_symbol_is_diagonal():
    g = Grid(1, 2.0, 32, 4.0)
    f = Bump((0.2,), 0.6, 1.0)
    a = SeparableSymbol(((f, Constant(1.0, 1)),), 1)
    ref = np.diag(f(g.points))
    for side in ("left", "right"):
        assert np.max(np.abs(build_pdo(g, a, side).matrix - ref)) <= 1e-14


def test_pdo_xi_only_symbol_sides_agree():
    g = Grid(1, 2.0, 64, 4.0)
    a = SeparableSymbol(((Constant(1.0, 1), Bump((0.0,), 1.5, 1.0)),), 1)
    assert np.max(np.abs(build_pdo(g, a, "left").matrix - build_pdo(g, a, "right").matrix)) <= 1e-13


def test_pdo_left_is_adjoint_of_right_for_real_symbol():
    g = Grid(1, 2.0, 64, 4.0)
    a = smooth_symbol()
    L, R = build_pdo(g, a, "left").matrix, build_pdo(g, a, "right").matrix
    assert np.max(np.abs(L - R.conj().T)) <= 1e-13


def test_pdo_padding_refused():
    g = Grid(1, 2.0, 64, 4.0)
    a = SeparableSymbol(((Bump((0.0,), 1.5, 1.0), Constant(1.0, 1)),), 1)
    with pytest.raises(InputError):
        build_pdo(g, a)


# -- composites ---------------------------------------------------------------

def test_composite_unit_symbol_identities():
    g = grid_for(20.0)
    T = build_composite(g, ONE, LAM, OM, "T").matrix
    G = build_composite(g, ONE, LAM, OM, "G")
    H = build_composite(g, ONE, LAM, OM, "H").matrix
    Gm = G.matrix
    assert np.max(np.abs(Gm.conj().T @ Gm - (T - T @ T))) <= 1e-10
    Gf = G.embed()
    assert np.max(np.abs(Gf @ Gf)) <= 1e-12
    u = np.where(np.diag(build_multiplier(g, LAM).matrix) > 0, 1.0, -1.0)
    assert np.max(np.abs(u[:, None] * H * u[None, :] + H)) <= 1e-12
    ev = hermitian_eigen(H).values
    assert np.max(np.abs(ev + ev[::-1])) <= 1e-10


def test_composite_zero_symbol():
    g = grid_for(20.0)
    for kind in ("T", "G", "H"):
        assert np.max(np.abs(build_composite(g, ZERO, LAM, OM, kind).matrix)) == 0.0


def test_composite_kind_rejected():
    with pytest.raises(InputError):
        build_composite(grid_for(20.0), ONE, LAM, OM, "X")


def test_T_of_one_spectrum_in_unit_interval():
    g = grid_for(40.0)
    ev = hermitian_eigen(build_composite(g, ONE, LAM, OM, "T")).values
    assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10


def test_singular_values_of_G_are_mu_one_minus_mu():
    g = grid_for(40.0)
    mu = hermitian_eigen(build_composite(g, ONE, LAM, OM, "T")).values
    s2 = singular_values(build_composite(g, ONE, LAM, OM, "G")).values ** 2
    target = np.sort([m * (1 - m) for m in mu if m * (1 - m) > 1e-12])
    got = np.sort(s2[s2 > 1e-12])
    d1 = max(np.min(np.abs(target - v)) for v in got)
    d2 = max(np.min(np.abs(got - v)) for v in target)
    assert max(d1, d2) <= 1e-9


def test_odd_trace_on_H_data_is_zero():
    g = grid_for(20.0)
    s = singular_values(build_composite(g, smooth_symbol(), LAM, OM, "G"))
    assert trace_of_function(s, lambda t: t) == 0.0
    assert trace_of_function(s, lambda t: t**3) == 0.0


@pytest.mark.parametrize("p", [1, 2, 3])
def test_trace_H_even_power_equals_twice_gram_trace(p):
    g = grid_for(20.0)
    H = build_composite(g, ONE, LAM, OM, "H")
    G = build_composite(g, ONE, LAM, OM, "G").matrix
    lhs = trace_of_function(hermitian_eigen(H), lambda t: t ** (2 * p))
    mu = hermitian_eigen(G.conj().T @ G).values
    assert lhs == pytest.approx(2 * math.fsum(mu**p), rel=1e-9)


def test_nonzero_singular_values_of_G_and_adjoint_agree():
    G = build_composite(grid_for(20.0), ONE, LAM, OM, "G").matrix
    a = singular_values(G).values
    b = singular_values(G.conj().T).values
    a, b = a[a > 1e-7], b[b > 1e-7]
    assert len(a) == len(b)
    assert np.max(np.abs(np.sort(a) - np.sort(b))) <= 1e-9


# -- spectral primitives -----------------------------------------------------

@pytest.mark.parametrize("method", ["lapack", "householder"])
def test_hermitian_eigen_small_examples(method):
    assert np.allclose(hermitian_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]), method).values, [1, 3],
                       atol=1e-14)
    d = np.array([3.0, -1.0, 7.0, 0.5])
    assert np.allclose(hermitian_eigen(np.diag(d), method).values, np.sort(d), atol=1e-14)


@pytest.mark.parametrize("method", ["lapack", "householder"])
@pytest.mark.parametrize("seed", [0, 1])
def test_hermitian_eigen_matches_jacobi_oracle(method, seed):
    A = random_hermitian(40, seed)
    ref = np.sort(jacobi_eigenvalues(A))
    assert np.max(np.abs(hermitian_eigen(A, method).values - ref)) <= 1e-9


@pytest.mark.parametrize("method", ["lapack", "householder"])
def test_hermitian_eigen_residuals(method):
    A = random_hermitian(60, 3)
    S = hermitian_eigen(A, method, vectors=True)
    assert residuals(A, S) <= 1e-9 * np.linalg.norm(A, 2)


def test_hermitian_eigen_rejects_non_hermitian():
    with pytest.raises(InputError):
        hermitian_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_singular_values_examples():
    assert np.all(singular_values(np.zeros((5, 3))).values == 0)
    Q, _ = np.linalg.qr(np.random.default_rng(4).standard_normal((8, 8))
                        + 1j * np.random.default_rng(5).standard_normal((8, 8)))
    assert np.max(np.abs(singular_values(Q).values - 1)) <= 1e-10


def test_trace_of_function_examples():
    S = SpectralData(np.array([1.0, 2.0]), "singular")
    assert trace_of_function(S, lambda t: t**2) == 10.0
    assert trace_of_function(S, lambda t: t) == 0.0
    with pytest.raises(InputError):
        trace_of_function(S, lambda t: t + 1)


def test_schatten_examples():
    A = np.diag([1.0, -2.0, 3.0])
    assert schatten_norm(A, 1) == pytest.approx(6.0, abs=1e-12)
    assert schatten_norm(A, 2) == pytest.approx(math.sqrt(14), abs=1e-12)
    assert schatten_norm(A, math.inf) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(InputError):
        schatten_norm(A, 3)


def test_schatten_two_is_frobenius():
    G = build_composite(grid_for(20.0), smooth_symbol(), LAM, OM, "G").matrix
    assert schatten_norm(G, 2) ** 2 == pytest.approx(np.sum(np.abs(G) ** 2), rel=1e-10)


# -- band-space reduction against dense assembly ----------------------------

@pytest.mark.parametrize("sym", ["one", "smooth"])
def test_bandspace_matches_dense(sym):
    a = ONE if sym == "one" else smooth_symbol()
    g = grid_for(30.0)
    G = build_composite(g, a, LAM, OM, "G").matrix
    T = build_composite(g, a, LAM, OM, "T").matrix
    bs = BandSpace(g, OM)
    dense = np.sort(singular_values(G).values)[::-1]
    fast = np.sort(bs.g_singular_values(a, LAM).values)[::-1]
    k = min(len(dense), len(fast))
    assert np.max(np.abs(dense[:k] - fast[:k])) <= 1e-7
    assert bs.hs_norm_squared(a, LAM) == pytest.approx(np.sum(np.abs(G) ** 2), rel=1e-12)
    traces = bs.weighted_power_traces(a, LAM, 3)
    Tp = np.eye(len(T))
    for p in range(1, 4):
        Tp = Tp @ T
        assert traces[p - 1] == pytest.approx(np.trace(Tp).real, rel=1e-10, abs=1e-12)


def test_bandspace_disk_matches_dense():
    disk = Disk((0.0, 0.0), 1.0)
    a = SeparableSymbol.constant(1.0, 2)
    g = GridPolicy(oversample=1.0, snap_L=False).grid(4.0, 2, 1.0)
    G = build_composite(g, a, disk, disk, "G").matrix
    dense = np.sort(singular_values(G).values)[::-1]
    fast = np.sort(BandSpace(g, disk).g_singular_values(a, disk).values)[::-1]
    k = min(len(dense), len(fast))
    assert np.max(np.abs(dense[:k] - fast[:k])) <= 1e-7


def test_bandspace_constant_symbol_scales():
    g = grid_for(30.0)
    s1 = BandSpace(g, OM).g_singular_values(ONE, LAM).values
    s3 = BandSpace(g, OM).g_singular_values(SeparableSymbol.constant(3.0, 1), LAM).values
    assert np.allclose(3 * np.sort(s1), np.sort(s3), atol=1e-12)


# -- truncated Hankel --------------------------------------------------------

def test_hankel_zero_kernel():
    M = build_truncated_hankel(1.0, 10.0, kernel=lambda t: 0.0 * t, n=64).matrix
    assert np.max(np.abs(M)) == 0.0


def test_hankel_symmetric_and_converged():
    A = build_truncated_hankel(1.0, 10.0, n=400).matrix
    B = build_truncated_hankel(1.0, 10.0, n=800).matrix
    assert np.max(np.abs(A - A.T)) == 0.0
    ea = np.sort(np.linalg.eigvalsh(A))[::-1][:5]
    eb = np.sort(np.linalg.eigvalsh(B))[::-1][:5]
    assert np.max(np.abs(ea - eb)) <= 1e-8


def test_hankel_norm_below_pi_and_increasing():
    norms = [np.max(np.abs(np.linalg.eigvalsh(build_truncated_hankel(1.0, b, n=320).matrix)))
             for b in (1e2, 1e4, 1e6)]
    assert all(v < math.pi for v in norms)
    assert norms[0] < norms[1] < norms[2]


def test_hankel_preconditions():
    with pytest.raises(InputError):
        build_truncated_hankel(0.0, 10.0)
    with pytest.raises(InputError):
        build_truncated_hankel(2.0, 1.0)


def test_panel_edges_geometric():
    e = panel_edges(1.0, 1e4, 2.0)
    assert e[0] == 1.0 and e[-1] == pytest.approx(1e4)
    assert len(e) - 1 == math.ceil(math.log(1e4) / math.log(2.0))
    assert np.allclose(e[1:] / e[:-1], e[1] / e[0])


# -- dumps ---------------------------------------------------------------------

def test_matrix_dump_round_trip(tmp_path):
    A = random_hermitian(7, 9)[:, :5]
    path = tmp_path / "m.bin"
    write_matrix(path, A)
    raw = path.read_bytes()
    assert raw[:8] == MAGIC and len(raw) == 16 + 16 + 7 * 5 * 16
    assert np.array_equal(read_matrix(path), A)


def test_matrix_dump_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTMAGIC" + bytes(40))
    with pytest.raises(InputError):
        read_matrix(path)


def test_spectrum_dump_round_trip(tmp_path):
    v = np.array([0.1, 1 / 3, 2.0**-40, 7.0])
    path = tmp_path / "s.txt"
    write_spectrum(path, v)
    text = path.read_text()
    assert text.count("\n") == 4 and "\r" not in text
    assert np.array_equal(read_spectrum(path), v)
