import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaborlat.lattice import (
    GaborGeometry,
    GeometryError,
    PeriodicSet,
    check_support_set,
    congruent_to_subset_mod,
    decompose_ell,
    index_projection,
    k_set,
    kron_identity,
    lambda_set,
    nz_congruent_to,
    projection_matrix,
    reduce_geometry,
    shift_unitaries,
)

from instances import EXAMPLE_SET

small = st.integers(min_value=1, max_value=24)


# geometry ---------------------------------------------------------------

def test_reduce_geometry_example():
    g = reduce_geometry(2, 4, 6, 2)
    assert (g.p, g.q, g.d) == (3, 2, 2)
    assert g.pM == 12


def test_reduce_geometry_trivial_and_swapped():
    assert (lambda g: (g.p, g.q, g.d))(reduce_geometry(1, 1, 1, 1)) == (1, 1, 1)
    g = reduce_geometry(1, 6, 4, 1)
    assert (g.p, g.q, g.d) == (2, 3, 2)


@given(small, small, small, small)
def test_geometry_invariants(L, M, N, R):
    g = reduce_geometry(L, M, N, R)
    assert math.gcd(g.p, g.q) == 1
    assert g.N * g.q == g.M * g.p
    assert g.p * g.M == g.q * g.N
    assert g.d * g.q == g.M and g.d * g.p == g.N


@pytest.mark.parametrize("args", [(0, 4, 6, 2), (2, -1, 6, 2), (2, 4, 6, 0), (2, 4.0, 6, 2), (True, 4, 6, 2)])
def test_reduce_geometry_rejects_bad_parameters(args):
    with pytest.raises(GeometryError):
        reduce_geometry(*args)


def test_inconsistent_geometry_rejected():
    with pytest.raises(GeometryError):
        GaborGeometry(L=1, M=4, N=6, R=1, p=6, q=4, d=1)
    with pytest.raises(GeometryError):
        GaborGeometry(L=1, M=4, N=6, R=1, p=3, q=2, d=1)


def test_with_windows():
    g = reduce_geometry(2, 4, 6, 2).with_windows(5)
    assert g.L == 5 and (g.p, g.q) == (3, 2)


# periodic sets ------------------------------------------------------------

def test_periodic_set_canonical():
    S = PeriodicSet(6, (5, 3, 9, 3))
    assert S.residues == (3, 5)
    assert S.to_json() == {"period": 6, "residues": [3, 5]}


def test_example_set_members():
    assert EXAMPLE_SET.members(0, 12) == [3, 5, 9, 11]
    assert EXAMPLE_SET.at_period(12).residues == (3, 5, 9, 11)
    assert EXAMPLE_SET.card_in(6) == 2
    assert -1 in EXAMPLE_SET and -3 in EXAMPLE_SET and 0 not in EXAMPLE_SET


@given(st.integers(1, 12), st.sets(st.integers(0, 11)), st.integers(1, 5), st.integers(-100, 100))
def test_reexpression_preserves_membership(K, residues, c, j):
    S = PeriodicSet(K, tuple(residues))
    T = S.at_period(c * K)
    assert (j in S) == (j in T)
    assert T.is_periodic_with(K)


def test_contains_array_agrees():
    idx = np.arange(-30, 30)
    mask = EXAMPLE_SET.contains_array(idx)
    assert list(mask) == [int(i) in EXAMPLE_SET for i in idx]


def test_at_period_requires_multiple():
    with pytest.raises(GeometryError):
        EXAMPLE_SET.at_period(8)


def test_periodic_set_json_round_trip():
    assert PeriodicSet.from_json(EXAMPLE_SET.to_json()) == EXAMPLE_SET
    for bad in ({"period": 6}, {"period": "6", "residues": [1]}, {"period": 6, "residues": [1.5]}, [1, 2]):
        with pytest.raises(GeometryError):
            PeriodicSet.from_json(bad)


def test_check_support_set():
    geo = reduce_geometry(2, 4, 6, 2)
    check_support_set(EXAMPLE_SET, geo)
    with pytest.raises(GeometryError):
        check_support_set(PeriodicSet(6, ()), geo)
    with pytest.raises(GeometryError):
        check_support_set(PeriodicSet(12, (3,)), geo)


# index sets -----------------------------------------------------------------

def test_k_sets_example():
    geo = reduce_geometry(2, 4, 6, 2)
    assert k_set(EXAMPLE_SET, geo, 0) == ()
    assert k_set(EXAMPLE_SET, geo, 1) == (1, 2)
    proj = index_projection(EXAMPLE_SET, geo, 1)
    assert proj.lambda_ == (1, 2, 4, 5)
    assert np.array_equal(proj.matrix(), np.diag([0, 1, 1, 0, 1, 1]))


@given(small, small, st.integers(-50, 50))
def test_full_support_gives_all_k(M, N, j):
    geo = reduce_geometry(1, M, N, 1)
    assert k_set(PeriodicSet.full(), geo, j) == tuple(range(geo.p))


@settings(max_examples=60)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 3), st.data())
def test_k_set_cardinality_is_d_periodic(M, N, R, data):
    geo = reduce_geometry(1, M, N, R)
    S = PeriodicSet(N, tuple(data.draw(st.sets(st.integers(0, N - 1), min_size=1))))
    for j in range(geo.d):
        base = len(k_set(S, geo, j))
        for ell in range(-3, 4):
            assert len(k_set(S, geo, j + geo.d * ell)) == base


@settings(max_examples=60)
@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_counting_identity(M, N, data):
    # sum over the fundamental range of |K_j| counts S ∩ [0, N) exactly once
    geo = reduce_geometry(1, M, N, 1)
    S = PeriodicSet(N, tuple(data.draw(st.sets(st.integers(0, N - 1), min_size=1))))
    assert sum(len(k_set(S, geo, j)) for j in range(geo.d)) == S.card_in(N)


def test_lambda_set():
    assert lambda_set((1, 2), 3, 2) == (1, 2, 4, 5)
    assert lambda_set((), 3, 2) == ()


# projection and Kronecker matrices --------------------------------------------

def test_projection_matrix_examples():
    assert np.array_equal(projection_matrix({1, 2}, 3), np.diag([0.0, 1, 1]))
    assert np.array_equal(projection_matrix((), 3), np.zeros((3, 3)))
    assert np.array_equal(projection_matrix(range(4), 4), np.eye(4))
    with pytest.raises(ValueError):
        projection_matrix({3}, 3)


@given(st.integers(1, 8), st.data())
def test_projection_is_orthogonal_projection(p, data):
    P = projection_matrix(data.draw(st.sets(st.integers(0, p - 1))), p)
    assert np.array_equal(P @ P, P)
    assert np.array_equal(P.conj().T, P)


def test_kron_identity_examples():
    assert np.array_equal(kron_identity(2, np.diag([0, 1, 1])), np.diag([0, 1, 1, 0, 1, 1]))
    assert np.array_equal(kron_identity(3, np.eye(2)), np.eye(6))
    with pytest.raises(ValueError):
        kron_identity(2, np.zeros((0, 0)))


def _cplx(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_kron_adjoint_on_2x3(rng):
    A = _cplx(rng, 2, 3)
    assert np.array_equal(kron_identity(2, A).conj().T, kron_identity(2, A.conj().T))


def test_kron_identities_random(rng):
    for _ in range(50):
        K = int(rng.integers(1, 5))
        s, t, u = (int(x) for x in rng.integers(1, 5, size=3))
        A, B, C = _cplx(rng, s, t), _cplx(rng, t, u), _cplx(rng, s, t)
        lam = complex(*rng.normal(size=2))
        # linearity and products
        assert np.allclose(kron_identity(K, lam * A + C), lam * kron_identity(K, A) + kron_identity(K, C), atol=1e-12)
        assert np.allclose(kron_identity(K, A @ B), kron_identity(K, A) @ kron_identity(K, B), atol=1e-12)
        # block sandwich: (I_K ⊗ X) [B_ab] (I_K' ⊗ Y) has blocks X B_ab Y
        K2 = int(rng.integers(1, 4))
        X, Y = _cplx(rng, s, s), _cplx(rng, t, t)
        blocks = [[_cplx(rng, s, t) for _ in range(K2)] for _ in range(K)]
        lhs = np.block([[X @ b @ Y for b in row] for row in blocks])
        rhs = kron_identity(K, X) @ np.block(blocks) @ kron_identity(K2, Y)
        assert np.allclose(lhs, rhs, atol=1e-12)
        # inverses and unitaries transfer
        Q, _ = np.linalg.qr(_cplx(rng, s, s))
        assert np.allclose(np.linalg.inv(kron_identity(K, X)), kron_identity(K, np.linalg.inv(X)), atol=1e-9)
        U = kron_identity(K, Q)
        assert np.allclose(U @ U.conj().T, np.eye(K * s), atol=1e-12)


def test_kron_singular_stays_singular():
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    assert np.linalg.matrix_rank(kron_identity(3, A)) == 3


@settings(max_examples=40)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 4), st.integers(-20, 20), st.data())
def test_lambda_diagonal_is_kron_of_projection(M, N, R, j, data):
    geo = reduce_geometry(1, M, N, R)
    S = PeriodicSet(N, tuple(data.draw(st.sets(st.integers(0, N - 1), min_size=1))))
    proj = index_projection(S, geo, j)
    diag = np.zeros(geo.p * R)
    diag[list(proj.lambda_)] = 1
    assert np.array_equal(np.diag(diag), kron_identity(R, projection_matrix(proj.kset, geo.p)))


# ell decomposition and shift unitaries ----------------------------------------

def _brute_decompose(p, q, ell):
    hits = [(k, r, m) for k in range(p) for r in range(q) for m in range(-100, 101) if k * q + (m * q - r) * p == ell]
    assert len(hits) == 1
    return hits[0]


def test_decompose_examples():
    geo = reduce_geometry(2, 4, 6, 2)
    assert decompose_ell(geo, 0) == (0, 0, 0)
    assert decompose_ell(geo, 1) == (2, 1, 0) == _brute_decompose(3, 2, 1)
    assert decompose_ell(geo, 6) == (0, 0, 1) == _brute_decompose(3, 2, 6)


@settings(max_examples=40)
@given(st.integers(1, 12), st.integers(1, 12))
def test_decompose_round_trip(M, N):
    geo = reduce_geometry(1, M, N, 1)
    p, q = geo.p, geo.q
    for ell in range(-10 * p * q, 10 * p * q + 1):
        k, r, m = decompose_ell(geo, ell)
        assert 0 <= k < p and 0 <= r < q
        assert k * q + (m * q - r) * p == ell


def test_shift_unitaries_examples():
    geo = reduce_geometry(2, 4, 6, 2)
    A, C = shift_unitaries(geo, 6, 0.3)  # k_ell = 0
    assert np.array_equal(A, np.eye(3)) and np.array_equal(C, np.eye(2))
    A, _ = shift_unitaries(geo, 1, 0.0)  # k_ell = 2
    assert np.array_equal(A, np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]]))


def test_shift_unitaries_phases():
    geo = reduce_geometry(2, 4, 6, 2)
    theta = 0.125
    A, C = shift_unitaries(geo, 1, theta)  # (k, r) = (2, 1)
    w = np.exp(2j * np.pi * theta)
    assert np.allclose(A, [[0, 1 / w, 0], [0, 0, 1 / w], [1, 0, 0]], atol=1e-15)
    assert np.allclose(C, [[0, 1], [w, 0]], atol=1e-15)


@settings(max_examples=60)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(-60, 60), st.floats(0, 1, exclude_max=True))
def test_shift_unitaries_are_unitary(M, N, ell, theta):
    geo = reduce_geometry(1, M, N, 1)
    A, C = shift_unitaries(geo, ell, theta)
    assert np.allclose(A @ A.conj().T, np.eye(geo.p), atol=1e-12)
    assert np.allclose(C @ C.conj().T, np.eye(geo.q), atol=1e-12)


def test_projection_conjugation_identity(rng):
    # I_R ⊗ K(j + d ell) = (I_R ⊗ A)^* (I_R ⊗ K(j)) (I_R ⊗ A)
    for _ in range(200):
        M, N, R = (int(x) for x in rng.integers(1, 10, size=3))
        geo = reduce_geometry(1, M, N, R)
        S = PeriodicSet(N, tuple(int(x) for x in rng.integers(0, N, size=int(rng.integers(1, N + 1)))))
        j, ell, theta = int(rng.integers(-20, 20)), int(rng.integers(-20, 20)), float(rng.random())
        A, _ = shift_unitaries(geo, ell, theta)
        IA = kron_identity(R, A)
        lhs = index_projection(S, geo, j + geo.d * ell).matrix()
        rhs = IA.conj().T @ index_projection(S, geo, j).matrix() @ IA
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


# congruence tests ----------------------------------------------------------------

def test_congruence_examples():
    assert not congruent_to_subset_mod({5, 9, 11}, 4)
    assert congruent_to_subset_mod({0}, 7)
    assert congruent_to_subset_mod({9, 5}, 6)
    assert congruent_to_subset_mod((), 3)


def test_nz_congruence_examples():
    assert nz_congruent_to({3, 5}, EXAMPLE_SET, 6)
    assert not nz_congruent_to({3, 9}, EXAMPLE_SET, 6)
    assert nz_congruent_to({9, 11}, EXAMPLE_SET, 6)
    assert not nz_congruent_to({3}, EXAMPLE_SET, 6)
    assert not nz_congruent_to({3, 4}, EXAMPLE_SET, 6)


@given(st.sets(st.integers(-50, 50), max_size=10), st.integers(1, 12))
def test_congruence_matches_pairwise_definition(E, M):
    pairwise = all((a - b) % M for a in E for b in E if a < b)
    assert congruent_to_subset_mod(E, M) == pairwise
