import numpy as np
import pytest
import scipy.linalg as sl
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from nncompress.errors import InputError, RankHypothesisViolated, UnsupportedSize
from nncompress.instances import example_gap_matrix, paper_matrix
from nncompress.linalg import (
    Tolerance,
    char_poly_coeffs,
    charpoly_nonzero_count,
    eigenvalues,
    rank,
    rank_power_sequence,
    solve_right_factor,
)


def _sorted(z):
    return np.sort_complex(np.asarray(z, dtype=complex))


def _exact_paper_matrix_t1():
    r2 = sp.sqrt(2)
    h = sp.Rational(1, 2)
    return sp.Matrix(
        [
            [0, 2, h, 0, 0],
            [2, 0, h, 0, 0],
            [0, 0, 0, 1, 0],
            [0, 0, 4, 0, 2 * r2],
            [0, 0, 4 * r2, 2 * r2, 0],
        ]
    )


# -- rank ---------------------------------------------------------------------


def test_rank_identity():
    assert rank(np.eye(3)) == 3


def test_rank_zero_matrix():
    assert rank(np.zeros((4, 4))) == 0
    assert rank(np.zeros((0, 0))) == 0


def test_rank_gap_matrix():
    assert rank(example_gap_matrix(3, 1, [5.0])) == 3


def test_rank_random_product():
    rng = np.random.default_rng(1)
    U = rng.uniform(0, 1, (10, 4))
    V = rng.uniform(0, 1, (4, 10))
    M = U @ V
    # oracle: scipy singular values show a clear gap after the fourth
    s = sl.svdvals(M)
    assert s[3] > 1e-2 and s[4] < 1e-12
    assert rank(M) == 4


def test_rank_tolerance_override():
    M = np.diag([1.0, 1e-6])
    assert rank(M) == 2
    assert rank(M, Tolerance(rank_tol=1e-3)) == 1


def test_tolerance_rejects_negative():
    with pytest.raises(InputError):
        Tolerance(zero_tol=-1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_rank_transpose_invariant(r, c, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, min(r, c) + 1))
    M = rng.standard_normal((r, k)) @ rng.standard_normal((k, c))
    assert rank(M) == rank(M.T)


# -- solve_right_factor -------------------------------------------------------


def test_right_factor_identity_core():
    Q, res = solve_right_factor(np.eye(2), [[4.0], [3.0]])
    np.testing.assert_allclose(Q, [[4.0], [3.0]])
    assert res == 0.0


def test_right_factor_diagonal_core():
    Q, _ = solve_right_factor(np.diag([2.0, 1.0]), [[4.0], [3.0]])
    np.testing.assert_allclose(Q, [[2.0], [3.0]])


def test_right_factor_planted_singular_core():
    rng = np.random.default_rng(5)
    m, n = 3, 8
    # singular core: rank 2
    A11 = rng.uniform(0, 1, (m, 2)) @ rng.uniform(0, 1, (2, m))
    Q_star = rng.uniform(0, 1, (m, n - m))
    A12 = A11 @ Q_star
    Q, res = solve_right_factor(A11, A12)
    assert res <= 1e-10
    np.testing.assert_allclose(A11 @ Q, A12, atol=1e-10)


def test_right_factor_rejects_outside_column_space():
    A11 = np.diag([1.0, 0.0])
    with pytest.raises(RankHypothesisViolated):
        solve_right_factor(A11, [[1.0], [1.0]])


# -- eigenvalues --------------------------------------------------------------


def test_eigenvalues_diagonal():
    np.testing.assert_allclose(eigenvalues(np.diag([1.0, 2.0, 3.0])), [1, 2, 3])


def test_eigenvalues_paper_matrix():
    w = eigenvalues(paper_matrix(1.0))
    expected = _sorted([4, 2, -2, -2, -2])
    assert np.max(np.abs(_sorted(w) - expected)) < 1e-8


def test_eigenvalues_roots_of_unity():
    C = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    w = eigenvalues(C)
    expected = _sorted(np.exp(2j * np.pi * np.arange(3) / 3))
    assert np.max(np.abs(_sorted(w) - expected)) < 1e-12


def test_eigenvalues_conjugate_closed():
    rng = np.random.default_rng(0)
    w = eigenvalues(rng.standard_normal((9, 9)))
    np.testing.assert_allclose(_sorted(w), _sorted(w.conj()), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**31 - 1))
def test_eigenvalue_sum_is_trace(n, seed):
    M = np.random.default_rng(seed).standard_normal((n, n))
    w = eigenvalues(M)
    assert abs(w.sum() - np.trace(M)) <= 1e-8 * (1 + np.linalg.norm(M, 2))


# -- rank_power_sequence ------------------------------------------------------


def test_rank_power_nilpotent_block():
    N = np.eye(3, k=1)
    assert rank_power_sequence(N, 0.0, 3) == [2, 1, 0]


def test_rank_power_paper_matrix_at_minus_two():
    # exact oracle: ranks of (A(1) + 2I)^j over Q(sqrt 2)
    B = _exact_paper_matrix_t1() + 2 * sp.eye(5)
    exact = [(B**j).rank(simplify=True) for j in (1, 2, 3)]
    assert exact == [3, 2, 2]
    assert rank_power_sequence(paper_matrix(1.0), -2.0, 3) == exact


def test_rank_power_scalar_matrix():
    assert rank_power_sequence(np.diag([5.0, 5.0]), 5.0, 2) == [0, 0]


def test_rank_power_complex_shift():
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    M = np.block([[R, np.eye(2)], [np.zeros((2, 2)), R]])
    # eigenvalue i with a single Jordan block of size 2
    assert rank_power_sequence(M, 1j, 3) == [3, 2, 2]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**31 - 1))
def test_rank_power_stabilizes_at_order_minus_multiplicity(n, seed):
    rng = np.random.default_rng(seed)
    sizes = []
    left = int(rng.integers(1, n + 1))
    while left:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    J = np.zeros((n, n))
    pos = 0
    for s in sizes:
        J[pos : pos + s, pos : pos + s] = np.eye(s, k=1)
        pos += s
    J[pos:, pos:] = np.diag(rng.uniform(1.0, 2.0, n - pos))
    seq = rank_power_sequence(J, 0.0, n + 1)
    assert all(a >= b for a, b in zip(seq, seq[1:]))
    assert seq[-1] == n - sum(sizes)


# -- char_poly_coeffs ---------------------------------------------------------


def test_char_poly_diagonal():
    np.testing.assert_allclose(char_poly_coeffs(np.diag([1.0, 2.0])), [1, -3, 2])


def test_char_poly_zero():
    np.testing.assert_allclose(char_poly_coeffs(np.zeros((2, 2))), [1, 0, 0])


def test_char_poly_paper_matrix():
    x = sp.symbols("x")
    oracle = [float(c) for c in sp.Poly(sp.expand((x - 4) * (x - 2) * (x + 2) ** 3), x).all_coeffs()]
    assert oracle == [1, 0, -16, -16, 48, 64]
    np.testing.assert_allclose(char_poly_coeffs(paper_matrix(1.0)), oracle, atol=1e-6)


def test_char_poly_cap():
    with pytest.raises(UnsupportedSize):
        char_poly_coeffs(np.eye(5), max_order=4)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_product_of_nonzero_eigenvalues_matches_last_coefficient(n, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, n + 1))
    M = rng.uniform(0, 1, (n, k)) @ rng.uniform(0, 1, (k, n))
    w = eigenvalues(M)
    zero_tol = 1e-8 * (1 + np.linalg.norm(M, 2))
    nz = w[np.abs(w) > zero_tol]
    l = nz.size
    p = char_poly_coeffs(M)
    prod = np.prod(nz).real
    # the recurrence is accurate relative to ||M||^l, not to |p_l| itself
    assert abs((-1) ** l * p[l] - prod) <= 1e-12 * (1 + np.linalg.norm(M, 2)) ** l


def test_char_poly_against_exact_rational():
    rng = np.random.default_rng(4118)
    M = rng.uniform(0, 1, (7, 3)) @ rng.uniform(0, 1, (3, 7))
    x = sp.symbols("x")
    exact = sp.Matrix(7, 7, [sp.Rational(float(v)) for v in M.ravel()]).charpoly(x).all_coeffs()
    exact = np.array([float(c) for c in exact])
    scale = 1 + np.linalg.norm(M, 2)
    err = np.abs(char_poly_coeffs(M) - exact)
    assert np.all(err <= 1e-13 * scale ** np.arange(8))


def test_charpoly_nonzero_count():
    A = paper_matrix(1.0)
    assert charpoly_nonzero_count(char_poly_coeffs(A), np.linalg.norm(A, 2)) == 5
    N = np.eye(4, k=1)
    N[0, 0] = 3.0
    assert charpoly_nonzero_count(char_poly_coeffs(N), np.linalg.norm(N, 2)) == 1
