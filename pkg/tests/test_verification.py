import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings
from hypothesis import strategies as st

from nncompress.instances import (
    GeneratorSpec,
    paper_matrix,
    planted_jordan_matrix,
    random_low_rank_nonneg,
    sigma_t,
)
from nncompress.linalg import Tolerance
from nncompress.verification import (
    Verdict,
    is_diagonalizable,
    is_nonnegative,
    jordan_equiv_mod_zeros,
    jordan_signature,
    nonzero_spectrum,
    spectra_match,
    verify,
)


def pad_zeros(M, s):
    return sl.block_diag(M, np.zeros((s, s)))


# -- nonzero_spectrum ---------------------------------------------------------


def test_nonzero_spectrum_diagonal():
    np.testing.assert_allclose(nonzero_spectrum(np.diag([0.0, 3.0, 0.0, -1.0])), [-1.0, 3.0])


def test_nonzero_spectrum_nilpotent_plus_seven():
    M = sl.block_diag(np.eye(3, k=1), [[7.0]])
    np.testing.assert_allclose(nonzero_spectrum(M), [7.0], atol=1e-12)


def test_nonzero_spectrum_of_zero_is_empty():
    assert nonzero_spectrum(np.zeros((3, 3))).size == 0


def test_nonzero_spectrum_boundary_warning():
    details = []
    nonzero_spectrum(np.diag([1.0, 3e-8]), details=details)
    assert details and "boundary" in details[0]


# -- spectra_match ------------------------------------------------------------


def test_spectra_match_permutation():
    s = sigma_t(1.0)
    assert spectra_match(s, s[::-1])


def test_spectra_match_conjugate_pairs():
    a = np.array([1 + 2j, 1 - 2j, 3.0])
    assert spectra_match(a, [3.0, 1 - 2j, 1 + 2j])


def test_spectra_match_outside_radius():
    assert not spectra_match([1.0, 2.0], [1.0, 2.0 + 1e-6])
    assert spectra_match([1.0, 2.0], [1.0, 2.0 + 1e-10])


def test_spectra_match_size_mismatch():
    assert not spectra_match([1.0], [1.0, 1.0])


def test_spectra_match_explicit_tolerance():
    assert spectra_match([1.0], [1.1], Tolerance(match_tol=0.2))


def test_spectra_match_needs_global_assignment():
    # nearest-neighbour pairing sends 1.0 to 0.55 and strands 0.0,
    # but 0.0 -> 0.55 and 1.0 -> 1.55 is a valid assignment
    tol = Tolerance(match_tol=0.6)
    assert spectra_match([0.0, 1.0], [0.55, 1.55], tol)
    assert not spectra_match([0.0, 1.0], [0.55, 1.7], tol)


def test_spectra_match_paper_matrix():
    assert spectra_match(nonzero_spectrum(paper_matrix(1.0)), sigma_t(1.0))


# -- jordan_equiv_mod_zeros ---------------------------------------------------


def test_jordan_equiv_zero_padding():
    A = paper_matrix(1.0)
    assert jordan_equiv_mod_zeros(pad_zeros(A, 3), A)


def test_jordan_equiv_nilpotent_vs_zero_fails():
    J2 = np.eye(2, k=1)
    assert not jordan_equiv_mod_zeros(J2, np.zeros((2, 2)))
    assert not jordan_equiv_mod_zeros(J2, np.zeros((1, 1)))


def test_jordan_equiv_defective_vs_diagonal_fails():
    A = paper_matrix(1.0)
    D = np.diag(sigma_t(1.0).real)
    details = []
    # same spectrum, but a size-two block at -2
    assert spectra_match(nonzero_spectrum(A), nonzero_spectrum(D))
    assert not jordan_equiv_mod_zeros(A, D, details=details)
    assert details


def test_jordan_equiv_rejects_larger_second_argument():
    A = np.diag([1.0, 2.0])
    assert not jordan_equiv_mod_zeros(A, pad_zeros(A, 1))


def test_jordan_equiv_similarity_invariant():
    rng = np.random.default_rng(11)
    A = paper_matrix(1.0)
    S = rng.standard_normal((5, 5)) + 5 * np.eye(5)
    assert jordan_equiv_mod_zeros(S @ A @ np.linalg.inv(S), A)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(1, 4), st.integers(0, 4), st.integers(0, 2**31 - 1))
def test_jordan_equiv_reflexive_and_padding(n, k, s, seed):
    A = random_low_rank_nonneg(GeneratorSpec(n, min(k, n), seed))
    assert jordan_equiv_mod_zeros(A, A)
    assert jordan_equiv_mod_zeros(pad_zeros(A, s), A)
    v = verify(pad_zeros(A, s), A)
    assert v.ok


# -- jordan_signature / is_diagonalizable -------------------------------------


def test_jordan_signature_paper_matrix():
    sizes = jordan_signature(paper_matrix(1.0)).block_sizes()
    by_value = {round(lam.real, 8): s for lam, s in sizes.items()}
    assert by_value == {-2.0: [2, 1], 2.0: [1], 4.0: [1]}


def test_is_diagonalizable_examples():
    assert is_diagonalizable(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert is_diagonalizable(np.zeros((3, 3)))
    assert not is_diagonalizable(np.eye(3, k=1))
    assert not is_diagonalizable(paper_matrix(1.0))


def multiplicity_oracle(blocks):
    """Diagonalizable iff every planted block has size one, i.e. geometric and
    algebraic multiplicities agree at every eigenvalue."""
    alg, geo = {}, {}
    for lam, size in blocks:
        alg[lam] = alg.get(lam, 0) + size
        geo[lam] = geo.get(lam, 0) + 1
    return all(alg[lam] == geo[lam] for lam in alg)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.tuples(st.sampled_from([-1.0, 0.0, 1.0, 2.5]), st.integers(1, 3)), min_size=1, max_size=4),
    st.integers(0, 1000),
)
def test_is_diagonalizable_matches_multiplicity_oracle(blocks, seed):
    M = planted_jordan_matrix(blocks, seed=seed)
    assert is_diagonalizable(M) == multiplicity_oracle(blocks)


# -- is_nonnegative / verify ---------------------------------------------------


def test_is_nonnegative_exact():
    assert is_nonnegative(np.zeros((2, 2)))
    assert not is_nonnegative(np.array([[1.0, -1e-300]]))
    assert not is_nonnegative(np.array([[np.nan]]))


def test_verify_reports_negative_entries():
    A = np.diag([1.0, -1.0])
    v = verify(A, A)
    assert v.spectra_match and v.jordan_match_mod_zeros
    assert not v.nonneg and not v.ok


def test_verdict_roundtrip():
    v = Verdict(True, False, True, ["x"])
    assert Verdict.from_dict(v.to_dict()) == v


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_verify_paper_matrix_against_itself(t):
    A = paper_matrix(t)
    v = verify(pad_zeros(A, 2), A)
    assert v.spectra_match and v.jordan_match_mod_zeros
