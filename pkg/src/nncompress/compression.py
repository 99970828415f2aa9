"""Compression of a nonnegative matrix to small order with the same nonzero spectrum.

Pipeline: principal core of full rank -> factorization around the core ->
Caratheodory reduction of the coupling -> assembly from original entries.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .cone import reduce_rank_one_sum
from .errors import InputError, NegativeEntryError, RankHypothesisViolated, SearchExhausted
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    char_poly_coeffs,
    charpoly_nonzero_count,
    CHAR_POLY_MAX_ORDER,
    eigenvalues,
    norm2,
    rank,
    solve_right_factor,
)
from .verification import Verdict, nonzero_spectrum, verify

log = logging.getLogger(__name__)

EXHAUSTIVE_MAX_ORDER = 20
EXHAUSTIVE_MAX_CANDIDATES = 10**6


@dataclass
class FactoredForm:
    """``P A P^T = [[A11, A11 Q], [A21, A21 Q]]`` with ``P`` moving ``core_indices`` first."""

    core: np.ndarray
    coupling: np.ndarray
    right_factor: np.ndarray
    core_indices: list[int]
    rest_indices: list[int]
    residual: float

    @property
    def m(self) -> int:
        return self.core.shape[0]

    @property
    def n(self) -> int:
        return self.m + self.coupling.shape[0]

    def reconstruct(self) -> np.ndarray:
        """The permuted matrix rebuilt from the factors."""
        A11, A21, Q = self.core, self.coupling, self.right_factor
        return np.block([[A11, A11 @ Q], [A21, A21 @ Q]])


@dataclass
class CompressionReport:
    input_order: int
    output: np.ndarray
    selected_rows: list[int]
    alphas: np.ndarray
    core_indices: list[int]
    k: int
    l: int
    bound: int
    residual: float
    noop: bool = False
    warnings: list[str] = field(default_factory=list)
    spectrum: np.ndarray | None = None
    verification: Verdict | None = None

    @property
    def output_order(self) -> int:
        return self.output.shape[0]


def size_bound(k: int, l: int) -> int:
    """Guaranteed output order ``(2k-l) + (2k-l)^2``."""
    m = 2 * k - l
    return m + m * m


def nonzero_eigen_count(A, tol: Tolerance = DEFAULT_TOL, warnings: list[str] | None = None) -> int:
    """Number of eigenvalues with modulus above ``zero_tol``.

    Cross-checked against the characteristic polynomial; on disagreement the
    eigenvalue count wins and a warning is recorded.
    """
    A = as_matrix(A, square=True)
    scale = norm2(A)
    cutoff = tol.zero_abs(scale)
    l = int(np.count_nonzero(np.abs(eigenvalues(A)) > cutoff))
    if A.shape[0] <= CHAR_POLY_MAX_ORDER:
        l_poly = charpoly_nonzero_count(char_poly_coeffs(A), scale)
        if l_poly != l:
            msg = f"characteristic polynomial suggests {l_poly} nonzero eigenvalues, eigenvalues give {l}"
            log.warning(msg)
            if warnings is not None:
                warnings.append(msg)
    return l


def _extend_independent(M: np.ndarray, chosen: list[int], target: int, atol: float) -> list[int]:
    """Add columns of ``M`` to ``chosen`` greedily (largest residual norm) until rank ``target``."""
    chosen = list(chosen)
    if chosen:
        basis, _ = np.linalg.qr(M[:, chosen])
    else:
        basis = np.zeros((M.shape[0], 0))
    while len(chosen) < target:
        R = M - basis @ (basis.T @ M)
        norms = np.linalg.norm(R, axis=0)
        norms[chosen] = -1.0
        j = int(np.argmax(norms))
        if norms[j] <= atol:
            break
        chosen.append(j)
        v = R[:, j] / norms[j]
        v -= basis @ (basis.T @ v)
        basis = np.column_stack([basis, v / np.linalg.norm(v)])
    return chosen


def _is_invertible(A: np.ndarray, idx, rtol: float, scale: float) -> bool:
    if not idx:
        return True
    sub = A[np.ix_(idx, idx)]
    s = np.linalg.svd(sub, compute_uv=False)
    return s[-1] > rtol * max(scale, s[0]) * len(idx)


def _greedy_invertible_minor(A: np.ndarray, l: int, rtol: float, scale: float) -> list[int]:
    """Greedy volume maximization over principal minors; pairs when no single index helps."""
    n = A.shape[0]
    chosen: list[int] = []
    floor = rtol * scale * max(l, 1)

    def vol(idx):
        return abs(np.linalg.det(A[np.ix_(idx, idx)]))

    while len(chosen) < l:
        rest = [i for i in range(n) if i not in chosen]
        best, best_vol = None, floor ** (len(chosen) + 1)
        for i in rest:
            v = vol(chosen + [i])
            if v > best_vol:
                best, best_vol = [i], v
        if best is None and len(chosen) + 2 <= l:
            best_vol = floor ** (len(chosen) + 2)
            for i, j in combinations(rest, 2):
                v = vol(chosen + [i, j])
                if v > best_vol:
                    best, best_vol = [i, j], v
        if best is None:
            break
        chosen.extend(best)
    return sorted(chosen)


def _invertible_principal_minor(A: np.ndarray, l: int, tol: Tolerance) -> list[int]:
    n = A.shape[0]
    scale = norm2(A)
    rtol = tol.rank_rtol(A.shape)
    idx = _greedy_invertible_minor(A, l, rtol, scale)
    if len(idx) == l and _is_invertible(A, idx, rtol, scale):
        return idx
    if n > EXHAUSTIVE_MAX_ORDER or comb(n, l) > EXHAUSTIVE_MAX_CANDIDATES:
        raise SearchExhausted(
            f"greedy search found no invertible principal {l}x{l} minor and order {n} "
            f"exceeds the exhaustive-search cap"
        )
    best, best_s = None, 0.0
    for cand in combinations(range(n), l):
        cand = list(cand)
        s = np.linalg.svd(A[np.ix_(cand, cand)], compute_uv=False)[-1]
        if s > best_s:
            best, best_s = cand, s
    if best is None or not _is_invertible(A, best, rtol, scale):
        raise SearchExhausted(f"no invertible principal {l}x{l} minor found")
    return best


def find_principal_core(A, tol: Tolerance = DEFAULT_TOL, l: int | None = None) -> list[int]:
    """Indices ``I`` with ``|I| <= 2k - l`` and ``rank(A[I, I]) = rank(A) = k``.

    Starts from ``l`` indices with an invertible principal minor, adds rows
    until the selected rows have rank ``k``, then adds columns until those rows
    restricted to the selected columns have rank ``k``.
    """
    A = as_matrix(A, square=True)
    if np.any(A < 0):
        log.warning("find_principal_core called on a matrix with negative entries")
    k = rank(A, tol)
    if k == 0:
        return []
    if l is None:
        l = nonzero_eigen_count(A, tol)
    l = min(l, k)
    rtol = tol.rank_rtol(A.shape)
    atol = rtol * norm2(A)

    S = _invertible_principal_minor(A, l, tol)
    rows = _extend_independent(A.T, S, k, atol)
    if len(rows) < k:
        raise RankHypothesisViolated(f"could only find {len(rows)} independent rows, rank is {k}")
    cols = _extend_independent(A[rows], S, k, atol)
    core = sorted(set(rows) | set(cols))
    if rank(A[np.ix_(core, core)], tol) != k:
        raise RankHypothesisViolated(f"selected core {core} does not have rank {k}")
    return core


def factor_full_rank_core(A, core_indices, tol: Tolerance = DEFAULT_TOL) -> FactoredForm:
    """Permute the core first and write ``A = [A11; A21] [I Q]``."""
    A = as_matrix(A, square=True)
    n = A.shape[0]
    core = [int(i) for i in core_indices]
    if len(set(core)) != len(core) or any(not 0 <= i < n for i in core):
        raise InputError("core indices must be distinct and within range")
    core_set = set(core)
    rest = [i for i in range(n) if i not in core_set]
    A11 = A[np.ix_(core, core)]
    A12 = A[np.ix_(core, rest)]
    A21 = A[np.ix_(rest, core)]
    A22 = A[np.ix_(rest, rest)]
    Q, res12 = solve_right_factor(A11, A12, tol)
    res22 = norm2(A22 - A21 @ Q) if rest else 0.0
    rtol = tol.rank_rtol(A.shape)
    threshold = 10.0 * rtol * norm2(A) * (1.0 + norm2(Q))
    if res22 > threshold:
        raise RankHypothesisViolated(
            f"A22 != A21 Q: residual {res22:.3e} > {threshold:.3e}; the core does not carry the full rank"
        )
    return FactoredForm(A11, A21, Q, core, rest, max(res12, res22))


def collapse(F: FactoredForm) -> np.ndarray:
    """``A11 + Q A21``, an order-``m`` matrix with the nonzero spectrum of ``A``."""
    if F.coupling.shape[0] == 0:
        return F.core.copy()
    return F.core + F.right_factor @ F.coupling


def _prepare_input(A, tol: Tolerance, warnings: list[str]) -> np.ndarray:
    A = as_matrix(A, square=True).copy()
    neg = A < 0
    if np.any(neg):
        cutoff = tol.zero_abs(norm2(A))
        worst = float(A.min())
        if worst < -cutoff:
            i, j = np.unravel_index(np.argmin(A), A.shape)
            raise NegativeEntryError(f"negative entry {worst!r} at ({i}, {j}) below -zero_tol={-cutoff:.3e}")
        msg = f"clamped {int(neg.sum())} tiny negative entries (min {worst:.3e}) to zero"
        log.warning(msg)
        warnings.append(msg)
        A[neg] = 0.0
    return A


def compress(A, tol: Tolerance = DEFAULT_TOL, check: bool = True) -> CompressionReport:
    """Nonnegative matrix of order at most ``(2k-l) + (2k-l)^2`` with the nonzero spectrum of ``A``.

    The output keeps the core rows and columns of ``A`` plus the rows and
    columns picked by the Caratheodory step, with those columns scaled by the
    nonnegative coefficients; it is built from original entries only, so it is
    exactly nonnegative.  When this would not shrink ``A`` the input is
    returned with ``noop`` set.
    """
    warnings: list[str] = []
    A = _prepare_input(A, tol, warnings)
    n = A.shape[0]
    k = rank(A, tol)
    l = nonzero_eigen_count(A, tol, warnings)
    if l > k:
        warnings.append(f"nonzero-eigenvalue count {l} exceeds rank {k}; using {k}")
        l = k
    bound = size_bound(k, l)

    core = find_principal_core(A, tol, l=l)
    F = factor_full_rank_core(A, core, tol)
    m = F.m
    if F.coupling.shape[0]:
        red = reduce_rank_one_sum(F.right_factor.T, F.coupling, tol)
        active = red.active_indices
        alphas = np.asarray(red.new_coeffs, dtype=float)
        cone_residual = red.residual
    else:
        active, alphas, cone_residual = [], np.zeros(0), 0.0
    residual = max(F.residual, cone_residual)

    if n <= m + len(active):
        report = CompressionReport(
            n, A, list(range(n)), np.ones(n), core, k, l, bound, residual, noop=True, warnings=warnings
        )
    else:
        sel = [F.rest_indices[j] for j in active]
        keep = core + sel
        out = A[np.ix_(keep, keep)].copy()
        out[:, m:] *= alphas[None, :]
        report = CompressionReport(n, out, sel, alphas, core, k, l, bound, residual, warnings=warnings)
    if check:
        report.verification = verify(A, report.output, tol)
        report.spectrum = nonzero_spectrum(report.output, tol.resolved(norm2(A)))
    return report
