"""Dense real linear algebra with explicit tolerance semantics.

Matrices are plain ``numpy.ndarray`` objects of dtype float64; multisets of
eigenvalues are 1-d complex arrays with repeated entries for multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import pdist

from .errors import InputError, NumericalFailure, RankHypothesisViolated, UnsupportedSize

EPS = float(np.finfo(np.float64).eps)

#: relative rank cutoff used for shifted matrices when the caller keeps the default;
#: computed eigenvalue shifts are only accurate to roughly this level
SHIFTED_RANK_RTOL = 1e-10

#: order cap of the trace-recursion characteristic polynomial
CHAR_POLY_MAX_ORDER = 64


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    ``None`` selects the documented default for each field:

    * ``rank_tol`` -- relative singular-value cutoff, default
      ``max(rows, cols) * eps``.
    * ``zero_tol`` -- absolute cutoff below which an eigenvalue counts as zero,
      default ``1e-8 * (1 + ||M||_2)``.
    * ``match_tol`` -- absolute radius for pairing eigenvalues, default
      ``1e-8 * (1 + ||M||_2)``.
    """

    rank_tol: float | None = None
    zero_tol: float | None = None
    match_tol: float | None = None

    def __post_init__(self):
        for name in ("rank_tol", "zero_tol", "match_tol"):
            value = getattr(self, name)
            if value is not None and not (value >= 0 and math.isfinite(value)):
                raise InputError(f"{name} must be a finite nonnegative number, got {value!r}")

    def rank_rtol(self, shape) -> float:
        if self.rank_tol is not None:
            return self.rank_tol
        return max(max(shape, default=1), 1) * EPS

    def zero_abs(self, scale: float) -> float:
        if self.zero_tol is not None:
            return self.zero_tol
        return 1e-8 * (1.0 + scale)

    def match_abs(self, scale: float) -> float:
        if self.match_tol is not None:
            return self.match_tol
        return 1e-8 * (1.0 + scale)

    def resolved(self, scale: float) -> "Tolerance":
        """Fix the absolute thresholds at ``scale`` so several matrices share them."""
        return Tolerance(self.rank_tol, self.zero_abs(scale), self.match_abs(scale))


DEFAULT_TOL = Tolerance()


def as_matrix(M, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a 2-d float64 array."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise InputError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


def norm2(M) -> float:
    """Spectral norm; 0 for empty matrices."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(_svdvals(M)[0])


def _svdvals(M) -> np.ndarray:
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"singular value decomposition failed: {exc}") from exc


def rank(M, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank: singular values above ``rank_tol * sigma_max``."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = _svdvals(M)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rtol(M.shape) * s[0]))


def nullspace(M, atol: float) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space of ``M``.

    Singular values ``<= atol`` are treated as zero.
    """
    M = np.asarray(M)
    n = M.shape[1]
    if M.shape[0] == 0 or n == 0:
        return np.eye(n, dtype=M.dtype)
    try:
        _, s, vh = np.linalg.svd(M, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"singular value decomposition failed: {exc}") from exc
    r = int(np.count_nonzero(s > atol))
    return vh[r:].conj().T


def solve_right_factor(A11, A12, tol: Tolerance = DEFAULT_TOL):
    """Minimum-norm least-squares ``Q`` with ``A11 @ Q ~= A12``.

    Returns ``(Q, residual)`` where ``residual`` is the spectral norm of
    ``A11 @ Q - A12``.  Raises :class:`RankHypothesisViolated` when the
    residual exceeds ``10 * rank_tol * (||A12|| + ||A11|| ||Q||)``, i.e. when
    the columns of ``A12`` are not in the column space of ``A11``.
    """
    A11 = as_matrix(A11, square=True, name="A11")
    A12 = as_matrix(A12, name="A12")
    m = A11.shape[0]
    if A12.shape[0] != m:
        raise InputError(f"A12 must have {m} rows, got {A12.shape[0]}")
    if m == 0 or A12.shape[1] == 0:
        return np.zeros((m, A12.shape[1])), 0.0
    try:
        u, s, vh = np.linalg.svd(A11)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"singular value decomposition failed: {exc}") from exc
    rtol = tol.rank_rtol((m, m + A12.shape[1]))
    keep = s > rtol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    Q = vh[keep].T @ ((u[:, keep].T @ A12) / s[keep][:, None])
    residual = norm2(A11 @ Q - A12)
    threshold = 10.0 * rtol * (norm2(A12) + (s[0] if s.size else 0.0) * norm2(Q))
    if residual > threshold:
        raise RankHypothesisViolated(
            f"A12 is not in the column space of A11: residual {residual:.3e} > {threshold:.3e}"
        )
    return Q, residual


def cluster_values(values, radius: float):
    """Single-linkage clusters of complex ``values`` at ``radius``.

    Returns a list of ``(mean, member_indices)`` ordered by first member.
    """
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return []
    if values.size == 1:
        return [(complex(values[0]), np.array([0]))]
    pts = np.column_stack([values.real, values.imag])
    labels = fcluster(linkage(pdist(pts), method="single"), t=radius, criterion="distance")
    clusters = []
    for lab in dict.fromkeys(labels):
        idx = np.flatnonzero(labels == lab)
        clusters.append((complex(values[idx].mean()), idx))
    return clusters


def eigenvalue_cluster_radius(scale: float) -> float:
    """Radius within which computed eigenvalues are treated as one multiple eigenvalue."""
    return 10.0 * math.sqrt(EPS) * (1.0 + scale)


def eigenvalues(M, average_clusters: bool = True) -> np.ndarray:
    """All eigenvalues of a square real matrix, with multiplicity.

    A defective eigenvalue of multiplicity ``p`` is computed with an error of
    order ``eps**(1/p)``, while the mean of its perturbed copies is accurate to
    order ``eps``.  With ``average_clusters`` each group of computed values
    that approximates one multiple eigenvalue (see :func:`_defective_clusters`)
    is replaced by copies of its mean.
    The result is sorted and closed under conjugation.
    """
    M = as_matrix(M, square=True)
    if M.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        w = np.linalg.eigvals(M).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration did not converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise NumericalFailure("eigenvalue computation produced non-finite values")
    if average_clusters:
        scale = norm2(M)
        radius = eigenvalue_cluster_radius(scale)
        out = np.empty_like(w)
        for mean, idx in _defective_clusters(M, w, scale):
            if abs(mean.imag) < radius / 2:
                mean = complex(mean.real, 0.0)
            out[idx] = mean
        w = out
    return np.sort_complex(w)


def _defective_clusters(M, w, scale):
    """Partition computed eigenvalues into groups that approximate one eigenvalue.

    Walks the single-linkage tree from the root.  A node joined at height
    ``h`` with ``p`` members is kept whole when ``h`` is within the tight
    radius of :func:`eigenvalue_cluster_radius`, or when ``h`` is within
    ``10 * eps**(1/p) * (1 + ||M||)`` (the scatter of a size-``p`` Jordan
    block) and ``(M - mu I)^p`` numerically has a ``p``-dimensional kernel at
    the node mean ``mu``.  Otherwise both children are examined.
    """
    n = w.size
    if n == 1:
        return [(complex(w[0]), np.array([0]))]
    tight = eigenvalue_cluster_radius(scale)
    Z = linkage(pdist(np.column_stack([w.real, w.imag])), method="single")
    members = {i: [i] for i in range(n)}
    for i, row in enumerate(Z):
        members[n + i] = members[int(row[0])] + members[int(row[1])]

    out = []
    stack = [2 * n - 2]
    while stack:
        node = stack.pop()
        idx = members[node]
        if node < n:
            out.append((complex(w[node]), np.array(idx)))
            continue
        height = Z[node - n, 2]
        p = len(idx)
        mu = complex(w[idx].mean())
        keep = height <= tight
        if not keep and height <= 10.0 * EPS ** (1.0 / p) * (1.0 + scale):
            keep = n - rank_power_sequence(M, mu, p)[-1] >= p
        if keep:
            out.append((mu, np.array(sorted(idx))))
        else:
            stack.extend([int(Z[node - n, 0]), int(Z[node - n, 1])])
    return out


def rank_power_sequence(M, shift: complex, j_max: int, tol: Tolerance = DEFAULT_TOL) -> list[int]:
    """``[rank((M - shift I)^j) for j in 1..j_max]``.

    Computed with the nullspace staircase ``ker B^j = ker((I - W W^H) B)``,
    ``W`` an orthonormal basis of ``ker B^(j-1)``, so no matrix power is formed
    and every rank decision is made on a matrix of norm ``<= ||B||``.
    """
    M = as_matrix(M, square=True)
    if j_max < 1:
        raise InputError("j_max must be >= 1")
    n = M.shape[0]
    shift = complex(shift)
    if shift.imag == 0.0:
        B = M - shift.real * np.eye(n)
    else:
        B = M - shift * np.eye(n)
    if n == 0:
        return [0] * j_max
    smax = _svdvals(B)[0]
    if tol.rank_tol is None and shift != 0:
        rtol = max(tol.rank_rtol(B.shape), SHIFTED_RANK_RTOL)
    else:
        rtol = tol.rank_rtol(B.shape)
    # rounding in M - shift I is relative to ||M|| and |shift|, not to ||B||
    atol = rtol * max(smax, norm2(M), abs(shift))
    if smax <= atol:
        return [0] * j_max
    atol_cap = max(atol, SHIFTED_RANK_RTOL * smax)

    seq: list[int] = []
    W = np.zeros((n, 0), dtype=B.dtype)
    for _ in range(j_max):
        P = B - W @ (W.conj().T @ B)
        W_next = nullspace(P, atol)
        seq.append(n - W_next.shape[1])
        if W_next.shape[1] == W.shape[1]:
            break
        W = W_next
        # the kernel basis is accurate to about atol / gap, and the next
        # projected matrix inherits that error scaled by ||B||
        sP = _svdvals(P)
        kept = sP[sP > atol]
        if kept.size:
            atol = min(atol * (1.0 + smax / kept[-1]), atol_cap)
    seq.extend([seq[-1]] * (j_max - len(seq)))
    return seq


def char_poly_coeffs(M, max_order: int = CHAR_POLY_MAX_ORDER) -> np.ndarray:
    """Coefficients ``(1, p_1, ..., p_n)`` of ``det(xI - M)`` by trace recursion.

    Faddeev-LeVerrier: ``N_k = M N_(k-1) + p_(k-1) I``, ``p_k = -tr(M N_k) / k``.
    Independent of any eigenvalue computation; loses accuracy as the order
    grows, hence ``max_order``.
    """
    M = as_matrix(M, square=True)
    n = M.shape[0]
    if n > max_order:
        raise UnsupportedSize(f"order {n} exceeds the characteristic polynomial cap {max_order}")
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    N = np.zeros_like(M)
    eye = np.eye(n)
    for k in range(1, n + 1):
        N = M @ N + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(M @ N) / k
    return coeffs


def charpoly_nonzero_count(coeffs, scale: float, noise: float = 100 * EPS) -> int:
    """Index of the last significant coefficient, i.e. the number of nonzero roots.

    The recurrence computes ``p_j`` with an absolute error of order
    ``n * eps * (1 + scale)**j``; a coefficient counts as nonzero when it
    clears ``noise * n * (1 + scale)**j``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    n = coeffs.size - 1
    last = 0
    for j in range(1, coeffs.size):
        if abs(coeffs[j]) > noise * n * (1.0 + scale) ** j:
            last = j
    return last
