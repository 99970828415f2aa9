"""Test matrices: the five-by-five family A(t), gap witnesses, random generators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, InputError
from .linalg import norm2

#: smallest t for which (3+t, 3-t, -2, -2, -2) has a diagonalizable nonnegative realization
T1 = 1.0
#: smallest t for which the list is realizable at all; also where A(t) becomes nonnegative
T3 = math.sqrt(15.0 / (16.0 * math.sqrt(6.0) + 39.0))  # = sqrt(16 sqrt 6 - 39) without cancellation
#: smallest t with a realization whose minimal polynomial has degree 4; equals T3
T2 = T3

# Values quoted for the perturbed list (3+t, 3-t, -1.9, -2, -2.1).  Kept for
# reference only; they come from other constructions and are not recomputed here.
PERTURBED_LIST_THRESHOLD = math.sqrt(120.0 * math.sqrt(3166.0) - 3899.0) / 10.0  # ~0.435
SYMMETRIC_NECESSARY_T = 0.9


def sigma_t(t: float) -> np.ndarray:
    """The list ``(3+t, 3-t, -2, -2, -2)`` as a complex array."""
    return np.array([3.0 + t, 3.0 - t, -2.0, -2.0, -2.0], dtype=complex)


def paper_matrix(t: float) -> np.ndarray:
    """The 5x5 matrix A(t) with spectrum ``sigma_t(t)``, built from closed forms."""
    t = float(t)
    t2 = t * t
    s = t2 + 7.0
    c = 256.0 / s - 32.0
    off = math.sqrt(2.0 * t2 + 30.0) / 2.0
    # t^4 + 78 t^2 - 15 = (t - T3)(t + T3)(t^2 + 39 + 16 sqrt 6), exact sign near T3
    a43 = (t - T3) * (t + T3) * (t2 + 39.0 + 16.0 * math.sqrt(6.0)) / (2.0 * s)
    a53 = 2.0 * math.sqrt(2.0) * (3.0 * t2 * t2 + 58.0 * t2 + 3.0) / (s * math.sqrt(t2 + 15.0))
    return np.array(
        [
            [0.0, 2.0, 0.5, 0.0, 0.0],
            [2.0, 0.0, 0.5, 0.0, 0.0],
            [c, c, 0.0, 1.0, 0.0],
            [0.0, 0.0, a43, 0.0, off],
            [0.0, 0.0, a53, off, 0.0],
        ]
    )


@dataclass(frozen=True)
class ParamInstance:
    t: float
    matrix: np.ndarray
    spectrum: np.ndarray


def paper_matrix_at(t: float) -> ParamInstance:
    return ParamInstance(float(t), paper_matrix(t), sigma_t(t))


def example_gap_matrix(k: int, l: int, d) -> np.ndarray:
    """``diag(d) (+) [[0, I], [0, 0]]``: order ``2k-l``, rank ``k``, ``l`` nonzero eigenvalues.

    No proper principal submatrix has rank ``k``.
    """
    d = np.asarray(d, dtype=np.float64).ravel()
    if not (1 <= l <= k):
        raise InputError(f"need 1 <= l <= k, got k={k}, l={l}")
    if d.size != l:
        raise InputError(f"expected {l} diagonal values, got {d.size}")
    if np.any(d == 0) or not np.all(np.isfinite(d)):
        raise InputError("diagonal values must be finite and nonzero")
    j = k - l
    n = 2 * k - l
    A = np.zeros((n, n))
    A[:l, :l] = np.diag(d)
    A[l : l + j, l + j :] = np.eye(j)
    return A


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    k: int
    seed: int = 0
    entry_scale: float = 1.0

    def __post_init__(self):
        if not (1 <= self.k <= self.n):
            raise InputError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if not (self.entry_scale > 0 and math.isfinite(self.entry_scale)):
            raise InputError("entry_scale must be positive")


def random_low_rank_nonneg(spec: GeneratorSpec, max_tries: int = 100) -> np.ndarray:
    """Diagonalizable nonnegative ``U @ V`` of rank ``k`` with ``k`` nonzero eigenvalues.

    ``U`` (n x k) and ``V`` (k x n) are uniform on ``[0, entry_scale]``.  A draw is
    accepted when the eigenvalues of ``V @ U`` are pairwise more than
    ``1e-6 * entry_scale**2`` apart and all nonzero, which makes ``U @ V``
    diagonalizable with the same nonzero spectrum.
    """
    rng = np.random.default_rng(spec.seed)
    sep = 1e-6 * spec.entry_scale**2
    for _ in range(max_tries):
        U = rng.uniform(0.0, spec.entry_scale, size=(spec.n, spec.k))
        V = rng.uniform(0.0, spec.entry_scale, size=(spec.k, spec.n))
        small = V @ U
        w = np.linalg.eigvals(small)
        zero_tol = 1e-8 * (1.0 + norm2(small))
        if np.any(np.abs(w) <= zero_tol):
            continue
        gaps = np.abs(w[:, None] - w[None, :]) + np.diag(np.full(spec.k, np.inf))
        if spec.k > 1 and gaps.min() <= sep:
            continue
        return U @ V
    raise GenerationError(f"no admissible draw in {max_tries} attempts for {spec}")


def random_planted_nilpotent(n: int, k: int, l: int, seed: int = 0) -> np.ndarray:
    """Nonnegative matrix of order ``n``, rank ``k``, ``l`` nonzero eigenvalues.

    The structure is planted in the order ``2k-l`` matrix
    ``B = [[D, X], [0, N]]`` with ``D`` positive ``l x l``, ``N = [[0, Y], [0, 0]]``
    nilpotent with ``k-l`` Jordan blocks of size 2 at zero.  ``B`` is spread to
    order ``n`` as ``A = E B F`` where ``E`` assigns each index to a group and
    ``F`` holds positive weights summing to one over each group, so ``F E = I``
    and ``J(A) = J(B) (+) 0``.  Indices are then shuffled.
    """
    if not (0 <= l <= k) or 2 * k - l > n or k < 1:
        raise InputError(f"need 0 <= l <= k, k >= 1 and 2k-l <= n, got n={n}, k={k}, l={l}")
    rng = np.random.default_rng(seed)
    j = k - l
    b = 2 * k - l
    for _ in range(100):
        B = np.zeros((b, b))
        B[:l, :l] = rng.uniform(0.5, 1.5, size=(l, l))
        B[:l, l:] = rng.uniform(0.0, 1.0, size=(l, b - l))
        B[l : l + j, l + j :] = rng.uniform(0.5, 1.5, size=(j, j))
        w = np.linalg.eigvals(B[:l, :l]) if l else np.zeros(0)
        if l and np.min(np.abs(w)) < 1e-3:
            continue
        if j and np.min(np.abs(np.linalg.eigvals(B[l : l + j, l + j :]))) < 1e-3:
            continue
        break
    else:
        raise GenerationError("could not draw a well-conditioned planted core")
    groups = np.concatenate([np.arange(b), rng.integers(0, b, size=n - b)])
    rng.shuffle(groups)
    E = np.zeros((n, b))
    E[np.arange(n), groups] = 1.0
    F = np.zeros((b, n))
    weights = rng.uniform(0.5, 1.5, size=n)
    for g in range(b):
        members = groups == g
        F[g, members] = weights[members] / weights[members].sum()
    A = E @ B @ F
    A[A < 0] = 0.0
    return A


def planted_jordan_matrix(blocks, seed: int = 0, cond_scale: float = 0.3) -> np.ndarray:
    """Real matrix ``S J S^-1`` with a prescribed real Jordan structure.

    ``blocks`` is a sequence of ``(eigenvalue, size)`` pairs with real
    eigenvalues.  ``S = I + cond_scale * G`` with ``G`` Gaussian scaled to spectral
    norm at most one, so ``S`` stays well conditioned for ``cond_scale < 1``.
    """
    blocks = [(float(lam), int(size)) for lam, size in blocks]
    n = sum(size for _, size in blocks)
    J = np.zeros((n, n))
    pos = 0
    for lam, size in blocks:
        if size < 1:
            raise InputError("Jordan block sizes must be >= 1")
        J[pos : pos + size, pos : pos + size] = lam * np.eye(size) + np.eye(size, k=1)
        pos += size
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n))
    G /= max(norm2(G), 1.0)
    S = np.eye(n) + cond_scale * G
    return S @ J @ np.linalg.inv(S)
