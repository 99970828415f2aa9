"""Constructive Caratheodory reduction for finitely generated convex cones."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalFailure
from .linalg import DEFAULT_TOL, EPS, Tolerance, _svdvals, nullspace, rank


@dataclass
class ConeInstance:
    """Generators ``g_i`` (rows of ``generators``) with coefficients ``c_i >= 0``."""

    generators: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.generators, dtype=np.float64)
        if g.ndim == 1:
            g = g.reshape(len(g), -1) if len(g) else g.reshape(0, 0)
        c = np.asarray(self.coeffs, dtype=np.float64).ravel()
        if g.ndim != 2:
            raise InputError("generators must be a 2-d array with one generator per row")
        if g.shape[0] != c.size:
            raise InputError(f"{g.shape[0]} generators but {c.size} coefficients")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(c))):
            raise InputError("cone instance has non-finite entries")
        if np.any(c < 0):
            raise InputError("cone coefficients must be nonnegative")
        self.generators = g
        self.coeffs = c

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @property
    def target(self) -> np.ndarray:
        return self.coeffs @ self.generators


@dataclass
class ReductionResult:
    active_indices: list[int]
    new_coeffs: np.ndarray
    residual: float
    pivots: int = 0
    active_history: list[int] = field(default_factory=list)
    #: smallest ``min(alpha) / max(alpha)`` right after any pivot update, before dropping
    min_coeff_ratio: float = 0.0

    def reconstruct(self, generators) -> np.ndarray:
        g = np.asarray(generators, dtype=np.float64)
        if not self.active_indices:
            return np.zeros(g.shape[1])
        return self.new_coeffs @ g[self.active_indices]


def _dependence_vector(G: np.ndarray, atol: float) -> np.ndarray | None:
    """First null-space vector of the columns of ``G``, first nonzero entry positive."""
    N = nullspace(G, atol)
    if N.shape[1] == 0:
        return None
    c = N[:, 0].real.copy()
    big = np.abs(c) > 1e-12 * np.abs(c).max()
    if c[np.argmax(big)] < 0:
        c = -c
    return c


def caratheodory_reduce(inst: ConeInstance, tol: Tolerance = DEFAULT_TOL) -> ReductionResult:
    """Rewrite ``sum c_i g_i`` over a linearly independent subset of generators.

    Repeatedly takes a dependence ``sum d_i g_i = 0`` among the active
    generators, moves along it by ``theta = min{c_i / d_i : d_i > 0}`` and drops
    every coefficient that vanishes.  Each step removes at least one
    generator; the result has at most ``dim`` generators with positive
    coefficients.
    """
    g, coeffs = inst.generators, inst.coeffs
    p = len(coeffs)
    target = inst.target
    active = [i for i in range(p) if coeffs[i] > 0]
    alpha = coeffs[active].copy()
    drop_tol = max(p, 1) * EPS

    history = [len(active)]
    pivots = 0
    min_seen = 0.0
    while active:
        G = g[active].T
        smax = _svdvals(G)[0] if G.size else 0.0
        if smax == 0.0:
            # every active generator is zero; the target is the origin
            active, alpha = [], alpha[:0]
            pivots += 1
            history.append(0)
            break
        atol = tol.rank_rtol(G.shape) * smax
        if len(active) <= G.shape[0] and rank(G, tol) == len(active):
            break
        d = _dependence_vector(G, atol)
        if d is None:
            break
        pos = d > 0
        theta = np.min(alpha[pos] / d[pos])
        hit = np.flatnonzero(pos)[np.argmin(alpha[pos] / d[pos])]
        alpha = alpha - theta * d
        alpha[hit] = 0.0
        if alpha.max() > 0:
            min_seen = min(min_seen, float(alpha.min() / alpha.max()))
        keep = alpha > drop_tol * alpha.max() if alpha.max() > 0 else np.zeros_like(alpha, dtype=bool)
        active = [a for a, k in zip(active, keep) if k]
        alpha = alpha[keep]
        pivots += 1
        history.append(len(active))

    if pivots and active:
        alpha = _polish(g[active], alpha, target)
    recon = alpha @ g[active] if active else np.zeros(g.shape[1])
    residual = float(np.linalg.norm(recon - target))
    return ReductionResult(list(active), alpha, residual, pivots, history, min_seen)


def _polish(G: np.ndarray, alpha: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Re-solve for the coefficients on the final independent set if that helps."""
    sol, *_ = np.linalg.lstsq(G.T, target, rcond=None)
    if np.all(sol > 0) and np.linalg.norm(sol @ G - target) <= np.linalg.norm(alpha @ G - target):
        return sol
    return alpha


def reduce_rank_one_sum(qs, vs, tol: Tolerance = DEFAULT_TOL) -> ReductionResult:
    """Caratheodory reduction of ``sum_j q_j v_j^T`` over the rank-one terms.

    The terms all lie in ``{M : M x = 0 for x orthogonal to span(v_j)}``, of
    dimension ``len(q) * rank(V)``, which bounds the number of active terms.
    """
    qs = np.asarray(qs, dtype=np.float64)
    vs = np.asarray(vs, dtype=np.float64)
    if qs.ndim != 2 or vs.ndim != 2 or qs.shape[0] != vs.shape[0]:
        raise InputError("qs and vs must be 2-d with the same number of rows")
    flat = np.einsum("ji,jk->jik", qs, vs).reshape(qs.shape[0], -1)
    result = caratheodory_reduce(ConeInstance(flat, np.ones(qs.shape[0])), tol)
    bound = qs.shape[1] * rank(vs, tol) if vs.size else 0
    if len(result.active_indices) > max(bound, 0):
        raise NumericalFailure(
            f"{len(result.active_indices)} active terms exceed the dimension bound {bound}"
        )
    return result
