"""Checks that a compressed matrix keeps the nonzero spectrum and Jordan structure."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    cluster_values,
    eigenvalues,
    norm2,
    rank_power_sequence,
)


@dataclass
class Verdict:
    spectra_match: bool
    jordan_match_mod_zeros: bool
    nonneg: bool
    details: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.spectra_match and self.jordan_match_mod_zeros and self.nonneg

    def to_dict(self) -> dict:
        return {
            "spectra_match": bool(self.spectra_match),
            "jordan_match_mod_zeros": bool(self.jordan_match_mod_zeros),
            "nonneg": bool(self.nonneg),
            "details": list(self.details),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        return cls(
            bool(d["spectra_match"]),
            bool(d["jordan_match_mod_zeros"]),
            bool(d["nonneg"]),
            list(d.get("details", [])),
        )


@dataclass
class JordanSignature:
    """Rank sequences ``rank((M - lam I)^j)`` per distinct eigenvalue.

    Each sequence is listed up to stabilization with ``r_0 = order`` implied.
    """

    eigen_groups: list[tuple[complex, list[int]]]
    order: int

    def block_sizes(self) -> dict[complex, list[int]]:
        """Jordan block sizes (descending) per eigenvalue."""
        out = {}
        for lam, seq in self.eigen_groups:
            r = [self.order] + list(seq)
            at_least = [r[j - 1] - r[j] for j in range(1, len(r))]
            at_least.append(0)
            sizes = []
            for j in range(len(at_least) - 1):
                exactly = at_least[j] - at_least[j + 1]
                sizes.extend([j + 1] * exactly)
            out[lam] = sorted(sizes, reverse=True)
        return out


def _scale(*Ms) -> float:
    return max((norm2(M) for M in Ms), default=0.0)


def nonzero_spectrum(M, tol: Tolerance = DEFAULT_TOL, details: list[str] | None = None) -> np.ndarray:
    """Eigenvalues with modulus above ``zero_tol``.

    Eigenvalues within a factor of 10 of the cutoff are reported in
    ``details`` (when given) since their classification is fragile.
    """
    M = as_matrix(M, square=True)
    w = eigenvalues(M)
    cutoff = tol.zero_abs(norm2(M))
    mags = np.abs(w)
    if details is not None:
        near = mags[(mags > cutoff / 10) & (mags <= cutoff * 10)]
        if near.size:
            details.append(
                f"boundary warning: {near.size} eigenvalue(s) with modulus within 10x of zero_tol={cutoff:.3e}"
            )
    return w[mags > cutoff]


def spectra_match(s1, s2, tol: Tolerance = DEFAULT_TOL, scale: float = 0.0) -> bool:
    """Whether a perfect matching pairs ``s1`` with ``s2`` within ``match_tol``.

    Greedy nearest neighbour first; if that leaves an element unmatched an
    exact bipartite matching on the within-radius graph decides.
    """
    s1 = np.asarray(s1, dtype=complex).ravel()
    s2 = np.asarray(s2, dtype=complex).ravel()
    if s1.size != s2.size:
        return False
    if s1.size == 0:
        return True
    radius = tol.match_abs(scale)
    dist = np.abs(s1[:, None] - s2[None, :])
    free = np.ones(s2.size, dtype=bool)
    greedy_ok = True
    for i in np.argsort(np.min(dist, axis=1)):
        cand = np.where(free, dist[i], np.inf)
        j = int(np.argmin(cand))
        if cand[j] > radius:
            greedy_ok = False
            break
        free[j] = False
    if greedy_ok:
        return True
    match = maximum_bipartite_matching(csr_matrix(dist <= radius), perm_type="column")
    return bool(np.all(match >= 0))


def _distinct_nonzero(w: np.ndarray, radius: float):
    return [(lam, len(idx)) for lam, idx in cluster_values(w, radius)]


def jordan_signature(M, tol: Tolerance = DEFAULT_TOL) -> JordanSignature:
    M = as_matrix(M, square=True)
    n = M.shape[0]
    w = eigenvalues(M)
    radius = tol.match_abs(norm2(M))
    cutoff = tol.zero_abs(norm2(M))
    groups = []
    for lam, mult in _distinct_nonzero(w, radius):
        if abs(lam) <= cutoff:
            lam = 0j
        seq = rank_power_sequence(M, lam, mult + 1, tol)
        while len(seq) > 1 and seq[-1] == seq[-2]:
            seq.pop()
        groups.append((lam, seq))
    return JordanSignature(groups, n)


def jordan_equiv_mod_zeros(A, B, tol: Tolerance = DEFAULT_TOL, details: list[str] | None = None) -> bool:
    """Whether ``J(A) = J(B) (+) 0_s`` with ``s = order(A) - order(B)``.

    Checked through rank sequences only: matching nonzero spectra,
    ``rank(A^j) = rank(B^j)`` for ``j <= order(B) + 1``, and shifted rank
    sequences offset by ``s`` at every distinct nonzero eigenvalue.
    """
    A = as_matrix(A, square=True, name="A")
    B = as_matrix(B, square=True, name="B")
    notes = details if details is not None else []
    nA, nB = A.shape[0], B.shape[0]
    if nA < nB:
        notes.append(f"order(A)={nA} < order(B)={nB}")
        return False
    s = nA - nB
    scale = _scale(A, B)
    tol = tol.resolved(scale)
    sA = nonzero_spectrum(A, tol, notes)
    sB = nonzero_spectrum(B, tol, notes)
    if not spectra_match(sA, sB, tol, scale):
        notes.append("nonzero spectra differ")
        return False

    jmax = nB + 1
    rA = rank_power_sequence(A, 0.0, jmax, tol)
    rB = rank_power_sequence(B, 0.0, jmax, tol) if nB else [0] * jmax
    if rA != rB:
        notes.append(f"rank(A^j)={rA} but rank(B^j)={rB}")
        return False

    radius = tol.match_abs(scale)
    for lam, mult in _distinct_nonzero(sA, radius):
        seqA = rank_power_sequence(A, lam, mult + 1, tol)
        seqB = rank_power_sequence(B, lam, mult + 1, tol)
        if [r - s for r in seqA] != seqB:
            notes.append(f"at eigenvalue {lam:.6g}: rank sequence {seqA} (offset {s}) vs {seqB}")
            return False
    return True


def is_diagonalizable(M, tol: Tolerance = DEFAULT_TOL, details: list[str] | None = None) -> bool:
    """Rank equals the nonzero-eigenvalue count and every nonzero eigenvalue is semisimple."""
    M = as_matrix(M, square=True)
    n = M.shape[0]
    if n == 0:
        return True
    nz = nonzero_spectrum(M, tol, details)
    if rank_power_sequence(M, 0.0, 1, tol)[0] != nz.size:
        return False
    for lam, mult in _distinct_nonzero(nz, tol.match_abs(norm2(M))):
        if rank_power_sequence(M, lam, 1, tol)[0] != n - mult:
            return False
    return True


def is_nonnegative(M) -> bool:
    """Every entry ``>= 0`` exactly."""
    return bool(np.all(np.asarray(M) >= 0))


def verify(A, B, tol: Tolerance = DEFAULT_TOL) -> Verdict:
    """Full comparison of an original matrix ``A`` against its compression ``B``."""
    A = as_matrix(A, square=True, name="A")
    B = as_matrix(B, square=True, name="B")
    details: list[str] = []
    scale = _scale(A, B)
    tol = tol.resolved(scale)
    spec_ok = spectra_match(nonzero_spectrum(A, tol, details), nonzero_spectrum(B, tol, details), tol, scale)
    jordan_ok = spec_ok and jordan_equiv_mod_zeros(A, B, tol, details)
    if not spec_ok:
        details.append("nonzero spectra differ")
    nonneg = is_nonnegative(B)
    if not nonneg:
        details.append("output has negative entries")
    return Verdict(spec_ok, jordan_ok, nonneg, details)
