"""Spectrum-preserving compression of nonnegative matrices."""

from .cone import ConeInstance, ReductionResult, caratheodory_reduce, reduce_rank_one_sum
from .compression import (
    CompressionReport,
    FactoredForm,
    collapse,
    compress,
    factor_full_rank_core,
    find_principal_core,
    size_bound,
)
from .errors import (
    GenerationError,
    InputError,
    NegativeEntryError,
    NNCompressError,
    NumericalFailure,
    RankHypothesisViolated,
    SearchExhausted,
    UnsupportedSize,
)
from .linalg import (
    Tolerance,
    char_poly_coeffs,
    eigenvalues,
    rank,
    rank_power_sequence,
    solve_right_factor,
)
from .verification import (
    JordanSignature,
    Verdict,
    is_diagonalizable,
    is_nonnegative,
    jordan_equiv_mod_zeros,
    jordan_signature,
    nonzero_spectrum,
    spectra_match,
    verify,
)

__version__ = "0.1.0"
